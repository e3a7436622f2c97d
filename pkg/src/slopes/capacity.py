"""Integer-polynomial lattices on P^1 under disc capacity metrics.

Monomial Gram matrices under the L2 boundary metric of a rational disc are
exact rationals (only even powers of the radius appear), so minimal-norm
polynomials are exact SVP instances for the lattice engine.  Sup norms on
the boundary circle are certified by sampling plus a derivative bound.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from mpmath import mp, mpf

from .errors import DomainError, ZeroSeriesError
from .lattice import (
    GramForm,
    MinimaResult,
    ShortestResult,
    lll_reduce,
    shortest_vector,
    successive_minima,
)


@dataclass(frozen=True)
class DiscMetric:
    """Closed disc |z - center| <= r with r^2 = radius_sq (rational data).

    norm_kind 'l2-boundary' is the L2 norm against uniform dtheta/2pi on
    the boundary circle; 'sup' is the max modulus on the disc (equal to
    the boundary max).
    """

    center: Fraction
    radius_sq: Fraction
    norm_kind: str = "l2-boundary"

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        object.__setattr__(self, "radius_sq", Fraction(self.radius_sq))
        if self.radius_sq <= 0:
            raise DomainError("radius^2 must be positive")
        if self.norm_kind not in ("l2-boundary", "sup"):
            raise DomainError(f"unknown norm kind {self.norm_kind!r}")

    def radius(self) -> mpf:
        return mp.sqrt(mpf(self.radius_sq.numerator) / self.radius_sq.denominator)


UNIT_DISC = DiscMetric(Fraction(0), Fraction(1))
QUARTER_DISC = DiscMetric(Fraction(1, 4), Fraction(1, 16))
HALF_DISC = DiscMetric(Fraction(1, 2), Fraction(1, 4))


class IntPoly:
    """Primitive-normal-form integer polynomial in one variable.

    Stored with positive leading coefficient; the sign and content that
    were stripped are recorded.
    """

    __slots__ = ("coeffs", "content", "sign")

    def __init__(self, coeffs: Sequence[int], normalize: bool = True):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        if not c:
            raise ZeroSeriesError("IntPoly cannot be the zero polynomial")
        sign = 1
        cont = 0
        for x in c:
            cont = math.gcd(cont, x)
        if normalize:
            if c[-1] < 0:
                sign = -1
                c = [-x for x in c]
            if cont > 1:
                c = [x // cont for x in c]
        else:
            cont = 1
        self.coeffs = tuple(c)
        self.content = cont
        self.sign = sign

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __eq__(self, other):
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __mul__(self, other):
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out, normalize=False)

    def pretty(self, var="z") -> str:
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                parts.append(f"{c:+d}")
            elif i == 1:
                parts.append(f"{c:+d}*{var}")
            else:
                parts.append(f"{c:+d}*{var}^{i}")
        return " ".join(parts).lstrip("+")


@dataclass
class FactoredDivisor:
    """zer(f) as irreducible factors with multiplicities, plus leftovers."""

    factors: List[Tuple[IntPoly, int]]
    cofactor: Optional[IntPoly] = None  # unfactored remainder, flagged
    unit: int = 1
    content: int = 1

    def degree(self) -> int:
        d = sum(p.degree * m for p, m in self.factors)
        if self.cofactor is not None:
            d += self.cofactor.degree
        return d

    def reconstruct(self) -> IntPoly:
        acc = IntPoly([self.unit * self.content], normalize=False)
        for p, m in self.factors:
            for _ in range(m):
                acc = acc * p
        if self.cofactor is not None:
            acc = acc * self.cofactor
        return acc

    def multiplicity(self, p: IntPoly) -> int:
        for q, m in self.factors:
            if q == p:
                return m
        return 0


# ---------------------------------------------------------------------------
# Gram matrices and norms
# ---------------------------------------------------------------------------


def disc_gram(metric: DiscMetric, n: int) -> GramForm:
    """Exact Gram of 1, z, ..., z^n under (1/2pi) * contour integral on
    |z - c| = r.

    <z^a, z^b> = sum_i C(a,i) C(b,i) c^{a+b-2i} (r^2)^i: expanding in the
    (z-c) basis leaves only even radius powers, so the matrix is rational.
    """
    if n < 0:
        raise DomainError("degree must be nonnegative")
    c, r2 = metric.center, metric.radius_sq
    rows = []
    for a in range(n + 1):
        row = []
        for b in range(n + 1):
            s = Fraction(0)
            for i in range(min(a, b) + 1):
                s += math.comb(a, i) * math.comb(b, i) * c ** (a + b - 2 * i) * r2**i
            row.append(s)
        rows.append(row)
    return GramForm(rows)


def l2_boundary_norm_sq(p: IntPoly, metric: DiscMetric) -> Fraction:
    """Exact squared L2 boundary norm of an integer polynomial."""
    g = disc_gram(metric, p.degree)
    return g.norm_sq(list(p.coeffs)) * p.content**2


def sup_norm_poly(p: IntPoly, metric: DiscMetric, rel_tol=1e-9,
                  max_rounds: int = 60) -> Tuple[mpf, mpf]:
    """Certified enclosure (lo, hi) of max |p| on the boundary circle.

    By the maximum principle this is the sup over the closed disc.
    T(theta) = |p(c + r e^{i theta})|^2 is a trigonometric polynomial of
    degree D = 2 deg(p); at the maximum T' vanishes, so Bernstein's
    inequality ||T''|| <= D^2 ||T|| gives, for equispaced samples at
    spacing h with D h < 2,

        max T <= (sample max) / (1 - D^2 h^2 / 8).

    A coarse scan of [0, pi] (real coefficients make T even) localizes the
    maximizing windows; re-sampling the windows shrinks h quadratically,
    so ~1e-12 enclosures cost only a few thousand evaluations.
    """
    if p.degree == 0:
        v = mpf(abs(p.coeffs[0]) * p.content)
        return v, v
    nz = [i for i, c in enumerate(p.coeffs) if c]
    if len(nz) == 1:
        # monomial: |a| * max |z|^d; max of |z| on the circle is exact
        d = nz[0]
        c_abs = abs(mpf(metric.center.numerator) / metric.center.denominator)
        v = abs(p.coeffs[d]) * p.content * (c_abs + metric.radius()) ** d
        return v, v
    D = 2 * p.degree
    with mp.workprec(mp.prec + 40):
        c = mpf(metric.center.numerator) / metric.center.denominator
        r = metric.radius()

        def tval(th):
            z = mp.mpc(c + r * mp.cos(th), r * mp.sin(th))
            w = p(z)
            return mp.re(w) ** 2 + mp.im(w) ** 2

        def bern_factor(h):
            x = D * D * h * h / 8
            return None if x >= mpf("0.5") else 1 / (1 - x)

        # global scan of [0, pi]; real coefficients make T even in theta
        M = max(64, 4 * (D + 1))
        pi = mp.pi
        samples = [(pi * k / M, tval(pi * k / M)) for k in range(M + 1)]
        h = pi / M
        lo_sq = max(v for _, v in samples)
        hi_sq = lo_sq * bern_factor(h)
        budget = 400_000
        spent = len(samples)
        for _ in range(max_rounds):
            if hi_sq - lo_sq <= rel_tol * hi_sq or spent > budget:
                break
            fac = bern_factor(h)
            # samples whose Bernstein-lifted value could still beat lo_sq
            thresh = lo_sq / fac
            hot = [i for i, (_, v) in enumerate(samples) if v >= thresh]
            windows = []
            start = prev = hot[0]
            for i in hot[1:]:
                if i > prev + 1:
                    windows.append((start, prev))
                    start = i
                prev = i
            windows.append((start, prev))
            # refine each window so the spacing at least halves
            new_samples = []
            h_new = h / 2
            for a, b in windows:
                ta = samples[max(0, a - 1)][0]
                tb = samples[min(len(samples) - 1, b + 1)][0]
                K = max(16, int(mp.ceil((tb - ta) / (h / 2))))
                for k in range(K + 1):
                    th = ta + (tb - ta) * k / K
                    new_samples.append((th, tval(th)))
            spent += len(new_samples)
            in_max = max(v for _, v in new_samples)
            hotset = set(hot)
            out_vals = [v for i, (_, v) in enumerate(samples) if i not in hotset]
            out_hi = (max(out_vals) * fac) if out_vals else mpf(0)
            lo_sq = max(lo_sq, in_max)
            hi_sq = max(in_max * bern_factor(h_new), out_hi)
            samples = new_samples
            h = h_new
        # directed rounding slack for the mpf evaluations themselves
        slack = mpf(2) ** (-mp.prec + 12)
        lo = mp.sqrt(lo_sq) * (1 - slack) * p.content
        hi = mp.sqrt(hi_sq) * (1 + slack) * p.content
    return +lo, +hi


def _vector_to_poly(v) -> IntPoly:
    return IntPoly(list(v))


@dataclass
class MinPolyResult:
    poly: IntPoly
    norm_sq: Optional[Fraction]       # exact L2 boundary norm^2
    sup_enclosure: Optional[Tuple[mpf, mpf]]
    mode: str
    certified: bool


def min_poly(metric: DiscMetric, n: int, mode: str = "exact",
             exact_limit: int = 30) -> MinPolyResult:
    """Degree <= n nonzero integer polynomial of smallest norm.

    l2-boundary: exact SVP on the monomial Gram.  ``exact`` mode enumerates
    (certified) up to ``exact_limit``; ``heuristic`` mode takes the first
    vector of a delta=0.999 LLL reduction, whose exact norm is still
    reported exactly.  sup: seeded by the l2 minimizer and its LLL
    cohort, re-scored by certified sup-norm enclosures.
    """
    if n < 1:
        raise DomainError("need degree n >= 1")
    if mode not in ("exact", "heuristic"):
        raise DomainError(f"unknown mode {mode!r}")
    g = disc_gram(DiscMetric(metric.center, metric.radius_sq), n)
    if mode == "exact" and n <= exact_limit:
        res = shortest_vector(g, limit=max(64, n + 1))
        vec, certified = res.vector, res.certified
    else:
        red, U = lll_reduce(g, Fraction(999, 1000))
        best = min(range(n + 1), key=lambda i: red.entries[i][i])
        vec, certified = U[best], False
    poly = _vector_to_poly(vec)

    def padded(q):
        return list(q.coeffs) + [0] * (n + 1 - len(q.coeffs))

    nsq = g.norm_sq(padded(poly))
    if metric.norm_kind == "sup":
        # re-score the best of the LLL cohort under the sup norm
        red, U = lll_reduce(g, Fraction(999, 1000))
        order = sorted(range(n + 1), key=lambda i: red.entries[i][i])
        cands = {poly}
        for i in order[:8]:
            cands.add(_vector_to_poly(U[i]))
        scored = []
        for q in cands:
            lo, hi = sup_norm_poly(q, metric)
            scored.append((hi, lo, q))
        scored.sort(key=lambda t: (float(t[0]), t[2].coeffs))
        hi, lo, poly = scored[0]
        return MinPolyResult(poly, g.norm_sq(padded(poly)),
                             (lo, hi), mode, False)
    return MinPolyResult(poly, nsq, None, mode, certified)


def m_sequence(metric: DiscMetric, degrees: Sequence[int],
               mode: str = "heuristic") -> List[dict]:
    """Minimal sup norms m(n, E) per degree with n-th roots.

    m(n, E) is reported as the certified enclosure of the sup norm of the
    best candidate found: the l2-seeded minimizer, its LLL cohort, and
    products of previously found minimizers (the Fekete mechanism
    m(l+n) <= m(l) m(n) in candidate form).
    """
    if not list(degrees):
        raise DomainError("degrees list is empty")
    out = []
    found: List[Tuple[int, IntPoly]] = []
    for n in degrees:
        r = min_poly(DiscMetric(metric.center, metric.radius_sq, "sup"),
                     n, mode=mode)
        best = (r.sup_enclosure[1], r.sup_enclosure[0], r.poly)
        for i in range(len(found)):
            for j in range(i, len(found)):
                if found[i][0] + found[j][0] == n:
                    q = found[i][1] * found[j][1]
                    lo, hi = sup_norm_poly(IntPoly(list(q.coeffs)), metric)
                    if hi < best[0]:
                        best = (hi, lo, IntPoly(list(q.coeffs)))
        hi, lo, poly = best
        root = (mp.exp(mp.log(hi) / n), mp.exp(mp.log(lo) / n))
        found.append((n, poly))
        out.append({
            "degree": n,
            "poly": poly,
            "l2_norm_sq": l2_boundary_norm_sq(poly, metric),
            "sup_lo": lo,
            "sup_hi": hi,
            "root_hi": root[0],
            "root_lo": root[1],
        })
    return out


# ---------------------------------------------------------------------------
# factorization into irreducible divisors
# ---------------------------------------------------------------------------


def _poly_divmod_q(a: List[Fraction], b: List[Fraction]):
    a = a[:]
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) < len(b):
            break
        f = a[-1] / b[-1]
        q[len(a) - len(b)] = f
        for i in range(len(b)):
            a[len(a) - len(b) + i] -= f * b[i]
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return q, a


def _poly_gcd_q(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a, b = a[:], b[:]
    while any(b):
        _, r = _poly_divmod_q(a, b)
        a, b = b, r
    if not any(a):
        return a
    lead = a[-1]
    return [x / lead for x in a]


def _to_q(p: IntPoly) -> List[Fraction]:
    return [Fraction(c) for c in p.coeffs]


def _q_to_int(p: List[Fraction]) -> IntPoly:
    den = 1
    for x in p:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return IntPoly([int(x * den) for x in p])


def _squarefree_decomposition(p: IntPoly) -> List[Tuple[IntPoly, int]]:
    """Yun's algorithm over Q: [(squarefree part, multiplicity), ...]."""
    a = _to_q(p)
    if len(a) <= 1:
        return []
    da = [i * a[i] for i in range(1, len(a))]
    g = _poly_gcd_q(a, da)
    if len(g) <= 1:
        return [(IntPoly(list(p.coeffs)), 1)]
    out = []
    b, _ = _poly_divmod_q(a, g)
    c, _ = _poly_divmod_q(da, g)
    i = 1
    while len(b) > 1:
        db = [k * b[k] for k in range(1, len(b))]
        d = [ci - (db[j] if j < len(db) else Fraction(0))
             for j, ci in enumerate(c)]
        while d and d[-1] == 0:
            d.pop()
        if not any(d):
            out.append((_q_to_int(b), i))
            break
        pi = _poly_gcd_q(b, d)
        if len(pi) > 1:
            out.append((_q_to_int(pi), i))
        b, _ = _poly_divmod_q(b, pi)
        c, _ = _poly_divmod_q(d, pi)
        i += 1
    return out


def _divisors(m: int) -> List[int]:
    ds = set()
    for d in range(1, int(math.isqrt(m)) + 1):
        if m % d == 0:
            ds.add(d)
            ds.add(m // d)
    return sorted(ds)


def _rational_root_factors(p: IntPoly) -> List[IntPoly]:
    """Candidate linear factors (q z - p0) from the rational root theorem."""
    c = list(p.coeffs)
    out = []
    if c[0] == 0:
        out.append(IntPoly([0, 1]))
        while c and c[0] == 0:
            c = c[1:]
    if len(c) <= 1:
        return out
    a0, an = abs(c[0]), abs(c[-1])
    found = []
    for q in _divisors(an):
        for pp in _divisors(a0):
            if math.gcd(pp, q) != 1:
                continue
            for s in (1, -1):
                val = Fraction(0)
                for coef in reversed(c):
                    val = val * Fraction(s * pp, q) + coef
                if val == 0:
                    found.append(IntPoly([-s * pp, q]))
    return out + list(dict.fromkeys(found))


def _small_factors_from_roots(p: IntPoly, max_deg: int = 4) -> List[IntPoly]:
    """Verified factors of degree <= max_deg of a squarefree p.

    High-precision roots (mpmath) are grouped into conjugate-closed
    clusters; candidate integer factors are reconstructed by scaling with
    divisors of the leading coefficient and kept only when exact division
    succeeds.
    """
    import itertools

    deg = p.degree
    if deg < 1 or deg > 24:
        return []
    with mp.workdps(60):
        roots = mp.polyroots([mpf(x) for x in reversed(p.coeffs)],
                             maxsteps=200, extraprec=200)
        lead = abs(p.coeffs[-1])
        leaddivs = _divisors(lead) if lead < 10**6 else [1, lead]
        # conjugate-closed clusters: real roots alone, complex pairs together
        items = []
        used = [False] * len(roots)
        for i, r in enumerate(roots):
            if used[i]:
                continue
            if abs(mp.im(r)) < mpf("1e-30"):
                items.append([mp.re(r)])
                used[i] = True
            else:
                mate = None
                for j in range(i + 1, len(roots)):
                    if not used[j] and abs(roots[j] - mp.conj(r)) < mpf("1e-20"):
                        mate = j
                        break
                if mate is None:
                    items.append([r])
                    used[i] = True
                else:
                    items.append([r, roots[mate]])
                    used[i] = used[mate] = True
        if len(items) > 16:
            items = items[:16]
        cands = []
        for size in range(1, max_deg + 1):
            for combo in itertools.combinations(range(len(items)), size):
                cluster = [r for k in combo for r in items[k]]
                if len(cluster) > max_deg:
                    continue
                # expand prod (z - root), ascending coefficients
                coefs = [mp.mpc(1)]
                for root in cluster:
                    new = [mp.mpc(0)] * (len(coefs) + 1)
                    for t, ct in enumerate(coefs):
                        new[t + 1] += ct
                        new[t] -= root * ct
                    coefs = new
                for ld in leaddivs:
                    ints = []
                    ok = True
                    for x in coefs:
                        v = x * ld
                        iv = int(mp.nint(mp.re(v)))
                        if abs(mp.re(v) - iv) > mpf("1e-8") or abs(mp.im(v)) > mpf("1e-8"):
                            ok = False
                            break
                        ints.append(iv)
                    if ok and ints and ints[-1] != 0:
                        cands.append(IntPoly(ints))
                        break
    out = []
    for cand in dict.fromkeys(cands):
        if _exact_divide(p, cand) is not None:
            out.append(cand)
    return out


def _exact_divide(p: IntPoly, d: IntPoly) -> Optional[IntPoly]:
    q, r = _poly_divmod_q(_to_q(p), _to_q(d))
    if any(r) or not q:
        return None
    if any(x.denominator != 1 for x in q):
        # integral after clearing content? primitive d dividing primitive p
        # over Q implies divisibility over Z (Gauss), so reject
        return None
    return IntPoly([int(x) for x in q])


def _is_irreducible_smalldeg(p: IntPoly) -> bool:
    """Degree <= 4 irreducibility over Q (root + quadratic-split tests)."""
    d = p.degree
    if d == 1:
        return True
    if _rational_root_factors(p):
        return False
    if d in (2, 3):
        return True  # no rational root => irreducible for deg 2, 3
    if d == 4:
        return not _small_factors_from_roots(p, max_deg=2)
    return False


def factorize(p: IntPoly, pool: Sequence[IntPoly] = ()) -> FactoredDivisor:
    """Factor an integer polynomial against a pool plus small-degree discovery.

    Content extraction, then Yun squarefree decomposition, then trial
    division by the pool, then degree <= 4 factor discovery from numeric
    root clusters (verified by exact division).  Whatever remains goes to
    the flagged cofactor slot, never silently dropped.
    """
    content_val = p.content
    unit = p.sign
    work = IntPoly(list(p.coeffs))  # primitive, positive leading
    factors: dict = {}
    cofactor = None

    def divide_out(rest, dd, mult):
        while True:
            q = _exact_divide(rest, dd)
            if q is None:
                return rest
            factors[dd] = factors.get(dd, 0) + mult
            rest = q
            if rest.degree == 0:
                return rest

    for part, mult in _squarefree_decomposition(work):
        rest = part
        for d in pool:
            rest = divide_out(rest, d, mult)
            if rest.degree == 0:
                break
        if rest.degree > 0:
            for dd in _rational_root_factors(rest):
                rest = divide_out(rest, dd, mult)
        if rest.degree > 0:
            for dd in _small_factors_from_roots(rest):
                if _is_irreducible_smalldeg(dd):
                    rest = divide_out(rest, dd, mult)
        if rest.degree > 0:
            co = cofactor if cofactor is not None else IntPoly([1])
            for _ in range(mult):
                co = co * rest
            cofactor = co
    if cofactor is not None and cofactor.degree == 0:
        cofactor = None
    # deterministic order: by (degree, coeffs)
    items = sorted(factors.items(), key=lambda kv: (kv[0].degree, kv[0].coeffs))
    fd = FactoredDivisor(items, cofactor, unit, content_val)
    rec = fd.reconstruct()
    if IntPoly(list(rec.coeffs)) != work:
        raise AssertionError("factorization failed to reconstruct input")
    return fd


# ---------------------------------------------------------------------------
# Green's functions and cyclotomic angle sets
# ---------------------------------------------------------------------------


def green_disc(z, metric: DiscMetric):
    """Archimedean Green's function of the disc with pole at infinity:
    ln(|z - c| / r) outside the closed disc, 0 on it."""
    c = mpf(metric.center.numerator) / metric.center.denominator
    r = metric.radius()
    zz = mp.mpc(z)
    d = abs(zz - c)
    if d <= r:
        return mpf(0)
    return mp.log(d / r)


def capacity_weight(z, metric: DiscMetric, n: int):
    """Metric weight |1|(z) = e^{-n G(z)} for O(n) under the Green's metric."""
    return mp.exp(-n * green_disc(z, metric))


def cyclotomic_angles(m: int) -> List[float]:
    """Arguments of the primitive 2^m-th roots of unity, in (-pi, pi]."""
    if m < 1:
        raise DomainError("need m >= 1")
    if m == 1:
        return [math.pi]  # primitive square root: -1
    k = 2**m
    out = []
    for j in range(1, k, 2):
        a = 2 * math.pi * j / k
        if a > math.pi:
            a -= 2 * math.pi
        out.append(a)
    return out


def cyclotomic_2m_poly(m: int) -> IntPoly:
    """Phi_{2^m}(z) = z^{2^{m-1}} + 1 for m >= 1."""
    if m < 1:
        raise DomainError("need m >= 1")
    half = 2 ** (m - 1)
    return IntPoly([1] + [0] * (half - 1) + [1])
