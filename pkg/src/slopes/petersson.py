"""Petersson inner products, Gram matrices, Hecke operators and congruences
for the integral cusp-form lattices of weight 12k.

The inner product <f, g> = int_F f gbar (4 pi y)^{12k} dx dy / y^2 is
computed by two independent quadrature schemes:

  A. strip unfolding: for y >= Y0 the x-integral collapses termwise to
     sum_n a_n b_n exp-polynomial integrals (exact incomplete-gamma sums);
     the region below Y0 is done by tensor Gauss-Legendre with the
     x -> -x symmetry of real-coefficient forms;
  B. direct 2-D Gauss-Legendre over the whole fundamental domain with a
     rigorous tail cutoff.

Scheme agreement is the standing cross-check (the two routes share only
the q-expansions).  All magnitudes travel as ScaledReal: norms reach
(12k-2)!-scale and plain floats would overflow near k = 12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from mpmath import mp, mpf, mpc

from .errors import (
    DomainError,
    PrecisionError,
    PrecisionExhaustedError,
    ZeroSeriesError,
)
from .lattice import GramForm, MinimaResult, slope_spectrum, successive_minima
from .qseries import QSeries, basis_form, content, ord_infinity
from .scaled import ScaledReal


@dataclass(frozen=True)
class FundamentalDomain:
    """Closure of the standard fundamental domain, split at height y0.

    lower region: {|x| <= 1/2, x^2 + y^2 >= 1, y <= y0};
    strip: {|x| <= 1/2, y >= y0}.  y0 > 1 keeps the circle arc entirely
    inside the lower region.
    """

    y0: float = 2.0

    def __post_init__(self):
        if self.y0 < 1:
            raise DomainError("strip cut y0 must be >= 1")

    def contains(self, x, y) -> bool:
        return abs(x) <= 0.5 and x * x + y * y >= 1


VOLUME = mp.pi / 3  # hyperbolic volume of the modular curve


# ---------------------------------------------------------------------------
# Gauss-Legendre nodes (cached per precision)
# ---------------------------------------------------------------------------

_GL_CACHE: Dict[Tuple[int, int], list] = {}


def legendre_nodes(P: int) -> list:
    """Nodes/weights of the P-point Gauss-Legendre rule on [-1, 1],
    computed by Newton iteration at the current working precision."""
    key = (P, mp.prec)
    if key in _GL_CACHE:
        return _GL_CACHE[key]
    nodes = []
    for i in range(1, P // 2 + 1):
        x = mp.cos(mp.pi * (i - mpf(1) / 4) / (P + mpf(1) / 2))
        dp = mpf(1)
        for _ in range(100):
            p0, p1 = mpf(1), x
            for n in range(2, P + 1):
                p0, p1 = p1, ((2 * n - 1) * x * p1 - (n - 1) * p0) / n
            dp = P * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < mpf(2) ** (-mp.prec + 4):
                break
        w = 2 / ((1 - x * x) * dp * dp)
        nodes.append((x, w))
        nodes.append((-x, w))
    if P % 2:
        x = mpf(0)
        p0, p1 = mpf(1), x
        for n in range(2, P + 1):
            p0, p1 = p1, ((2 * n - 1) * x * p1 - (n - 1) * p0) / n
        dp = P * (x * p1 - p0) / (x * x - 1)
        nodes.append((x, 2 / (dp * dp)))
    nodes.sort(key=lambda t: t[0])
    _GL_CACHE[key] = nodes
    return nodes


# ---------------------------------------------------------------------------
# quadrature passes
# ---------------------------------------------------------------------------


def _exp_poly_integral(c, ell: int, y0):
    """int_{y0}^inf e^{-c y} y^ell dy, via the closed-form antiderivative
    -e^{-cy} sum_j y^{ell-j} ell! / (c^{j+1} (ell-j)!)."""
    t = y0**ell / c
    s = t
    for j in range(1, ell + 1):
        t *= (ell - j + 1) / (c * y0)
        s += t
    return mp.exp(-c * y0) * s


def _strip_sums(coefs: List[List[mpf]], k: int, y0, nmax: int):
    """Pairwise strip integrals (4pi)^{12k} sum_n a_n b_n E(4 pi n).

    Returns a matrix over the given forms; summation order is fixed
    (increasing n) for determinism.
    """
    ell = 12 * k - 2
    m = len(coefs)
    weights = [0] * (nmax + 1)
    four_pi = 4 * mp.pi
    scale = four_pi ** (12 * k)
    for n in range(1, nmax + 1):
        weights[n] = _exp_poly_integral(four_pi * n, ell, y0)
    out = [[mpf(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1):
            acc = mpf(0)
            ci, cj = coefs[i], coefs[j]
            for n in range(1, nmax + 1):
                if ci[n] and cj[n]:
                    acc += ci[n] * cj[n] * weights[n]
            out[i][j] = out[j][i] = acc * scale
    return out


def _eval_form(coef: List[mpf], q: mpc, nmax: int) -> mpc:
    acc = mpc(0)
    for n in range(nmax, 0, -1):
        acc = acc * q + coef[n]
    return acc * q


def _lower_region_sums(coefs, k, y0, nmax, P):
    """Pairwise integrals over {0 <= x <= 1/2, x^2+y^2 >= 1, y <= y0},
    doubled and symmetrized: 2 Re int f gbar (4pi y)^{12k} dx dy / y^2.

    Tensor Gauss-Legendre after mapping y to [sqrt(1-x^2), y0]; the
    integrand is analytic so the rule converges geometrically in P.
    """
    m = len(coefs)
    nodes = legendre_nodes(P)
    twelvek = 12 * k
    two_pi = 2 * mp.pi
    out = [[mpf(0)] * m for _ in range(m)]
    y0 = mpf(y0)
    for xn, xw in nodes:
        x = (xn + 1) / 4  # [0, 1/2]
        ylo = mp.sqrt(1 - x * x)
        h = (y0 - ylo) / 2
        if h <= 0:
            continue
        e2x = mp.expjpi(2 * x)  # e^{2 pi i x}
        vals = [[mpc(0)] * m for _ in range(m)]
        for yn, yw in nodes:
            y = ylo + (yn + 1) * h
            q = e2x * mp.exp(-two_pi * y)
            fs = [_eval_form(c, q, nmax) for c in coefs]
            wgt = xw * yw * h * (4 * mp.pi * y) ** twelvek / (y * y)
            for i in range(m):
                fi = fs[i]
                for j in range(i + 1):
                    vals[i][j] += wgt * fi * mp.conj(fs[j])
        for i in range(m):
            for j in range(i + 1):
                # dx jacobian 1/4; doubling for x<0 keeps only the real part
                v = 2 * mp.re(vals[i][j]) / 4
                out[i][j] += v
                if i != j:
                    out[j][i] += v
    return out


def _full_domain_sums(coefs, k, nmax, P, ymax):
    """Scheme B: direct 2-D quadrature over all of F, cut off at ymax.

    y-panels [ylo, 2], [2, 4], ..., [.., ymax] keep the Gauss rule
    efficient against the e^{-4 pi y} decay.
    """
    m = len(coefs)
    nodes = legendre_nodes(P)
    twelvek = 12 * k
    two_pi = 2 * mp.pi
    out = [[mpf(0)] * m for _ in range(m)]
    panels = [mpf(1)]
    while panels[-1] < ymax:
        panels.append(min(mpf(ymax), panels[-1] * 2))
    for xn, xw in nodes:
        x = (xn + 1) / 4
        ylo = mp.sqrt(1 - x * x)
        e2x = mp.expjpi(2 * x)
        vals = [[mpc(0)] * m for _ in range(m)]
        ysegs = [(ylo, panels[0])] + list(zip(panels, panels[1:]))
        for (p0, p1) in ysegs:
            h = (p1 - p0) / 2
            if h <= 0:
                continue
            for yn, yw in nodes:
                y = p0 + (yn + 1) * h
                q = e2x * mp.exp(-two_pi * y)
                fs = [_eval_form(c, q, nmax) for c in coefs]
                wgt = xw * yw * h * (4 * mp.pi * y) ** twelvek / (y * y)
                for i in range(m):
                    fi = fs[i]
                    for j in range(i + 1):
                        vals[i][j] += wgt * fi * mp.conj(fs[j])
        for i in range(m):
            for j in range(i + 1):
                v = 2 * mp.re(vals[i][j]) / 4
                out[i][j] += v
                if i != j:
                    out[j][i] += v
    return out


def _coeff_tail_bound(coefs_int: List[List[int]], k: int, nmax: int):
    """Empirical growth constant C with |a_n| <= C n^{6k+1} (2x safety)."""
    C = mpf(0)
    for c in coefs_int:
        for n in range(1, min(nmax, len(c) - 1) + 1):
            if c[n]:
                C = max(C, abs(mpf(c[n])) / mpf(n) ** (6 * k + 1))
    return 2 * C


def _strip_tail(C, k, y0, nmax):
    """Bound on the dropped strip terms n > nmax (geometric domination)."""
    ell = 12 * k - 2
    four_pi = 4 * mp.pi
    n1 = nmax + 1
    term = C * C * mpf(n1) ** (12 * k + 2) * _exp_poly_integral(four_pi * n1, ell, mpf(y0))
    ratio = mp.exp(-four_pi * y0) * (mpf(n1 + 1) / n1) ** (12 * k + 2)
    if ratio >= mpf("0.5"):
        return mp.inf
    return (four_pi ** (12 * k)) * term / (1 - ratio)


def _region_tail(C, k, nmax, y_min, y_cap):
    """Bound for the truncated q-series over a bounded region of F."""
    x = mp.exp(-2 * mp.pi * y_min)
    n1 = nmax + 1
    ratio = x * (mpf(n1 + 1) / n1) ** (6 * k + 1)
    if ratio >= mpf("0.5"):
        return mp.inf
    tail_sup = C * mpf(n1) ** (6 * k + 1) * x**n1 / (1 - ratio)
    full_sup = C * sum(mpf(n) ** (6 * k + 1) * x**n for n in range(1, nmax + 1)) + tail_sup
    # |f gbar - trunc| <= tail_f sup_g + sup_f tail_g + tail^2
    integrand = 2 * tail_sup * full_sup + tail_sup**2
    area = max(mpf(1), y_cap)
    wmax = (4 * mp.pi * y_cap) ** (12 * k) / (mpf(3) / 4)
    return 2 * integrand * area * wmax


def _scheme_b_cutoff_tail(C, k, nmax, ymax):
    """Mass of the strip above ymax, bounded termwise."""
    ell = 12 * k - 2
    four_pi = 4 * mp.pi
    total = mpf(0)
    for n in range(1, nmax + 1):
        total += (C * mpf(n) ** (6 * k + 1)) ** 2 * _exp_poly_integral(four_pi * n, ell, mpf(ymax))
    return four_pi ** (12 * k) * total * 4


# ---------------------------------------------------------------------------
# cusp lattice assembly
# ---------------------------------------------------------------------------


@dataclass
class CuspLattice:
    """Weight-12k integral cusp forms with their Petersson Gram data."""

    k: int
    basis: List[QSeries]
    gram: GramForm                # mantissa matrix; true Gram = entries*e^{log_scale}
    log_scale: mpf
    quadrature_error_bound: mpf   # relative, uniform over entries
    prec_bits: int
    scheme: str
    q_precision: int

    def entry(self, i: int, j: int) -> ScaledReal:
        """<basis_i, basis_j> as a ScaledReal (1-based basis index ell)."""
        m = self.gram.entries[i - 1][j - 1]
        return ScaledReal(mpf(m.numerator) / m.denominator, self.log_scale)

    def minima(self, m: Optional[int] = None) -> MinimaResult:
        return successive_minima(self.gram, m if m is not None else self.k,
                                 limit=max(64, self.k))

    def spectrum(self, m: Optional[int] = None):
        res = self.minima(m)
        return slope_spectrum(res.values, self.log_scale, self.k,
                              "hermitian", witnesses=res.witnesses)


def _scheme_b_ymax(k: int) -> mpf:
    """Cutoff height: (4 pi y)^{12k} e^{-4 pi y} below 2^-(prec+40)."""
    ymax = mpf(max(4, k + 2))
    target = mpf(2) ** (-(mp.prec + 40))
    while (4 * mp.pi * ymax) ** (12 * k) * mp.exp(-4 * mp.pi * ymax) > target:
        ymax += 1
    return ymax


def _gram_pass(coefs_int, k, y0, nmax, P, scheme):
    coefs = [[mpf(c) for c in row] for row in coefs_int]
    if scheme == "A":
        strip = _strip_sums(coefs, k, mpf(y0), nmax)
        lower = _lower_region_sums(coefs, k, mpf(y0), nmax, P)
        return [[strip[i][j] + lower[i][j] for j in range(len(coefs))]
                for i in range(len(coefs))]
    if scheme == "B":
        return _full_domain_sums(coefs, k, nmax, P, _scheme_b_ymax(k))
    raise DomainError(f"unknown scheme {scheme!r}; use 'A' or 'B'")


def _matrix_rel_delta(A, B, scale):
    d = mpf(0)
    for i in range(len(A)):
        for j in range(len(A)):
            s = scale[i][j]
            d = max(d, abs(A[i][j] - B[i][j]) / s)
    return d


def compute_gram(forms: Sequence[QSeries], k: int, prec_bits: int = 256,
                 scheme: str = "A", domain: Optional[FundamentalDomain] = None,
                 rel_tol=None, max_rounds: int = 6):
    """Pairwise Petersson products of cusp forms, adaptively refined.

    Node counts and the q-truncation are grown until successive passes
    agree to rel_tol (default 2^{-prec_bits/2}/4); the reported error
    bound adds the rigorous series-tail estimates.  Returns
    (matrix of mpf, rel_error_bound, q_precision_used).
    """
    if prec_bits < 64:
        raise PrecisionError("prec_bits must be >= 64", required=64)
    if rel_tol is None:
        rel_tol = mpf(2) ** (-(prec_bits // 2)) / 4
    y0 = mpf((domain or FundamentalDomain()).y0)
    forms = list(forms)
    avail = min((f.precision - 1 for f in forms if f.precision is not None),
                default=None)
    with mp.workprec(prec_bits + 64):
        nmax = _initial_truncation(k, prec_bits)
        if avail is not None:
            nmax = min(nmax, avail)
        P = 32
        prev = None
        prev_nmax = nmax
        for _ in range(max_rounds):
            table = _coeff_table(forms, nmax)
            cur = _gram_pass(table, k, y0, nmax, P, scheme)
            if prev is not None:
                scale = [[mp.sqrt(abs(cur[i][i]) * abs(cur[j][j]))
                          for j in range(len(cur))] for i in range(len(cur))]
                delta = _matrix_rel_delta(prev, cur, scale)
                C = _coeff_tail_bound(table, k, nmax)
                if scheme == "A":
                    tail = _strip_tail(C, k, y0, nmax) + _region_tail(
                        C, k, nmax, mp.sqrt(3) / 2, y0)
                else:
                    ymax = _scheme_b_ymax(k)
                    tail = _region_tail(C, k, nmax, mp.sqrt(3) / 2, ymax) \
                        + _scheme_b_cutoff_tail(C, k, nmax, ymax)
                min_diag = min(abs(cur[i][i]) for i in range(len(cur)))
                err = delta + tail / min_diag
                if err <= rel_tol:
                    return cur, err, nmax
                prev, prev_nmax = cur, nmax
                nmax = nmax * 2 if avail is None else min(nmax * 2, avail)
                P = P + P // 2
            else:
                prev, prev_nmax = cur, nmax
                P = P + P // 2
        raise PrecisionExhaustedError(
            f"Gram entries failed to stabilize to {mp.nstr(rel_tol, 5)} "
            f"within {max_rounds} refinement rounds",
            estimate=prev)


def _initial_truncation(k: int, prec_bits: int) -> int:
    # solve roughly (6k+1) ln n - 2 pi (sqrt3/2) n < -(prec_bits + 40) ln 2
    target = (prec_bits + 40) * math.log(2)
    n = 8 * k + 16
    while (6 * k + 1) * math.log(n) - math.pi * math.sqrt(3) * n > -target:
        n += 8
    return n


def _coeff_table(forms, nmax):
    out = []
    for f in forms:
        if f.is_zero() or f.lead < 1:
            raise DomainError("Petersson quadrature needs cusp forms (ord >= 1)")
        if f.precision is not None and f.precision <= nmax:
            raise PrecisionError(
                f"need q-expansion beyond exponent {nmax}", required=nmax + 1)
        out.append([f.coeff(n) if f.lead <= n else 0
                    for n in range(nmax + 1)])
    return out


def petersson_inner(a: Union[int, QSeries], b: Union[int, QSeries], k: int,
                    prec_bits: int = 256, scheme: str = "A",
                    domain: Optional[FundamentalDomain] = None
                    ) -> Tuple[ScaledReal, mpf]:
    """<a, b> for weight-12k cusp forms, with a relative error bound.

    ``a`` and ``b`` may be 1-based basis indices (ell of Delta^k j^{k-ell})
    or explicit QSeries.  The a-posteriori bound is the scheme's
    last-refinement delta plus the rigorous series-tail estimates; the
    contract is bound <= 2^{-prec_bits/2}.
    """
    with mp.workprec(prec_bits + 64):
        nmax_hint = _initial_truncation(k, prec_bits) * 4
        forms = []
        for v in (a, b):
            if isinstance(v, int):
                forms.append(basis_form(k, v, nmax_hint))
            else:
                forms.append(v)
        same = (a == b) or (forms[0] is forms[1]) or (
            isinstance(a, QSeries) and isinstance(b, QSeries) and a == b)
        fm = [forms[0]] if same else forms
        M, err, _ = compute_gram(fm, k, prec_bits, scheme, domain)
        val = M[0][0] if same else M[0][1]
        return ScaledReal(val), err


def gram_matrix(k: int, prec_bits: int = 256, scheme: str = "A",
                domain: Optional[FundamentalDomain] = None) -> CuspLattice:
    """Full Petersson Gram of the basis Delta^k j^{k-ell}, ell = 1..k.

    The Gram is stored as a mantissa matrix times e^{log_scale} so the
    lattice engine sees well-scaled dyadics; positive definiteness is
    witnessed by an exact LDL factorization on construction.
    """
    if k < 1:
        raise DomainError("need k >= 1")
    with mp.workprec(prec_bits + 64):
        nmax = _initial_truncation(k, prec_bits) * 4
        forms = [basis_form(k, ell, nmax) for ell in range(1, k + 1)]
        M, err, used_n = compute_gram(forms, k, prec_bits, scheme, domain)
        s = mp.floor(mp.log(max(M[i][i] for i in range(k))))
        scale = mp.exp(-s)
        mant = [[M[i][j] * scale for j in range(k)] for i in range(k)]
        gram = GramForm(mant, kind="approximate", eps=_eps_from(err, mant),
                        log_scale=s)
        gram.ldl()  # positive-definiteness witness; raises if it fails
        return CuspLattice(k, forms, gram, s, err, prec_bits, scheme, used_n)


def _eps_from(rel_err, mant):
    big = max(abs(x) for row in mant for x in row)
    e = rel_err * big
    # eps as an exact dyadic upper bound
    if e == 0:
        return Fraction(0)
    ex = int(mp.floor(mp.log(e, 2))) + 1
    return Fraction(2) ** ex


def lattice_to_payload(lat: CuspLattice) -> dict:
    """JSON-ready exact serialization (mantissa/log_scale plus error bound)."""
    k = lat.k
    return {
        "k": k,
        "prec_bits": lat.prec_bits,
        "scheme": lat.scheme,
        "q_precision": lat.q_precision,
        "log_scale": mp.nstr(lat.log_scale, 30),
        "error_bound_rel": mp.nstr(lat.quadrature_error_bound, 10),
        "gram_mantissa": [[str(x) for x in row] for row in lat.gram.entries],
    }


def lattice_from_payload(payload: dict) -> CuspLattice:
    """Rebuild a CuspLattice from its payload (basis forms not restored)."""
    k = payload["k"]
    prec_bits = payload["prec_bits"]
    with mp.workprec(prec_bits + 64):
        mant = [[Fraction(x) for x in row] for row in payload["gram_mantissa"]]
        err = mpf(payload["error_bound_rel"])
        gram = GramForm(mant, kind="approximate",
                        eps=_eps_from(err, [[mpf(x.numerator) / x.denominator
                                             for x in row] for row in mant]),
                        log_scale=mpf(payload["log_scale"]))
        return CuspLattice(k, [], gram, mpf(payload["log_scale"]), err,
                           prec_bits, payload["scheme"],
                           payload["q_precision"])


# ---------------------------------------------------------------------------
# heights and slope bounds
# ---------------------------------------------------------------------------


def height(f: Sequence[int], lattice: CuspLattice) -> mpf:
    """lambda(f) = -1/2 ln <f/content, f/content> through the Gram form.

    Dividing by the content makes every finite-place norm 1, so the
    height is carried entirely by the archimedean Petersson norm.
    """
    if not any(f):
        raise DomainError("height of the zero vector")
    g = math.gcd(*[abs(c) for c in f])
    v = [c // g for c in f]
    with mp.workprec(lattice.prec_bits + 64):
        q = lattice.gram.norm_sq(v)
        qv = mpf(q.numerator) / q.denominator
        return -(mp.log(qv) + lattice.log_scale) / 2


def ell(c) -> mpf:
    """Slope-bound profile 2 pi c + 6(ln c + 1 - ln 12), increasing in c."""
    c = mpf(c)
    if c <= 0:
        raise DomainError("ell needs c > 0")
    return 2 * mp.pi * c + 6 * (mp.log(c) + 1 - mp.log(12))


def support_bound() -> mpf:
    """Upper bound ell(1) = 2 pi + 6(1 - ln 12) = -2.62625... for the
    normalized slopes of the cusp-form lattices."""
    return ell(1)


def lower_bound_norm(k: int, N: int, aN: int) -> ScaledReal:
    """|a_N|^2 4 pi e^{-4 pi N} (12k-2)! / N^{12k-1} in log-scale form."""
    if N < 1:
        raise DomainError("need N >= 1")
    if aN == 0:
        raise DomainError("need a_N != 0")
    ln = (2 * mp.log(abs(mpf(aN))) + mp.log(4 * mp.pi) - 4 * mp.pi * N
          + mp.loggamma(12 * k - 1) - (12 * k - 1) * mp.log(N))
    return ScaledReal.from_log(ln)


def filtered_sublattice(k: int, L: int) -> List[int]:
    """Basis indices of forms vanishing to order >= k/L: {ceil(k/L), .., k};
    the rank is k + 1 - ceil(k/L)."""
    if L < 1:
        raise DomainError("need L >= 1")
    if L > k:
        raise DomainError("need L <= k")
    lo = -(-k // L)
    return list(range(lo, k + 1))


# ---------------------------------------------------------------------------
# sup norms on the fundamental domain
# ---------------------------------------------------------------------------


@dataclass
class SupNormResult:
    value: mpf          # certified lower estimate (an attained value)
    point: Tuple[mpf, mpf]
    gap_estimate: mpf   # heuristic: last refinement improvement


def sup_norm(f: Union[int, QSeries], k: int, prec_bits: int = 128,
             grid: int = 48) -> SupNormResult:
    """sup over F of |f(z)| (4 pi y)^{6k}, by grid search plus local ascent.

    The search height is capped at max(2, k ln(3k)) beyond which the
    weight factor decays; the returned value is an attained (certified
    lower) estimate, with the last local-ascent improvement reported as a
    heuristic gap.
    """
    with mp.workprec(prec_bits + 32):
        nmax = _initial_truncation(k, prec_bits)
        if isinstance(f, int):
            f = basis_form(k, f, nmax)
        if f.precision is not None and f.precision <= nmax:
            nmax = f.precision - 1
        coef = [mpf(f.coeff(n)) if f.lead <= n else mpf(0)
                for n in range(nmax + 1)]
        ymax = mpf(max(2.0, k * math.log(3 * k)))
        two_pi = 2 * mp.pi

        def val(x, y):
            q = mp.expjpi(2 * x) * mp.exp(-two_pi * y)
            return abs(_eval_form(coef, q, nmax)) * (4 * mp.pi * y) ** (6 * k)

        ylo = mp.sqrt(3) / 2
        best = (mpf(-1), (mpf(0), ylo))
        for i in range(grid + 1):
            x = mpf(i) / (2 * grid)
            ybot = mp.sqrt(1 - x * x)
            for j in range(grid + 1):
                y = ybot + (ymax - ybot) * j / grid
                v = val(x, y)
                if v > best[0]:
                    best = (v, (x, y))
        # local coordinate ascent with shrinking steps
        (x, y) = best[1]
        v = best[0]
        step = mpf(1) / grid
        gap = mpf(0)
        for _ in range(60):
            improved = False
            for dx, dy in ((step, 0), (-step, 0), (0, step), (0, -step)):
                xx = min(max(x + dx, mpf(0)), mpf("0.5"))
                yy = max(y + dy, mp.sqrt(1 - xx * xx))
                vv = val(xx, yy)
                if vv > v:
                    gap = vv - v
                    x, y, v = xx, yy, vv
                    improved = True
            if not improved:
                step /= 2
                if step < mpf(2) ** (-prec_bits // 2):
                    break
        return SupNormResult(v, (x, y), gap)


# ---------------------------------------------------------------------------
# Hecke operators
# ---------------------------------------------------------------------------


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, int(math.isqrt(p)) + 1):
        if p % d == 0:
            return False
    return True


@dataclass
class HeckeData:
    p: int
    k: int
    matrix: List[List[int]]      # k x k, basis Delta^k j^{k-ell}
    charpoly: List[int]          # ascending, monic


def _mat_mul(A, B):
    k = len(A)
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(k)]
            for i in range(k)]


def _charpoly_frac(M: List[List[Fraction]]) -> List[Fraction]:
    """det(xI - M) by Faddeev-LeVerrier, ascending coefficients, monic."""
    k = len(M)
    c = [Fraction(0)] * (k + 1)
    c[k] = Fraction(1)
    B = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    for m in range(1, k + 1):
        if m > 1:
            B = _mat_mul(M, B)
            for i in range(k):
                B[i][i] += c[k - m + 1]
        MB = _mat_mul(M, B)
        tr = sum(MB[i][i] for i in range(k))
        c[k - m] = -tr / m
    return c


def _charpoly_int(M: List[List[int]]) -> List[int]:
    c = _charpoly_frac([[Fraction(x) for x in row] for row in M])
    out = []
    for x in c:
        if x.denominator != 1:
            raise ArithmeticError("characteristic polynomial not integral")
        out.append(int(x))
    return out


def hecke_operator(p: int, k: int, N: Optional[int] = None) -> HeckeData:
    """Integer matrix of T_p on the weight-12k cusp lattice.

    (T_p f)_n = a_{pn} + p^{12k-1} a_{n/p}; reading coefficients 1..k in
    the triangular basis Delta^k j^{k-ell} determines the matrix by exact
    forward substitution (unit diagonal, no divisions).
    """
    if not _is_prime(p):
        raise DomainError(f"{p} is not prime")
    if k < 1:
        raise DomainError("need k >= 1")
    if N is None:
        N = p * k
    if N < p * k:
        raise PrecisionError(
            f"need q-expansions to exponent {p * k}", required=p * k)
    forms = [basis_form(k, ell, N) for ell in range(1, k + 1)]
    pw = p ** (12 * k - 1)
    # images under T_p, coefficients 1..k
    images = []
    for f in forms:
        img = []
        for n in range(1, k + 1):
            a = f.coeff(p * n)
            if n % p == 0:
                a += pw * f.coeff(n // p)
            img.append(a)
        images.append(img)
    # triangular coefficient matrix of the basis itself
    basis_coeff = [[f.coeff(n) for n in range(1, k + 1)] for f in forms]
    M = [[0] * k for _ in range(k)]
    for col in range(k):
        img = images[col][:]
        for row in range(k):
            # coefficient of q^{row+1} of sum_{t<=row} M[t][col]*forms[t]
            x = img[row]
            for t in range(row):
                x -= M[t][col] * basis_coeff[t][row]
            M[row][col] = x  # unit diagonal of basis_coeff[row][row] == 1
    return HeckeData(p, k, M, _charpoly_int(M))


# ---------------------------------------------------------------------------
# congruence classification (exact, via Q[x]/(charpoly))
# ---------------------------------------------------------------------------


def _poly_mod(a: List[Fraction], p: List[Fraction]) -> List[Fraction]:
    a = a[:]
    dp = len(p) - 1
    while len(a) > dp:
        f = a[-1]
        if f:
            for i in range(dp + 1):
                a[len(a) - dp - 1 + i] -= f * p[i]
        a.pop()
    while len(a) < dp:
        a.append(Fraction(0))
    return a


def _poly_mul_mod(a, b, p):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _poly_mod(out, p)


def _poly_gcd(a, b):
    a, b = a[:], b[:]
    def norm(v):
        while v and v[-1] == 0:
            v.pop()
        return v
    a, b = norm(a), norm(b)
    while b:
        # a mod b
        r = a[:]
        while len(r) >= len(b):
            f = r[-1] / b[-1]
            for i in range(len(b)):
                r[len(r) - len(b) + i] -= f * b[i]
            r.pop()
            r = norm(r)
            if not r:
                break
        a, b = b, r
    return a


def _poly_norm(v):
    v = list(v)
    while v and v[-1] == 0:
        v.pop()
    return v


def _poly_divmod(a, b):
    """(q, r) with a = q b + r over Q, deg r < deg b."""
    a, b = _poly_norm(a), _poly_norm(b)
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    r = a[:]
    while len(r) >= len(b):
        f = r[-1] / b[-1]
        q[len(r) - len(b)] = f
        for i in range(len(b)):
            r[len(r) - len(b) + i] -= f * b[i]
        r = _poly_norm(r)
        if not r:
            break
    return _poly_norm(q), r


def _poly_invert_mod(a, p):
    """Inverse of a modulo p over Q (None if gcd is nonconstant)."""
    r0, r1 = _poly_norm(p), _poly_norm(a)
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while r1:
        q, r = _poly_divmod(r0, r1)
        qs = [Fraction(0)] * (len(q) + len(s1) - 1 if q and s1 else 1)
        for i, x in enumerate(q):
            if x:
                for j, y in enumerate(s1):
                    qs[i + j] += x * y
        s = [(s0[i] if i < len(s0) else Fraction(0))
             - (qs[i] if i < len(qs) else Fraction(0))
             for i in range(max(len(s0), len(qs)))]
        r0, s0, r1, s1 = r1, s1, r, s
    if len(r0) != 1:
        return None
    inv = [x / r0[0] for x in s0]
    return _poly_mod(inv, p)


def _power_sums(p_monic: List[Fraction], upto: int) -> List[Fraction]:
    """Newton power sums s_0..s_upto of the roots of a monic polynomial."""
    k = len(p_monic) - 1
    # elementary symmetric functions: e_i = (-1)^i * coefficient of x^{k-i}
    e = [Fraction(0)] * (k + 1)
    e[0] = Fraction(1)
    for i in range(1, k + 1):
        e[i] = p_monic[k - i] * (-1) ** i
    s = [Fraction(k)]
    for m in range(1, upto + 1):
        acc = Fraction(0)
        for i in range(1, min(m - 1, k) + 1):
            acc += (-1) ** (i - 1) * e[i] * s[m - i]
        if m <= k:
            acc += (-1) ** (m - 1) * e[m] * m
        s.append(acc)
    return s


CONGRUENCE_NONE = "no-congruence"
CONGRUENCE_WITNESS = "congruence-witness"
CONGRUENCE_UNDECIDED = "undecided"


@dataclass
class CongruenceResult:
    verdict: str
    eigencoord_poly: Optional[List[Fraction]]  # prod (x - c_i), monic
    detail: str = ""


def congruence_test(f: Sequence[int], k: int, p: int = 2,
                    hecke: Optional[HeckeData] = None) -> CongruenceResult:
    """Classify whether f arises from a congruence between eigenforms.

    After content normalization, write f = sum c_i f_i over the normalized
    T_p eigenforms.  f does *not* arise from a congruence iff every c_i is
    an algebraic integer.  The test is exact: the eigencoordinates are
    c_i = L(theta_i) for a single L in Q[x]/(charpoly) obtained from the
    trace-form linear system Tr(L w_ell) = f_ell, and all c_i are
    algebraic integers iff the monic rational polynomial
    prod_i (x - c_i) = charpoly(mult-by-L) has integer coefficients.
    Verdicts are certified; 'undecided' only occurs for a non-squarefree
    characteristic polynomial (no such case is known for T_2).
    """
    f = list(f)
    if len(f) != k or not any(f):
        raise DomainError("f must be a nonzero vector of length k")
    g = math.gcd(*[abs(c) for c in f])
    u = [c // g for c in f]
    if k == 1:
        return CongruenceResult(CONGRUENCE_NONE, [Fraction(-u[0]), Fraction(1)],
                                "rank 1: coordinate is +-1")
    hd = hecke if hecke is not None else hecke_operator(p, k)
    pc = [Fraction(c) for c in hd.charpoly]
    dpc = [i * pc[i] for i in range(1, len(pc))]
    if len(_poly_gcd(pc, dpc)) > 1:
        return CongruenceResult(CONGRUENCE_UNDECIDED, None,
                                f"T_{p} characteristic polynomial is not squarefree")
    # adj(xI - M) = sum_i x^i B_i with B_{k-1} = I, B_{i-1} = M B_i + c_i I
    A = [[Fraction(x) for x in row] for row in hd.matrix]
    Bs = [None] * k
    Bs[k - 1] = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    for i in range(k - 1, 0, -1):
        Bs[i - 1] = _mat_mul(A, Bs[i])
        for t in range(k):
            Bs[i - 1][t][t] += pc[i]
    # pick a column whose first entry is invertible mod pc
    wcol = None
    for cidx in range(k):
        g0 = [Bs[i][0][cidx] for i in range(k)]
        inv = _poly_invert_mod(g0, pc)
        if inv is not None:
            wcol = cidx
            g0inv = inv
            break
    if wcol is None:
        return CongruenceResult(CONGRUENCE_UNDECIDED, None,
                                "no eigenvector column with invertible first entry")
    # normalized eigenvector entries w_ell = column_ell / column_0 in K
    w = []
    for ell in range(k):
        col = [Bs[i][ell][wcol] for i in range(k)]
        w.append(_poly_mul_mod(col, g0inv, pc))
    # trace-form system: sum_m L_m Tr(w_ell x^m) = u_ell
    s = _power_sums(pc, 2 * k)
    def tr(poly):
        return sum(c * s[t] for t, c in enumerate(poly))
    T = [[tr(_poly_mul_mod(w[ell], [Fraction(0)] * m + [Fraction(1)], pc))
          for m in range(k)] for ell in range(k)]
    from .lattice import _solve_mat
    L = [row[0] for row in _solve_mat(T, [[Fraction(x)] for x in u])]
    # mult-by-L matrix in the power basis
    cols = []
    for j in range(k):
        xj = [Fraction(0)] * j + [Fraction(1)]
        cols.append(_poly_mul_mod(L, xj, pc))
    Mmul = [[cols[j][i] for j in range(k)] for i in range(k)]
    R = _charpoly_frac(Mmul)
    integral = all(x.denominator == 1 for x in R)
    verdict = CONGRUENCE_NONE if integral else CONGRUENCE_WITNESS
    return CongruenceResult(verdict, R,
                            "eigencoordinate polynomial "
                            + ("integral" if integral else "non-integral"))
