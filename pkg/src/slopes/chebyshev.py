"""Local and global Chebyshev transforms on Okounkov bodies.

Closed forms for the centered-disc and boundary-disc families, the exact
finite-level quantity F (binomial sum), its brute-force operator-norm
oracle (exact rational linear algebra), the Jacobi-type orthogonal family
with its two value/norm identities verified in exact arithmetic, and the
Fubini-Study entropy transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple

from mpmath import mp, mpf

from .errors import DomainError, FormulaMismatchError


# ---------------------------------------------------------------------------
# bodies and transform values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OkounkovInterval:
    """Okounkov body: [0, deg] for a curve, the standard simplex for P^d."""

    dimension: int
    deg: int = 1

    def contains(self, alpha) -> bool:
        if self.dimension == 1:
            a = alpha if not isinstance(alpha, (list, tuple)) else alpha[0]
            return 0 <= a <= self.deg
        if len(alpha) != self.dimension:
            return False
        return all(a >= 0 for a in alpha) and sum(alpha) <= 1


@dataclass(frozen=True)
class TransformValue:
    alpha: object
    value: object
    family: str


@dataclass(frozen=True)
class LocalTransform:
    """One place's Chebyshev transform: a function on a fixed body."""

    body: OkounkovInterval
    fn: Callable
    family: str

    def __call__(self, alpha):
        return self.fn(alpha)

    def at(self, alpha) -> TransformValue:
        return TransformValue(alpha, self.fn(alpha), self.family)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def _xlnx(x):
    x = mpf(x)
    if x < 0:
        raise DomainError("x ln x needs x >= 0")
    return mpf(0) if x == 0 else x * mp.log(x)


def cheb_centered(alpha, r) -> mpf:
    """Centered-disc local transform: -alpha ln r, alpha in [0,1]."""
    alpha, r = mpf(alpha), mpf(r)
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must be in [0,1], got {alpha}")
    if r <= 0:
        raise DomainError("radius must be positive")
    return -alpha * mp.log(r)


def cheb_boundary(alpha, r) -> mpf:
    """Boundary-point local transform of the disc capacity metric:

        -a ln(4r) + (1+a)ln(1+a)/2 - (1-a)ln(1-a)/2 - a ln a,

    extended by continuity (x ln x -> 0) at the endpoints a = 0, 1.
    """
    a, r = mpf(alpha), mpf(r)
    if not 0 <= a <= 1:
        raise DomainError(f"alpha must be in [0,1], got {alpha}")
    if r <= 0:
        raise DomainError("radius must be positive")
    return (-a * mp.log(4 * r) + _xlnx(1 + a) / 2 - _xlnx(1 - a) / 2 - _xlnx(a))


def centered_local(r, deg: int = 1) -> LocalTransform:
    return LocalTransform(OkounkovInterval(1, deg),
                          lambda a, r=r: cheb_centered(a, r), "centered-disc")


def boundary_local(r, deg: int = 1) -> LocalTransform:
    return LocalTransform(OkounkovInterval(1, deg),
                          lambda a, r=r: cheb_boundary(a, r), "boundary-disc")


def trivial_local(deg: int = 1) -> LocalTransform:
    """Places whose metric comes from the integral model: no contribution."""
    return LocalTransform(OkounkovInterval(1, deg), lambda a: mpf(0), "trivial")


# ---------------------------------------------------------------------------
# finite-level F: exact binomial sum vs. operator-norm oracle
# ---------------------------------------------------------------------------


def f_finite_sq_rational(n: int, alpha: int, radius_sq) -> Fraction:
    """Exact F(2a)^2 at level 2n: 4^{-2a} r^{-4a} sum_j (2j+2a+1) C(j+2a,j)^2."""
    if not 0 <= alpha <= n:
        raise DomainError(f"need 0 <= alpha <= n, got alpha={alpha}, n={n}")
    S = sum((2 * j + 2 * alpha + 1) * math.comb(j + 2 * alpha, j) ** 2
            for j in range(n - alpha + 1))
    return Fraction(S, 4 ** (2 * alpha)) / Fraction(radius_sq) ** (2 * alpha)


def F_finite(n: int, alpha: int, r) -> mpf:
    """Square root of the exact binomial sum; floating only at the root.

    Finite-level best leading-coefficient-to-norm ratio for sections of
    O(2n) vanishing to order 2 alpha at the boundary point of the disc of
    radius r.
    """
    r2 = Fraction(r) ** 2
    val = f_finite_sq_rational(n, alpha, r2)
    return mp.sqrt(mpf(val.numerator)) / mp.sqrt(mpf(val.denominator))


def _cheb_T(k: int) -> List[int]:
    """Chebyshev coefficients (ascending): T_k(cos t) = cos(k t)."""
    if k == 0:
        return [1]
    prev, cur = [1], [0, 1]
    for _ in range(k - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def _poly_mul_int(a: List[int], b: List[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _cos_moment(t: int, weight: str) -> Fraction:
    """Moment of cos^t against the weight, normalized to total mass 1.

    sine:    (1/4) int_{-pi}^{pi} cos^t u |sin u| du = (1/2) int_{-1}^{1} y^t dy
    uniform: (1/2 pi) int_{-pi}^{pi} cos^t u du
    """
    if t % 2:
        return Fraction(0)
    if weight == "sine":
        return Fraction(1, t + 1)
    return Fraction(math.comb(t, t // 2), 2**t)


def _solve_linear(A, b):
    """Exact solve by fraction-free Bareiss elimination.

    Naive Gaussian elimination over Q suffers quadratic coefficient
    blowup on the big-binomial Gram matrices here; Bareiss keeps every
    intermediate an integer of determinant-bounded size.
    """
    n = len(A)
    den = 1
    for row in A:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    for x in b:
        den = den * x.denominator // math.gcd(den, x.denominator)
    M = [[int(A[i][j] * den) for j in range(n)] + [int(b[i] * den)]
         for i in range(n)]
    sign = 1
    prev = 1
    for i in range(n):
        if M[i][i] == 0:
            piv = next((r for r in range(i + 1, n) if M[r][i]), None)
            if piv is None:
                raise DomainError("singular Gram in operator-norm oracle")
            M[i], M[piv] = M[piv], M[i]
            sign = -sign
        for r in range(n):
            if r == i:
                continue
            Mi, Mr = M[i], M[r]
            f = Mr[i]
            for c in range(i, n + 1):
                Mr[c] = (Mi[i] * Mr[c] - f * Mi[c]) // prev
        prev = M[i][i]
    det = M[n - 1][n - 1]
    return [Fraction(M[i][n], det) for i in range(n)]


def f_oracle_general_sq(level: int, order: int, radius_sq,
                        weight: str = "sine") -> Fraction:
    """Operator norm squared of the leading-coefficient functional at an
    arbitrary (level, vanishing order), brute force.

    Build the Gram of 1, z, ..., z^{level-order} under the boundary
    distribution (1/4)|sin t| dt (or uniform dt/2pi, for comparison) with
    the |z - r|^{2 order} factor folded in, and solve the normal
    equations.  By homogeneity in r the answer is
    r^{-2 order} (1^T Q^{-1} 1) with Q rational, so everything is exact.
    """
    if not 0 <= order <= level:
        raise DomainError(f"need 0 <= order <= level, got {order}, {level}")
    if weight not in ("sine", "uniform"):
        raise DomainError(f"unknown weight {weight!r}")
    m = level - order
    # (2 - 2y)^order, ascending integer coefficients in y = cos t
    wpoly = [math.comb(order, t) * 2 ** (order - t) * (-2) ** t
             for t in range(order + 1)]
    cache = {}
    Q = [[Fraction(0)] * (m + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        for j in range(i + 1):
            d = i - j
            if d not in cache:
                integ = _poly_mul_int(_cheb_T(d), wpoly)
                cache[d] = sum(c * _cos_moment(t, weight)
                               for t, c in enumerate(integ) if c)
            Q[i][j] = Q[j][i] = cache[d]
    x = _solve_linear(Q, [Fraction(1)] * (m + 1))
    return sum(x) / Fraction(radius_sq) ** order


def f_oracle_sq_rational(n: int, alpha: int, radius_sq,
                         weight: str = "sine") -> Fraction:
    """F(2 alpha)^2 at level 2n by the operator-norm route (the mutual
    oracle for the binomial-sum closed form)."""
    return f_oracle_general_sq(2 * n, 2 * alpha, radius_sq, weight)


def F_oracle(n: int, alpha: int, r, weight: str = "sine") -> mpf:
    """Brute-force F via the Gram/normal-equations route (mutual oracle)."""
    val = f_oracle_sq_rational(n, alpha, Fraction(r) ** 2, weight)
    return mp.sqrt(mpf(val.numerator)) / mp.sqrt(mpf(val.denominator))


def level_ceiling_sq(level: int, radius_sq, weight: str = "uniform") -> Fraction:
    """max over vanishing orders of F^2 at this level.

    For a degree <= level integer polynomial s,
    -ln ||s||_{L2 boundary} <= (1/2) ln of this quantity: the rigorous
    finite-level form of the asymptotic Chebyshev height ceiling (the
    leading Taylor coefficient of s at the boundary point is a nonzero
    integer, so |lead| >= 1).  Use the 'uniform' weight against the
    dtheta/2pi lattice norm of capacity.disc_gram.
    """
    best = Fraction(0)
    for beta in range(level + 1):
        v = f_oracle_general_sq(level, beta, radius_sq, weight)
        if v > best:
            best = v
    return best


# ---------------------------------------------------------------------------
# the Jacobi-type orthogonal family and its printed identities
# ---------------------------------------------------------------------------


def _jac_moment(m: int, alpha: int) -> Fraction:
    """int_{-2}^{2} y^m (2-y)^{2 alpha} dy, exact."""
    total = Fraction(0)
    for t in range(2 * alpha + 1):
        c = math.comb(2 * alpha, t) * 2 ** (2 * alpha - t) * (-1) ** t
        s = m + t
        if s % 2 == 0:
            total += Fraction(c * 2 ** (s + 2), s + 1)
    return total


def _jac_inner(f, g, alpha):
    prod = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    prod[i + j] += a * b
    return sum(c * _jac_moment(t, alpha) for t, c in enumerate(prod) if c)


def jacobi_basis(n: int, alpha: int, verify: bool = True) -> List[List[int]]:
    """Orthogonal family for int_{-2}^{2} T(1,y)^2 (2-y)^{2 alpha} dy.

    Built by exact Gram-Schmidt on monomials (degrees 0..n-alpha) and
    normalized so that p_j(2) = (-4)^j C(j+2a, j).  Verifies, in rational
    arithmetic, the two explicit identities the family must satisfy:

        p_j(2)                        = (-4)^j C(j+2a, j)
        int p_j^2 (2-y)^{2a} dy       = 4^{2j+2a+1} / (2j+2a+1)

    and that sum_j p_j(2)^2 / ||p_j||^2 reproduces F_finite^2.  Raises
    FormulaMismatchError if any identity fails.
    """
    if not 0 <= alpha <= n:
        raise DomainError(f"need 0 <= alpha <= n, got alpha={alpha}, n={n}")
    deg = n - alpha
    basis: List[List[Fraction]] = []
    for j in range(deg + 1):
        cur = [Fraction(0)] * (j + 1)
        cur[j] = Fraction(1)
        for q in basis:
            c = _jac_inner(cur, q, alpha) / _jac_inner(q, q, alpha)
            if c:
                for t in range(len(q)):
                    cur[t] -= c * q[t]
        basis.append(cur)
    out = []
    check_sum = Fraction(0)
    for j, q in enumerate(basis):
        q2 = sum(c * Fraction(2) ** t for t, c in enumerate(q))
        if q2 == 0:
            raise FormulaMismatchError(f"member {j} vanishes at y = 2")
        target = Fraction((-4) ** j * math.comb(j + 2 * alpha, j))
        scale = target / q2
        p = [c * scale for c in q]
        if any(c.denominator != 1 for c in p):
            raise FormulaMismatchError(
                f"member {j} is not integral after evaluation normalization")
        p_int = [int(c) for c in p]
        if verify:
            nsq = _jac_inner(p, p, alpha)
            want = Fraction(4 ** (2 * j + 2 * alpha + 1), 2 * j + 2 * alpha + 1)
            if nsq != want:
                raise FormulaMismatchError(
                    f"norm identity fails at j={j}: {nsq} != {want}")
            for q_prev in out:
                if _jac_inner([Fraction(c) for c in q_prev], p, alpha) != 0:
                    raise FormulaMismatchError(f"orthogonality fails at j={j}")
            check_sum += target * target / nsq
        out.append(p_int)
    if verify:
        S = sum((2 * j + 2 * alpha + 1) * math.comb(j + 2 * alpha, j) ** 2
                for j in range(deg + 1))
        if check_sum != Fraction(S, 4 ** (2 * alpha) * 4):
            raise FormulaMismatchError("F^2 decomposition identity fails")
    return out


# ---------------------------------------------------------------------------
# Fubini-Study transform and global assembly
# ---------------------------------------------------------------------------


def entropy(alpha_full) -> mpf:
    return sum(_xlnx(a) * -1 for a in alpha_full)


def cheb_fubini_study(alpha, gamma) -> mpf:
    """Fubini-Study local transform on the P^d simplex:

        sum_{j=1}^{d+1} a_j ln(gamma_j) + (1/2) h_d(a),

    with a_{d+1} = 1 - sum a_j and h_d the entropy (0 ln 0 = 0).
    """
    alpha = [mpf(a) for a in alpha]
    gamma = [mpf(g) for g in gamma]
    d = len(alpha)
    if len(gamma) != d + 1:
        raise DomainError("gamma must have length d+1")
    if any(g <= 0 for g in gamma):
        raise DomainError("gamma entries must be positive")
    tail = 1 - sum(alpha)
    eps = mpf(2) ** (-mp.prec + 8)
    if any(a < -eps for a in alpha) or tail < -eps:
        raise DomainError("alpha is outside the closed simplex")
    full = [max(a, mpf(0)) for a in alpha] + [max(tail, mpf(0))]
    return sum(a * mp.log(g) for a, g in zip(full, gamma)) + entropy(full) / 2


def fubini_local(gamma) -> LocalTransform:
    d = len(gamma) - 1
    return LocalTransform(OkounkovInterval(d),
                          lambda a, g=tuple(gamma): cheb_fubini_study(
                              a if isinstance(a, (list, tuple)) else [a], g),
                          "fubini-study")


def global_transform(locals_with_weights) -> LocalTransform:
    """Weighted pointwise sum of local transforms on a common body."""
    pairs = list(locals_with_weights)
    if not pairs:
        raise DomainError("need at least one local transform")
    body = pairs[0][0].body
    for loc, _ in pairs:
        if loc.body != body:
            raise DomainError("local transforms live on different bodies")

    def fn(a):
        return sum(mpf(w) * loc(a) for loc, w in pairs)

    return LocalTransform(body, fn, "global")


def height_bound(transform: LocalTransform, n: int, tol=mpf("1e-9")) -> mpf:
    """n * sup of the transform over the interior of its body.

    1-D bodies: coarse grid then golden-section refinement to ``tol``;
    simplices (d <= 3): nested grid refinement.
    """
    body = transform.body
    if body.dimension == 1:
        lo, hi = mpf(0), mpf(body.deg)
        grid = 512
        best_x = lo
        best = None
        for k in range(grid + 1):
            x = lo + (hi - lo) * k / grid
            v = transform(x)
            if best is None or v > best:
                best, best_x = v, x
        a = max(lo, best_x - (hi - lo) / grid)
        b = min(hi, best_x + (hi - lo) / grid)
        gr = (mp.sqrt(5) - 1) / 2
        x1 = b - gr * (b - a)
        x2 = a + gr * (b - a)
        f1, f2 = transform(x1), transform(x2)
        while b - a > tol:
            if f1 < f2:
                a, x1, f1 = x1, x2, f2
                x2 = a + gr * (b - a)
                f2 = transform(x2)
            else:
                b, x2, f2 = x2, x1, f1
                x1 = b - gr * (b - a)
                f1 = transform(x1)
        best = max(best, f1, f2)
        return n * best
    # simplex: nested barycentric grids
    d = body.dimension
    best = None
    center = [mpf(1) / (d + 1)] * d
    width = mpf(1)
    for _ in range(40):
        pts = _simplex_grid(center, width, d)
        for p in pts:
            if body.contains(p):
                v = transform(p)
                if best is None or v > best[0]:
                    best = (v, p)
        center = best[1]
        width /= 2
        if width < tol:
            break
    return n * best[0]


def _simplex_grid(center, width, d, steps=6):
    from itertools import product as iproduct

    axes = []
    for c in center:
        axes.append([c + width * (k / steps - mpf("0.5")) for k in range(steps + 1)])
    out = []
    for combo in iproduct(*axes):
        p = [max(mpf(0), x) for x in combo]
        if sum(p) <= 1:
            out.append(p)
    return out
