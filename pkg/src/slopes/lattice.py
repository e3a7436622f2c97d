"""Shortest vectors and successive minima of positive-definite Gram forms.

This is the shared engine behind both the Petersson cusp-form lattices and
the integer-polynomial disc lattices.  Inputs arrive as *exact* data: either
rational Gram entries, or dyadic mantissas of a floating Gram (every mpf is
a rational number, so SVP on the stored matrix is a well-posed exact
problem; the ``approximate`` kind only affects certification flags).

Design:

* reduction is an all-integer LLL (lambda/d bookkeeping a la de Weger /
  Cohen) on a scaled integer copy of the Gram, with the unimodular
  transform tracked so witnesses come back in the caller's coordinates;
* enumeration (Schnorr-Euchner, both SVP and CVP variants) runs on an
  exact LDL^T decomposition; floating point only *guides* the search with
  slack, every acceptance test is exact rational arithmetic;
* successive minima use a quotient-fiber search: project away the span of
  the witnesses found so far (exact Schur complement), enumerate short
  classes of the projected lattice, and solve an exact CVP in each fiber.
  This stays fast even when the minima spread over hundreds of e-folds,
  where a single ball enumeration would blow up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from mpmath import mp, mpf

from .errors import (
    DomainError,
    EnumerationBudgetError,
    NotPositiveDefiniteError,
    SlopesError,
)

Vector = Tuple[int, ...]


def _mpf_to_fraction(x) -> Fraction:
    """Exact value of an mpf (every finite mpf is dyadic)."""
    x = mpf(x)
    sign, man, exp, _ = x._mpf_
    man, exp = int(man), int(exp)  # gmpy backend hands back mpz
    if man == 0 and exp != 0:
        raise DomainError("non-finite value in Gram matrix")
    v = Fraction(man, 1)
    if exp >= 0:
        v *= 2**exp
    else:
        v /= 2**(-exp)
    return -v if sign else v


class GramForm:
    """Symmetric positive-definite quadratic form with exact entries.

    ``entries`` is a dense symmetric matrix of Fractions.  ``log_scale``
    is a common additive log offset: the represented form is
    entries * e^{log_scale}.  ``kind`` is 'exact' or 'approximate'; in the
    approximate case ``eps`` bounds the entrywise error of ``entries``
    (relative to the same log_scale).
    """

    def __init__(self, entries, kind="exact", eps=Fraction(0), log_scale=0):
        rows = [[x if isinstance(x, Fraction) else
                 (Fraction(x) if isinstance(x, int) else _mpf_to_fraction(x))
                 for x in row] for row in entries]
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise DomainError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise DomainError("Gram matrix must be symmetric")
        self.dim = n
        self.entries = rows
        self.kind = kind
        self.eps = Fraction(eps) if not isinstance(eps, Fraction) else eps
        self.log_scale = log_scale
        self._ldl = None

    @classmethod
    def identity(cls, n):
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    def norm_sq(self, v) -> Fraction:
        """Exact value of the form at an integer vector (without e^{log_scale})."""
        G = self.entries
        n = self.dim
        acc = Fraction(0)
        for i in range(n):
            vi = v[i]
            if not vi:
                continue
            row = G[i]
            acc += vi * vi * row[i]
            for j in range(i):
                if v[j]:
                    acc += 2 * vi * v[j] * row[j]
        return acc

    def inner(self, u, v) -> Fraction:
        G = self.entries
        acc = Fraction(0)
        for i in range(self.dim):
            if u[i]:
                row = G[i]
                acc += u[i] * sum(row[j] * v[j] for j in range(self.dim) if v[j])
        return acc

    def is_diagonal(self) -> bool:
        return all(
            self.entries[i][j] == 0
            for i in range(self.dim)
            for j in range(i)
        )

    def principal(self, indices) -> "GramForm":
        idx = list(indices)
        sub = [[self.entries[i][j] for j in idx] for i in idx]
        return GramForm(sub, kind=self.kind, eps=self.eps, log_scale=self.log_scale)

    def ldl(self):
        """Exact LDL^T; caches and serves as the Cholesky/PD witness."""
        if self._ldl is None:
            n = self.dim
            D = [Fraction(0)] * n
            L = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                L[i][i] = Fraction(1)
            for i in range(n):
                for j in range(i + 1):
                    s = self.entries[i][j]
                    for k in range(j):
                        s -= L[i][k] * L[j][k] * D[k]
                    if j < i:
                        if D[j] == 0:
                            raise NotPositiveDefiniteError(
                                "zero pivot in LDL decomposition")
                        L[i][j] = s / D[j]
                    else:
                        if s <= 0:
                            raise NotPositiveDefiniteError(
                                f"nonpositive pivot {s} at index {i}")
                        D[i] = s
            self._ldl = (D, L)
        return self._ldl

    def cholesky_ok(self) -> bool:
        try:
            self.ldl()
            return True
        except NotPositiveDefiniteError:
            return False

    def integer_scaled(self) -> Tuple[List[List[int]], int]:
        """(integer matrix, den) with matrix = entries * den, exactly."""
        den = 1
        for row in self.entries:
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
        M = [[int(x * den) for x in row] for row in self.entries]
        return M, den

    def to_json_dict(self):
        return {
            "dim": self.dim,
            "kind": self.kind,
            "eps": str(self.eps),
            "log_scale": str(self.log_scale),
            "entries": [[str(x) for x in row] for row in self.entries],
        }

    @classmethod
    def from_json_dict(cls, d):
        rows = [[Fraction(x) for x in row] for row in d["entries"]]
        ls = d.get("log_scale", "0")
        try:
            ls = Fraction(ls)
        except ValueError:
            ls = mpf(ls)
        return cls(rows, kind=d["kind"], eps=Fraction(d["eps"]), log_scale=ls)


# ---------------------------------------------------------------------------
# all-integer LLL on a Gram matrix, with transform
# ---------------------------------------------------------------------------


def _lll_integer(G: List[List[int]], delta: Fraction, deep: bool = False):
    """All-integer LLL of the quadratic form G; returns (G', U) with
    G' = U G U^T and |det U| = 1.  Exact; no floating point anywhere.
    """
    n = len(G)
    G = [row[:] for row in G]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    # lam[i][j] = d[j+1]*mu_ij, d[0]=1, d[i+1]/d[i] = ||b_i*||^2
    lam = [[0] * n for _ in range(n)]
    d = [0] * (n + 1)
    d[0] = 1
    p, q = delta.numerator, delta.denominator

    def init_row(k):
        for j in range(k + 1):
            u = G[k][j]
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u <= 0:
                    raise NotPositiveDefiniteError(
                        f"nonpositive Gramian at index {k}")
                d[k + 1] = u

    def size_reduce(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            num = 2 * lam[k][l] + d[l + 1]
            r = num // (2 * d[l + 1])  # nearest integer to lam/d
            if r:
                Uk, Ul = U[k], U[l]
                for t in range(n):
                    Uk[t] -= r * Ul[t]
                Gk, Gl = G[k], G[l]
                gkk = Gk[k] - 2 * r * Gk[l] + r * r * Gl[l]
                for t in range(n):
                    Gk[t] -= r * Gl[t]
                Gk[k] = gkk
                for t in range(n):
                    G[t][k] = Gk[t]
                for i in range(l):
                    lam[k][i] -= r * lam[l][i]
                lam[k][l] -= r * d[l + 1]

    def swap(k):
        U[k], U[k - 1] = U[k - 1], U[k]
        G[k], G[k - 1] = G[k - 1], G[k]
        for t in range(n):
            G[t][k], G[t][k - 1] = G[t][k - 1], G[t][k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lam_ = lam[k][k - 1]
        newdk = (d[k - 1] * d[k + 1] + lam_ * lam_) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lam_ * t) // d[k]
            lam[i][k - 1] = (newdk * t + lam_ * lam[i][k]) // d[k + 1]
        d[k] = newdk

    kmax = 0
    init_row(0)
    k = 1
    while k < n:
        if k > kmax:
            kmax = k
            init_row(k)
        size_reduce(k, k - 1)
        # Lovasz: d[k+1]*d[k-1] >= delta*d[k]^2 - lam^2
        if q * d[k + 1] * d[k - 1] < p * d[k] * d[k] - q * lam[k][k - 1] ** 2:
            swap(k)
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                size_reduce(k, l)
            k += 1
    return G, U, lam, d


def lll_reduce(g: GramForm, delta: Fraction = Fraction(99, 100)):
    """delta-LLL reduction of a positive-definite GramForm.

    Returns (reduced GramForm, U) with reduced = U G U^T and |det U| = 1.
    Exact for exact-rational input (and for approximate input the stored
    dyadic matrix is reduced exactly).
    """
    if not (Fraction(1, 4) < delta < 1):
        raise DomainError(f"LLL delta must lie in (1/4, 1), got {delta}")
    M, den = g.integer_scaled()
    try:
        G2, U, _, _ = _lll_integer(M, delta)
    except NotPositiveDefiniteError:
        raise NotPositiveDefiniteError("input form is not positive definite")
    red = GramForm(
        [[Fraction(x, den) for x in row] for row in G2],
        kind=g.kind, eps=g.eps, log_scale=g.log_scale,
    )
    return red, U


# ---------------------------------------------------------------------------
# exact enumeration (Schnorr-Euchner), SVP and CVP flavors
# ---------------------------------------------------------------------------


def _float_guard(x: Fraction) -> float:
    """float(x) with overflow clamped; used only for search guidance."""
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


class _Enum:
    """Depth-first enumeration over an exact LDL profile.

    D, MU come from GramForm.ldl().  All pruning bounds carry a small
    multiplicative slack in the float guidance; candidate acceptance is
    exact.
    """

    def __init__(self, D, MU, max_nodes=20_000_000):
        self.D = D
        self.MU = MU
        self.n = len(D)
        self.Df = [_float_guard(x) for x in D]
        self.MUf = [[_float_guard(x) for x in row] for row in MU]
        self.max_nodes = max_nodes
        self.nodes = 0

    def _center(self, level, x) -> float:
        # -sum_{t>level} mu[t][level] * x_t   (float guidance)
        c = 0.0
        for t in range(level + 1, self.n):
            if x[t]:
                c -= self.MUf[t][level] * x[t]
        return c

    def _norm_exact(self, x) -> Fraction:
        # sum_j D[j] (x_j + sum_{t>j} mu[t][j] x_t)^2
        acc = Fraction(0)
        for j in range(self.n):
            s = Fraction(x[j])
            for t in range(j + 1, self.n):
                if x[t]:
                    s += self.MU[t][j] * x[t]
            if s:
                acc += self.D[j] * s * s
        return acc

    @staticmethod
    def _first_step(c, x0):
        # zig-zag must move toward the center first so |x - c| is
        # non-decreasing along the step sequence (pruning soundness)
        return 1 if c >= x0 else -1

    def shortest(self, bound: Fraction, collect=None):
        """Shortest nonzero vector with norm^2 <= bound (exact updating bound).

        If ``collect`` is a Fraction, instead returns every nonzero vector
        with exact norm^2 <= collect (both signs appear).
        """
        n = self.n
        collecting = collect is not None
        boundf = _float_guard(collect if collecting else bound) * (1 + 1e-9) + 1e-300
        best = (None, None)
        found = []
        x = [0] * n
        # partial[j] = norm contribution of levels > j
        partial = [0.0] * (n + 1)
        center = [0.0] * n
        step = [0] * n
        level = n - 1
        center[level] = 0.0
        x[level] = 0
        step[level] = 1
        while True:
            self.nodes += 1
            if self.nodes > self.max_nodes:
                raise EnumerationBudgetError(
                    f"enumeration exceeded {self.max_nodes} nodes",
                    partial=found if collecting else best,
                )
            diff = x[level] - center[level]
            val = partial[level + 1] + self.Df[level] * diff * diff
            if val <= boundf:
                if level == 0:
                    if any(x):
                        nv = self._norm_exact(x)
                        if collecting:
                            if nv <= collect:
                                found.append((nv, tuple(x)))
                        elif nv <= bound:
                            if best[0] is None or nv < best[0]:
                                best = (nv, tuple(x))
                                bound = nv
                                boundf = _float_guard(bound) * (1 + 1e-9)
                    # advance at level 0 (zig-zag)
                    x[0] += step[0]
                    step[0] = -step[0] - (1 if step[0] > 0 else -1)
                else:
                    level -= 1
                    partial[level + 1] = val
                    c = self._center(level, x)
                    center[level] = c
                    x[level] = round(c)
                    step[level] = self._first_step(c, x[level])
            else:
                level += 1
                if level >= n:
                    break
                x[level] += step[level]
                step[level] = -step[level] - (1 if step[level] > 0 else -1)
        if collecting:
            return found
        return best

    def closest(self, target, bound=None):
        """CVP: integer x minimizing ||x - target||^2 in the LDL metric.

        ``target`` is a vector of Fractions in lattice coordinates.
        Returns (norm^2 exact, x), or None when ``bound`` is given and no
        lattice point lies within it (the search tree is then pruned
        against the caller's budget, which is what makes fiber searches
        over many hopeless cosets cheap).
        """
        n = self.n
        tf = [_float_guard(t) for t in target]
        # initial candidate from the Babai rounding
        babai = [0] * n
        for level in range(n - 1, -1, -1):
            c = tf[level]
            for t in range(level + 1, n):
                c -= self.MUf[t][level] * (babai[t] - tf[t])
            babai[level] = round(c)
        babai_norm = self._cvp_norm_exact(babai, target)
        if bound is None:
            best = (babai_norm, tuple(babai))
        elif babai_norm <= bound:
            best = (babai_norm, tuple(babai))
        else:
            best = (bound, None)
        boundf = _float_guard(best[0]) * (1 + 1e-9) + 1e-300
        x = [0] * n
        partial = [0.0] * (n + 1)
        center = [0.0] * n
        step = [0] * n
        level = n - 1
        center[level] = self._cvp_center(level, x, tf)
        x[level] = round(center[level])
        step[level] = self._first_step(center[level], x[level])
        while True:
            diff = x[level] - center[level]
            val = partial[level + 1] + self.Df[level] * diff * diff
            if val <= boundf:
                if level == 0:
                    nv = self._cvp_norm_exact(x, target)
                    if nv < best[0]:
                        best = (nv, tuple(x))
                        boundf = _float_guard(nv) * (1 + 1e-9)
                    x[0] += step[0]
                    step[0] = -step[0] - (1 if step[0] > 0 else -1)
                else:
                    level -= 1
                    partial[level + 1] = val
                    c = self._cvp_center(level, x, tf)
                    center[level] = c
                    x[level] = round(c)
                    step[level] = self._first_step(c, x[level])
            else:
                level += 1
                if level >= n:
                    break
                x[level] += step[level]
                step[level] = -step[level] - (1 if step[level] > 0 else -1)
        if best[1] is None:
            return None
        return best

    def _cvp_center(self, level, x, tf):
        c = tf[level]
        for t in range(level + 1, self.n):
            c -= self.MUf[t][level] * (x[t] - tf[t])
        return c

    def _cvp_norm_exact(self, x, target) -> Fraction:
        acc = Fraction(0)
        for j in range(self.n):
            s = Fraction(x[j]) - target[j]
            for t in range(j + 1, self.n):
                s += self.MU[t][j] * (Fraction(x[t]) - target[t])
            if s:
                acc += self.D[j] * s * s
        return acc


def _normalize_sign(v: Sequence[int]) -> Vector:
    for c in v:
        if c:
            return tuple(v) if c > 0 else tuple(-x for x in v)
    return tuple(v)


def _primitive(v: Sequence[int]) -> Vector:
    g = 0
    for c in v:
        g = math.gcd(g, c)
    if g > 1:
        v = [c // g for c in v]
    return _normalize_sign(v)


@dataclass
class ShortestResult:
    vector: Vector
    norm_sq: Fraction
    certified: bool
    note: str = ""


# near-tie threshold below which approximate-Gram results lose the
# certified flag (relative gap)
NEAR_TIE_REL = Fraction(1, 2**32)


def shortest_vector(g: GramForm, limit: int = 64, max_nodes: int = 20_000_000,
                    delta: Fraction = Fraction(99, 100)) -> ShortestResult:
    """Exact SVP by LLL preprocessing + Schnorr-Euchner enumeration.

    Ties between +-v and equal-norm vectors break to the sign-normalized,
    lexicographically largest coefficient vector.  For approximate Gram
    input the result is certified only if the runner-up norm exceeds the
    winner by more than the eps-induced slack.
    """
    if g.dim > limit:
        raise DomainError(
            f"dimension {g.dim} exceeds enumeration limit {limit}; "
            "use heuristic mode (lll_reduce and take the first row)")
    red, U = lll_reduce(g, delta)
    D, L = red.ldl()
    en = _Enum(D, L, max_nodes=max_nodes)
    bound = min(red.entries[i][i] for i in range(red.dim))
    # collect everything within the bound so ties are visible; widen the
    # window a little so eps-near runner-ups show up for the gap test
    window = bound
    if g.kind == "approximate" and g.eps:
        window = bound + min(bound, g.eps * 16 * g.dim**2
                             + bound * Fraction(1, 2**30))
    cands = en.shortest(window, collect=window)
    out = {}
    for nv, x in cands:
        v = _primitive(_apply_transform(x, U))
        cur = out.get(v)
        if cur is None or nv < cur:
            out[v] = g.norm_sq(v)
    items = sorted(out.items(), key=lambda kv: (kv[1], [-c for c in kv[0]]))
    best_v, best_n = items[0]
    certified = g.kind == "exact"
    note = ""
    if g.kind == "approximate":
        slack = g.eps * sum(abs(c) for c in best_v) ** 2
        runner = None
        for v, nv in items[1:]:
            if v != best_v:
                runner = (v, nv)
                break
        if runner is not None:
            gap = runner[1] - best_n
            rslack = slack + g.eps * sum(abs(c) for c in runner[0]) ** 2
            if gap <= rslack or (best_n > 0 and gap / best_n < NEAR_TIE_REL):
                certified = False
                note = "near-tie within eps slack; heuristic result"
            else:
                certified = True
        else:
            certified = True
    return ShortestResult(best_v, best_n, certified, note)


def _apply_transform(x, U):
    n = len(U[0])
    v = [0] * n
    for i, xi in enumerate(x):
        if xi:
            Ui = U[i]
            for j in range(n):
                v[j] += xi * Ui[j]
    return tuple(v)


# ---------------------------------------------------------------------------
# successive minima via quotient-fiber search
# ---------------------------------------------------------------------------


def _integer_kernel(rows: List[List[Fraction]], n: int) -> List[List[int]]:
    """Z-basis of {x in Z^n : rows . x = 0} (saturated kernel)."""
    # clear denominators rowwise, then HNF-style elimination on columns of
    # the transpose augmented with identity
    mat = []
    for r in rows:
        den = 1
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
        mat.append([int(x * den) for x in r])
    # kernel via column reduction of mat acting on identity
    m = len(mat)
    basis = [[int(i == j) for j in range(n)] for i in range(n)]  # candidate vectors
    for r in range(m):
        # reduce basis vectors against the r-th linear form
        vals = [sum(mat[r][j] * b[j] for j in range(n)) for b in basis]
        nz = [i for i, v in enumerate(vals) if v]
        if not nz:
            continue
        # gcd chain: make a single pivot vector carrying the gcd
        piv = nz[0]
        for i in nz[1:]:
            a, b = vals[piv], vals[i]
            while b:
                t = a // b
                vals[piv], vals[i] = b, a - t * b
                basis[piv], basis[i] = basis[i], [
                    basis[piv][j] - t * basis[i][j] for j in range(n)]
                a, b = vals[piv], vals[i]
        # drop the pivot vector (nonzero value), keep the rest
        basis = [b for i, b in enumerate(basis) if vals[i] == 0]
    return basis


def _complete_to_basis(rows: List[List[int]], n: int) -> List[List[int]]:
    """Complete a *saturated* set of independent rows to a basis of Z^n.

    Column-reduce ``rows`` to [R | 0] by unimodular column operations
    (tracking the inverse); saturation forces |det R| = 1, so the rows
    [0 | I] pulled back through the inverse transform complete the basis.
    """
    r = len(rows)
    A = [row[:] for row in rows]
    Winv = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        Winv[i], Winv[j] = Winv[j], Winv[i]

    def col_sub(i, j, q):
        # col_i -= q * col_j ; inverse transform: row_j += q * row_i
        if q == 0:
            return
        for row in A:
            row[i] -= q * row[j]
        for t in range(n):
            Winv[j][t] += q * Winv[i][t]

    for i in range(r):
        # gcd-eliminate A[i][i..] into column i (columns < i already fixed)
        while True:
            nz = [c for c in range(i, n) if A[i][c]]
            if not nz:
                raise SlopesError("rows not independent in basis completion")
            pc = min(nz, key=lambda c: abs(A[i][c]))
            if pc != i:
                col_swap(i, pc)
            done = True
            for c in range(i + 1, n):
                if A[i][c]:
                    col_sub(c, i, A[i][c] // A[i][i])
                    if A[i][c]:
                        done = False
            if done:
                break
    # saturation check: the leading r x r block must be unimodular
    det = _det_int([row[:r] for row in A[:r]])
    if abs(det) != 1:
        raise SlopesError("rows are not saturated; cannot complete basis")
    out = [row[:] for row in rows]
    for j in range(r, n):
        out.append(Winv[j][:])
    if abs(_det_int(out)) != 1:
        raise SlopesError("basis completion produced a non-unimodular matrix")
    return out


def _det_int(rows):
    n = len(rows)
    mat = [[Fraction(x) for x in r] for r in rows]
    det = Fraction(1)
    for i in range(n):
        piv = None
        for r in range(i, n):
            if mat[r][i]:
                piv = r
                break
        if piv is None:
            return 0
        if piv != i:
            mat[i], mat[piv] = mat[piv], mat[i]
            det = -det
        det *= mat[i][i]
        for r in range(i + 1, n):
            f = mat[r][i] / mat[i][i]
            for c in range(i, n):
                mat[r][c] -= f * mat[i][c]
    return det


@dataclass
class MinimaResult:
    values: List[Fraction]
    witnesses: List[Vector]
    complete: bool = True
    note: str = ""


def successive_minima(g: GramForm, m: int, limit: int = 64,
                      max_nodes: int = 20_000_000) -> MinimaResult:
    """First m successive minima with witness vectors.

    The i-th value is the smallest norm^2 of a lattice vector linearly
    independent from the first i-1 witnesses.  Exact for the stored
    (rational/dyadic) Gram.
    """
    if not 1 <= m <= g.dim:
        raise DomainError(f"need 1 <= m <= dim, got m={m}, dim={g.dim}")
    if g.is_diagonal():
        # orthogonal basis: minima are the sorted diagonal, witnesses units
        order = sorted(range(g.dim), key=lambda i: (g.entries[i][i], i))
        vals = [g.entries[i][i] for i in order[:m]]
        wits = [tuple(int(j == i) for j in range(g.dim)) for i in order[:m]]
        return MinimaResult(vals, wits)
    if g.dim > limit:
        raise DomainError(
            f"dimension {g.dim} exceeds enumeration limit {limit}")
    first = shortest_vector(g, limit=limit, max_nodes=max_nodes)
    values = [first.norm_sq]
    wits = [first.vector]
    red, U = lll_reduce(g)
    basis_rows = [tuple(U[i]) for i in range(g.dim)]
    for i in range(1, m):
        val, wit = _next_minimum(g, wits, basis_rows, max_nodes)
        values.append(val)
        wits.append(wit)
    return MinimaResult(values, wits)


def _next_minimum(g: GramForm, wits, basis_rows, max_nodes):
    """Smallest vector outside span(wits), by quotient-fiber search."""
    n = g.dim
    r = len(wits)
    # saturated sublattice S = Q-span(wits) cap Z^n
    forms = _span_orthogonal_forms(wits, n)
    S = _integer_kernel(forms, n)      # rank r basis of the saturation
    assert len(S) == r, "saturation rank mismatch"
    full = _complete_to_basis(S, n)    # rows: S then transversal T
    T = full[r:]
    # quadratic form in the (s, t) block coordinates
    A = [[g.inner(a, b) for b in full] for a in full]
    A = [[Fraction(x) for x in row] for row in A]
    # Schur complement onto t-block: Q(t) = min over real s
    Ass = [row[:r] for row in A[:r]]
    Ast = [row[r:] for row in A[:r]]
    Att = [row[r:] for row in A[r:]]
    Ainv_Ast = _solve_mat(Ass, Ast)    # r x (n-r)
    proj = [[Att[i][j] - sum(Ast[k][j] * Ainv_Ast[k][i] for k in range(r))
             for j in range(n - r)] for i in range(n - r)]
    proj_form = GramForm(proj)
    # upper bound: best LLL-basis row outside the span
    best = None
    for row in basis_rows:
        if not _in_span(row, forms):
            nv = g.norm_sq(row)
            if best is None or nv < best[0]:
                best = (nv, _primitive(row))
    assert best is not None
    # enumerate nonzero classes t with projected norm <= current best and
    # solve the exact CVP in each fiber
    Dp, Lp = proj_form.ldl()
    en = _Enum(Dp, Lp, max_nodes=max_nodes)
    classes = en.shortest(best[0], collect=best[0])
    classes.sort(key=lambda c: c[0])
    sD, sL = GramForm(Ass).ldl()
    cvp = _Enum(sD, sL, max_nodes=max_nodes)
    seen = set()
    for pnorm, tt in classes:
        if pnorm > best[0]:
            break
        key = _normalize_sign(tt)
        if key in seen:
            continue  # +-t give mirrored fibers with equal residuals
        seen.add(key)
        # fiber: v = sum tt_j T_j + sum s_k S_k; the optimal real s is
        # -Ainv_Ast tt, so solve the CVP around it in the S-block metric
        target = [-sum(Ainv_Ast[k][j] * tt[j] for j in range(n - r))
                  for k in range(r)]
        hit = cvp.closest(target, bound=best[0] - pnorm)
        if hit is None:
            continue
        resid, s = hit
        total = pnorm + resid
        if total < best[0]:
            v = [0] * n
            for k in range(r):
                if s[k]:
                    for c in range(n):
                        v[c] += s[k] * full[k][c]
            for j in range(n - r):
                if tt[j]:
                    for c in range(n):
                        v[c] += tt[j] * T[j][c]
            vv = _primitive(v)
            nv = g.norm_sq(vv)
            best = (nv, vv)
    return best


def _span_orthogonal_forms(wits, n):
    """Rational linear forms whose common kernel is Q-span(wits)."""
    # row-reduce wits; the nullspace basis of the span gives the forms
    mat = [[Fraction(x) for x in w] for w in wits]
    # RREF
    pivots = []
    rr = 0
    for c in range(n):
        piv = None
        for r2 in range(rr, len(mat)):
            if mat[r2][c]:
                piv = r2
                break
        if piv is None:
            continue
        mat[rr], mat[piv] = mat[piv], mat[rr]
        f = mat[rr][c]
        mat[rr] = [x / f for x in mat[rr]]
        for r2 in range(len(mat)):
            if r2 != rr and mat[r2][c]:
                g2 = mat[r2][c]
                mat[r2] = [a - g2 * b for a, b in zip(mat[r2], mat[rr])]
        pivots.append(c)
        rr += 1
    free = [c for c in range(n) if c not in pivots]
    forms = []
    for fc in free:
        form = [Fraction(0)] * n
        form[fc] = Fraction(-1)
        for i, pc in enumerate(pivots):
            form[pc] = mat[i][fc]
        forms.append(form)
    return forms


def _in_span(v, forms):
    return all(sum(f[j] * v[j] for j in range(len(v))) == 0 for f in forms)


def _solve_mat(A, B):
    """X with A X = B, exact Fractions (A square nonsingular)."""
    n = len(A)
    m = len(B[0]) if B else 0
    aug = [A[i][:] + B[i][:] for i in range(n)]
    for i in range(n):
        piv = None
        for r in range(i, n):
            if aug[r][i]:
                piv = r
                break
        if piv is None:
            raise NotPositiveDefiniteError("singular block in Schur solve")
        aug[i], aug[piv] = aug[piv], aug[i]
        f = aug[i][i]
        aug[i] = [x / f for x in aug[i]]
        for r in range(n):
            if r != i and aug[r][i]:
                g2 = aug[r][i]
                aug[r] = [a - g2 * b for a, b in zip(aug[r], aug[i])]
    return [row[n:] for row in aug]


# ---------------------------------------------------------------------------
# slope spectra
# ---------------------------------------------------------------------------


@dataclass
class SlopeSpectrum:
    """Sorted (descending) heights lambda_i for one weight/degree."""

    n: int
    values: List
    normalization: str = "hermitian"  # 'hermitian': -1/2 ln; 'sup': -ln
    witnesses: Optional[List[Vector]] = None

    def scaled(self):
        """values / n, the normalized slopes entering the limit measures."""
        return [v / self.n for v in self.values]


def slope_spectrum(minima, log_scale, n, convention="hermitian",
                   witnesses=None) -> SlopeSpectrum:
    """Convert norm^2 minima (times e^{log_scale}) to heights.

    hermitian: lambda = -1/2 (ln m + log_scale); sup: lambda = -(ln m + s).
    Minima equal to 1 at log_scale 0 map to exactly 0.0 (no rounding).
    """
    if convention not in ("hermitian", "sup"):
        raise DomainError(f"unknown convention {convention!r}")
    vals = []
    for m_i in minima:
        if m_i <= 0:
            raise DomainError("minima must be positive")
        if m_i == 1 and log_scale == 0:
            lam = mpf(0)
        else:
            lnm = mp.log(mpf(m_i.numerator) / m_i.denominator) if isinstance(m_i, Fraction) else mp.log(mpf(m_i))
            lam = -(lnm + mpf(log_scale))
        if convention == "hermitian":
            lam = lam / 2
        vals.append(lam)
    order = sorted(range(len(vals)), key=lambda i: (-vals[i], i))
    wit = [witnesses[i] for i in order] if witnesses is not None else None
    return SlopeSpectrum(n, [vals[i] for i in order], convention, wit)
