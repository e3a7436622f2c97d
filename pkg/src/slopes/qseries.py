"""Exact truncated power series in q = e^{2 pi i z} with integer coefficients.

A :class:`QSeries` stores a dense window of arbitrary-precision integer
coefficients starting at its lowest exponent (which may be negative: the
j-function starts at q^-1).  ``precision`` is the first *unknown* exponent:
all exponents e with ``lead_exponent <= e < precision`` are stored exactly.
Arithmetic never extends precision — the result's window is the largest one
that is fully determined by the operands' windows.

Everything here is exact integer arithmetic; the only division used
(for j = E4^3 / Delta) is exact at every step because Delta has unit
leading coefficient.
"""

from __future__ import annotations

import json
import math
from typing import Sequence

from .errors import DomainError, PrecisionError, ZeroSeriesError

_INF = None  # precision value for exact polynomials / constants


def _pmin(p, q):
    if p is None:
        return q
    if q is None:
        return p
    return min(p, q)


class QSeries:
    """Truncated integer power series in q.

    Attributes
    ----------
    lead : int
        Lowest stored exponent.  First stored coefficient is nonzero
        unless the series is identically zero to its precision.
    coeffs : tuple[int, ...]
        Coefficients for exponents lead, lead+1, ..., lead+len-1.
    precision : int or None
        First unknown exponent; None means the series is exact
        (a Laurent polynomial known completely).
    """

    __slots__ = ("lead", "coeffs", "precision")

    def __init__(self, lead: int, coeffs: Sequence[int], precision=_INF):
        coeffs = list(coeffs)
        # strip leading zeros (they carry no information)
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            lead += 1
        # strip stored coefficients at or past the precision horizon
        if precision is not None and lead + len(coeffs) > precision:
            coeffs = coeffs[: max(0, precision - lead)]
        while coeffs and coeffs[-1] == 0 and precision is None:
            coeffs.pop()
        if not coeffs:
            lead = 0
        self.lead = lead
        self.coeffs = tuple(coeffs)
        self.precision = precision

    # -- basic structure ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, n: int) -> int:
        """Coefficient of q^n; raises PrecisionError past the horizon."""
        if self.precision is not None and n >= self.precision:
            raise PrecisionError(
                f"coefficient of q^{n} unknown at precision {self.precision}",
                required=n + 1,
            )
        if n < self.lead or n >= self.lead + len(self.coeffs):
            return 0
        return self.coeffs[n - self.lead]

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self.lead == other.lead
            and self.coeffs == other.coeffs
            and self.precision == other.precision
        )

    def __hash__(self):
        return hash((self.lead, self.coeffs, self.precision))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs[:6]):
            if c:
                terms.append(f"{c}*q^{self.lead + i}")
        body = " + ".join(terms) if terms else "0"
        tail = " + ..." if len(self.coeffs) > 6 else ""
        return f"QSeries({body}{tail}; prec={self.precision})"

    # -- ring operations -------------------------------------------------

    def __neg__(self):
        return QSeries(self.lead, [-c for c in self.coeffs], self.precision)

    def __add__(self, other):
        if isinstance(other, int):
            other = QSeries(0, [other])
        if not isinstance(other, QSeries):
            return NotImplemented
        prec = _pmin(self.precision, other.precision)
        if self.is_zero() and other.is_zero():
            return QSeries(0, [], prec)
        lo = min((s.lead for s in (self, other) if not s.is_zero()))
        hi_terms = []
        hi = max(
            (s.lead + len(s.coeffs) for s in (self, other) if not s.is_zero())
        )
        if prec is not None:
            hi = min(hi, prec)
        for n in range(lo, hi):
            a = self.coeffs[n - self.lead] if self.lead <= n < self.lead + len(self.coeffs) else 0
            b = other.coeffs[n - other.lead] if other.lead <= n < other.lead + len(other.coeffs) else 0
            hi_terms.append(a + b)
        return QSeries(lo, hi_terms, prec)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = QSeries(0, [other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return QSeries(self.lead, [other * c for c in self.coeffs], self.precision)
        if not isinstance(other, QSeries):
            return NotImplemented
        return series_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        return series_pow(self, e)

    def truncate(self, precision: int) -> "QSeries":
        """Restrict the known window to exponents < precision."""
        if self.precision is not None and precision > self.precision:
            raise PrecisionError(
                f"cannot extend precision {self.precision} to {precision}",
                required=None,
            )
        return QSeries(self.lead, self.coeffs, precision)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "lead": self.lead,
                "coeffs": [str(c) for c in self.coeffs],
                "precision": self.precision,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "QSeries":
        d = json.loads(text)
        return cls(d["lead"], [int(c) for c in d["coeffs"]], d["precision"])


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """Truncated product.

    Result precision is min(prec_a + lead_b, prec_b + lead_a): the largest
    exponent window fully determined by both operands.
    """
    pa = None if a.precision is None else a.precision + b.lead
    pb = None if b.precision is None else b.precision + a.lead
    prec = _pmin(pa, pb)
    if a.is_zero() or b.is_zero():
        return QSeries(0, [], prec)
    lead = a.lead + b.lead
    n_out = len(a.coeffs) + len(b.coeffs) - 1
    if prec is not None:
        n_out = min(n_out, prec - lead)
    out = [0] * n_out
    for i, ca in enumerate(a.coeffs):
        if ca == 0:
            continue
        jmax = min(len(b.coeffs), n_out - i)
        for j in range(jmax):
            cb = b.coeffs[j]
            if cb:
                out[i + j] += ca * cb
    return QSeries(lead, out, prec)


def series_pow(a: QSeries, e: int) -> QSeries:
    """a**e by binary exponentiation, e >= 0."""
    if not isinstance(e, int) or e < 0:
        raise DomainError(f"exponent must be a nonnegative integer, got {e}")
    result = QSeries(0, [1])
    base = a
    while e:
        if e & 1:
            result = series_mul(result, base)
        e >>= 1
        if e:
            base = series_mul(base, base)
    return result


def series_div_exact(a: QSeries, b: QSeries) -> QSeries:
    """Exact series division a/b for b with leading coefficient +-1.

    Integral at every step; used for j = E4^3 / Delta.
    """
    if b.is_zero():
        raise ZeroSeriesError("division by zero series")
    if b.coeffs[0] not in (1, -1):
        raise DomainError("divisor must have unit leading coefficient")
    if a.is_zero():
        prec = _pmin(a.precision, None if b.precision is None else b.precision)
        return QSeries(0, [], None if prec is None else prec - b.lead)
    lead = a.lead - b.lead
    # quotient window: see module docstring; both operands limit it
    cand = []
    if a.precision is not None:
        cand.append(a.precision - b.lead)
    if b.precision is not None:
        cand.append(b.precision - b.lead + lead)
    prec = min(cand) if cand else None
    n_out = len(a.coeffs)
    if prec is not None:
        n_out = min(n_out if a.precision is None else 10**18, prec - lead)
        n_out = min(n_out, prec - lead)
    inv_lead = b.coeffs[0]
    out = []
    for t in range(n_out):
        acc = a.coeffs[t] if t < len(a.coeffs) else 0
        for j in range(1, min(t, len(b.coeffs) - 1) + 1):
            acc -= b.coeffs[j] * out[t - j]
        out.append(acc * inv_lead)
    return QSeries(lead, out, prec)


def ord_infinity(f: QSeries) -> int:
    """Smallest exponent with nonzero coefficient."""
    if f.is_zero():
        raise ZeroSeriesError("ord_infinity of the zero series")
    return f.lead


def content(f: QSeries) -> int:
    """Positive gcd of all stored coefficients."""
    if f.is_zero():
        raise ZeroSeriesError("content of the zero series")
    g = 0
    for c in f.coeffs:
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


# ---------------------------------------------------------------------------
# Constructors for the specific series the lattices need
# ---------------------------------------------------------------------------


def euler_product(N: int) -> QSeries:
    """prod_{n>=1} (1 - q^n) to exponents < N, via the pentagonal expansion."""
    out = [0] * N
    out[0] = 1
    m = 1
    while True:
        g1 = m * (3 * m - 1) // 2
        g2 = m * (3 * m + 1) // 2
        if g1 >= N and g2 >= N:
            break
        s = -1 if m % 2 else 1
        if g1 < N:
            out[g1] += s
        if g2 < N:
            out[g2] += s
        m += 1
    return QSeries(0, out, N)


def euler_product_direct(N: int) -> QSeries:
    """prod (1 - q^n) by literal term-by-term multiplication (test oracle)."""
    acc = QSeries(0, [1], N)
    for n in range(1, N):
        acc = series_mul(acc, QSeries(0, [1] + [0] * (n - 1) + [-1], N))
    return acc


def series_delta(N: int) -> QSeries:
    """Normalized weight-12 cusp form Delta = q prod (1-q^n)^24, truncated after q^N."""
    if N < 1:
        raise PrecisionError(f"series_delta needs N >= 1, got {N}", required=1)
    p24 = series_pow(euler_product(N), 24)
    return series_mul(QSeries(1, [1]), p24)


def series_eisenstein4(N: int) -> QSeries:
    """E4 = 1 + 240 sum sigma_3(n) q^n, truncated after q^N."""
    if N < 0:
        raise PrecisionError(f"series_eisenstein4 needs N >= 0, got {N}", required=0)
    sig = [0] * (N + 1)
    for d in range(1, N + 1):
        d3 = d * d * d
        for n in range(d, N + 1, d):
            sig[n] += d3
    out = [240 * s for s in sig]
    out[0] = 1
    return QSeries(0, out, N + 1)


def series_j(N: int) -> QSeries:
    """j = E4^3 / Delta = 1/q + 744 + 196884 q + ..., truncated after q^N."""
    if N < 0:
        raise PrecisionError(f"series_j needs N >= 0, got {N}", required=0)
    e4 = series_eisenstein4(N + 2)
    num = series_pow(e4, 3)
    den = series_delta(N + 2)
    return series_div_exact(num, den).truncate(N + 1)


def basis_form(k: int, ell: int, N: int) -> QSeries:
    """Delta^k j^{k-ell}: the weight-12k integral cusp form with lowest term q^ell.

    These forms, for ell = 1..k, are a Z-basis of the weight-12k cusp
    lattice; the coefficient of q^ell is 1.
    """
    if not 1 <= ell <= k:
        raise DomainError(f"need 1 <= ell <= k, got ell={ell}, k={k}")
    if N < ell:
        raise PrecisionError(f"need N >= ell = {ell}", required=ell)
    # Delta^k starts at q^k, j^{k-ell} at q^{-(k-ell)}: grow inputs so the
    # product window reaches q^N.
    d = series_delta(N + k - ell + 1)
    dk = series_pow(d, k)
    if k == ell:
        return dk.truncate(N + 1)
    j = series_j(N + 1 - ell + k)  # j known to exponent N - ell + k inclusive
    jk = series_pow(j, k - ell)
    return series_mul(dk, jk).truncate(N + 1)
