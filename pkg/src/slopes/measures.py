"""Empirical slope measures, Serre atomic/diffuse decompositions, and
equidistribution diagnostics.

Masses are exact rationals so probability conservation is literal; only
atom locations are floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from mpmath import mp, mpf

from .capacity import FactoredDivisor, IntPoly
from .errors import DomainError
from .lattice import SlopeSpectrum


@dataclass
class EmpiricalMeasure:
    """Discrete measure on R: atoms [(location, mass)], masses rational."""

    atoms: List[Tuple[object, Fraction]]

    def total_mass(self) -> Fraction:
        return sum((m for _, m in self.atoms), Fraction(0))

    def is_probability(self) -> bool:
        return self.total_mass() == 1 and all(m >= 0 for _, m in self.atoms)

    def cdf_points(self):
        """Merged sorted atom locations with cumulative masses."""
        merged: Dict[float, Fraction] = {}
        for x, m in self.atoms:
            key = mpf(x)
            merged[key] = merged.get(key, Fraction(0)) + m
        xs = sorted(merged)
        acc = Fraction(0)
        out = []
        for x in xs:
            acc += merged[x]
            out.append((x, acc))
        return out

    def mass_above(self, threshold) -> Fraction:
        return sum((m for x, m in self.atoms if mpf(x) > threshold), Fraction(0))


def empirical_measure(spectrum: SlopeSpectrum) -> EmpiricalMeasure:
    """nu_n: mass 1/r at each lambda_i / n."""
    vals = spectrum.values
    if not vals:
        raise DomainError("empty spectrum")
    r = len(vals)
    return EmpiricalMeasure([(v / spectrum.n, Fraction(1, r)) for v in vals])


def measure_distance(a: EmpiricalMeasure, b: EmpiricalMeasure):
    """Kolmogorov-Smirnov distance, exact on the merged atom set."""
    if not a.is_probability() or not b.is_probability():
        raise DomainError("KS distance needs probability measures")
    pa = a.cdf_points()
    pb = b.cdf_points()
    xs = sorted({x for x, _ in pa} | {x for x, _ in pb})

    def cdf(points, x):
        acc = Fraction(0)
        for px, c in points:
            if px <= x:
                acc = c
            else:
                break
        return acc

    best = Fraction(0)
    for x in xs:
        d = abs(cdf(pa, x) - cdf(pb, x))
        if d > best:
            best = d
    return best


# ---------------------------------------------------------------------------
# Serre decomposition of zero distributions
# ---------------------------------------------------------------------------


@dataclass
class SerreDecomposition:
    """Atomic coefficients per persistent irreducible divisor + diffuse mass.

    c_0 + sum c_D = 1 by construction (rational arithmetic).
    """

    atomic: List[Tuple[IntPoly, Fraction]]
    diffuse: Fraction
    window: int
    raw_fractions: List[Dict[str, str]] = field(default_factory=list)

    def coefficient(self, d: IntPoly) -> Fraction:
        for q, c in self.atomic:
            if q == d:
                return c
        return Fraction(0)

    def check(self) -> bool:
        return (self.diffuse >= 0 and all(c >= 0 for _, c in self.atomic)
                and self.diffuse + sum(c for _, c in self.atomic) == 1)


def serre_decompose(divisors: Sequence[Tuple[int, FactoredDivisor]],
                    window: Optional[int] = None) -> SerreDecomposition:
    """Estimate atomic coefficients from a sequence of factored divisors.

    ``divisors`` is [(degree, factorization)], degrees strictly increasing.
    For each irreducible D occurring in *every* row of the tail window
    (default: the last half), c_D is the window average of
    mult_D * deg(D) / deg(s_n); transient divisors get c_D = 0 and their
    mass lands in the diffuse part c_0 = 1 - sum c_D.
    """
    rows = list(divisors)
    if not rows:
        raise DomainError("empty divisor sequence")
    degs = [d for d, _ in rows]
    if any(d2 <= d1 for d1, d2 in zip(degs, degs[1:])):
        raise DomainError("degrees must be strictly increasing")
    for d, fd in rows:
        if fd.degree() == 0:
            raise DomainError("degree-zero divisor in sequence")
    if window is None:
        window = (len(rows) + 1) // 2
    window = max(1, min(window, len(rows)))
    tail = rows[-window:]
    # collect fractions per divisor per row
    per_div: Dict[IntPoly, List[Fraction]] = {}
    raw = []
    for deg_n, fd in tail:
        total_deg = fd.degree()
        rowdict = {}
        for q, m in fd.factors:
            frac = Fraction(m * q.degree, total_deg)
            per_div.setdefault(q, []).append(frac)
            rowdict[q.pretty()] = str(frac)
        raw.append({"degree": str(deg_n), **rowdict})
    atomic = []
    for q in sorted(per_div, key=lambda t: (t.degree, t.coeffs)):
        vals = per_div[q]
        if len(vals) == window:  # persistent across the whole window
            atomic.append((q, sum(vals, Fraction(0)) / window))
    c0 = 1 - sum((c for _, c in atomic), Fraction(0))
    out = SerreDecomposition(atomic, c0, window, raw)
    if not out.check():
        raise DomainError("Serre coefficients failed the mass constraint")
    return out


# ---------------------------------------------------------------------------
# equidistribution on the circle
# ---------------------------------------------------------------------------


def equidistribution_test(angles: Sequence[float]) -> float:
    """Star discrepancy of an angle multiset against the uniform circle.

    Angles are normalized to [0, 1); the discrepancy is the exact
    sup over anchored arcs [0, t) evaluated at atom boundaries:
    max_i max(i/N - x_(i), x_(i) - (i-1)/N).
    """
    if not angles:
        raise DomainError("empty angle list")
    n = len(angles)
    xs = sorted((math.fmod(float(a), 2 * math.pi) / (2 * math.pi)) % 1.0
                for a in angles)
    best = 0.0
    for i, x in enumerate(xs, start=1):
        best = max(best, i / n - x, x - (i - 1) / n)
    return best


# ---------------------------------------------------------------------------
# filtered cusp-form measures
# ---------------------------------------------------------------------------


def filtered_measure(lattice, L: int) -> EmpiricalMeasure:
    """nu_{12k,L}: slope measure of the sublattice of forms with
    ord >= k/L, normalized by its rank k' = k + 1 - ceil(k/L) in both the
    mass and the atom locations."""
    from .lattice import slope_spectrum, successive_minima
    from .petersson import filtered_sublattice

    k = lattice.k
    idx = filtered_sublattice(k, L)
    sub = lattice.gram.principal([i - 1 for i in idx])
    res = successive_minima(sub, len(idx), limit=max(64, len(idx)))
    spec = slope_spectrum(res.values, lattice.log_scale, len(idx), "hermitian")
    return empirical_measure(spec)
