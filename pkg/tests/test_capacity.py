import random
from fractions import Fraction as F

import pytest
from mpmath import mp, mpf

from slopes.capacity import (
    HALF_DISC,
    QUARTER_DISC,
    UNIT_DISC,
    DiscMetric,
    FactoredDivisor,
    IntPoly,
    cyclotomic_2m_poly,
    cyclotomic_angles,
    disc_gram,
    factorize,
    green_disc,
    l2_boundary_norm_sq,
    m_sequence,
    min_poly,
    sup_norm_poly,
)
from slopes.errors import DomainError, ZeroSeriesError
from slopes.lattice import GramForm, shortest_vector, slope_spectrum, successive_minima

F1 = IntPoly([0, 1])
F2 = IntPoly([-1, 2])
F3 = IntPoly([1, -4, 5])
F4 = IntPoly([1, -8, 27, -44, 29])


def paper_s(multiplicities):
    p = IntPoly([1])
    for f, m in zip((F1, F2, F3, F4), multiplicities):
        for _ in range(m):
            p = p * f
    return IntPoly(list(p.coeffs))


class TestDiscGram:
    def test_unit_disc_identity(self):
        g = disc_gram(UNIT_DISC, 5)
        assert g.entries == GramForm.identity(6).entries

    def test_quarter_disc_n1(self):
        g = disc_gram(QUARTER_DISC, 1)
        assert g.entries == [[F(1), F(1, 4)], [F(1, 4), F(1, 8)]]

    def test_symbolic_oracle(self):
        # independent oracle: sympy contour integral of z^a conj(z)^b
        import sympy as sp

        th = sp.symbols("theta", real=True)
        c, r = sp.Rational(1, 4), sp.Rational(1, 4)
        z = c + r * sp.exp(sp.I * th)
        g = disc_gram(QUARTER_DISC, 2)
        for a in range(3):
            for b in range(3):
                val = sp.integrate(z**a * sp.conjugate(z) ** b, (th, -sp.pi, sp.pi)) / (2 * sp.pi)
                val = sp.nsimplify(sp.simplify(val))
                assert sp.Rational(g.entries[a][b]) == val

    def test_nesting(self):
        g2 = disc_gram(QUARTER_DISC, 2)
        g4 = disc_gram(QUARTER_DISC, 4)
        for i in range(3):
            for j in range(3):
                assert g2.entries[i][j] == g4.entries[i][j]

    def test_scaling_covariance(self):
        # (c, r) -> (tc, tr) multiplies <z^a, z^b> by t^{a+b}
        t = F(3, 2)
        m1 = DiscMetric(F(1, 4), F(1, 16))
        m2 = DiscMetric(F(1, 4) * t, F(1, 16) * t * t)
        g1 = disc_gram(m1, 3)
        g2 = disc_gram(m2, 3)
        for a in range(4):
            for b in range(4):
                assert g2.entries[a][b] == g1.entries[a][b] * t ** (a + b)


class TestSupNorm:
    def test_z_on_unit_disc(self):
        lo, hi = sup_norm_poly(IntPoly([0, 1]), UNIT_DISC)
        assert lo <= 1 <= hi and hi - lo < 1e-8

    def test_2zm1_on_quarter_disc(self):
        lo, hi = sup_norm_poly(IntPoly([-1, 2]), QUARTER_DISC)
        assert lo <= 1 <= hi and hi - lo < 1e-6

    def test_known_quadratic(self):
        lo, hi = sup_norm_poly(IntPoly([-1, 0, 2]), UNIT_DISC)
        assert lo <= 3 <= hi and hi - lo < 1e-6

    def test_l2_below_sup_random(self):
        rng = random.Random(13)
        for _ in range(50):
            deg = rng.randint(1, 6)
            coeffs = [rng.randint(-9, 9) for _ in range(deg)] + [rng.randint(1, 9)]
            p = IntPoly(coeffs)
            l2 = l2_boundary_norm_sq(p, QUARTER_DISC)
            _, hi = sup_norm_poly(p, QUARTER_DISC)
            assert mp.sqrt(mpf(l2.numerator) / l2.denominator) <= hi * (1 + mpf("1e-12"))


class TestMinPoly:
    def test_quarter_disc_degree_one(self):
        r = min_poly(QUARTER_DISC, 1)
        assert r.poly == IntPoly([0, 1])
        assert r.norm_sq == F(1, 8)

    def test_unit_disc_monomial_among_minimizers(self):
        r = min_poly(UNIT_DISC, 6)
        assert r.norm_sq == 1

    def test_exact_vs_heuristic_path(self):
        # clearing denominators + exact SVP vs the heuristic LLL path
        for n in (6, 10, 14):
            a = min_poly(QUARTER_DISC, n, mode="exact")
            b = min_poly(QUARTER_DISC, n, mode="heuristic")
            assert a.norm_sq == b.norm_sq
            assert a.certified

    def test_mode_validation(self):
        with pytest.raises(DomainError):
            min_poly(QUARTER_DISC, 4, mode="wild")
        with pytest.raises(DomainError):
            min_poly(QUARTER_DISC, 0)


class TestFactorize:
    def test_pool_division(self):
        p = IntPoly([0, 1]) * IntPoly([0, 1]) * IntPoly([0, 1]) * IntPoly([-1, 2])
        fd = factorize(IntPoly(list(p.coeffs)), pool=[F1, F2])
        assert fd.multiplicity(F1) == 3
        assert fd.multiplicity(F2) == 1
        assert fd.cofactor is None

    def test_paper_s50_multiplicities(self):
        s50 = paper_s((34, 6, 3, 1))
        fd = factorize(s50)
        assert fd.multiplicity(F1) == 34
        assert fd.multiplicity(F2) == 6
        assert fd.multiplicity(F3) == 3
        assert fd.multiplicity(F4) == 1
        assert fd.cofactor is None

    def test_reconstruction_random(self):
        rng = random.Random(41)
        for _ in range(8):
            p = IntPoly([rng.randint(1, 3)])
            for _ in range(rng.randint(1, 4)):
                q = IntPoly([rng.randint(-4, 4) for _ in range(rng.randint(1, 3))]
                            + [rng.randint(1, 4)])
                p = p * q
            fd = factorize(IntPoly(list(p.coeffs)))
            rec = fd.reconstruct()
            assert IntPoly(list(rec.coeffs)) == IntPoly(list(p.coeffs))

    def test_sympy_oracle(self):
        # independent full factorization oracle
        import sympy as sp

        z = sp.symbols("z")
        s50 = paper_s((34, 6, 3, 1))
        fd = factorize(s50)
        got = {tuple(q.coeffs): m for q, m in fd.factors}
        _, want = sp.factor_list(sum(c * z**i for i, c in enumerate(s50.coeffs)))
        want = {tuple(int(x) for x in reversed(sp.Poly(f, z).all_coeffs())): m
                for f, m in want}
        assert got == want

    def test_zero_rejected(self):
        with pytest.raises(ZeroSeriesError):
            IntPoly([0, 0])

    def test_cofactor_flagged(self):
        # x^8 + x + 1 has an irreducible sextic factor beyond discovery degree
        p = IntPoly([1, 1, 0, 0, 0, 0, 0, 0, 1])
        fd = factorize(p)
        rec = fd.reconstruct()
        assert IntPoly(list(rec.coeffs)) == p
        degs = sorted(q.degree for q, m in fd.factors for _ in range(m))
        if fd.cofactor is not None:
            assert fd.cofactor.degree + sum(degs) == 8


class TestGreen:
    def test_outside_unit_disc(self):
        assert abs(green_disc(2, UNIT_DISC) - mp.log(2)) < 1e-20

    def test_on_boundary_and_inside(self):
        assert green_disc(1, UNIT_DISC) == 0
        assert green_disc(0.3, UNIT_DISC) == 0

    def test_robin_constant_far_field(self):
        # G(z) - ln|z| -> -ln r
        g = green_disc(10**6, QUARTER_DISC)
        assert abs(g - mp.log(10**6) + mp.log(mpf(1) / 4)) < 1e-5


class TestCyclotomic:
    def test_m2(self):
        import math

        assert sorted(cyclotomic_angles(2)) == sorted([math.pi / 2, -math.pi / 2])

    def test_counts(self):
        for m in range(1, 9):
            assert len(cyclotomic_angles(m)) == 2 ** (m - 1)

    def test_weil_height_goes_to_zero(self):
        # Phi_{2^m}(z) = z^{2^{m-1}} + 1 has sup norm 2 on the unit disc
        for m in (2, 4, 6):
            p = cyclotomic_2m_poly(m)
            lo, hi = sup_norm_poly(p, UNIT_DISC)
            assert lo <= 2 <= hi and hi - lo < 1e-6
            lam_over_deg = -mp.log(hi) / p.degree
            assert abs(lam_over_deg) <= mp.log(2) / 2 ** (m - 1) + 1e-9


class TestUnitDiscSemistability:
    def test_l2_spectrum_exactly_zero(self):
        for n in (5, 20):
            g = disc_gram(UNIT_DISC, n)
            res = successive_minima(g, n + 1, limit=128)
            spec = slope_spectrum(res.values, 0, n)
            assert all(v == 0 for v in spec.values)

    def test_sup_spectrum_window(self):
        n = 12
        g = disc_gram(UNIT_DISC, n)
        res = successive_minima(g, n + 1, limit=128)
        for w in res.witnesses:
            lo, hi = sup_norm_poly(IntPoly(list(w)), UNIT_DISC)
            lam_lo, lam_hi = -mp.log(hi) / n, -mp.log(lo) / n
            assert lam_hi >= -mp.log(n + 1) / n - 1e-12
            assert lam_lo <= 1e-12


class TestMSequence:
    def test_unit_disc_all_ones(self):
        rows = m_sequence(UNIT_DISC, [2, 4, 6])
        for r in rows:
            assert r["sup_lo"] <= 1 <= r["sup_hi"]

    def test_fekete_submultiplicativity(self):
        rows = m_sequence(QUARTER_DISC, [2, 4, 6, 8, 10], mode="exact")
        by_deg = {r["degree"]: r for r in rows}
        for l in (2, 4):
            for n in (2, 4, 6):
                if l + n in by_deg:
                    assert by_deg[l + n]["sup_hi"] <= \
                        by_deg[l]["sup_hi"] * by_deg[n]["sup_hi"] * (1 + mpf("1e-6"))
