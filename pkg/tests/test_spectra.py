import math

import numpy as np
import pytest
from fractions import Fraction

from bohrlab.errors import PreconditionError
from bohrlab.laurent import parse
from bohrlab.spectra import (complex_roots, expansivity_check, hull_total_rise,
                             mahler_measure, newton_polygon, padic_escape)
from conftest import random_poly

PHI = (1 + math.sqrt(5)) / 2


class TestComplexRoots:
    def test_linear(self):
        data = complex_roots(parse("z-2"))
        assert data.roots == (2 + 0j,)
        assert data.rho == 2.0

    def test_golden_ratio(self):
        data = complex_roots(parse("z^2-z-1"))
        assert abs(data.rho - PHI) < 1e-12
        got = sorted(z.real for z in data.roots)
        assert abs(got[0] - (1 - math.sqrt(5)) / 2) < 1e-12

    def test_unit_circle_pair(self):
        data = complex_roots(parse("5*z^2-6*z+5"))
        assert all(abs(abs(z) - 1.0) < 1e-9 for z in data.roots)
        assert abs(data.rho - 1.0) < 1e-9
        assert sorted(np.round([z.real for z in data.roots], 9)) == [0.6, 0.6]

    def test_residual_certified(self, rng):
        for _ in range(50):
            f = random_poly(rng, dim=1, max_terms=5, max_exp=6, max_coeff=9)
            if len(f.support()) < 2:
                continue
            data = complex_roots(f)
            assert data.residual_bound < 1e-8

    def test_root_product_matches_trailing_ratio(self, rng):
        # |prod lambda_i| = |f_0 / f_r| after unit normalization
        for _ in range(50):
            f = random_poly(rng, dim=1, max_terms=5, max_exp=6, max_coeff=9)
            lo, cs = f.shift((-min(e[0] for e in f.support()),)).dense_coeffs()
            if len(cs) < 2 or cs[0] == 0:
                continue
            data = complex_roots(f)
            prod = np.prod([abs(z) for z in data.roots])
            assert abs(prod - abs(cs[0] / cs[-1])) < 1e-6 * max(1.0, prod)

    def test_degree_zero_rejected(self):
        with pytest.raises(PreconditionError):
            complex_roots(parse("7"))


class TestMahler:
    def test_constant(self):
        assert abs(mahler_measure(parse("2")).value - math.log(2)) < 1e-15

    def test_log5_jensen(self):
        res = mahler_measure(parse("5*z^2-6*z+5"), method="jensen")
        assert abs(res.value - math.log(5)) < 1e-9

    def test_golden_mean_entropy(self):
        res = mahler_measure(parse("z^2-z-1"))
        assert abs(res.value - math.log(PHI)) < 1e-12

    def test_quadrature_agrees_with_jensen(self):
        for text in ["z-2", "z^2-z-1", "3-z", "2*z^2-z-2"]:
            j = mahler_measure(parse(text), method="jensen").value
            q = mahler_measure(parse(text), method="quadrature", grid=4096)
            assert not q.unreliable
            assert abs(j - q.value) < 1e-3, text

    def test_refinement_delta_small_for_expansive(self):
        q = mahler_measure(parse("3-z1-z2"), method="quadrature", grid=64)
        assert q.refine_delta < 1e-3
        assert abs(q.value - mahler_measure(parse("3-z1-z2"), method="quadrature",
                                            grid=128).value) < 1e-3

    def test_zero_on_torus_flagged(self):
        q = mahler_measure(parse("1-z"), method="quadrature", grid=16)
        assert q.unreliable

    def test_unit_shift_invariance(self):
        a = mahler_measure(parse("z^2-z-1")).value
        b = mahler_measure(parse("z^2-z-1") * parse("z^-5")).value
        assert abs(a - b) < 1e-12

    def test_small_grid_rejected(self):
        with pytest.raises(PreconditionError):
            mahler_measure(parse("z-2"), method="quadrature", grid=4)


class TestPadic:
    def test_symmetric_example(self):
        esc = padic_escape(parse("5*z^2-6*z+5"))
        assert esc.prime == 5
        assert esc.slope == Fraction(1)
        assert esc.escape_modulus == 5.0
        assert esc.witness_index == 1
        assert esc.hull == ((0, 1), (1, 0), (2, 1))

    def test_monic_has_no_escape(self):
        assert padic_escape(parse("z^2-z-1")) is None

    def test_2z_minus_3(self):
        esc = padic_escape(parse("2*z-3"))
        assert esc.prime == 2 and esc.slope == Fraction(1)
        assert esc.escape_modulus == 2.0

    def test_content_rejected(self):
        with pytest.raises(PreconditionError):
            padic_escape(parse("2*z-2"))

    def test_hull_reconstruction(self, rng):
        # total rise of the polygon equals v_p(f_r) - v_p(f_0)
        import sympy

        for _ in range(40):
            f = random_poly(rng, dim=1, max_terms=4, max_exp=5, max_coeff=20)
            sup = sorted(e[0] for e in f.support())
            lo, cs = f.shift((-sup[0],)).dense_coeffs()
            if len(cs) < 2 or cs[0] == 0:
                continue
            for p in (2, 3, 5):
                rise = hull_total_rise(f, p)
                assert rise == sympy.multiplicity(p, cs[-1]) - sympy.multiplicity(p, cs[0])


class TestExpansivity:
    def test_two_dim_example(self):
        cert = expansivity_check(parse("3-z1-z2"), grid=64)
        assert cert is not None
        assert abs(cert.grid_min - 1.0) < 1e-12
        assert cert.argmin == (0, 0)
        assert cert.margin > 0

    def test_zero_on_torus_never_certified(self):
        for grid in (16, 64, 256):
            assert expansivity_check(parse("1-z1", dim=2), grid=grid) is None

    def test_univariate(self):
        cert = expansivity_check(parse("z-2"), grid=16)
        assert cert is not None and abs(cert.grid_min - 1.0) < 1e-12

    def test_margin_implies_stable_quadrature(self):
        f = parse("3-z1-z2")
        assert expansivity_check(f, grid=64) is not None
        q = mahler_measure(f, method="quadrature", grid=64)
        assert math.isfinite(q.value) and q.refine_delta < 1e-3
