import pytest
from hypothesis import given, settings

from bohrlab.errors import DimensionMismatch, ParseError, PreconditionError
from bohrlab.laurent import (LaurentPoly, cyclotomic, dilate, divides, embed,
                             kronecker_factor, parse, univariate_part)
from conftest import small_laurent


class TestParse:
    def test_two_variable_example(self):
        f = parse("3 - z1 - z2")
        assert f.dim == 2
        assert f.terms == {(0, 0): 3, (1, 0): -1, (0, 1): -1}

    def test_negative_exponent(self):
        f = parse("z^-1 + z")
        assert f.terms == {(-1,): 1, (1,): 1}

    def test_explicit_coefficients(self):
        f = parse("5*z^2 - 6*z + 5")
        assert f.terms == {(0,): 5, (1,): -6, (2,): 5}

    def test_roundtrip_through_render(self):
        for text in ["3 - z1 - z2", "z^-1 + z", "5*z^2 - 6*z + 5",
                     "-7", "2*z1^-3*z2^2 - z2", "z^3"]:
            f = parse(text)
            assert parse(f.render(), dim=f.dim) == f

    def test_syntax_error_reports_position(self):
        with pytest.raises(ParseError) as err:
            parse("3 + $")
        assert err.value.position is not None

    def test_mixed_variable_styles_rejected(self):
        with pytest.raises(ParseError):
            parse("z + z1")

    def test_declared_dim_too_small(self):
        with pytest.raises(DimensionMismatch):
            parse("z1 + z3", dim=2)

    def test_repeated_terms_collapse(self):
        assert parse("z + z - 2*z").is_zero()


class TestArithmetic:
    def test_difference_of_squares(self):
        assert parse("z-2") * parse("z+2") == parse("z^2-4")

    def test_unit_identity(self):
        f = parse("3 - z1 - z2")
        assert f * LaurentPoly.constant(1, 2) == f

    def test_hand_convolution_square(self):
        f = parse("3 - z1 - z2")
        expected = parse("9 - 6*z1 - 6*z2 + z1^2 + 2*z1*z2 + z2^2")
        assert f * f == expected

    def test_involution_examples(self):
        assert parse("z-2").involute() == parse("z^-1 - 2")
        assert parse("3-z1-z2").involute() == parse("3 - z1^-1 - z2^-1")
        assert parse("7").involute() == parse("7")

    def test_involution_is_involutive(self):
        f = parse("2*z1^-3*z2^2 - z2 + 5")
        assert f.involute().involute() == f

    @given(small_laurent(dim=1), small_laurent(dim=1))
    def test_mul_commutes(self, f, g):
        assert f * g == g * f

    @given(small_laurent(dim=2, max_terms=3, max_exp=2),
           small_laurent(dim=2, max_terms=3, max_exp=2),
           small_laurent(dim=2, max_terms=3, max_exp=2))
    @settings(max_examples=60)
    def test_mul_associates_and_distributes(self, f, g, h):
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h

    @given(small_laurent(dim=1), small_laurent(dim=1))
    def test_involute_is_multiplicative(self, f, g):
        assert (f * g).involute() == f.involute() * g.involute()

    def test_norms(self):
        f = parse("3 - z1 - z2")
        assert f.l1_norm() == 5
        assert f.linf_norm() == 3
        assert f.l1_norm() >= f.linf_norm() >= 1


class TestDivides:
    def test_explicit_factorization(self):
        assert divides(parse("z-2"), parse("z^2-4")) == parse("z+2")

    def test_unit_quotient(self):
        assert divides(parse("z-2"), parse("2-z")) == parse("-1")

    def test_non_divisible_multivariate(self):
        assert divides(parse("3-z1-z2"), parse("1+z1", dim=2)) is None

    def test_zero_divisor_rejected(self):
        with pytest.raises(PreconditionError):
            divides(LaurentPoly.zero(1), parse("z"))

    def test_laurent_units_are_transparent(self):
        f = parse("3-z1-z2")
        q = parse("1 + 5*z1*z2^-3")
        assert divides(f, f * q) == q

    def test_integrality_is_enforced(self):
        # 2z - 2 divides 2z^2 - 2 over Q with quotient (z+1), over Z too;
        # but it does not divide z - 1 (quotient 1/2)
        assert divides(parse("2*z-2"), parse("2*z^2-2")) == parse("z+1")
        assert divides(parse("2*z-2"), parse("z-1")) is None

    @given(small_laurent(dim=1, allow_zero=False), small_laurent(dim=1))
    @settings(max_examples=80)
    def test_mul_then_divide_roundtrip(self, f, q):
        v = f * q
        got = divides(f, v)
        assert got is not None and got * f == v

    @given(small_laurent(dim=2, max_terms=3, max_exp=2, allow_zero=False),
           small_laurent(dim=2, max_terms=3, max_exp=2))
    @settings(max_examples=20, deadline=None)
    def test_mul_then_divide_roundtrip_2d(self, f, q):
        v = f * q
        got = divides(f, v)
        assert got is not None and got * f == v


class TestKronecker:
    def test_phi6(self):
        kf = kronecker_factor(parse("z^2-z+1"))
        assert kf.sign == 1 and kf.monomial_shift == 0
        assert kf.factors == ((6, 1),)

    def test_positive_entropy_is_rejected(self):
        assert kronecker_factor(parse("z^2-z-1")) is None

    def test_pure_monomial(self):
        kf = kronecker_factor(parse("z^3"))
        assert kf.sign == 1 and kf.monomial_shift == 3 and kf.factors == ()

    def test_reconstruction(self):
        for text in ["z^2-z+1", "z^4-1", "z^2+z+1", "1+z", "z-1", "z^6-1",
                     "z^4+z^2+1"]:
            f = parse(text)
            kf = kronecker_factor(f)
            assert kf is not None, text
            assert kf.reconstruct() == f, text

    def test_negative_leading_sign(self):
        f = -parse("z^2-z+1")
        kf = kronecker_factor(f)
        assert kf.sign == -1 and kf.reconstruct() == f

    def test_content_two_rejected(self):
        assert kronecker_factor(parse("2*z-2")) is None

    def test_agreement_with_mahler_measure(self):
        from bohrlab.spectra import mahler_measure

        for text in ["z^2-z+1", "z^2-z-1", "z-2", "z^4-1", "5*z^2-6*z+5",
                     "z^3", "z^2+z+1", "z^10-1"]:
            f = parse(text)
            zero_entropy = kronecker_factor(f) is not None
            assert zero_entropy == (abs(mahler_measure(f).value) < 1e-9), text


class TestHelpers:
    def test_dilate(self):
        assert dilate(cyclotomic(1), 3) == parse("z^3-1")

    def test_embed_and_univariate_part(self):
        g = parse("z^2-z-1")
        f = embed(g, 3, axis=0)
        assert f.dim == 3
        assert univariate_part(f, axis=0) == g
        assert univariate_part(parse("3-z1-z2"), axis=0) is None

    def test_json_roundtrip(self):
        f = parse("2*z1^-3*z2^2 - z2 + 5")
        assert LaurentPoly.from_json(f.to_json()) == f
