import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from bohrlab.errors import CollisionError, PreconditionError
from bohrlab.laurent import LaurentPoly, divides, embed, parse
from bohrlab.mgood import (C1_DIGITS, MGoodCertificate, _arch_margins,
                           _reduction_rows, certificate_from_json,
                           certificate_to_json, certify_archimedean,
                           certify_gap, certify_padic, confirm_certificate,
                           falsify, lift_univariate, verify_certificate)
from bohrlab import _kernels
from conftest import random_poly

PHI = (1 + math.sqrt(5)) / 2


class TestArchimedean:
    def test_doubling_map(self):
        # m = 2 fails Case I at k = 1 with equality 2^3 = 2^2 + 2*2
        cert = certify_archimedean(parse("z-2"))
        assert cert.m == 3 and cert.route == "archimedean"

    def test_golden_mean(self):
        assert certify_archimedean(parse("z^2-z-1")).m == 4

    def test_large_root_vacuous_shift_range(self):
        # at m = 1 the shift range 0 < k < m is empty, so only rho > 3 matters
        assert certify_archimedean(parse("z-10")).m == 1

    def test_unit_circle_inapplicable(self):
        with pytest.raises(PreconditionError):
            certify_archimedean(parse("5*z^2-6*z+5"))

    def test_monotone_in_m(self):
        # once certified at m, the margin inequalities hold for all larger m
        rho = PHI
        m0 = certify_archimedean(parse("z^2-z-1")).m
        for m in range(m0, m0 + 12):
            c1, c2i, c2ii = _arch_margins(rho, m)
            assert c1 > 0 and c2i > 0 and c2ii > 0


class TestPadic:
    def test_symmetric_example(self):
        cert = certify_padic(parse("5*z^2-6*z+5"))
        assert cert.m == 2 and cert.params["prime"] == 5
        assert not cert.params["via_involution"]

    def test_2z_minus_3(self):
        cert = certify_padic(parse("2*z-3"))
        assert cert.m == 2 and cert.params["prime"] == 2

    def test_monic_no_escape(self):
        assert certify_padic(parse("z^2-z-1")) is None

    def test_involution_route(self):
        # leading coefficient 1, constant -2: the escape sits in involute(f)
        cert = certify_padic(parse("z-2"))
        assert cert is not None and cert.params["via_involution"]
        assert cert.params["prime"] == 2 and cert.m == 2


class TestFalsify:
    def test_doubling_first_hit(self):
        ce = falsify(parse("z-2"), 1, 1, "C1")
        assert ce.witness == parse("2-z")
        assert ce.quotient == parse("-1")
        assert ce.epsilon == (2, -1)

    def test_self_witness_at_m1(self):
        f = parse("z^2-z-1")
        ce = falsify(f, 1, 2, "C1")
        assert ce.witness == f and ce.quotient == parse("1")
        assert ce.epsilon == (-1, -1, 1)

    def test_certified_m_clears_horizon_8(self):
        f = parse("z^2-z-1")
        assert falsify(f, 4, 8, "C1") is None
        assert falsify(f, 4, 8, "C2") is None

    def test_c2_vacuous_at_m1(self):
        assert falsify(parse("z-2"), 1, 6, "C2") is None

    def test_c2_counterexample_shape(self):
        # z - 1 is cyclotomic, so no m makes the shifted families free:
        # 1 - z^k evaluates to zero at 1
        f = parse("z-1")
        ce = falsify(f, 2, 2, "C2")
        assert ce is not None and ce.condition == "C2"
        assert ce.quotient * f == ce.witness
        assert ce.k == 1

    def test_witness_times_f_identity(self, rng):
        for _ in range(20):
            f = random_poly(rng, dim=1, max_terms=3, max_exp=3, max_coeff=3)
            if len(f.support()) < 2:
                continue
            for condition in ("C1", "C2"):
                ce = falsify(f, 2, 3, condition)
                if ce is not None:
                    assert ce.quotient * f == ce.witness
                    assert not ce.witness.is_zero()

    def test_matches_dense_scan(self, rng):
        from bohrlab.laurent import _positive_orthant
        import numpy as np

        for _ in range(25):
            f = random_poly(rng, dim=1, max_terms=3, max_exp=3, max_coeff=3)
            g, _ = _positive_orthant(f)
            _, cs = g.dense_coeffs()
            if len(cs) < 2 or g.content() != 1:
                continue
            m, D = 2, 3
            rows_map, _ = _reduction_rows(g, [m * j for j in range(D + 1)])
            rows = np.array([rows_map[m * j] for j in range(D + 1)], dtype=np.int64)
            idx = _kernels.c1_dense_scan(rows, np.array(C1_DIGITS, dtype=np.int64))
            ce = falsify(f, m, D, "C1")
            if ce is None:
                assert idx == -1
            else:
                # decode the dense index and compare with the ordered search
                digits = []
                v = idx
                for _ in range(D + 1):
                    digits.append(C1_DIGITS[v % 5])
                    v //= 5
                assert tuple(reversed(digits)) == ce.epsilon

    def test_univariate_lift_slices(self):
        f2 = embed(parse("z^2-z-1"), 2, axis=0)
        assert falsify(f2, 4, 2, "C1") is None
        ce = falsify(f2, 1, 2, "C1")
        assert ce is not None and divides(f2, ce.witness) is not None

    def test_general_2d(self):
        f = parse("3-z1-z2")
        # 3 - z1 - z2 divides no small lacunary pattern even at m = 1
        assert falsify(f, 1, 1, "C1") is None
        assert falsify(f, 2, 1, "C2") is None

    def test_degree_cap(self):
        with pytest.raises(PreconditionError):
            falsify(parse("z-2"), 64, 100, "C1")


class TestGapRoute:
    @pytest.fixture(scope="class")
    def setup(self):
        from bohrlab.homoclinic import fundamental_homoclinic

        f = parse("3-z1-z2")
        return f, fundamental_homoclinic(f, B=32)

    def test_certificate(self, setup):
        f, w = setup
        cert = certify_gap(f, w, H=2, irreducible=True)
        assert cert.m == 48 and cert.params["R"] == 8

    def test_h1(self, setup):
        f, w = setup
        cert = certify_gap(f, w, H=1, irreducible=True)
        assert cert.m == 36 and cert.params["R"] == 6

    def test_irreducibility_must_be_acknowledged(self, setup):
        f, w = setup
        with pytest.raises(PreconditionError):
            certify_gap(f, w, H=2)

    def test_singleton_support_rejected(self):
        from bohrlab.homoclinic import fundamental_homoclinic

        f = parse("2", dim=2)
        w = fundamental_homoclinic(f, B=4)
        with pytest.raises(PreconditionError):
            certify_gap(f, w, H=2, irreducible=True)


class TestLift:
    def test_lift_preserves_m(self):
        inner = certify_archimedean(parse("z^2-z-1"))
        f = embed(parse("z^2-z-1"), 2, axis=0)
        cert = lift_univariate(inner, f)
        assert cert.m == inner.m and cert.route == "univariate_lift"
        confirm_certificate(cert, 1)

    def test_padic_lift(self):
        inner = certify_padic(parse("5*z^2-6*z+5"))
        f = embed(parse("5*z^2-6*z+5"), 3, axis=0)
        cert = lift_univariate(inner, f)
        assert cert.m == 2

    def test_wrong_variable_rejected(self):
        inner = certify_archimedean(parse("z^2-z-1"))
        wrong = embed(parse("z^2-z-1"), 2, axis=1)
        with pytest.raises(PreconditionError):
            lift_univariate(inner, wrong)


class TestCertificateLifecycle:
    @pytest.mark.parametrize("text,route", [
        ("z^2-z-1", "archimedean"),
        ("5*z^2-6*z+5", "padic"),
    ])
    def test_serialize_verify_roundtrip(self, text, route):
        f = parse(text)
        cert = (certify_archimedean(f) if route == "archimedean"
                else certify_padic(f))
        blob = json.dumps(certificate_to_json(cert))
        back = certificate_from_json(json.loads(blob))
        assert back.m == cert.m and back.f == f
        lines = verify_certificate(back)
        assert all(line.startswith("ok:") for line in lines)

    def test_tampered_certificate_fails(self):
        cert = certify_archimedean(parse("z^2-z-1"))
        bad = MGoodCertificate(f=cert.f, m=2, route="archimedean",
                               params=cert.params)
        with pytest.raises(PreconditionError):
            verify_certificate(bad)

    def test_soundness_via_confirm(self):
        cert = certify_archimedean(parse("z^2-z-1"))
        assert confirm_certificate(cert, 6).checked_horizon == 6

    def test_unsound_pair_is_caught(self):
        bogus = MGoodCertificate(f=parse("z-2"), m=1, route="archimedean",
                                 params={"rho": 2.0})
        with pytest.raises(CollisionError):
            confirm_certificate(bogus, 2)

    @given(st.integers(0, 3))
    @settings(max_examples=4, deadline=None)
    def test_archimedean_soundness_small_horizons(self, D):
        cert = certify_archimedean(parse("z^2-z-1"))
        assert falsify(cert.f, cert.m, D, "C1") is None
