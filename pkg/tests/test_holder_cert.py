from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lib.errors import DomainError
from lib.holder_cert import (
    certificate,
    constant_C,
    optimal_cut,
    sample_pairs,
    verify_modulus,
    verify_t0_lemmas,
    verify_technical_lemma,
    verify_truncation_inequality,
)
from lib.takagi_core import eval_sp

gaps = st.fractions(min_value=Fraction(1, 2 ** 30), max_value=Fraction(1, 2), max_denominator=2 ** 30)


class TestConstant:
    def test_value_at_one(self):
        assert float(constant_C(1)) == pytest.approx(3.3566, abs=1e-4)

    def test_rejects_p_above_one(self):
        with pytest.raises(DomainError):
            constant_C("1.5")
        with pytest.raises(DomainError):
            certificate(2)

    def test_grows_as_p_shrinks(self):
        values = [float(constant_C(p)) for p in ("1", "0.7", "0.4", "0.1")]
        assert values == sorted(values)


class TestCertificate:
    def test_optimal_cut_examples(self):
        assert optimal_cut(1, Fraction(1, 2)) == 0
        assert optimal_cut(1, Fraction(1, 1024)) == 9

    def test_invalid_gap(self):
        cert = certificate("0.5")
        with pytest.raises(DomainError):
            cert.modulus(0)
        with pytest.raises(DomainError):
            cert.modulus(Fraction(3, 4))
        with pytest.raises(DomainError):
            cert.truncation_bound(Fraction(1, 4), -1)

    @given(gaps)
    def test_modulus_dominates_optimal_truncation(self, h):
        # the truncation bound at its balancing index is absorbed by the modulus
        cert = certificate("0.6")
        n = optimal_cut("0.6", h)
        assert cert.truncation_bound(h, max(n, 0)) <= cert.modulus(h) * (1 + 1e-20)

    def test_refined_modulus_is_tighter(self):
        cert = certificate("0.5")
        h = Fraction(1, 2 ** 12)
        assert cert.refined_modulus(h) <= cert.modulus(h)

    @given(gaps)
    def test_envelope_bounds_smaller_gaps(self, h):
        cert = certificate("0.5")
        envelope = cert.envelope(h)
        for k in (1, 2, 7):
            assert cert.modulus(h / k) <= envelope * (1 + 1e-25)

    def test_direct_pairs(self):
        cert = certificate("0.5")
        for x, y in [(Fraction(1, 3), Fraction(1, 3) + Fraction(1, 2 ** 20)), (Fraction(0), Fraction(1, 2))]:
            gap = abs(x - y)
            difference = abs(eval_sp("0.5", x).value - eval_sp("0.5", y).value)
            assert difference <= cert.modulus(gap)


class TestVerification:
    def test_sample_pairs(self):
        pairs = sample_pairs(200, seed=1)
        assert len(pairs) == 200
        assert pairs == sample_pairs(200, seed=1)
        assert all(0 < abs(Fraction(x) - Fraction(y)) <= Fraction(1, 2) for x, y in pairs)

    @pytest.mark.parametrize("p", ["0.3", "0.5", "1"])
    def test_modulus_holds(self, p):
        report = verify_modulus(p, sample_pairs(40, seed=5))
        assert report.passed, report.summary()
        assert report.details["max_ratio"] <= 1
        assert report.details["ratio_by_decade"]

    def test_modulus_rejects_bad_pairs(self):
        with pytest.raises(DomainError):
            verify_modulus("0.5", [(0.1, 0.1)])
        with pytest.raises(DomainError):
            verify_modulus("0.5", [])

    @pytest.mark.parametrize("p", ["0.25", "0.8", "1"])
    def test_t0_lemmas(self, p):
        report = verify_t0_lemmas(p, sample_pairs(300, seed=2))
        assert report.passed, report.summary()
        assert set(report.details["per_inequality"]) == {
            "T0PowerBound", "PowerDifference", "T0Lipschitz", "T0Holder"}

    def test_t0_lemmas_above_one_skip_power_inequalities(self):
        report = verify_t0_lemmas(2, sample_pairs(20))
        assert set(report.details["per_inequality"]) == {"T0PowerBound", "T0Lipschitz"}

    @pytest.mark.parametrize("p", ["0.5", "1"])
    def test_t0_holder_equality_at_zero_and_half(self, p):
        report = verify_t0_lemmas(p, [(0, Fraction(1, 2))])
        assert report.passed, report.summary()
        assert report.details["holder_tight_cases"] >= 1

    def test_technical_lemma(self):
        report = verify_technical_lemma()
        assert report.passed, report.summary()
        assert report.samples == 1001
        assert report.details["g0_error"] == 0

    def test_technical_lemma_bad_step(self):
        with pytest.raises(DomainError):
            verify_technical_lemma(0)

    def test_truncation_inequality(self):
        pairs = sample_pairs(30, seed=9)
        triples = [(x, y, n) for (x, y), n in zip(pairs, range(30))]
        report = verify_truncation_inequality("0.7", triples)
        assert report.passed, report.summary()
