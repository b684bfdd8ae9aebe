from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from conftest import closed_value
from lib.errors import ConsistencyError, DomainError, ResourceError
from lib.holder_cert import certificate
from lib.maximizer import (
    DEFAULT_PROBES,
    THIRD,
    Bracket,
    DQScan,
    Method,
    Side,
    bracket,
    bracket_max,
    bracket_report,
    bracket_trace,
    closed_form_max,
    d_n,
    dq_scan,
    f_n,
    f_n_finite,
    holder_bb_max,
    nondifferentiability_floor,
    sample_sab_tuples,
    verify_dn_parity,
    verify_fn_scaling,
    verify_lemma_sab,
    verify_quotient_relation,
)
from lib.takagi_core import CertifiedValue, PrecisionCtx, eval_sp

sub_unit = st.sampled_from(["0.1", "0.25", "0.5", "0.75", "0.95"])


def max_value(p):
    """2^p / (6^p - 3^p)"""
    q = Fraction(p)

    def value():
        e = mpmath.mpf(q.numerator) / q.denominator
        return mpmath.power(2, e) / (mpmath.power(6, e) - mpmath.power(3, e))
    return closed_value(value)


class TestBrackets:
    def test_first_generations(self):
        assert (bracket(0).a, bracket(0).b) == (0, Fraction(1, 2))
        assert (bracket(1).a, bracket(1).b) == (Fraction(1, 4), Fraction(1, 2))
        assert (bracket(2).a, bracket(2).b) == (Fraction(1, 4), Fraction(3, 8))

    @pytest.mark.parametrize("n", range(41))
    def test_width_and_containment(self, n):
        current = bracket(n)
        assert current.width == Fraction(1, 2 ** (n + 1))
        assert current.contains(THIRD)
        assert current.c == (current.a + current.b) / 2

    @pytest.mark.parametrize("n", range(40))
    def test_nesting_alternates(self, n):
        following = bracket(n + 1)
        expected = bracket(n).right_half() if n % 2 == 0 else bracket(n).left_half()
        assert following == expected

    def test_negative_generation(self):
        with pytest.raises(DomainError):
            bracket(-1)

    def test_trace_shape(self):
        steps = bracket_trace("0.5", 10)
        assert [step.n for step in steps] == list(range(11))
        assert [step.sign_d_n for step in steps] == [1, -1] * 5 + [1]
        assert steps[3].to_row() == {"n": 3, "a_n": str(bracket(3).a), "b_n": str(bracket(3).b), "sign_d_n": -1}

    def test_bracket_max(self):
        final = bracket_max("0.3", 30)
        assert final == bracket(30)
        assert final.width == Fraction(1, 2 ** 31)
        assert final.contains(THIRD)

    def test_bracket_report(self):
        report = bracket_report("0.4", 20)
        assert report.method is Method.BRACKETING
        assert report.bracket == bracket(20)
        assert abs(report.argmax_points[0] - THIRD) <= Fraction(1, 2 ** 22)
        assert report.argmax_points[1] == 1 - report.argmax_points[0]
        assert float(report.max_value.value) == pytest.approx(max_value("0.4"), abs=1e-14)

    def test_trace_rejects_bad_input(self):
        with pytest.raises(DomainError):
            bracket_trace(1, 5)
        with pytest.raises(DomainError):
            bracket_trace("0.5", 5, probes=[])
        with pytest.raises(DomainError):
            bracket_trace("0.5", 5, probes=[Fraction(3, 2)])

    def test_trace_detects_wrong_sign(self, monkeypatch):
        import lib.maximizer as maximizer
        monkeypatch.setattr(maximizer, "d_n", lambda p, n, s, ctx: 1)
        with pytest.raises(ConsistencyError):
            maximizer.bracket_trace("0.5", 3)


class TestDnAndFn:
    @given(sub_unit, st.integers(min_value=0, max_value=25), st.sampled_from(DEFAULT_PROBES))
    def test_parity(self, p, n, s):
        value = d_n(p, n, s)
        assert value > 0 if n % 2 == 0 else value < 0

    def test_parity_report(self):
        report = verify_dn_parity(["0.2", "0.5", "0.9"], list(range(15)), list(DEFAULT_PROBES))
        assert report.passed, report.summary()
        assert report.details["sign_failures"] == 0
        assert report.samples == 3 * 15 * len(DEFAULT_PROBES)

    def test_parity_rejects_p_one(self):
        with pytest.raises(DomainError):
            d_n(1, 2, Fraction(1, 2))
        with pytest.raises(DomainError):
            d_n("0.5", 2, 0)

    @pytest.mark.parametrize("p", ["0.3", "0.7"])
    def test_scaling(self, p):
        report = verify_fn_scaling(p, list(range(8)), [Fraction(1, 10), Fraction(1, 2), 1])
        assert report.passed, report.summary()

    @pytest.mark.parametrize("n", [0, 1, 4, 9])
    def test_finite_form_agrees(self, n):
        for s in (Fraction(1, 100), Fraction(3, 10), Fraction(1)):
            direct = f_n("0.6", n, s)
            finite = f_n_finite("0.6", n, s)
            assert abs(direct.value - finite) <= direct.error_radius + 1e-30

    def test_fn_sign_follows_parity(self):
        for n in range(6):
            value = f_n("0.5", n, Fraction(1, 2))
            assert value.lower > 0 if n % 2 == 0 else value.upper < 0


class TestClosedFormMax:
    @pytest.mark.parametrize("p", ["0.1", "0.5", "0.9"])
    def test_value(self, p):
        report = closed_form_max(p)
        assert report.argmax_points == (THIRD, Fraction(2, 3))
        assert float(report.max_value.value) == pytest.approx(max_value(p), abs=1e-15)
        assert report.max_value.error_radius < 1e-30

    def test_p_half(self):
        report = closed_form_max("0.5")
        assert float(report.max_value.value) == pytest.approx(2 ** 0.5 / (6 ** 0.5 - 3 ** 0.5), rel=1e-14)

    @pytest.mark.parametrize("p", [1, 2])
    def test_rejects_p_at_least_one(self, p):
        with pytest.raises(DomainError):
            closed_form_max(p)

    def test_dominates_samples(self):
        top = closed_form_max("0.5").max_value
        for k in range(1, 60):
            value = eval_sp("0.5", Fraction(k, 61))
            assert value.lower <= top.upper

    def test_to_dict(self):
        data = closed_form_max("0.5").to_dict()
        assert data["method"] == "ClosedForm"
        assert data["argmax_points"] == ["1/3", "2/3"]
        assert "nodes" not in data


class TestBranchAndBound:
    @pytest.mark.parametrize("p,x_tol", [("0.5", 1e-4), ("0.2", 1e-3), ("0.8", 1e-4)])
    def test_finds_one_third(self, p, x_tol):
        report = holder_bb_max(p, certificate(p), x_tol=x_tol)
        assert report.method is Method.HOLDER_BB
        assert abs(report.argmax_points[0] - THIRD) <= x_tol
        assert report.argmax_points[1] == 1 - report.argmax_points[0]
        assert report.max_value.lower <= max_value(p) + 1e-15
        assert report.upper_bound >= report.max_value.lower
        assert report.nodes > 0
        assert report.to_dict()["nodes"] == report.nodes

    @pytest.mark.slow
    @pytest.mark.parametrize("p", ["0.1", "0.3", "0.5", "0.7", "0.9"])
    def test_methods_agree_at_full_tolerance(self, p):
        closed = closed_form_max(p)
        bracketed = bracket_report(p, 20)
        searched = holder_bb_max(p, certificate(p), x_tol=1e-6)
        assert abs(searched.argmax_points[0] - THIRD) <= Fraction(1, 10 ** 6)
        assert abs(bracketed.argmax_points[0] - THIRD) <= Fraction(1, 2 ** 21)
        for report in (bracketed, searched):
            assert float(abs(report.max_value.value - closed.max_value.value)) <= 1e-12
        assert searched.upper_bound >= closed.max_value.lower

    def test_snaps_to_closed_form(self):
        report = holder_bb_max("0.5", x_tol=1e-4)
        assert report.argmax_points[0] == THIRD
        assert float(report.max_value.value) == pytest.approx(max_value("0.5"), abs=1e-15)

    def test_budget_exhaustion_keeps_partial_result(self):
        with pytest.raises(ResourceError) as info:
            holder_bb_max("0.5", x_tol=1e-6, budget=3)
        partial = info.value.best_so_far
        assert partial.method is Method.HOLDER_BB
        assert 0 < partial.nodes <= 3
        assert 0 <= partial.argmax_points[0] <= Fraction(1, 2)

    def test_rejects_mismatched_certificate(self):
        with pytest.raises(DomainError):
            holder_bb_max("0.5", certificate("0.4"))
        with pytest.raises(DomainError):
            holder_bb_max("0.5", x_tol=0)
        with pytest.raises(DomainError):
            holder_bb_max(1)


class TestDifferenceQuotients:
    def test_right_quotients_at_third_stay_below_floor(self):
        floor = nondifferentiability_floor("0.5")
        scan = dq_scan("0.5", THIRD, 8)
        assert scan.scales == tuple(Fraction(1, 4 ** k) for k in range(1, 9))
        for h, quotient in zip(scan.scales, scan.quotients):
            assert float(quotient.error_radius) <= 1.01 / (2 * 4 ** 8)
            if h <= Fraction(1, 6):
                assert quotient.upper <= -floor

    @pytest.mark.slow
    @pytest.mark.parametrize("p", ["0.3", "0.5", "0.8"])
    def test_quotients_respect_maximality_at_fine_scales(self, p):
        ctx = PrecisionCtx(256)
        floor = nondifferentiability_floor(p, ctx)
        left = dq_scan(p, THIRD, 18, ctx, side=Side.LEFT)
        right = dq_scan(p, Fraction(2, 3), 18, ctx, side=Side.RIGHT)
        assert len(left.quotients) == len(right.quotients) == 18
        for quotient in left.quotients:
            assert quotient.value >= -quotient.error_radius
            assert float(quotient.error_radius) <= 1.01 / (2 * 4 ** 18)
        for quotient in right.quotients:
            assert quotient.value <= quotient.error_radius
        below = dq_scan(p, THIRD, 18, ctx)
        for h, quotient in zip(below.scales, below.quotients):
            if h <= Fraction(1, 6):
                assert quotient.upper <= -floor

    def test_left_quotients_at_two_thirds(self):
        floor = nondifferentiability_floor("0.3")
        scan = dq_scan("0.3", Fraction(2, 3), 6, side=Side.LEFT)
        for quotient in scan.quotients[1:]:
            assert quotient.lower >= floor

    def test_symmetric_quotient_at_half(self):
        # S_p is symmetric about 1/2, so central quotients vanish there
        scan = dq_scan("0.5", Fraction(1, 2), 5, side=Side.SYMMETRIC)
        for quotient in scan.quotients:
            assert quotient.contains(0)

    def test_floor_value(self):
        expected = 0.5 * 3 ** 0.5 * (2 ** 0.5 - 1)
        assert float(nondifferentiability_floor("0.5")) == pytest.approx(expected, rel=1e-14)

    def test_scan_validation(self):
        value = CertifiedValue(0, 0)
        with pytest.raises(DomainError):
            DQScan(THIRD, Side.RIGHT, (Fraction(1, 4), Fraction(1, 2)), (value, value))
        with pytest.raises(DomainError):
            DQScan(THIRD, Side.RIGHT, (Fraction(1, 4),), ())
        with pytest.raises(DomainError):
            dq_scan("0.5", THIRD, 0)

    @pytest.mark.parametrize("p", ["0.2", "0.5", "0.9"])
    def test_quotient_relation(self, p):
        report = verify_quotient_relation(p, 10)
        assert report.passed, report.summary()
        assert report.samples == 10


class TestLemmaSab:
    def test_random_tuples(self):
        report = verify_lemma_sab(sample_sab_tuples(300, seed=11))
        assert report.passed, report.summary()
        assert report.details["non_strict"] == 0

    def test_rejects_bad_tuples(self):
        with pytest.raises(DomainError):
            verify_lemma_sab([(1, 1, Fraction(1, 2), "0.5")])
        with pytest.raises(DomainError):
            verify_lemma_sab([(2, 3, 1, 1)])
        with pytest.raises(DomainError):
            verify_lemma_sab([])

    def test_tuples_respect_ordering(self):
        for a, b, s, p in sample_sab_tuples(100):
            assert 0 < s <= a < b
            assert 0 < p < 1


def test_bracket_dict():
    assert Bracket(0, Fraction(0), Fraction(1, 2)).to_dict() == {"n": 0, "a": "0", "b": "1/2", "c": "1/4"}
