from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lib.errors import DomainError
from lib.exact_rational import exact_evaluator
from lib.identities import (
    IdentityReport,
    check_general_functional_eq,
    check_m1_m2,
    check_sup_bound,
    check_symmetry_periodicity,
    run_identity_suite,
    sample_grid,
)
from lib.takagi_core import CertifiedValue, eval_sp

POINTS = sample_grid(16, seed=7)
RATIONALS = [Fraction(k, 17) for k in range(17)] + [Fraction(1, 3), Fraction(2, 5)]


def skewed_evaluator(p, x, target_abs_err, ctx):
    """Series value stretched by up to 0.1%, depending on x mod 1"""
    value = eval_sp(p, x, target_abs_err, ctx)
    return CertifiedValue(value.value * (1 + 0.001 * float(Fraction(x) % 1)),
                          value.error_radius, value.mantissa_bits)


def patchy_evaluator(p, x, target_abs_err, ctx):
    """Off by 1e-6 at 3/10 under a tight radius; honest with a loose radius at 1/10"""
    value = eval_sp(p, x, target_abs_err, ctx)
    if Fraction(x) == Fraction(3, 10):
        return CertifiedValue(value.value + ctx.mpf("1e-6"), ctx.mpf("1e-15"), value.mantissa_bits)
    if Fraction(x) == Fraction(1, 10):
        return CertifiedValue(value.value, ctx.mpf("1e-3"), value.mantissa_bits)
    return value


class TestSampleGrid:
    def test_deterministic(self):
        assert sample_grid(10, seed=3) == sample_grid(10, seed=3)
        assert sample_grid(10, seed=3) != sample_grid(10, seed=4)

    def test_shape(self):
        points = sample_grid(11)
        assert len(points) == 11
        assert points[:5] == [0.0, 0.2, 0.4, 0.6, 0.8]
        assert all(0 <= x < 1 for x in points)

    def test_negative_count(self):
        with pytest.raises(DomainError):
            sample_grid(-1)


class TestFunctionalEquations:
    @pytest.mark.parametrize("p", ["0.3", "1", "2"])
    @pytest.mark.parametrize("m", [1, 2, 5, 8])
    def test_general_equation(self, p, m):
        report = check_general_functional_eq(p, m, POINTS, 1e-12)
        assert report.passed, report.summary()
        assert report.identity_name == f"GenFuncEq({m})"
        assert report.samples == len(POINTS)

    def test_general_equation_exact(self):
        report = check_general_functional_eq("0.5", 3, RATIONALS, 1e-12, evaluator=exact_evaluator)
        assert report.passed, report.summary()

    def test_bad_m(self):
        with pytest.raises(DomainError):
            check_general_functional_eq(1, 0, POINTS, 1e-12)

    @pytest.mark.parametrize("p", ["0.2", "0.7", "1.5"])
    def test_m1_m2(self, p):
        report = check_m1_m2(p, POINTS, 1e-12)
        assert report.passed, report.summary()
        assert report.identity_name == "FuncEqM1+FuncEqM2"
        assert set(report.details) == {"FuncEqM1", "FuncEqM2"}

    def test_detects_wrong_values(self):
        report = check_m1_m2("0.5", [0.1, 0.3, 0.45], 1e-12, evaluator=skewed_evaluator)
        assert not report.passed


class TestSymmetryAndBound:
    def test_symmetry_periodicity(self):
        report = check_symmetry_periodicity("0.6", POINTS, range(-2, 4), 1e-12)
        assert report.passed, report.summary()
        assert report.details["Symmetry"]["details"]["q_range"] == [-2, -1, 0, 1, 2, 3]

    def test_empty_q_range(self):
        with pytest.raises(DomainError):
            check_symmetry_periodicity(1, POINTS, [], 1e-12)

    def test_loose_sample_does_not_hide_a_wrong_one(self):
        alone = check_symmetry_periodicity("0.5", [Fraction(3, 10)], [1], 1e-12, evaluator=patchy_evaluator)
        assert not alone.passed
        mixed = check_symmetry_periodicity("0.5", [Fraction(1, 10), Fraction(3, 10)], [1], 1e-12,
                                           evaluator=patchy_evaluator)
        assert not mixed.passed
        assert mixed.max_violation == pytest.approx(1e-6, rel=1e-3)
        assert mixed.tolerance < 1e-9
        assert mixed.details["Symmetry"]["details"]["max_allowance"] > 1e-3

    @pytest.mark.parametrize("p", ["0.2", "1", "3"])
    def test_sup_bound(self, p):
        report = check_sup_bound(p, POINTS + [Fraction(1, 3)])
        assert report.passed
        assert report.tolerance == 0
        assert report.details["max_ratio"] < 1

    def test_empty_samples(self):
        with pytest.raises(DomainError):
            check_sup_bound(1, [])

    def test_suite(self):
        reports = run_identity_suite("0.5", POINTS[:8], ms=range(1, 4))
        assert [r.identity_name for r in reports] == [
            "GenFuncEq(1)", "GenFuncEq(2)", "GenFuncEq(3)",
            "FuncEqM1+FuncEqM2", "Symmetry+Periodicity", "SupBound",
        ]
        assert all(r.passed for r in reports)


class TestIdentityReport:
    @given(st.floats(min_value=0, max_value=1), st.floats(min_value=0, max_value=1))
    def test_passed_matches_violation(self, violation, tolerance):
        report = IdentityReport("X", 1, violation, tolerance)
        assert report.passed == (violation <= tolerance)

    def test_dict_round_trip(self):
        report = IdentityReport("X", 3, 0.5, 1.0, {"note": 1})
        assert IdentityReport.from_dict(report.to_dict()) == report

    def test_inconsistent_flag(self):
        data = IdentityReport("X", 3, 2.0, 1.0).to_dict()
        data["passed"] = True
        with pytest.raises(DomainError):
            IdentityReport.from_dict(data)

    def test_merge(self):
        merged = IdentityReport.merge("A+B", [IdentityReport("A", 2, 0.1, 1.0), IdentityReport("B", 5, 3.0, 2.0)])
        assert merged.samples == 5
        assert merged.max_violation == 3.0
        assert not merged.passed
        with pytest.raises(DomainError):
            IdentityReport.merge("empty", [])

    def test_merge_fails_when_any_component_fails(self):
        tight = IdentityReport("A", 1, 1e-6, 1e-12)
        loose = IdentityReport("B", 1, 0.5, 1.0)
        merged = IdentityReport.merge("A+B", [loose, tight])
        assert not merged.passed
        assert merged.max_violation == 1e-6
        assert merged.tolerance == 1e-12
