"""
Numeric checks of the functional equations, symmetry, periodicity and
boundedness of S_p.

Every check returns an IdentityReport. Residual tolerances come from the
certificate radii of the evaluations involved (times a safety factor), plus
the rounding of the finite right-hand sides, never from fixed constants.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import DomainError
from .takagi_core import (
    DEFAULT_CTX,
    CertifiedValue,
    PowerParam,
    PrecisionCtx,
    Real,
    as_fraction,
    eval_sp,
    series_term,
    sup_bound,
    t0_power,
)

# Configure logger
logger = logging.getLogger(__name__)

# Multiplier applied to propagated radii
SAFETY_FACTOR = 4

Evaluator = Callable[..., CertifiedValue]


class IdentityKind(Enum):
    GEN_FUNC_EQ = "GenFuncEq"
    FUNC_EQ_M1 = "FuncEqM1"
    FUNC_EQ_M2 = "FuncEqM2"
    SYMMETRY = "Symmetry"
    PERIODICITY = "Periodicity"
    SUP_BOUND = "SupBound"
    HOLDER_MODULUS = "HolderModulus"
    T0_LEMMAS = "T0Lemmas"
    TECHNICAL_LEMMA = "TechnicalLemma"
    TRUNCATION_INEQ = "TruncationIneq"
    LEMMA_SAB = "LemmaSab"
    DN_PARITY = "DnParity"
    FN_SCALING = "FnScaling"
    QUOTIENT_RELATION = "QuotientRelation"


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one check; passed is max_violation <= tolerance"""
    identity_name: str
    samples: int
    max_violation: float
    tolerance: float
    details: Dict[str, Any] = field(default_factory=dict)
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'max_violation', float(self.max_violation))
        object.__setattr__(self, 'tolerance', float(self.tolerance))
        object.__setattr__(self, 'passed', self.max_violation <= self.tolerance)

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.identity_name}: samples={self.samples} "
                f"max_violation={self.max_violation:.3e} tolerance={self.tolerance:.3e}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identity_name": self.identity_name,
            "samples": self.samples,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IdentityReport":
        report = cls(
            identity_name=data["identity_name"],
            samples=int(data["samples"]),
            max_violation=float(data["max_violation"]),
            tolerance=float(data["tolerance"]),
            details=dict(data.get("details", {})),
        )
        if "passed" in data and bool(data["passed"]) != report.passed:
            raise DomainError(f"Inconsistent 'passed' flag for {report.identity_name}")
        return report

    @classmethod
    def merge(cls, name: str, reports: Sequence["IdentityReport"]) -> "IdentityReport":
        """
        Combine reports measured on the same samples

        The merged violation and tolerance are those of the component with the
        largest excess, so the merge passes only when every component passes.
        """
        if not reports:
            raise DomainError("Nothing to merge")
        worst = max(reports, key=lambda r: (not r.passed, r.max_violation - r.tolerance))
        return cls(
            identity_name=name,
            samples=max(r.samples for r in reports),
            max_violation=worst.max_violation,
            tolerance=worst.tolerance,
            details={r.identity_name: r.to_dict() for r in reports},
        )


def _require_samples(xs: Sequence[Any]) -> List[Fraction]:
    points = [as_fraction(x) for x in xs]
    if not points:
        raise DomainError("Empty sample set")
    return points


def _require_tolerance(tol: Real) -> Fraction:
    value = as_fraction(tol)
    if value <= 0:
        raise DomainError(f"Tolerance must be positive, got {tol}")
    return value


def sample_grid(count: int, seed: int = 42) -> List[float]:
    """
    Deterministic sample points in [0, 1)

    Args:
        count: Total number of points; half on a uniform grid, half random
        seed: Seed for numpy's Generator

    Returns:
        Uniform grid points followed by seeded random points
    """
    if count < 0:
        raise DomainError(f"Sample count must be non-negative, got {count}")
    uniform_count = count // 2
    random_count = count - uniform_count
    uniform = [i / uniform_count for i in range(uniform_count)]
    rng = np.random.default_rng(seed)
    return uniform + rng.random(random_count).tolist()


class ResidualTracker:
    """
    Worst sample of one equation, judged against that sample's own allowance

    The report carries the residual and allowance of the sample with the
    largest excess (residual - allowance), so it passes only when every
    sample does. Raw maxima go into details.
    """

    def __init__(self, name: str):
        self.name = name
        self.worst = 0
        self.allowance = 0
        self.max_residual = 0
        self.max_allowance = 0
        self.count = 0

    def add(self, residual, allowance):
        if self.count == 0 or residual - allowance > self.worst - self.allowance:
            self.worst, self.allowance = residual, allowance
        self.max_residual = max(self.max_residual, residual)
        self.max_allowance = max(self.max_allowance, allowance)
        self.count += 1

    def report(self, details: Optional[Dict[str, Any]] = None) -> IdentityReport:
        details = dict(details or {})
        details.update(max_residual=float(self.max_residual), max_allowance=float(self.max_allowance))
        return IdentityReport(self.name, self.count, self.worst, self.allowance, details)


def _slack(ctx: PrecisionCtx, terms: int, *magnitudes):
    # Rounding of the finite right-hand side, 1 ulp per operation
    return 16 * (terms + 2) * ctx.unit_roundoff * sum(abs(m) for m in magnitudes)


def check_general_functional_eq(p: Real, m: int, xs: Sequence[Real], tol: Real,
                                ctx: PrecisionCtx = DEFAULT_CTX,
                                evaluator: Optional[Evaluator] = None) -> IdentityReport:
    """
    Residual of S_p(x) = sum_{k<m} (T_0(2^k x)/2^k)^p + S_p(2^m x) / 2^{mp}

    Args:
        p: Exponent
        m: Number of unrolled terms, m >= 1
        xs: Sample points
        tol: Evaluation tolerance; each S_p is evaluated to tol/10
        ctx: Working precision
        evaluator: Replacement for eval_sp (e.g. exact_evaluator)

    Returns:
        Report named GenFuncEq(m)
    """
    p = PowerParam.coerce(p)
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    target = _require_tolerance(tol) / 10
    evaluate = evaluator or eval_sp
    context = ctx.context
    scale = context.power(2, -m * p.to_mpf(ctx))

    tracker = ResidualTracker(f"{IdentityKind.GEN_FUNC_EQ.value}({m})")
    for x in _require_samples(xs):
        lhs = evaluate(p, x, target, ctx)
        shifted = evaluate(p, x * 2 ** m, target, ctx)
        finite = context.fsum(series_term(p, x, k, ctx) for k in range(m))
        tail = shifted.value * scale
        residual = abs(lhs.value - finite - tail)
        allowance = SAFETY_FACTOR * (lhs.error_radius + shifted.error_radius * scale)
        tracker.add(residual, allowance + _slack(ctx, m, finite, tail, lhs.value))
    return tracker.report()


def check_m1_m2(p: Real, xs: Sequence[Real], tol: Real, ctx: PrecisionCtx = DEFAULT_CTX,
                evaluator: Optional[Evaluator] = None) -> IdentityReport:
    """
    Residuals of the two corollary equations

        S_p(2x) = 2^p (S_p(x) - T_0^p(x))
        S_p(4x) = 4^p (S_p(x) - T_0^p(x)) - 2^p T_0^p(2x)
    """
    p = PowerParam.coerce(p)
    target = _require_tolerance(tol) / 10
    evaluate = evaluator or eval_sp
    context = ctx.context
    two_p = context.power(2, p.to_mpf(ctx))
    four_p = two_p * two_p

    first = ResidualTracker(IdentityKind.FUNC_EQ_M1.value)
    second = ResidualTracker(IdentityKind.FUNC_EQ_M2.value)
    for x in _require_samples(xs):
        base = evaluate(p, x, target, ctx)
        doubled = evaluate(p, 2 * x, target, ctx)
        quadrupled = evaluate(p, 4 * x, target, ctx)
        t_x = t0_power(p, x, ctx)
        t_2x = t0_power(p, 2 * x, ctx)

        rhs1 = two_p * (base.value - t_x)
        first.add(abs(doubled.value - rhs1),
                  SAFETY_FACTOR * (doubled.error_radius + two_p * base.error_radius)
                  + _slack(ctx, 3, rhs1, two_p * base.value, two_p * t_x))

        rhs2 = four_p * (base.value - t_x) - two_p * t_2x
        second.add(abs(quadrupled.value - rhs2),
                   SAFETY_FACTOR * (quadrupled.error_radius + four_p * base.error_radius)
                   + _slack(ctx, 5, rhs2, four_p * base.value, four_p * t_x, two_p * t_2x))

    return IdentityReport.merge(f"{first.name}+{second.name}", [first.report(), second.report()])


def check_symmetry_periodicity(p: Real, xs: Sequence[Real], q_range: Iterable[int], tol: Real,
                               ctx: PrecisionCtx = DEFAULT_CTX,
                               evaluator: Optional[Evaluator] = None) -> IdentityReport:
    """Residuals of S_p(x) = S_p(q - x) for integers q and of S_p(x) = S_p(x + 1)"""
    p = PowerParam.coerce(p)
    target = _require_tolerance(tol)
    evaluate = evaluator or eval_sp
    shifts = [int(q) for q in q_range]
    if not shifts:
        raise DomainError("q_range must contain at least one integer")

    symmetry = ResidualTracker(IdentityKind.SYMMETRY.value)
    periodicity = ResidualTracker(IdentityKind.PERIODICITY.value)
    for x in _require_samples(xs):
        base = evaluate(p, x, target, ctx)
        for q in shifts:
            mirrored = evaluate(p, q - x, target, ctx)
            symmetry.add(abs(base.value - mirrored.value),
                         SAFETY_FACTOR * (base.error_radius + mirrored.error_radius))
        shifted = evaluate(p, x + 1, target, ctx)
        periodicity.add(abs(base.value - shifted.value),
                        SAFETY_FACTOR * (base.error_radius + shifted.error_radius))

    return IdentityReport.merge(f"{symmetry.name}+{periodicity.name}",
                                [symmetry.report({"q_range": shifts}), periodicity.report()])


def check_sup_bound(p: Real, xs: Sequence[Real], tol: Real = 1e-12,
                    ctx: PrecisionCtx = DEFAULT_CTX,
                    evaluator: Optional[Evaluator] = None) -> IdentityReport:
    """Check value + radius <= 1/(2^p - 1) at every sample"""
    p = PowerParam.coerce(p)
    evaluate = evaluator or eval_sp
    bound = sup_bound(p, ctx)
    worst_excess = None
    worst_ratio = 0
    points = _require_samples(xs)
    for x in points:
        value = evaluate(p, x, tol, ctx)
        excess = value.upper - bound
        worst_excess = excess if worst_excess is None else max(worst_excess, excess)
        worst_ratio = max(worst_ratio, value.upper / bound)
    return IdentityReport(
        IdentityKind.SUP_BOUND.value, len(points), max(worst_excess, 0), 0.0,
        {"bound": float(bound), "max_ratio": float(worst_ratio)},
    )


def run_identity_suite(p: Real, xs: Sequence[Real], tol: Real = 1e-12,
                       ms: Iterable[int] = range(1, 9), q_range: Iterable[int] = range(-2, 4),
                       ctx: PrecisionCtx = DEFAULT_CTX,
                       evaluator: Optional[Evaluator] = None) -> List[IdentityReport]:
    """
    Run every functional equation and bound check on one sample set

    Returns:
        Reports in the order GenFuncEq(m) for each m, M1/M2, symmetry and
        periodicity, sup bound
    """
    p = PowerParam.coerce(p)
    points = _require_samples(xs)
    reports = [check_general_functional_eq(p, m, points, tol, ctx, evaluator) for m in ms]
    reports.append(check_m1_m2(p, points, tol, ctx, evaluator))
    reports.append(check_symmetry_periodicity(p, points, q_range, tol, ctx, evaluator))
    reports.append(check_sup_bound(p, points, tol, ctx, evaluator))
    failed = [r.identity_name for r in reports if not r.passed]
    logger.info(f"Identity suite p={p}: {len(reports) - len(failed)}/{len(reports)} passed on {len(points)} samples")
    if failed:
        logger.warning(f"Failed identities for p={p}: {', '.join(failed)}")
    return reports
