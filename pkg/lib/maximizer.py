"""
Global maximum of S_p for 0 < p < 1, located three ways:

- closed form: the maximum is S_p(1/3) = 2^p / (6^p - 3^p), reached at 1/3 and 2/3
- bracketing: nested dyadic intervals chosen by the sign of D_n
- branch-and-bound over dyadic cells of [0, 1/2] with certified upper bounds

plus one-sided difference quotients probing non-differentiability at 1/3
and 2/3.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pybnb

from .errors import ConsistencyError, DomainError, ResourceError
from .exact_rational import closed_form_sp, eval_closed_form, simplest_rational_between
from .holder_cert import HolderCertificate, certificate
from .identities import IdentityKind, IdentityReport, ResidualTracker, SAFETY_FACTOR
from .takagi_core import (
    DEFAULT_CTX,
    CertifiedValue,
    PowerParam,
    PrecisionCtx,
    Real,
    Regime,
    _pad,
    as_fraction,
    eval_sp,
    t0,
    t0_power,
    tail_bound,
)

# Configure logger
logger = logging.getLogger(__name__)

THIRD = Fraction(1, 3)

# s values at which the sign of D_n is probed
DEFAULT_PROBES: Tuple[Fraction, ...] = (Fraction(1, 100),) + tuple(Fraction(k, 10) for k in range(1, 11))

# Largest denominator tried when snapping a search result to a rational
SNAP_MAX_DENOMINATOR = 4096

DEFAULT_NODE_BUDGET = 1_000_000


class Method(Enum):
    CLOSED_FORM = "ClosedForm"
    BRACKETING = "Bracketing"
    HOLDER_BB = "HolderBB"


class Side(Enum):
    LEFT = "Left"
    RIGHT = "Right"
    SYMMETRIC = "Symmetric"


def _require_sub_unit(p: Real) -> PowerParam:
    p = PowerParam.coerce(p)
    if p.regime is not Regime.SUB_UNIT:
        raise DomainError(f"The maximum theorem covers 0 < p < 1, got p={p}")
    return p


def _require_probe(s: Real) -> Fraction:
    value = as_fraction(s)
    if not 0 < value <= 1:
        raise DomainError(f"s must lie in (0, 1], got {s}")
    return value


def _require_generation(n: int, name: str = "n") -> int:
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {n!r}")
    return n


@dataclass(frozen=True)
class Bracket:
    """Generation-n interval [a, b] of width 2^{-(n+1)} around 1/3"""
    n: int
    a: Fraction
    b: Fraction
    c: Fraction = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'c', (self.a + self.b) / 2)

    @property
    def width(self) -> Fraction:
        return self.b - self.a

    def contains(self, x: Real) -> bool:
        return self.a <= as_fraction(x) <= self.b

    def right_half(self) -> "Bracket":
        return Bracket(self.n + 1, self.c, self.b)

    def left_half(self) -> "Bracket":
        return Bracket(self.n + 1, self.a, self.c)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "a": str(self.a), "b": str(self.b), "c": str(self.c)}


def bracket(n: int) -> Bracket:
    """
    The generation-n bracket in exact arithmetic

        a_n = 1/3 + (-1)^{n+1} / (3 2^{n+2}) - 1/2^{n+2},  b_n = a_n + 1/2^{n+1}
    """
    n = _require_generation(n)
    shift = Fraction((-1) ** (n + 1), 3 * 2 ** (n + 2))
    a = THIRD + shift - Fraction(1, 2 ** (n + 2))
    return Bracket(n, a, a + Fraction(1, 2 ** (n + 1)))


@dataclass(frozen=True)
class MaxReport:
    """A located maximum; argmax_points are in [0, 1]"""
    argmax_points: Tuple[Fraction, ...]
    max_value: CertifiedValue
    method: Method
    p: PowerParam
    upper_bound: Any = None
    nodes: int = 0
    bracket: Optional[Bracket] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "method": self.method.value,
            "p": str(self.p),
            "argmax_points": [str(x) for x in self.argmax_points],
            "argmax_approx": [float(x) for x in self.argmax_points],
            "max_value": self.max_value.to_dict(),
        }
        if self.upper_bound is not None:
            data["upper_bound"] = float(self.upper_bound)
        if self.method is Method.HOLDER_BB:
            data["nodes"] = self.nodes
        if self.bracket is not None:
            data["bracket"] = self.bracket.to_dict()
        return data


@dataclass(frozen=True)
class DQScan:
    """One-sided (or symmetric) difference quotients at scales h_k = 4^{-k}"""
    x0: Fraction
    side: Side
    scales: Tuple[Fraction, ...]
    quotients: Tuple[CertifiedValue, ...]

    def __post_init__(self):
        if len(self.scales) != len(self.quotients):
            raise DomainError("scales and quotients must have the same length")
        if any(h <= 0 for h in self.scales) or any(a <= b for a, b in zip(self.scales, self.scales[1:])):
            raise DomainError("scales must be positive and strictly decreasing")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x0": str(self.x0),
            "side": self.side.value,
            "scales": [str(h) for h in self.scales],
            "quotients": [q.to_dict() for q in self.quotients],
        }


def closed_form_max(p: Real, ctx: PrecisionCtx = DEFAULT_CTX) -> MaxReport:
    """Maximum from the closed form at 1/3, argmax {1/3, 2/3}"""
    p = _require_sub_unit(p)
    value = eval_closed_form(closed_form_sp(THIRD), p, ctx)
    return MaxReport((THIRD, 1 - THIRD), value, Method.CLOSED_FORM, p)


def d_n(p: Real, n: int, s: Real, ctx: PrecisionCtx = DEFAULT_CTX):
    """
    D_n(s) = sum_{k=0}^{n} [(B_k + (-1)^k 3s)^p - (B_k - (-1)^k 3s)^p],
    B_k = 2^{n-k+2} - (-1)^{n+k}

    Positive for even n and negative for odd n whenever 0 < s <= 1.
    """
    p = _require_sub_unit(p)
    n = _require_generation(n)
    s = _require_probe(s)
    context = ctx.context
    pm = p.to_mpf(ctx)
    three_s = 3 * s
    total = context.mpf(0)
    for k in range(n + 1):
        base = 2 ** (n - k + 2) - (-1) ** (n + k)
        shift = three_s if k % 2 == 0 else -three_s
        # base + shift and base - shift are exact rationals, rounded once
        total += context.power(ctx.mpf(base + shift), pm) - context.power(ctx.mpf(base - shift), pm)
    return total


def f_n(p: Real, n: int, s: Real, ctx: PrecisionCtx = DEFAULT_CTX, tol: Real = 1e-15) -> CertifiedValue:
    """f_n(s) = S_p(c_n + s/2^{n+2}) - S_p(c_n - s/2^{n+2}), evaluated from the series"""
    p = _require_sub_unit(p)
    n = _require_generation(n)
    s = _require_probe(s)
    center = bracket(n).c
    offset = s / 2 ** (n + 2)
    return eval_sp(p, center + offset, tol, ctx) - eval_sp(p, center - offset, tol, ctx)


def f_n_finite(p: Real, n: int, s: Real, ctx: PrecisionCtx = DEFAULT_CTX):
    """
    f_n(s) from its first n + 1 series terms

    Terms with k > n cancel because 2^k c_n is a multiple of 1/2 there and T_0
    is symmetric about it.
    """
    p = _require_sub_unit(p)
    n = _require_generation(n)
    s = _require_probe(s)
    context = ctx.context
    pm = p.to_mpf(ctx)
    center = bracket(n).c
    total = context.mpf(0)
    for k in range(n + 1):
        spread = s * Fraction(2) ** (k - n - 2)
        up = context.power(ctx.mpf(t0(2 ** k * center + spread)), pm)
        down = context.power(ctx.mpf(t0(2 ** k * center - spread)), pm)
        total += context.power(2, -k * pm) * (up - down)
    return total


def _sign(value) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


@dataclass(frozen=True)
class BracketStep:
    """One row of the bracketing trace"""
    n: int
    bracket: Bracket
    sign_d_n: int

    def to_row(self) -> Dict[str, Any]:
        return {"n": self.n, "a_n": str(self.bracket.a), "b_n": str(self.bracket.b), "sign_d_n": self.sign_d_n}


def bracket_trace(p: Real, generations: int, ctx: PrecisionCtx = DEFAULT_CTX,
                  probes: Sequence[Real] = DEFAULT_PROBES) -> List[BracketStep]:
    """
    Descend from [0, 1/2] for the given number of generations

    At generation n the sign of D_n at every probe picks the half holding
    the maximum: positive keeps the right half, negative the left. A probe
    sign that breaks the parity law, or a half that disagrees with the
    closed-form bracket, raises ConsistencyError.

    Returns:
        generations + 1 steps, n = 0..generations
    """
    p = _require_sub_unit(p)
    generations = _require_generation(generations, "generations")
    probe_values = [_require_probe(s) for s in probes]
    if not probe_values:
        raise DomainError("At least one probe value is required")

    steps: List[BracketStep] = []
    current = bracket(0)
    for n in range(generations + 1):
        expected = 1 if n % 2 == 0 else -1
        observed = {_sign(d_n(p, n, s, ctx)) for s in probe_values}
        if observed != {expected}:
            raise ConsistencyError(f"D_{n} signs {sorted(observed)} at p={p} contradict the parity law")
        steps.append(BracketStep(n, current, expected))
        if n == generations:
            break
        following = current.right_half() if expected > 0 else current.left_half()
        if following != bracket(n + 1):
            raise ConsistencyError(f"Generation {n + 1} bracket {following} departs from the closed form")
        current = following
    logger.debug(f"Bracketing p={p}: generation {generations} width {current.width}")
    return steps


def bracket_max(p: Real, generations: int, ctx: PrecisionCtx = DEFAULT_CTX,
                probes: Sequence[Real] = DEFAULT_PROBES) -> Bracket:
    """Generation-N bracket of width 2^{-(N+1)} containing 1/3"""
    return bracket_trace(p, generations, ctx, probes)[-1].bracket


def bracket_report(p: Real, generations: int, ctx: PrecisionCtx = DEFAULT_CTX,
                   probes: Sequence[Real] = DEFAULT_PROBES) -> MaxReport:
    """
    MaxReport from bracketing: argmax estimate is the midpoint c_N (and its
    mirror), the value is certified at the simplest rational in the bracket
    """
    p = _require_sub_unit(p)
    final = bracket_max(p, generations, ctx, probes)
    point = simplest_rational_between(final.a, final.b)
    value = eval_closed_form(closed_form_sp(point), p, ctx)
    return MaxReport((final.c, 1 - final.c), value, Method.BRACKETING, p, bracket=final)


@dataclass(frozen=True)
class _Cell:
    left: Fraction
    depth: int

    @property
    def width(self) -> Fraction:
        return Fraction(1, 2 ** self.depth)

    @property
    def right(self) -> Fraction:
        return self.left + self.width

    @property
    def center(self) -> Fraction:
        return self.left + self.width / 2


class _CellBounds:
    """Certified upper bounds for S_p on dyadic cells of [0, 1/2]"""

    def __init__(self, p: PowerParam, cert: HolderCertificate, ctx: PrecisionCtx, eval_tol: Real):
        self.p = p
        self.cert = cert
        self.ctx = ctx
        self.eval_tol = eval_tol
        self.pm = p.to_mpf(ctx)

    def _term(self, x: Fraction, n: int):
        context = self.ctx.context
        base = context.ldexp(self.ctx.mpf(t0(x * 2 ** n)), -n)
        return context.power(base, self.pm)

    def series_bound(self, cell: _Cell):
        # T_0(2^n .) is affine on the cell for n < depth, so each term peaks at an endpoint
        context = self.ctx.context
        total = context.fsum(max(self._term(cell.left, n), self._term(cell.right, n))
                             for n in range(cell.depth))
        total += tail_bound(self.p, cell.depth, self.ctx)
        return _pad(total * (1 + 8 * cell.depth * self.ctx.unit_roundoff), self.ctx.mantissa_bits)

    def evaluate(self, cell: _Cell) -> Tuple[CertifiedValue, Any]:
        value = eval_sp(self.p, cell.center, self.eval_tol, self.ctx)
        half_width = cell.width / 2
        holder = value.upper + self.cert.envelope(half_width)
        return value, min(holder, self.series_bound(cell))


class _DyadicSearch(pybnb.Problem):
    """
    Dyadic cells of [0, 1/2] as a pybnb maximization problem

    A node's objective is the best certified lower bound among the cell
    center and the simplest rational inside the cell (when its closed form
    is cheap). Cells no wider than leaf_width are not branched; their upper
    bounds are kept so the final enclosure stays certified.
    """

    def __init__(self, bounds: _CellBounds, leaf_width: Fraction):
        self.bounds = bounds
        self.leaf_width = leaf_width
        self.best_point = Fraction(0)
        self.best_value: Optional[CertifiedValue] = None
        self.best_cell = _Cell(Fraction(0), 1)
        self.leaf_upper = None
        self._snapped: Dict[Fraction, CertifiedValue] = {}
        self._cell = self.best_cell
        self._parent_upper = None
        self._evaluated: Optional[Tuple[Any, Any]] = None

    def snap_value(self, point: Fraction) -> CertifiedValue:
        if point not in self._snapped:
            self._snapped[point] = eval_closed_form(closed_form_sp(point), self.bounds.p, self.bounds.ctx)
        return self._snapped[point]

    def _offer(self, point: Fraction, value: CertifiedValue):
        best = self.best_value
        if best is None or value.lower > best.lower or (value.lower == best.lower and point < self.best_point):
            self.best_point, self.best_value, self.best_cell = point, value, self._cell

    def _evaluate(self) -> Tuple[Any, Any]:
        if self._evaluated is None:
            cell = self._cell
            value, upper = self.bounds.evaluate(cell)
            if self._parent_upper is not None:
                upper = min(upper, self._parent_upper)
            lower = value.lower
            self._offer(cell.center, value)
            candidate = simplest_rational_between(cell.left, cell.right)
            if candidate != cell.center and candidate.denominator <= SNAP_MAX_DENOMINATOR:
                snapped = self.snap_value(candidate)
                self._offer(candidate, snapped)
                lower = max(lower, snapped.lower)
            self._evaluated = (lower, upper)
        return self._evaluated

    def sense(self):
        return pybnb.maximize

    def objective(self):
        return math.nextafter(float(self._evaluate()[0]), -math.inf)

    def bound(self):
        return math.nextafter(float(self._evaluate()[1]), math.inf)

    def save_state(self, node):
        node.state = (self._cell.left, self._cell.depth, self._parent_upper)

    def load_state(self, node):
        left, depth, self._parent_upper = node.state
        self._cell = _Cell(left, depth)
        self._evaluated = None

    def branch(self):
        cell = self._cell
        upper = self._evaluate()[1]
        if cell.width <= self.leaf_width:
            if self.leaf_upper is None or upper > self.leaf_upper:
                self.leaf_upper = upper
            return
        for left in (cell.left, cell.center):
            child = pybnb.Node()
            child.state = (left, cell.depth + 1, upper)
            yield child


def holder_bb_max(p: Real, cert: Optional[HolderCertificate] = None, x_tol: Real = 1e-6,
                  ctx: PrecisionCtx = DEFAULT_CTX, budget: int = DEFAULT_NODE_BUDGET,
                  eval_tol: Real = 1e-14) -> MaxReport:
    """
    Best-bound-first branch-and-bound for the maximum of S_p on [0, 1/2]

    Cells are dyadic. A cell's upper bound is the smaller of the Hoelder
    bound (center value + radius + modulus envelope at the half-width), the
    series cell bound and its parent's bound. pybnb drops cells whose bound
    does not beat the best certified lower bound; cells narrower than
    x_tol / 4 are leaves. The result is snapped to the simplest rational near
    the best cell when its closed-form value is at least as good, and
    mirrored to 1 - x.

    Args:
        p: Exponent, 0 < p < 1
        cert: Hoelder certificate for p (built when omitted)
        x_tol: Required accuracy of the argmax
        ctx: Working precision
        budget: Maximum number of processed cells
        eval_tol: Tolerance of the center evaluations

    Returns:
        MaxReport with method HolderBB, certified upper bound and node count
    """
    p = _require_sub_unit(p)
    cert = cert or certificate(p, ctx)
    if cert.p != p:
        raise DomainError(f"Certificate is for p={cert.p}, not p={p}")
    tolerance = as_fraction(x_tol)
    if tolerance <= 0:
        raise DomainError(f"x_tol must be positive, got {x_tol}")
    if budget < 1:
        raise DomainError(f"budget must be positive, got {budget}")

    problem = _DyadicSearch(_CellBounds(p, cert, ctx, eval_tol), tolerance / 4)
    solver = pybnb.Solver(comm=None)
    results = solver.solve(problem,
                           queue_strategy="bound",
                           absolute_gap=0,
                           relative_gap=None,
                           node_limit=budget,
                           log=logger,
                           log_new_incumbent=False,
                           disable_signal_handlers=True)

    point, value = problem.best_point, problem.best_value
    if results.termination_condition == pybnb.TerminationCondition.node_limit:
        logger.warning(f"Branch-and-bound budget of {budget} cells exhausted at p={p}")
        partial = MaxReport((point, 1 - point), value, Method.HOLDER_BB, p,
                            upper_bound=results.bound, nodes=results.nodes)
        raise ResourceError(f"Node budget {budget} exhausted before reaching x_tol={x_tol}", partial)

    upper = value.upper
    if problem.leaf_upper is not None and problem.leaf_upper > upper:
        upper = problem.leaf_upper
    cell = problem.best_cell
    candidate = simplest_rational_between(max(cell.left - cell.width, 0),
                                          min(cell.right + cell.width, Fraction(1, 2)))
    if candidate != point and candidate.denominator <= SNAP_MAX_DENOMINATOR:
        snapped = problem.snap_value(candidate)
        if snapped.value >= value.value:
            point, value = candidate, snapped
    logger.info(f"Branch-and-bound p={p}: argmax {point} after {results.nodes} cells")
    return MaxReport((point, 1 - point), value, Method.HOLDER_BB, p, upper_bound=upper, nodes=results.nodes)


def dq_scan(p: Real, x0: Real, k_max: int, ctx: PrecisionCtx = DEFAULT_CTX,
            side: Side = Side.RIGHT) -> DQScan:
    """
    Difference quotients of S_p at x0 for h_k = 4^{-k}, k = 1..k_max

    Each S_p value is evaluated to h_k 4^{-k_max} / 4, so every quotient has
    radius at most 4^{-k_max} / 2.
    """
    p = PowerParam.coerce(p)
    if isinstance(k_max, bool) or not isinstance(k_max, int) or k_max < 1:
        raise DomainError(f"k_max must be a positive integer, got {k_max!r}")
    x0 = as_fraction(x0)
    finest = Fraction(1, 4 ** k_max)
    center = eval_sp(p, x0, finest * finest / 4, ctx)

    scales: List[Fraction] = []
    quotients: List[CertifiedValue] = []
    for k in range(1, k_max + 1):
        h = Fraction(1, 4 ** k)
        target = h * finest / 4
        if side is Side.RIGHT:
            quotient = (eval_sp(p, x0 + h, target, ctx) - center) / h
        elif side is Side.LEFT:
            quotient = (center - eval_sp(p, x0 - h, target, ctx)) / h
        else:
            quotient = (eval_sp(p, x0 + h, target, ctx) - eval_sp(p, x0 - h, target, ctx)) / (2 * h)
        scales.append(h)
        quotients.append(quotient)
    return DQScan(x0, side, tuple(scales), tuple(quotients))


def nondifferentiability_floor(p: Real, ctx: PrecisionCtx = DEFAULT_CTX):
    """
    delta_p = p 3^{1-p} (2^{1-p} - 1)

    For 0 < h <= 1/6, (S_p(1/3 + h) - S_p(1/3)) / h <= -delta_p, so right
    quotients at 1/3 and left quotients at 2/3 stay at least delta_p away
    from zero.
    """
    p = _require_sub_unit(p)
    context = ctx.context
    pm = p.to_mpf(ctx)
    return pm * context.power(3, 1 - pm) * (context.power(2, 1 - pm) - 1)


def verify_quotient_relation(p: Real, k_max: int, ctx: PrecisionCtx = DEFAULT_CTX) -> IdentityReport:
    """
    Check 2 Q_{2/3}(2h) = 2^p (Q_{1/3}(h) - Q_T(h)) at h = 4^{-k}, k = 1..k_max

    Q_x(h) is the right difference quotient of S_p at x and Q_T(h) that of
    T_0^p at 1/3.
    """
    p = _require_sub_unit(p)
    if isinstance(k_max, bool) or not isinstance(k_max, int) or k_max < 1:
        raise DomainError(f"k_max must be a positive integer, got {k_max!r}")
    context = ctx.context
    two_p = context.power(2, p.to_mpf(ctx))
    finest = Fraction(1, 4 ** k_max)
    two_thirds = 1 - THIRD
    at_third = eval_sp(p, THIRD, finest * finest / 4, ctx)
    at_two_thirds = eval_sp(p, two_thirds, finest * finest / 4, ctx)
    t_third = t0_power(p, THIRD, ctx)

    tracker = ResidualTracker(IdentityKind.QUOTIENT_RELATION.value)
    for k in range(1, k_max + 1):
        h = Fraction(1, 4 ** k)
        target = h * finest / 4
        left = ((eval_sp(p, two_thirds + 2 * h, target, ctx) - at_two_thirds) / (2 * h)).scaled(2)
        q_third = (eval_sp(p, THIRD + h, target, ctx) - at_third) / h
        q_t = (t0_power(p, THIRD + h, ctx) - t_third) / ctx.mpf(h)
        right = two_p * (q_third.value - q_t)
        residual = abs(left.value - right)
        # T_0^p differences lose accuracy as h shrinks
        slack = 16 * ctx.unit_roundoff * (abs(right) + 2 * two_p * t_third / ctx.mpf(h))
        tracker.add(residual, SAFETY_FACTOR * (left.error_radius + two_p * q_third.error_radius) + slack)
    return tracker.report()


def sample_sab_tuples(count: int, seed: int = 42) -> List[Tuple[float, float, float, float]]:
    """Random (a, b, s, p) with 0 < s <= a < b and 0 < p < 1"""
    if count < 0:
        raise DomainError(f"Sample count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    tuples: List[Tuple[float, float, float, float]] = []
    while len(tuples) < count:
        s = float(rng.uniform(0.0, 1.0))
        a = s + float(rng.uniform(0.0, 10.0))
        b = a + float(rng.uniform(0.0, 10.0))
        p = float(rng.uniform(0.0, 1.0))
        if 0 < s <= a < b and 0 < p < 1:
            tuples.append((a, b, s, p))
    return tuples


def verify_lemma_sab(samples: Sequence[Tuple[Real, Real, Real, Real]],
                     ctx: PrecisionCtx = DEFAULT_CTX) -> IdentityReport:
    """
    Check (a+s)^p - (a-s)^p > (b+s)^p - (b-s)^p for 0 < s <= a < b, 0 < p < 1

    max_violation is the largest right-minus-left difference; details count
    the samples where strictness could not be observed.
    """
    if not samples:
        raise DomainError("Empty sample set")
    context = ctx.context
    worst = None
    non_strict = 0
    for a, b, s, p in samples:
        a, b, s = as_fraction(a), as_fraction(b), as_fraction(s)
        p = _require_sub_unit(p)
        if not 0 < s <= a < b:
            raise DomainError(f"Need 0 < s <= a < b, got a={a}, b={b}, s={s}")
        pm = p.to_mpf(ctx)
        lhs = context.power(ctx.mpf(a + s), pm) - context.power(ctx.mpf(a - s), pm)
        rhs = context.power(ctx.mpf(b + s), pm) - context.power(ctx.mpf(b - s), pm)
        gap = rhs - lhs
        if gap >= 0:
            non_strict += 1
        worst = gap if worst is None else max(worst, gap)
    return IdentityReport(IdentityKind.LEMMA_SAB.value, len(samples), worst, 0.0, {"non_strict": non_strict})


def verify_dn_parity(ps: Sequence[Real], ns: Sequence[int], ss: Sequence[Real],
                     ctx: PrecisionCtx = DEFAULT_CTX) -> IdentityReport:
    """
    Check that (-1)^n D_n(s) > 0 over a grid of p, n and s

    max_violation is the largest -(-1)^n D_n(s); details count sign failures.
    """
    if not ps or not ns or not ss:
        raise DomainError("Empty sample set")
    worst = None
    failures = 0
    count = 0
    for p in ps:
        for n in ns:
            for s in ss:
                signed = d_n(p, n, s, ctx) * (1 if n % 2 == 0 else -1)
                if signed <= 0:
                    failures += 1
                worst = -signed if worst is None else max(worst, -signed)
                count += 1
    return IdentityReport(IdentityKind.DN_PARITY.value, count, worst, 0.0, {"sign_failures": failures})


def verify_fn_scaling(p: Real, ns: Sequence[int], ss: Sequence[Real],
                      ctx: PrecisionCtx = DEFAULT_CTX, tol: Real = 1e-15) -> IdentityReport:
    """Check |f_n(s) - D_n(s) / (3^p 2^{(n+2)p})| within the radius of f_n"""
    p = _require_sub_unit(p)
    if not ns or not ss:
        raise DomainError("Empty sample set")
    context = ctx.context
    pm = p.to_mpf(ctx)
    tracker = ResidualTracker(IdentityKind.FN_SCALING.value)
    for n in ns:
        scale = context.power(3, pm) * context.power(2, (n + 2) * pm)
        for s in ss:
            direct = f_n(p, n, s, ctx, tol)
            scaled = d_n(p, n, s, ctx) / scale
            # D_n sums 2(n+1) rounded powers of numbers up to 2^{n+3}
            slack = 16 * (n + 2) * ctx.unit_roundoff * context.power(2, (n + 3) * pm) / scale
            tracker.add(abs(direct.value - scaled), SAFETY_FACTOR * direct.error_radius + slack)
    return tracker.report()
