"""
Closed forms of S_p at rational points.

The doubling map u -> 2u mod 1 sends a rational with denominator d to one
with denominator dividing d, so its orbit is eventually periodic. Summing
the series along the preperiod and then the cycle as a geometric series in
2^{-Lp} gives S_p(x) as a finite combination of rational powers.
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

from .errors import DomainError, PrecisionError
from .takagi_core import (
    DEFAULT_CTX,
    LN2_UP,
    TERM_OPS,
    CertifiedValue,
    PowerParam,
    PrecisionCtx,
    Real,
    _pad,
    as_fraction,
)

# Configure logger
logger = logging.getLogger(__name__)

Term = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class RationalPoint:
    """A rational number in lowest terms with positive denominator"""
    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.denominator == 0:
            raise DomainError("Denominator must be non-zero")
        value = Fraction(self.numerator, self.denominator)
        object.__setattr__(self, 'numerator', value.numerator)
        object.__setattr__(self, 'denominator', value.denominator)

    @classmethod
    def coerce(cls, x: Union["RationalPoint", Real]) -> "RationalPoint":
        if isinstance(x, RationalPoint):
            return x
        value = as_fraction(x)
        return cls(value.numerator, value.denominator)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class OrbitDecomposition:
    """Preperiod and cycle of the doubling orbit, with T_0 of every element"""
    preperiod: Tuple[Fraction, ...]
    cycle: Tuple[Fraction, ...]
    t0_values: Tuple[Fraction, ...]

    @property
    def preperiod_length(self) -> int:
        return len(self.preperiod)

    @property
    def cycle_length(self) -> int:
        return len(self.cycle)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "preperiod": [str(u) for u in self.preperiod],
            "cycle": [str(u) for u in self.cycle],
            "t0_values": [str(t) for t in self.t0_values],
        }


def orbit(x: Union[RationalPoint, Real]) -> OrbitDecomposition:
    """
    Follow u -> 2u mod 1 from frac(x) until a state repeats

    Args:
        x: Rational point (reduced mod 1 internally)

    Returns:
        Exact preperiod and cycle of the orbit
    """
    point = RationalPoint.coerce(x)
    den = point.denominator
    state = point.numerator % den
    seen: Dict[int, int] = {}
    states: List[int] = []
    while state not in seen:
        seen[state] = len(states)
        states.append(state)
        state = (2 * state) % den

    start = seen[state]
    elements = [Fraction(s, den) for s in states]
    t0_values = tuple(min(u, 1 - u) for u in elements)
    return OrbitDecomposition(tuple(elements[:start]), tuple(elements[start:]), t0_values)


def _collect(terms: List[Term]) -> Tuple[Term, ...]:
    # Merge equal bases, drop zero bases, order by decreasing base
    merged: Dict[Fraction, Fraction] = {}
    for coefficient, base in terms:
        if base == 0 or coefficient == 0:
            continue
        merged[base] = merged.get(base, Fraction(0)) + coefficient
    return tuple((merged[b], b) for b in sorted(merged, reverse=True) if merged[b] != 0)


def _term_to_dict(term: Term) -> Dict[str, List[int]]:
    coefficient, base = term
    return {
        "coefficient": [coefficient.numerator, coefficient.denominator],
        "base": [base.numerator, base.denominator],
    }


def _term_from_dict(data: Dict[str, Any]) -> Term:
    try:
        coefficient = Fraction(int(data["coefficient"][0]), int(data["coefficient"][1]))
        base = Fraction(int(data["base"][0]), int(data["base"][1]))
    except (KeyError, IndexError, TypeError, ValueError, ZeroDivisionError) as e:
        raise DomainError(f"Malformed closed form term {data!r}: {str(e)}")
    if base <= 0:
        raise DomainError(f"Closed form bases must be positive, got {base}")
    return coefficient, base


def _render_terms(terms: Tuple[Term, ...]) -> str:
    parts = []
    for coefficient, base in terms:
        power = f"({base})^p"
        parts.append(power if coefficient == 1 else f"{coefficient}*{power}")
    return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ClosedForm:
    """
    S_p(x) = sum c_i b_i^p + (sum c_j b_j^p) / (1 - 2^{-Lp})

    Coefficients and bases are exact rationals; the power is taken at
    evaluation time, so one closed form serves every p.
    """
    preperiodic_terms: Tuple[Term, ...]
    periodic_terms: Tuple[Term, ...]
    cycle_length: int
    point: Optional[Fraction] = None

    def __post_init__(self):
        if self.cycle_length < 0:
            raise DomainError(f"cycle_length must be non-negative, got {self.cycle_length}")
        if self.periodic_terms and self.cycle_length == 0:
            raise DomainError("Periodic terms require a positive cycle_length")

    def render(self) -> str:
        """Human readable formula in p"""
        head = "S_p" if self.point is None else f"S_p({self.point})"
        text = _render_terms(self.preperiodic_terms)
        if self.periodic_terms:
            cyclic = f"({_render_terms(self.periodic_terms)}) / (1 - 2^(-{self.cycle_length}p))"
            text = cyclic if text == "0" else f"{text} + {cyclic}"
        return f"{head} = {text}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": None if self.point is None else str(self.point),
            "preperiodic_terms": [_term_to_dict(t) for t in self.preperiodic_terms],
            "periodic_terms": [_term_to_dict(t) for t in self.periodic_terms],
            "cycle_length": self.cycle_length,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ClosedForm":
        point = data.get("point")
        return cls(
            preperiodic_terms=tuple(_term_from_dict(t) for t in data.get("preperiodic_terms", [])),
            periodic_terms=tuple(_term_from_dict(t) for t in data.get("periodic_terms", [])),
            cycle_length=int(data.get("cycle_length", 0)),
            point=None if point is None else as_fraction(point),
        )


def closed_form_sp(x: Union[RationalPoint, Real]) -> ClosedForm:
    """
    Closed form of S_p at a rational point

    Term n of the series is (t_n / 2^n)^p with t_n = T_0 of the n-th orbit
    element. Along the cycle the terms repeat with an extra factor 2^{-Lp}
    per lap, which sums to the 1/(1 - 2^{-Lp}) factor.
    """
    point = RationalPoint.coerce(x)
    decomposition = orbit(point)
    preperiod = decomposition.preperiod_length
    values = decomposition.t0_values

    head = [(Fraction(1), t / 2 ** n) for n, t in enumerate(values[:preperiod])]
    cyclic = [(Fraction(1), t / 2 ** (preperiod + i)) for i, t in enumerate(values[preperiod:])]
    periodic = _collect(cyclic)

    form = ClosedForm(
        preperiodic_terms=_collect(head),
        periodic_terms=periodic,
        cycle_length=decomposition.cycle_length,
        point=point.as_fraction(),
    )
    logger.debug(f"Closed form for {point}: preperiod {preperiod}, cycle {decomposition.cycle_length}")
    return form


def _sum_terms(terms: Tuple[Term, ...], p: PowerParam, ctx: PrecisionCtx):
    # Returns the sum and its rounding charge in units of the unit roundoff
    context = ctx.context
    pm = p.to_mpf(ctx)
    p_weight = float(p.p) * LN2_UP
    total = context.mpf(0)
    charge = context.mpf(0)
    for coefficient, base in terms:
        mb = context.fdiv(base.numerator, base.denominator)
        value = context.fdiv(coefficient.numerator, coefficient.denominator) * context.power(mb, pm)
        total += value
        charge += abs(value) * (TERM_OPS + 1 + p_weight * (abs(context.mag(mb)) + 1)) + abs(total)
    return total, charge


def eval_closed_form(cf: ClosedForm, p: Union[PowerParam, Real],
                     ctx: PrecisionCtx = DEFAULT_CTX) -> CertifiedValue:
    """
    Evaluate a closed form at p with a rounding-only error radius

    Args:
        cf: Closed form
        p: Exponent p > 0
        ctx: Working precision

    Returns:
        Certified value (no truncation error)
    """
    p = PowerParam.coerce(p)
    context = ctx.context
    head, charge = _sum_terms(cf.preperiodic_terms, p, ctx)
    value = head
    if cf.periodic_terms:
        cyclic, cyclic_charge = _sum_terms(cf.periodic_terms, p, ctx)
        exponent = cf.cycle_length * p.to_mpf(ctx) * context.ln2
        # 1 - 2^{-Lp}
        denominator = -context.expm1(-exponent)
        if denominator == 0:
            raise PrecisionError(
                f"1 - 2^(-{cf.cycle_length}p) vanishes at {ctx.mantissa_bits} bits", ctx.mantissa_bits
            )
        part = cyclic / denominator
        value = head + part
        # expm1 carries the relative error of its rounded argument
        denominator_ops = 4 + 3 * (1 + float(exponent))
        charge += cyclic_charge / denominator + abs(part) * (denominator_ops + 1) + abs(value)
    radius = 2 * charge * ctx.unit_roundoff
    return CertifiedValue(value, _pad(radius, ctx.mantissa_bits), ctx.mantissa_bits)


def exact_evaluator(p: Union[PowerParam, Real], x: Real, target_abs_err: Real = None,
                    ctx: PrecisionCtx = DEFAULT_CTX) -> CertifiedValue:
    """Evaluator with the eval_sp calling convention backed by closed forms"""
    return eval_closed_form(closed_form_sp(x), p, ctx)


def simplest_rational_between(lo: Real, hi: Real) -> Fraction:
    """
    Rational of least denominator in the closed interval [lo, hi]

    Continued-fraction descent: take the integer part when an integer fits,
    otherwise recurse on the reciprocals of the fractional parts.
    """
    lo, hi = as_fraction(lo), as_fraction(hi)
    if lo > hi:
        raise DomainError(f"Empty interval [{lo}, {hi}]")
    whole = math.floor(lo)
    if whole == lo:
        return Fraction(whole)
    if whole + 1 <= hi:
        return Fraction(whole + 1)
    inner = simplest_rational_between(1 / (hi - whole), 1 / (lo - whole))
    return whole + 1 / inner
