"""
Evaluation of the Takagi power class S_p(x) = sum_n (T_0(2^n x) / 2^n)^p.

Arguments are handled as exact rationals: a float is the dyadic rational it
stores, decimal strings are read exactly. The doubling orbit of x is then
followed in integer arithmetic, so term n never suffers from the precision
loss of forming 2^n x in floating point.
"""

import math
import numbers
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, List, Sequence, Union

import mpmath
from mpmath.ctx_mp import MPContext

from .errors import DomainError, PrecisionError

# Configure logger
logger = logging.getLogger(__name__)

Real = Union[int, float, str, Fraction, Any]

# Arithmetic operations charged per series term (conversion, division,
# power, accumulation); the power's sensitivity to the rounded exponent is
# charged separately through |log base|.
TERM_OPS = 4

# Upper bound for ln 2 used in error weights
LN2_UP = 0.6932


def as_fraction(x: Real) -> Fraction:
    """
    Convert a real argument to the exact rational it represents

    Args:
        x: int, float, Fraction, mpf, or a string such as "1/3" or "0.37"

    Returns:
        The exact rational value
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise DomainError(f"Expected a real number, got {x!r}")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if hasattr(x, '_mpf_'):
        if not mpmath.isfinite(x):
            raise DomainError(f"Argument must be finite, got {x}")
        sign, man, exp, _ = x._mpf_
        value = Fraction(int(man)) * Fraction(2) ** int(exp)
        return -value if sign else value
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"Cannot parse {x!r} as a rational or decimal number")
    if isinstance(x, numbers.Real):
        value = float(x)
        if not math.isfinite(value):
            raise DomainError(f"Argument must be finite, got {value}")
        return Fraction(value)
    raise DomainError(f"Expected a real number, got {type(x).__name__}")


class Regime(Enum):
    SUB_UNIT = "SubUnit"
    UNIT = "Unit"
    SUPER_UNIT = "SuperUnit"


@dataclass(frozen=True)
class PowerParam:
    """Validated exponent p > 0, stored exactly"""
    p: Fraction

    def __post_init__(self):
        try:
            value = as_fraction(self.p)
        except DomainError as e:
            raise DomainError(f"Invalid exponent p: {str(e)}")
        if value <= 0:
            raise DomainError(f"Exponent p must be positive, got {value}")
        object.__setattr__(self, 'p', value)

    @classmethod
    def coerce(cls, p: Union["PowerParam", Real]) -> "PowerParam":
        return p if isinstance(p, PowerParam) else cls(p)

    @property
    def regime(self) -> Regime:
        if self.p < 1:
            return Regime.SUB_UNIT
        if self.p == 1:
            return Regime.UNIT
        return Regime.SUPER_UNIT

    def as_float(self) -> float:
        return float(self.p)

    def to_mpf(self, ctx: "PrecisionCtx"):
        return ctx.context.fdiv(self.p.numerator, self.p.denominator)

    def __str__(self) -> str:
        text = repr(float(self.p))
        if Fraction(text) == self.p:
            return text[:-2] if text.endswith(".0") else text
        return f"{self.p.numerator}/{self.p.denominator}"


@lru_cache(maxsize=None)
def _mp_context(mantissa_bits: int) -> MPContext:
    # One private context per width; never mutated after creation
    context = MPContext()
    context.prec = mantissa_bits
    return context


@dataclass(frozen=True)
class PrecisionCtx:
    """Working precision: binary mantissa width, round-to-nearest"""
    mantissa_bits: int = 128
    rounding: str = "nearest"

    def __post_init__(self):
        if isinstance(self.mantissa_bits, bool) or not isinstance(self.mantissa_bits, int):
            raise DomainError(f"mantissa_bits must be an integer, got {self.mantissa_bits!r}")
        if self.mantissa_bits < 53:
            raise DomainError(f"mantissa_bits must be >= 53, got {self.mantissa_bits}")
        if self.rounding != "nearest":
            raise DomainError(f"Only round-to-nearest is supported, got {self.rounding!r}")

    @property
    def context(self) -> MPContext:
        return _mp_context(self.mantissa_bits)

    @property
    def unit_roundoff(self):
        """Spacing of the working floats just above 1"""
        return self.context.ldexp(1, 1 - self.mantissa_bits)

    def mpf(self, x: Real):
        """Nearest working float to x (one rounding)"""
        value = as_fraction(x)
        return self.context.fdiv(value.numerator, value.denominator)


DEFAULT_CTX = PrecisionCtx()


def _pad(radius, bits: int):
    # Absorb the rounding of the radius arithmetic itself
    context = _mp_context(bits)
    return radius * (1 + context.ldexp(1, 4 - bits))


@dataclass(frozen=True)
class CertifiedValue:
    """A value and an absolute radius enclosing the true result"""
    value: Any
    error_radius: Any
    mantissa_bits: int = DEFAULT_CTX.mantissa_bits

    def __post_init__(self):
        context = _mp_context(self.mantissa_bits)
        radius = context.convert(self.error_radius)
        if not context.isfinite(radius) or radius < 0:
            raise DomainError(f"error_radius must be finite and non-negative, got {self.error_radius}")
        object.__setattr__(self, 'value', context.convert(self.value))
        object.__setattr__(self, 'error_radius', radius)

    @property
    def lower(self):
        return self.value - self.error_radius

    @property
    def upper(self):
        return self.value + self.error_radius

    def contains(self, x: Real) -> bool:
        context = _mp_context(self.mantissa_bits)
        exact = as_fraction(x)
        target = context.fdiv(exact.numerator, exact.denominator)
        # One rounding of x is allowed for
        slack = abs(target) * context.ldexp(1, 1 - self.mantissa_bits)
        return bool(abs(target - self.value) <= self.error_radius + slack)

    def __float__(self) -> float:
        return float(self.value)

    def _combine(self, other: "CertifiedValue", sign: int) -> "CertifiedValue":
        bits = min(self.mantissa_bits, other.mantissa_bits)
        context = _mp_context(bits)
        value = context.fadd(self.value, other.value) if sign > 0 else context.fsub(self.value, other.value)
        radius = self.error_radius + other.error_radius + abs(value) * context.ldexp(1, 1 - bits)
        return CertifiedValue(value, _pad(radius, bits), bits)

    def __add__(self, other: "CertifiedValue") -> "CertifiedValue":
        return self._combine(_certified(other, self.mantissa_bits), 1)

    def __sub__(self, other: "CertifiedValue") -> "CertifiedValue":
        return self._combine(_certified(other, self.mantissa_bits), -1)

    def __neg__(self) -> "CertifiedValue":
        return CertifiedValue(-self.value, self.error_radius, self.mantissa_bits)

    def scaled(self, factor: Real) -> "CertifiedValue":
        """Multiply by an exact rational factor"""
        context = _mp_context(self.mantissa_bits)
        f = as_fraction(factor)
        mf = context.fdiv(f.numerator, f.denominator)
        value = self.value * mf
        radius = self.error_radius * abs(mf) + abs(value) * context.ldexp(1, 2 - self.mantissa_bits)
        return CertifiedValue(value, _pad(radius, self.mantissa_bits), self.mantissa_bits)

    def __truediv__(self, divisor: Real) -> "CertifiedValue":
        d = as_fraction(divisor)
        if d == 0:
            raise DomainError("Division of a certified value by zero")
        return self.scaled(1 / d)

    def to_dict(self) -> dict:
        context = _mp_context(self.mantissa_bits)
        digits = context.dps + 2
        return {
            "value": context.nstr(self.value, digits),
            "error_radius": context.nstr(self.error_radius, 6),
            "mantissa_bits": self.mantissa_bits,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CertifiedValue":
        bits = int(data.get("mantissa_bits", DEFAULT_CTX.mantissa_bits))
        context = _mp_context(bits)
        return cls(context.mpf(data["value"]), context.mpf(data["error_radius"]), bits)


def _certified(x: Union[CertifiedValue, Real], bits: int) -> CertifiedValue:
    if isinstance(x, CertifiedValue):
        return x
    context = _mp_context(bits)
    value = as_fraction(x)
    exact = context.fdiv(value.numerator, value.denominator)
    return CertifiedValue(exact, abs(exact) * context.ldexp(1, 1 - bits), bits)


def t0(x: Real):
    """
    Distance from x to the nearest integer

    Exact for rational input (int, Fraction, str), float for float input and
    a working float for mpf input.
    """
    if isinstance(x, float) and not isinstance(x, bool):
        if not math.isfinite(x):
            raise DomainError(f"Argument must be finite, got {x}")
        frac = x - math.floor(x)
        return min(frac, 1.0 - frac)
    value = as_fraction(x)
    frac = value - math.floor(value)
    exact = min(frac, 1 - frac)
    if hasattr(x, '_mpf_'):
        return type(x)(exact.numerator) / exact.denominator
    return exact


def t0_power(p: Union[PowerParam, Real], x: Real, ctx: PrecisionCtx = DEFAULT_CTX):
    """T_0(x)^p as a working float"""
    p = PowerParam.coerce(p)
    return ctx.context.power(ctx.mpf(t0(as_fraction(x))), p.to_mpf(ctx))


def series_term(p: Union[PowerParam, Real], x: Real, n: int, ctx: PrecisionCtx = DEFAULT_CTX):
    """The n-th term (T_0(2^n x) / 2^n)^p of the series as a working float"""
    p = PowerParam.coerce(p)
    context = ctx.context
    base = context.ldexp(ctx.mpf(t0(as_fraction(x) * 2 ** n)), -n)
    return context.power(base, p.to_mpf(ctx))


def sup_bound(p: Union[PowerParam, Real], ctx: PrecisionCtx = DEFAULT_CTX):
    """Upper bound 1/(2^p - 1) for |S_p|, rounded upward"""
    p = PowerParam.coerce(p)
    context = ctx.context
    bound = 1 / context.expm1(p.to_mpf(ctx) * context.ln2)
    return _pad(bound, ctx.mantissa_bits)


def tail_bound(p: Union[PowerParam, Real], N: int, ctx: PrecisionCtx = DEFAULT_CTX):
    """
    Bound for the series tail starting at term N

    Args:
        p: Exponent
        N: Index of the first omitted term

    Returns:
        sum_{n>=N} 2^{-(n+1)p} = 2^{-Np} / (2^p - 1), rounded upward
    """
    if isinstance(N, bool) or not isinstance(N, int) or N < 0:
        raise DomainError(f"Term count must be a non-negative integer, got {N!r}")
    p = PowerParam.coerce(p)
    context = ctx.context
    pm = p.to_mpf(ctx)
    head = context.power(2, -N * pm)
    return _pad(head / context.expm1(pm * context.ln2), ctx.mantissa_bits)


def terms_for(p: Union[PowerParam, Real], budget, ctx: PrecisionCtx = DEFAULT_CTX) -> int:
    """Smallest N whose tail bound is within budget"""
    p = PowerParam.coerce(p)
    context = ctx.context
    budget = context.convert(budget)
    if not budget > 0:
        raise DomainError(f"Truncation budget must be positive, got {budget}")
    pm = p.to_mpf(ctx)
    # 2^{-Np}/(2^p - 1) <= budget  <=>  N >= log2(1/(budget (2^p - 1))) / p
    estimate = context.log(1 / (budget * context.expm1(pm * context.ln2)), 2) / pm
    N = max(0, int(context.ceil(estimate)))
    while tail_bound(p, N, ctx) > budget:
        N += 1
    while N > 0 and tail_bound(p, N - 1, ctx) <= budget:
        N -= 1
    return N


def eval_sp(p: Union[PowerParam, Real], x: Real, target_abs_err: Real = 1e-12,
            ctx: PrecisionCtx = DEFAULT_CTX) -> CertifiedValue:
    """
    Evaluate S_p(x) with a certified absolute error

    Half of the error budget goes to truncation (term count from the
    geometric tail bound), half to rounding. Summation stops early, with no
    truncation error, once the doubling orbit of x reaches 0.

    Args:
        p: Exponent p > 0
        x: Finite real argument
        target_abs_err: Required bound on the error radius
        ctx: Working precision

    Returns:
        Certified value with error_radius <= target_abs_err
    """
    p = PowerParam.coerce(p)
    xq = as_fraction(x)
    target = as_fraction(target_abs_err)
    if target <= 0:
        raise DomainError(f"target_abs_err must be positive, got {target_abs_err}")

    context = ctx.context
    half = ctx.mpf(target) / 2
    n_terms = terms_for(p, half, ctx)
    pm = p.to_mpf(ctx)
    p_weight = float(p.p) * LN2_UP

    den = xq.denominator
    num = xq.numerator % den
    total = context.mpf(0)
    charge = context.mpf(0)
    exact = False
    for n in range(n_terms):
        if num == 0:
            exact = True
            break
        base = context.ldexp(context.fdiv(min(num, den - num), den), -n)
        term = context.power(base, pm)
        total += term
        charge += term * (TERM_OPS + p_weight * (abs(context.mag(base)) + 1)) + total
        num = (2 * num) % den
    else:
        exact = num == 0

    rounding = 2 * charge * ctx.unit_roundoff
    if rounding > half:
        raise PrecisionError(
            f"Rounding bound {context.nstr(rounding, 3)} exceeds half the target "
            f"{context.nstr(half, 3)} at {ctx.mantissa_bits} bits; raise mantissa_bits",
            ctx.mantissa_bits,
        )
    truncation = context.mpf(0) if exact else tail_bound(p, n_terms, ctx)
    logger.debug(f"S_p p={p} x={xq}: {n_terms} terms, exact={exact}")
    return CertifiedValue(total, _pad(truncation + rounding, ctx.mantissa_bits), ctx.mantissa_bits)


def eval_sp_many(p: Union[PowerParam, Real], xs: Sequence[Real], target_abs_err: Real = 1e-12,
                 ctx: PrecisionCtx = DEFAULT_CTX) -> List[CertifiedValue]:
    """Evaluate S_p at every point of xs, preserving order"""
    p = PowerParam.coerce(p)
    return [eval_sp(p, x, target_abs_err, ctx) for x in xs]
