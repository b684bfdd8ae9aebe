"""
Generalized Hoelder certificate for S_p, 0 < p <= 1:

    |S_p(x) - S_p(y)| <= C(p) |x - y|^p log2(1/|x - y|),   0 < |x - y| <= 1/2

together with empirical checks of the lemmas it is assembled from.
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .identities import IdentityKind, IdentityReport
from .takagi_core import (
    DEFAULT_CTX,
    PowerParam,
    PrecisionCtx,
    Real,
    as_fraction,
    eval_sp,
    t0,
)

# Configure logger
logger = logging.getLogger(__name__)

# Relative accuracy of S_p evaluations against the modulus being tested
EVAL_RELATIVE_TOL = 1e-6
# Smallest sampled gap is 2^-MIN_GAP_EXPONENT
MIN_GAP_EXPONENT = 40


def _require_holder_range(p: PowerParam) -> None:
    if p.p > 1:
        raise DomainError(f"The Hoelder certificate covers 0 < p <= 1, got p={p}")


def _require_gap(h: Real) -> Fraction:
    gap = as_fraction(h)
    if not 0 < gap <= Fraction(1, 2):
        raise DomainError(f"Gap must satisfy 0 < h <= 1/2, got {gap}")
    return gap


def constant_C(p: Real, ctx: PrecisionCtx = DEFAULT_CTX):
    """
    C(p) = (1/p) log2(p ln2 / (2^p - 1)) + 2^p / (p ln2) + 1

    Args:
        p: Exponent, 0 < p <= 1
        ctx: Working precision

    Returns:
        The constant as a working float
    """
    p = PowerParam.coerce(p)
    _require_holder_range(p)
    context = ctx.context
    pm = p.to_mpf(ctx)
    p_ln2 = pm * context.ln2
    return context.log(p_ln2 / context.expm1(p_ln2), 2) / pm + context.power(2, pm) / p_ln2 + 1


@dataclass(frozen=True)
class HolderCertificate:
    """The certified modulus omega(h) = C h^p log2(1/h) for a fixed p"""
    p: PowerParam
    C: Any
    ctx: PrecisionCtx = DEFAULT_CTX

    def _gap(self, h: Real):
        gap = _require_gap(h)
        return self.ctx.mpf(gap)

    def modulus(self, h: Real):
        """C h^p log2(1/h)"""
        context = self.ctx.context
        gap = self._gap(h)
        return self.C * context.power(gap, self.p.to_mpf(self.ctx)) * context.log(1 / gap, 2)

    def refined_modulus(self, h: Real):
        """(C - 1 + log2(1/h)) h^p, the estimate before the log factor absorbs the constant"""
        context = self.ctx.context
        gap = self._gap(h)
        return (self.C - 1 + context.log(1 / gap, 2)) * context.power(gap, self.p.to_mpf(self.ctx))

    def truncation_bound(self, h: Real, n: int):
        """n h^p + 2^{-pn} / (2^p - 1)"""
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise DomainError(f"n must be a non-negative integer, got {n!r}")
        context = self.ctx.context
        pm = self.p.to_mpf(self.ctx)
        gap = self._gap(h)
        return n * context.power(gap, pm) + context.power(2, -n * pm) / context.expm1(pm * context.ln2)

    @property
    def peak_gap(self):
        """The modulus increases on (0, e^{-1/p}] and decreases after"""
        context = self.ctx.context
        return context.exp(-1 / self.p.to_mpf(self.ctx))

    def envelope(self, h: Real):
        """sup of the modulus over gaps in (0, h]"""
        gap = self._gap(h)
        peak = self.peak_gap
        if gap <= peak:
            return self.modulus(h)
        context = self.ctx.context
        pm = self.p.to_mpf(self.ctx)
        # modulus at the peak: C e^{-1} / (p ln 2)
        return self.C * context.exp(-1) / (pm * context.ln2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": str(self.p),
            "C": float(self.C),
            "mantissa_bits": self.ctx.mantissa_bits,
        }


def certificate(p: Real, ctx: PrecisionCtx = DEFAULT_CTX) -> HolderCertificate:
    """Build the certificate for 0 < p <= 1"""
    p = PowerParam.coerce(p)
    return HolderCertificate(p, constant_C(p, ctx), ctx)


def optimal_cut(p: Real, h: Real, ctx: PrecisionCtx = DEFAULT_CTX) -> int:
    """
    Term index balancing the two parts of the truncation inequality

    Args:
        p: Exponent
        h: Gap, 0 < h <= 1/2

    Returns:
        n0 = floor((1/p) log2(p ln2 / ((2^p - 1) h^p)))
    """
    p = PowerParam.coerce(p)
    context = ctx.context
    gap = ctx.mpf(_require_gap(h))
    pm = p.to_mpf(ctx)
    p_ln2 = pm * context.ln2
    t_star = context.log(p_ln2 / (context.expm1(p_ln2) * context.power(gap, pm)), 2) / pm
    return int(context.floor(t_star))


def sample_pairs(count: int, seed: int = 42) -> List[Tuple[float, float]]:
    """
    Pairs (x, y) with |x - y| log-uniform in [2^-40, 1/2]

    Gaps are drawn by exponent so that small scales, where the log factor
    matters, are as common as large ones.
    """
    if count < 0:
        raise DomainError(f"Pair count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    pairs: List[Tuple[float, float]] = []
    while len(pairs) < count:
        x = float(rng.random())
        gap = 2.0 ** float(rng.uniform(-MIN_GAP_EXPONENT, -1))
        y = x + gap if rng.random() < 0.5 else x - gap
        exact_gap = abs(Fraction(x) - Fraction(y))
        if 0 < exact_gap <= Fraction(1, 2):
            pairs.append((x, y))
    return pairs


def _decade(gap: Fraction) -> int:
    return math.floor(math.log10(float(gap)))


def verify_modulus(p: Real, pairs: Sequence[Tuple[Real, Real]],
                   ctx: PrecisionCtx = DEFAULT_CTX) -> IdentityReport:
    """
    Check |S_p(x) - S_p(y)| <= C |x-y|^p log2(1/|x-y|) + radii on every pair

    The report's max_violation is the largest ratio of the certified
    difference (radii credited) to the modulus, against tolerance 1.
    details holds the raw maximal ratio, the refined-modulus ratio and the
    maximal ratio per decade of |x - y|.
    """
    p = PowerParam.coerce(p)
    cert = certificate(p, ctx)
    if not pairs:
        raise DomainError("Empty sample set")

    worst = 0.0
    raw_ratio = 0.0
    refined_ratio = 0.0
    histogram: Dict[int, float] = {}
    for x, y in pairs:
        xq, yq = as_fraction(x), as_fraction(y)
        gap = abs(xq - yq)
        if not 0 < gap <= Fraction(1, 2):
            raise DomainError(f"Pair ({x}, {y}) must satisfy 0 < |x - y| <= 1/2")
        rhs = cert.modulus(gap)
        target = max(float(rhs) * EVAL_RELATIVE_TOL, 1e-30)
        sx = eval_sp(p, xq, target, ctx)
        sy = eval_sp(p, yq, target, ctx)
        lhs = abs(sx.value - sy.value)
        credited = max(lhs - sx.error_radius - sy.error_radius, 0)

        ratio = float(credited / rhs)
        worst = max(worst, ratio)
        raw_ratio = max(raw_ratio, float(lhs / rhs))
        refined_ratio = max(refined_ratio, float(lhs / cert.refined_modulus(gap)))
        decade = _decade(gap)
        histogram[decade] = max(histogram.get(decade, 0.0), ratio)

    logger.info(f"Hoelder modulus p={p}: {len(pairs)} pairs, max ratio {raw_ratio:.4f}")
    return IdentityReport(
        IdentityKind.HOLDER_MODULUS.value, len(pairs), worst, 1.0,
        {
            "C": float(cert.C),
            "max_ratio": raw_ratio,
            "max_refined_ratio": refined_ratio,
            "ratio_by_decade": {str(k): histogram[k] for k in sorted(histogram)},
        },
    )


def verify_t0_lemmas(p: Real, samples: Sequence[Tuple[Real, Real]],
                     ctx: PrecisionCtx = DEFAULT_CTX) -> IdentityReport:
    """
    Check the four pointwise inequalities behind the certificate

        |T_0^p(x) - T_0^p(y)| <= 2^{-p}
        |a^p - b^p| <= |a - b|^p          for a = |x|, b = |y|, p <= 1
        |T_0(x) - T_0(y)| <= |x - y|      (exact rational arithmetic)
        |T_0^p(x) - T_0^p(y)| <= |x - y|^p  for p <= 1

    Returns:
        Report whose max_violation is the largest lhs - rhs over all four
    """
    p = PowerParam.coerce(p)
    if not samples:
        raise DomainError("Empty sample set")
    context = ctx.context
    pm = p.to_mpf(ctx)
    sub_unit = p.p <= 1
    bound = context.power(2, -pm)
    worst: Dict[str, Any] = {"T0PowerBound": None, "PowerDifference": None, "T0Lipschitz": None, "T0Holder": None}
    tight = 0
    scale = 1

    def note(name, value):
        current = worst[name]
        worst[name] = value if current is None else max(current, value)

    for x, y in samples:
        xq, yq = as_fraction(x), as_fraction(y)
        tx, ty = t0(xq), t0(yq)
        gap = abs(xq - yq)
        px = context.power(ctx.mpf(tx), pm)
        py = context.power(ctx.mpf(ty), pm)
        diff = abs(px - py)

        note("T0PowerBound", diff - bound)
        note("T0Lipschitz", float(abs(tx - ty) - gap))
        if sub_unit:
            a, b = abs(xq), abs(yq)
            pa, pb = context.power(ctx.mpf(a), pm), context.power(ctx.mpf(b), pm)
            scale = max(scale, pa, pb)
            ab_lhs = abs(pa - pb)
            note("PowerDifference", ab_lhs - context.power(ctx.mpf(abs(a - b)), pm))
            holder_rhs = context.power(ctx.mpf(gap), pm)
            note("T0Holder", diff - holder_rhs)
            if abs(diff - holder_rhs) <= 64 * ctx.unit_roundoff * (1 + holder_rhs):
                tight += 1

    checked = {k: float(v) for k, v in worst.items() if v is not None}
    # A few correctly rounded powers per side
    tolerance = float(64 * ctx.unit_roundoff * scale)
    return IdentityReport(
        IdentityKind.T0_LEMMAS.value, len(samples), max(checked.values()), tolerance,
        {"per_inequality": checked, "holder_tight_cases": tight},
    )


def verify_technical_lemma(step: Real = Fraction(1, 1000), ctx: PrecisionCtx = DEFAULT_CTX) -> IdentityReport:
    """
    Check p ln2 2^p >= 2^p - 1 on a grid of [0, 1], and that
    g(p) = 2^p (1 - p ln2) is nonincreasing there with g(0) = 1
    """
    width = as_fraction(step)
    if not 0 < width <= 1:
        raise DomainError(f"Grid step must be in (0, 1], got {step}")
    context = ctx.context
    ln2 = context.ln2
    count = int(1 / width)
    grid = [width * i for i in range(count + 1)]
    if grid[-1] < 1:
        grid.append(Fraction(1))

    inequality = None
    monotone = None
    previous = None
    g0 = None
    for q in grid:
        pm = ctx.mpf(q)
        two_p = context.power(2, pm)
        gap = (two_p - 1) - pm * ln2 * two_p
        inequality = gap if inequality is None else max(inequality, gap)
        g = two_p * (1 - pm * ln2)
        if previous is not None:
            rise = g - previous
            monotone = rise if monotone is None else max(monotone, rise)
        elif g0 is None:
            g0 = g
        previous = g

    start = abs(g0 - 1)
    worst = max(inequality, monotone if monotone is not None else inequality, start)
    return IdentityReport(
        IdentityKind.TECHNICAL_LEMMA.value, len(grid), worst, float(64 * ctx.unit_roundoff),
        {"inequality": float(inequality), "g_increase": float(monotone or 0), "g0_error": float(start)},
    )


def verify_truncation_inequality(p: Real, triples: Sequence[Tuple[Real, Real, int]],
                                 ctx: PrecisionCtx = DEFAULT_CTX,
                                 tol: Real = 1e-14) -> IdentityReport:
    """
    Check |S_p(x) - S_p(y)| <= n |x - y|^p + 2^{-pn} / (2^p - 1) + radii

    Args:
        p: Exponent, 0 < p <= 1
        triples: (x, y, n) with 0 < |x - y| <= 1/2 and n >= 0
    """
    p = PowerParam.coerce(p)
    cert = certificate(p, ctx)
    if not triples:
        raise DomainError("Empty sample set")
    worst = None
    for x, y, n in triples:
        xq, yq = as_fraction(x), as_fraction(y)
        sx = eval_sp(p, xq, tol, ctx)
        sy = eval_sp(p, yq, tol, ctx)
        excess = abs(sx.value - sy.value) - cert.truncation_bound(abs(xq - yq), n) \
            - sx.error_radius - sy.error_radius
        worst = excess if worst is None else max(worst, excess)
    return IdentityReport(IdentityKind.TRUNCATION_INEQ.value, len(triples), worst, 0.0)
