import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .errors import DomainError
from .reporting import format_certified
from .takagi_core import DEFAULT_CTX, CertifiedValue, PowerParam, PrecisionCtx, Real, _mp_context, eval_sp

# Configure logger
logger = logging.getLogger(__name__)

# Fixed clip-path ids so identical curves give identical files
matplotlib.rcParams["svg.hashsalt"] = "takagi"

MARKERS: Tuple[Fraction, ...] = (Fraction(1, 3), Fraction(2, 3))

CSV_FIELDS = ("x", "value", "error_radius")


@dataclass(frozen=True)
class Curve:
    """Samples of S_p on [0, 1]; markers lists the 1/3 and 2/3 rows merged in, if any"""
    p: PowerParam
    xs: Tuple[Fraction, ...]
    values: Tuple[CertifiedValue, ...]
    markers: Tuple[Fraction, ...]

    def rows(self) -> List[Dict[str, str]]:
        rows = []
        for x, value in zip(self.xs, self.values):
            context = _mp_context(value.mantissa_bits)
            rows.append({
                "x": context.nstr(context.fdiv(x.numerator, x.denominator), 17),
                "value": format_certified(value),
                "error_radius": context.nstr(value.error_radius, 3),
            })
        return rows

    def argmax(self) -> Fraction:
        """Sample point with the largest value (first on ties)"""
        best = max(range(len(self.xs)), key=lambda i: (self.values[i].value, -i))
        return self.xs[best]


def sample_curve(p: Real, points: int = 4096, tol: Real = 1e-12,
                 ctx: PrecisionCtx = DEFAULT_CTX, markers: bool = False) -> Curve:
    """
    Evaluate S_p on the grid i/(points - 1), i = 0..points-1

    Args:
        p: Exponent
        points: Grid size, at least 2
        tol: Error bound per value
        ctx: Working precision
        markers: Also sample 1/3 and 2/3 when they are off the grid

    Returns:
        Curve sorted by x
    """
    p = PowerParam.coerce(p)
    if isinstance(points, bool) or not isinstance(points, int) or points < 2:
        raise DomainError(f"points must be an integer >= 2, got {points!r}")
    grid = {Fraction(i, points - 1) for i in range(points)}
    merged = MARKERS if markers else ()
    xs = tuple(sorted(grid | set(merged)))
    values = tuple(eval_sp(p, x, tol, ctx) for x in xs)
    logger.debug(f"Sampled S_p p={p} at {len(xs)} points")
    return Curve(p, xs, values, merged)


def render_svg(curves: Sequence[Curve], path: str) -> None:
    """Plot curves with vertical lines at the maximum points and save as SVG"""
    if not curves:
        raise DomainError("No curves to render")
    fig, ax = plt.subplots(figsize=(8, 5))
    for curve in curves:
        ax.plot([float(x) for x in curve.xs], [float(v) for v in curve.values],
                lw=0.8, label=f"p = {curve.p}")
    for marker in MARKERS:
        ax.axvline(float(marker), color='gray', linestyle=':', lw=1.0)
    ax.set_xlabel(r"$x$")
    ax.set_ylabel(r"$S_p(x)$")
    ax.set_xlim(0, 1)
    ax.legend()
    fig.savefig(path, format="svg", bbox_inches='tight', metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Wrote figure {path}")
