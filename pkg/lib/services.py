"""
Orchestration shared by the CLI and the HTTP API. Every function returns a
JSON-ready dictionary; exceptions from the library propagate to the caller.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

from .config import Settings
from .errors import DomainError
from .exact_rational import closed_form_sp, eval_closed_form, orbit
from .holder_cert import (
    certificate,
    optimal_cut,
    sample_pairs,
    verify_modulus,
    verify_t0_lemmas,
    verify_technical_lemma,
    verify_truncation_inequality,
)
from .identities import run_identity_suite, sample_grid
from .maximizer import (
    DEFAULT_PROBES,
    Side,
    bracket_report,
    bracket_trace,
    closed_form_max,
    dq_scan,
    holder_bb_max,
    nondifferentiability_floor,
    sample_sab_tuples,
    verify_dn_parity,
    verify_fn_scaling,
    verify_lemma_sab,
    verify_quotient_relation,
)
from .plotting import Curve, sample_curve
from .reporting import certified_text, format_certified, summary_lines
from .takagi_core import PowerParam, PrecisionCtx, Real, as_fraction, eval_sp

# Configure logger
logger = logging.getLogger(__name__)

MAX_METHODS = ("closed", "bracket", "holder")

# Generations used when bracketing is requested as a max method
BRACKET_GENERATIONS = 30


def _ctx(settings: Settings) -> PrecisionCtx:
    return PrecisionCtx(settings.precision_bits)


def evaluate(p: Real, x: Real, settings: Settings) -> Dict[str, Any]:
    """Certified S_p(x)"""
    p = PowerParam.coerce(p)
    value = eval_sp(p, x, settings.tolerance, _ctx(settings))
    return {
        "p": str(p),
        "x": str(as_fraction(x)),
        "value": format_certified(value),
        "error_radius": float(value.error_radius),
        "text": certified_text(value),
    }


def exact(p: Optional[Real], x: Real, settings: Settings) -> Dict[str, Any]:
    """Closed form at a rational point, evaluated at p when given"""
    form = closed_form_sp(x)
    result: Dict[str, Any] = {
        "closed_form": form.to_dict(),
        "formula": form.render(),
        "orbit": orbit(x).to_dict(),
    }
    if p is not None:
        p = PowerParam.coerce(p)
        value = eval_closed_form(form, p, _ctx(settings))
        result.update({"p": str(p), "value": format_certified(value), "text": certified_text(value)})
    return result


def maximize(p: Real, method: str, settings: Settings, x_tol: Real = 1e-6) -> Dict[str, Any]:
    """Run one or all maximum methods"""
    p = PowerParam.coerce(p)
    methods = list(MAX_METHODS) if method == "all" else [method]
    unknown = [m for m in methods if m not in MAX_METHODS]
    if unknown:
        raise DomainError(f"Unknown method {unknown[0]!r}; choose from {', '.join(MAX_METHODS)} or all")
    ctx = _ctx(settings)
    reports = []
    for name in methods:
        if name == "closed":
            report = closed_form_max(p, ctx)
        elif name == "bracket":
            report = bracket_report(p, BRACKET_GENERATIONS, ctx)
        else:
            report = holder_bb_max(p, certificate(p, ctx), x_tol, ctx, settings.node_budget)
        reports.append(report.to_dict())
    return {"p": str(p), "reports": reports}


def bracket_rows(p: Real, generations: int, settings: Settings) -> List[Dict[str, Any]]:
    """Bracketing trace rows n, a_n, b_n, sign_d_n"""
    return [step.to_row() for step in bracket_trace(p, generations, _ctx(settings))]


def verify_suite(p: Real, settings: Settings) -> Dict[str, Any]:
    """Functional equations, symmetry, bound, and the D_n / f_n lemmas where p < 1"""
    p = PowerParam.coerce(p)
    ctx = _ctx(settings)
    points = sample_grid(settings.samples, settings.seed)
    if not points:
        raise DomainError("Empty sample set")
    reports = run_identity_suite(p, points, settings.tolerance, ctx=ctx)
    if p.p < 1:
        probes = list(DEFAULT_PROBES)
        reports.append(verify_dn_parity([p], list(range(21)), probes, ctx))
        reports.append(verify_fn_scaling(p, list(range(13)), probes, ctx))
        reports.append(verify_quotient_relation(p, 10, ctx))
        reports.append(verify_lemma_sab(sample_sab_tuples(min(settings.samples, 1000), settings.seed), ctx))
    return _suite_payload(p, reports)


def holder_suite(p: Real, pairs: int, settings: Settings) -> Dict[str, Any]:
    """Hoelder modulus on sampled pairs plus the supporting lemmas"""
    p = PowerParam.coerce(p)
    ctx = _ctx(settings)
    if pairs < 1:
        raise DomainError("Empty sample set")
    sampled = sample_pairs(pairs, settings.seed)
    triples = [(x, y, optimal_cut(p, abs(as_fraction(x) - as_fraction(y)), ctx)) for x, y in sampled]
    reports = [
        verify_modulus(p, sampled, ctx),
        verify_t0_lemmas(p, sampled, ctx),
        verify_technical_lemma(ctx=ctx),
        verify_truncation_inequality(p, triples, ctx),
    ]
    payload = _suite_payload(p, reports)
    payload["C"] = float(certificate(p, ctx).C)
    return payload


def derivative_scan(p: Real, x0: Real, k_max: int, side: str, settings: Settings) -> Dict[str, Any]:
    """Difference quotients at x0 together with the proven floor at 1/3 and 2/3"""
    p = PowerParam.coerce(p)
    ctx = _ctx(settings)
    scan = dq_scan(p, x0, k_max, ctx, Side(side))
    payload = scan.to_dict()
    if p.p < 1:
        payload["floor"] = float(nondifferentiability_floor(p, ctx))
    return payload


def plot_curves(ps: Sequence[Real], points: int, settings: Settings, markers: bool = False) -> List[Curve]:
    ctx = _ctx(settings)
    return [sample_curve(p, points, settings.tolerance, ctx, markers) for p in ps]


def _suite_payload(p: PowerParam, reports: Sequence[Any]) -> Dict[str, Any]:
    passed = all(report.passed for report in reports)
    logger.info(f"Suite p={p}: {'all passed' if passed else 'failures present'}")
    return {
        "p": str(p),
        "passed": passed,
        "reports": [report.to_dict() for report in reports],
        "summary": summary_lines(reports),
    }
