import csv
import json
import logging
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Sequence, TextIO

from .takagi_core import CertifiedValue, _mp_context

# Configure logger
logger = logging.getLogger(__name__)


def format_certified(value: CertifiedValue) -> str:
    """
    Decimal string of a certified value without digits beyond its radius

    The last printed digit is at the decade of the error radius; exact
    values print at the full working precision.
    """
    context = _mp_context(value.mantissa_bits)
    if value.error_radius == 0:
        return context.nstr(value.value, context.dps)
    last = int(context.floor(context.log10(value.error_radius)))
    if value.value == 0 or abs(value.value) < value.error_radius:
        return context.nstr(value.value, 1)
    lead = int(context.floor(context.log10(abs(value.value))))
    digits = max(1, min(context.dps, lead - last + 1))
    return context.nstr(value.value, digits)


def _json_default(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, CertifiedValue):
        return obj.to_dict()
    if hasattr(obj, '_mpf_'):
        return float(obj)
    if hasattr(obj, 'to_dict'):
        return obj.to_dict()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def to_json(payload: Any) -> str:
    """Serialize results, converting Fractions, mpf and result objects"""
    return json.dumps(payload, indent=2, default=_json_default)


def write_csv(rows: Iterable[Dict[str, Any]], fieldnames: Sequence[str], stream: TextIO) -> int:
    """
    Write rows with a header line

    Args:
        rows: Row dictionaries
        fieldnames: Column order
        stream: Open text stream

    Returns:
        Number of data rows written
    """
    writer = csv.DictWriter(stream, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    count = 0
    for row in rows:
        writer.writerow(row)
        count += 1
    return count


def certified_text(value: CertifiedValue) -> str:
    context = _mp_context(value.mantissa_bits)
    return f"{format_certified(value)} ± {context.nstr(value.error_radius, 3)}"


def summary_lines(reports: Iterable[Any]) -> List[str]:
    """One-line summaries followed by an overall verdict"""
    reports = list(reports)
    lines = [report.summary() for report in reports]
    failed = sum(1 for report in reports if not report.passed)
    lines.append(f"{len(reports) - failed}/{len(reports)} checks passed")
    return lines
