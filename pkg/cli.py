"""
Command line interface: python cli.py <command> [options]

Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
3 precision or resource error.
"""

import argparse
import logging
import os
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, TextIO

from dotenv import load_dotenv

from lib import services
from lib.config import Settings, load_settings
from lib.errors import ConsistencyError, DomainError, PrecisionError, ResourceError
from lib.plotting import CSV_FIELDS, render_svg
from lib.reporting import to_json, write_csv

# Configure logger
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

FORMATS = ("json", "csv", "text")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # Usage errors go through the same exit-code mapping as domain errors
        self.print_usage(sys.stderr)
        raise DomainError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, help="absolute error bound per value")
    common.add_argument("--precision-bits", type=int, dest="precision_bits", help="mantissa width (>= 53)")
    common.add_argument("--samples", type=int, help="sample count for suites")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--format", choices=FORMATS, dest="output_format", help="text by default, csv for plot")
    common.add_argument("--output", dest="output_path", help="output file (directory for plot)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = _Parser(prog="takagi", description="Takagi power class toolkit")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cmd = commands.add_parser("eval", parents=[common], help="certified value of S_p(x)")
    cmd.add_argument("--p", required=True)
    cmd.add_argument("--x", required=True)

    cmd = commands.add_parser("exact", parents=[common], help="closed form at a rational point")
    cmd.add_argument("--x", required=True, help="rational such as 2/5")
    cmd.add_argument("--p", help="also evaluate at this p")

    cmd = commands.add_parser("max", parents=[common], help="global maximum for 0 < p < 1")
    cmd.add_argument("--p", required=True)
    cmd.add_argument("--method", choices=("closed", "bracket", "holder", "all"), default="closed")
    cmd.add_argument("--x-tol", dest="x_tol", default="1e-6")

    cmd = commands.add_parser("bracket", parents=[common], help="bracketing trace around 1/3")
    cmd.add_argument("--p", required=True)
    cmd.add_argument("--n", type=int, default=20, help="number of generations")

    cmd = commands.add_parser("holder", parents=[common], help="Hoelder certificate checks")
    cmd.add_argument("--p", required=True)
    cmd.add_argument("--pairs", type=int, default=100_000)

    cmd = commands.add_parser("verify", parents=[common], help="identity and lemma suite")
    cmd.add_argument("--p", required=True)

    cmd = commands.add_parser("dq", parents=[common], help="difference quotients at a point")
    cmd.add_argument("--p", required=True)
    cmd.add_argument("--x", default="1/3")
    cmd.add_argument("--k-max", type=int, dest="k_max", default=12)
    cmd.add_argument("--side", choices=("Left", "Right", "Symmetric"), default="Right")

    cmd = commands.add_parser("plot", parents=[common], help="curve samples over [0, 1]")
    cmd.add_argument("--p", required=True, help="comma separated exponents")
    cmd.add_argument("--points", type=int)
    cmd.add_argument("--markers", action="store_true", help="add rows at 1/3 and 2/3")
    cmd.add_argument("--svg", action="store_true", help="also render SVG figures")
    return parser


@contextmanager
def _open_output(path: Optional[str]) -> Iterator[TextIO]:
    if path:
        with open(path, "w", newline="") as f:
            yield f
    else:
        yield sys.stdout


def _emit(args, payload: Dict[str, Any], text_lines: List[str],
          csv_rows: Optional[List[Dict[str, Any]]] = None, csv_fields=None) -> None:
    with _open_output(args.output_path) as out:
        if args.output_format == "json":
            out.write(to_json(payload) + "\n")
        elif args.output_format == "csv" and csv_rows is not None:
            write_csv(csv_rows, csv_fields, out)
        else:
            out.write("\n".join(text_lines) + "\n")


def cmd_eval(args, settings: Settings) -> int:
    result = services.evaluate(args.p, args.x, settings)
    row = {"x": result["x"], "value": result["value"], "error_radius": result["error_radius"]}
    _emit(args, result, [f"S_{result['p']}({result['x']}) = {result['text']}"], [row], CSV_FIELDS)
    return EXIT_OK


def cmd_exact(args, settings: Settings) -> int:
    result = services.exact(args.p, args.x, settings)
    lines = [result["formula"]]
    if "value" in result:
        lines.append(f"at p={result['p']}: {result['text']}")
    _emit(args, result, lines)
    return EXIT_OK


def cmd_max(args, settings: Settings) -> int:
    result = services.maximize(args.p, args.method, settings, args.x_tol)
    lines = []
    rows = []
    for report in result["reports"]:
        value = report["max_value"]
        lines.append(f"{report['method']}: argmax {', '.join(report['argmax_points'])} "
                     f"value {value['value']} ± {value['error_radius']}")
        rows.append({"method": report["method"], "argmax": report["argmax_points"][0],
                     "value": value["value"], "error_radius": value["error_radius"]})
    _emit(args, result, lines, rows, ("method", "argmax", "value", "error_radius"))
    return EXIT_OK


def cmd_bracket(args, settings: Settings) -> int:
    rows = services.bracket_rows(args.p, args.n, settings)
    fields = ("n", "a_n", "b_n", "sign_d_n")
    with _open_output(args.output_path) as out:
        if args.output_format == "json":
            out.write(to_json({"p": args.p, "trace": rows}) + "\n")
        else:
            write_csv(rows, fields, out)
    return EXIT_OK


def _suite_exit(args, result: Dict[str, Any]) -> int:
    lines = [f"p={result['p']}"] + result["summary"]
    lines.append("all checks passed" if result["passed"] else "verification FAILED")
    if args.output_format == "text":
        _emit(args, result, lines)
    else:
        with _open_output(args.output_path) as out:
            out.write(to_json(result) + "\n")
    return EXIT_OK if result["passed"] else EXIT_FAILED


def cmd_verify(args, settings: Settings) -> int:
    if settings.samples < 1:
        raise DomainError("Empty sample set")
    return _suite_exit(args, services.verify_suite(args.p, settings))


def cmd_holder(args, settings: Settings) -> int:
    return _suite_exit(args, services.holder_suite(args.p, args.pairs, settings))


def cmd_dq(args, settings: Settings) -> int:
    result = services.derivative_scan(args.p, args.x, args.k_max, args.side, settings)
    rows = [{"h": h, "quotient": q["value"], "error_radius": q["error_radius"]}
            for h, q in zip(result["scales"], result["quotients"])]
    lines = [f"{row['h']}: {row['quotient']} ± {row['error_radius']}" for row in rows]
    if "floor" in result:
        lines.append(f"floor delta_p = {result['floor']:.6g}")
    _emit(args, result, lines, rows, ("h", "quotient", "error_radius"))
    return EXIT_OK


def _curve_payload(curve) -> Dict[str, Any]:
    return {"p": str(curve.p), "markers": [str(x) for x in curve.markers], "rows": curve.rows()}


def cmd_plot(args, settings: Settings) -> int:
    if args.output_format not in ("csv", "json"):
        raise DomainError(f"plot writes csv or json, not {args.output_format}")
    ps = [item.strip() for item in args.p.split(",") if item.strip()]
    if not ps:
        raise DomainError("At least one p is required")
    if args.svg and not args.output_path:
        raise DomainError("--svg requires --output")
    points = args.points if args.points is not None else settings.plot_points
    curves = services.plot_curves(ps, points, settings, args.markers)

    if args.output_path:
        os.makedirs(args.output_path, exist_ok=True)
        for curve in curves:
            stem = os.path.join(args.output_path, f"takagi_p{curve.p}")
            with open(f"{stem}.{args.output_format}", "w", newline="") as f:
                if args.output_format == "json":
                    f.write(to_json(_curve_payload(curve)) + "\n")
                else:
                    write_csv(curve.rows(), CSV_FIELDS, f)
            if args.svg:
                render_svg([curve], f"{stem}.svg")
        logger.info(f"Wrote {len(curves)} curve(s) to {args.output_path}")
    elif args.output_format == "json":
        sys.stdout.write(to_json({"curves": [_curve_payload(curve) for curve in curves]}) + "\n")
    else:
        for curve in curves:
            sys.stdout.write(f"# p={curve.p}\n")
            write_csv(curve.rows(), CSV_FIELDS, sys.stdout)
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "exact": cmd_exact,
    "max": cmd_max,
    "bracket": cmd_bracket,
    "holder": cmd_holder,
    "verify": cmd_verify,
    "dq": cmd_dq,
    "plot": cmd_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    try:
        args = build_parser().parse_args(argv)
        if args.output_format is None:
            args.output_format = "csv" if args.command == "plot" else "text"
        settings = load_settings().with_overrides(
            tolerance=args.tolerance,
            precision_bits=args.precision_bits,
            samples=args.samples,
            seed=args.seed,
        )
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else getattr(logging, settings.log_level),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            stream=sys.stderr,
        )
        return COMMANDS[args.command](args, settings)
    except DomainError as e:
        logger.error(f"Invalid input: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, ResourceError) as e:
        logger.error(f"Could not complete: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConsistencyError as e:
        logger.error(f"Consistency check failed: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
