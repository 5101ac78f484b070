"""
Command Line Interface
Subcommands for Smith normal forms, partition analysis, computation rates,
throughput simulation and the HTTP server.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from app.analysis import partition_report, rate_report, snf_report
from app.config import API_HOST, API_PORT, DEFAULT_EXPERIMENT_CONFIG
from app.data_models import ExperimentConfig
from app.errors import InvalidArgumentError, PncError
from app.netsim import SCHEMES, baseline_qam, throughput_curve, throughput_gap_db
from app.results import save_config_sidecar, write_curves_csv

logger = logging.getLogger(__name__)


def _read_json(path: Optional[str]):
    if path:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    return json.loads(sys.stdin.read())


def _parse_h(text: str) -> list[complex]:
    """'1,0' or '0.3+1.2i,-1' -> complex entries."""
    return [complex(tok.strip().replace("i", "j")) for tok in text.split(",") if tok.strip()]


def _fmt_pair(pair) -> str:
    re, im = pair
    if im == 0:
        return str(re)
    if re == 0:
        return f"{im}i"
    return f"{re}{'+' if im > 0 else '-'}{abs(im)}i"


def _fmt_matrix(nested) -> str:
    return "[" + "; ".join(" ".join(_fmt_pair(v) for v in row) for row in nested) + "]"


# -----------------------------------------------------------------------------
# Subcommands
# -----------------------------------------------------------------------------
def cmd_snf(args) -> int:
    data = _read_json(args.input)
    J = data["J"] if isinstance(data, dict) else data
    report = snf_report(J)
    if args.json:
        print(report.model_dump_json(include={"P", "D", "Q", "invariant_factors"}, indent=2))
        return 0
    diag = [_fmt_pair(report.D[i][i]) for i in range(len(report.D))]
    print(f"D = diag({', '.join(diag)})")
    print(f"P = {_fmt_matrix(report.P)}")
    print(f"Q = {_fmt_matrix(report.Q)}")
    print(f"invariant factors: {', '.join(report.invariant_factors) or 'none'}")
    return 0


def cmd_analyze_partition(args) -> int:
    data = _read_json(args.input)
    report = partition_report(data["G"], data["J"])
    print(f"index: {report.index}")
    print(f"invariant factors: {', '.join(report.invariant_factors) or 'none'}")
    print(f"annihilator: {report.annihilator} = {' '.join(report.factorization) or 'unit'}")
    if report.vector_space:
        print(f"vector space: F_{report.q}^{report.k}")
    else:
        print("vector space: no")
    return 0


def cmd_rate(args) -> int:
    h = _parse_h(args.h)
    if args.L is not None and args.L != len(h):
        raise InvalidArgumentError(f"--L {args.L} but h has {len(h)} entries")
    report = rate_report(h, args.snr_db)
    a = ",".join(_fmt_pair(p) for p in report.a)
    print(f"a=({a}) R={report.rate}")
    return 0


def cmd_simulate(args) -> int:
    config = ExperimentConfig.load(args.config)
    updates = {}
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.out is not None:
        updates["out"] = args.out
    if updates:
        config = ExperimentConfig.model_validate({**config.model_dump(), **updates})

    names = SCHEMES if args.scheme == "both" else (args.scheme,)
    curves = {}
    for name in names:
        if name == "qam":
            curves[name] = baseline_qam(config, genie=args.genie, workers=args.workers)
        else:
            curves[name] = throughput_curve(config, name, genie=args.genie, workers=args.workers)

    points = [p for name in names for p in curves[name]]
    csv_path = write_curves_csv(points, config.out)
    save_config_sidecar(config, csv_path)
    print(f"wrote {csv_path}")
    for p in points:
        print(
            f"  {p.scheme:<12} {p.snr_db:6.2f} dB  success={p.success_rate:.4f}  "
            f"throughput={p.throughput:.4f}  budget_limited={p.budget_limited:.4f}"
        )
    if len(curves) == 2:
        gap = throughput_gap_db(curves["signal-code"], curves["qam"])
        if gap is None:
            print("gap at 90% of ceiling: not reached on this grid")
        else:
            print(f"gap at 90% of ceiling: {gap:.2f} dB")
    return 0


def cmd_serve(args) -> int:
    from app.main import serve

    serve(host=args.host, port=args.port)
    return 0


# -----------------------------------------------------------------------------
# Entry point
# -----------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pnc", description="Lattice network coding toolkit")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("snf", help="Smith normal form of a Gaussian integer matrix")
    p.add_argument("--input", help="JSON file with J as [re, im] pairs (default: stdin)")
    p.add_argument("--json", action="store_true", help="print P, D, Q and the invariant factors as JSON")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("analyze-partition", help="index and field structure of a partition")
    p.add_argument("--input", help="JSON file with G and J (default: stdin)")
    p.set_defaults(func=cmd_analyze_partition)

    p = sub.add_parser("rate", help="best coefficients and computation rate")
    p.add_argument("--h", required=True, help="comma-separated channel coefficients")
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--L", type=int, help="expected number of users")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("simulate", help="relay network throughput curves")
    p.add_argument("--config", default=str(DEFAULT_EXPERIMENT_CONFIG))
    p.add_argument("--out", help="CSV path (overrides the config)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--scheme", choices=SCHEMES + ("both",), default="both")
    p.add_argument("--genie", action="store_true", help="relays receive the true combinations")
    p.add_argument("--workers", type=int, help="worker processes (default: PNC_THREADS or all cores)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default=API_HOST)
    p.add_argument("--port", type=int, default=API_PORT)
    p.set_defaults(func=cmd_serve)
    return parser


def _diagnostic(e: Exception) -> str:
    if isinstance(e, ValidationError):
        err = e.errors()[0]
        loc = ".".join(str(x) for x in err.get("loc", ())) or "config"
        return f"invalid {loc}: {err['msg']}"
    if isinstance(e, KeyError):
        return f"missing field {e}"
    return " ".join(str(e).split())


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (PncError, ValidationError, ValueError, KeyError, OSError) as e:
        print(f"error: {_diagnostic(e)}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
