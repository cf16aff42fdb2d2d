"""Command-line front end: ``qpc-repeater <command> [flags]``.

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from . import channel_chain as chain
from .analytics import bm_success_probability, max_loss, p_mu_table, round_percent
from .qpc_core import CodeParams
from .verify import run_all

SCHEMA_VERSION = 1

TABLE1_CODES = ((1, 1), (2, 2), (3, 10), (6, 5), (10, 3), (23, 5))
TABLE1_ETAS = ("1", "0.99", "0.95", "0.90", "0.75", "0.50", "0.30")
PMU_CODES = (
    (1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (3, 4),
    (4, 3), (3, 5), (5, 3), (4, 4), (4, 5), (5, 4), (5, 5), (7, 4),
    (3, 10), (6, 5), (10, 3), (10, 4), (12, 4), (15, 5), (23, 5), (30, 6),
)
PMU_MAX_MU = 18
FIG3_CODES = ((10, 3), (13, 4), (16, 4), (23, 5), (35, 6))
FIG3_DISTANCE_KM = 1000.0
FIG3_SPACINGS = tuple(round(0.5 + 0.05 * i, 2) for i in range(191))  # 0.5 .. 10 km


class InputError(ValueError):
    pass


@dataclass
class Table:
    """Rows for CSV; ``records`` are the full-precision JSON results."""

    header: list[str]
    rows: list[list[Any]]
    records: list[dict[str, Any]]


# -- parsing -----------------------------------------------------------------


def _code(text: str) -> CodeParams:
    try:
        return CodeParams.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _eta(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"eta must lie in [0, 1], got {text}")
    return value


def _int_pair(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    return lo, hi


def _float_pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    return lo, hi


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _chain_flags(p: argparse.ArgumentParser, spacing: bool = True) -> None:
    p.add_argument("--distance-km", type=float, default=FIG3_DISTANCE_KM)
    if spacing:
        p.add_argument("--spacing-km", type=float, action="append", default=[])
    p.add_argument("--atten-km", type=float, default=chain.DEFAULT_ATTENUATION_KM)
    p.add_argument("--eta-missing", type=float, default=1.0)
    p.add_argument("--eta-source", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (default stdout)")
    codes = argparse.ArgumentParser(add_help=False)
    codes.add_argument("--code", type=_code, action="append", default=[], metavar="N,M")

    parser = argparse.ArgumentParser(prog="qpc-repeater", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bm-prob", parents=[common, codes], help="logical BM success probability grid")
    p.add_argument("--eta", type=_eta, action="append", default=[])
    p.add_argument("--paper-table-1", action="store_true", help="published BM table: 6 codes x 7 etas")

    p = sub.add_parser("pmu-table", parents=[common, codes], help="success probability given mu losses")
    p.add_argument("--max-mu", type=int, default=None)
    p.add_argument("--paper-table-s1", action="store_true", help="published p_mu table: 24 codes, mu <= 18")

    p = sub.add_parser("rate", parents=[common, codes], help="chain rate and cost for fixed spacing")
    _chain_flags(p)
    p.add_argument("--target-rate", type=float, help="also report the tolerable source vacuum probability")

    p = sub.add_parser("curve", parents=[common, codes], help="Rt0 against spacing")
    _chain_flags(p)
    p.add_argument("--paper-fig3", action="store_true", help="reference codes (10,3) .. (35,6), L = 1000 km, 0.5..10 km")

    p = sub.add_parser("optimize", parents=[common], help="cost-optimal code and spacing")
    _chain_flags(p, spacing=False)
    p.add_argument("--n-range", type=_int_pair, default=chain.DEFAULT_N_RANGE)
    p.add_argument("--m-range", type=_int_pair, default=chain.DEFAULT_M_RANGE)
    p.add_argument("--spacing-bounds", type=_float_pair, default=chain.DEFAULT_SPACING_BOUNDS_KM)
    p.add_argument("--perfect", action="store_true", help="unit-efficiency physical BMs")
    p.add_argument("--top", type=_positive_int, default=10, help="ranked rows to print")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--paper-fig3", action="store_true", help="reference search at 1000 km (the defaults)")

    p = sub.add_parser("resources", parents=[common, codes], help="doubler count and multiplexed source")
    p.add_argument("--multiplex", type=_positive_int, default=10)
    p.add_argument("--eta-source", type=float, default=0.5, help="single-source success")

    p = sub.add_parser("verify", parents=[common], help="run the oracle cross-checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive_int, default=200_000)
    p.add_argument("--workers", type=_positive_int, default=1)
    return parser


# -- commands ----------------------------------------------------------------


def _pct(value) -> str:
    return str(round_percent(value))


def cmd_bm_prob(args) -> Table:
    codes, etas = args.code, args.eta
    if args.paper_table_1:
        codes = codes or [CodeParams(*c) for c in TABLE1_CODES]
        etas = etas or [Fraction(e) for e in TABLE1_ETAS]
    if not etas:
        raise InputError("bm-prob needs at least one --eta")
    header = ["code"] + [f"eta={float(e):g}" for e in etas]
    rows, records = [], []
    for code in codes:
        probs = [bm_success_probability(code, e) for e in etas]
        rows.append([str(code)] + [_pct(p) for p in probs])
        records += [
            {"n": code.n, "m": code.m, "eta": float(e), "p": float(p), "p_exact": str(p)}
            for e, p in zip(etas, probs)
        ]
    return Table(header, rows, records)


def cmd_pmu_table(args) -> Table:
    codes, cap = args.code, args.max_mu
    if args.paper_table_s1:
        codes = codes or [CodeParams(*c) for c in PMU_CODES]
        cap = PMU_MAX_MU if cap is None else cap
    if cap is not None and cap < 0:
        raise InputError("--max-mu must be non-negative")
    tables = [p_mu_table(c) for c in codes]
    lengths = [len(t) if cap is None else min(len(t), cap + 1) for t in tables]
    width = max(lengths, default=0)
    header = ["code"] + [f"mu={mu}" for mu in range(width)]
    rows, records = [], []
    for t, length in zip(tables, lengths):
        values = t.values[:length]
        rows.append([str(t.code)] + [_pct(v) for v in values] + [""] * (width - length))
        records.append(
            {
                "n": t.code.n,
                "m": t.code.m,
                "max_loss": max_loss(t.code),
                "p_mu": [float(v) for v in values],
            }
        )
    return Table(header, rows, records)


def _configs(args) -> list[chain.ChainConfig]:
    if not args.spacing_km:
        raise InputError("need at least one --spacing-km")
    return [
        chain.ChainConfig(args.distance_km, s, args.atten_km, args.eta_missing, args.eta_source)
        for s in args.spacing_km
    ]


def cmd_rate(args) -> Table:
    header = ["code", "spacing_km", "eta", "p_percent", "rt0_percent", "cost"]
    if args.target_rate is not None:
        header.append("max_source_vacuum")
    rows, records = [], []
    for code in args.code:
        for cfg in _configs(args):
            p = bm_success_probability(code, chain.effective_eta(cfg))
            rt0 = chain.chain_success(code, cfg)
            c = chain.cost(code, cfg)
            rec = {
                "n": code.n,
                "m": code.m,
                "spacing_km": cfg.station_spacing_km,
                "eta": chain.effective_eta(cfg),
                "p": p,
                "rt0": rt0,
                "cost": c,
            }
            row = [str(code), f"{cfg.station_spacing_km:g}", f"{rec['eta']:.6f}", _pct(p), _pct(rt0), f"{c:.6g}"]
            if args.target_rate is not None:
                # the threshold is defined with perfect sources
                rec["max_source_vacuum"] = chain.source_vacuum_threshold(
                    cfg.total_distance_km,
                    cfg.station_spacing_km,
                    code,
                    args.target_rate,
                    attenuation_length_km=cfg.attenuation_length_km,
                    eta_missing=cfg.eta_missing,
                )
                row.append(f"{rec['max_source_vacuum']:.6f}")
            rows.append(row)
            records.append(rec)
    return Table(header, rows, records)


def cmd_curve(args) -> Table:
    codes, spacings = args.code, args.spacing_km
    if args.paper_fig3:
        codes = codes or [CodeParams(*c) for c in FIG3_CODES]
        spacings = spacings or list(FIG3_SPACINGS)
    if not spacings:
        raise InputError("need at least one --spacing-km")
    points = chain.rate_curve(
        codes,
        args.distance_km,
        spacings,
        attenuation_length_km=args.atten_km,
        eta_missing=args.eta_missing,
        eta_source=args.eta_source,
    )
    header = ["code", "spacing_km", "rt0_percent"]
    rows = [[str(pt.code), f"{pt.spacing_km:g}", _pct(pt.success_per_timestep)] for pt in points]
    records = [
        {"n": pt.code.n, "m": pt.code.m, "spacing_km": pt.spacing_km, "rt0": pt.success_per_timestep}
        for pt in points
    ]
    return Table(header, rows, records)


def cmd_optimize(args) -> Table:
    result = chain.optimize(
        args.distance_km,
        args.n_range,
        args.m_range,
        args.spacing_bounds,
        attenuation_length_km=args.atten_km,
        eta_missing=args.eta_missing,
        eta_source=args.eta_source,
        perfect=args.perfect,
        workers=args.workers,
    )
    header = ["rank", "code", "spacing_km", "rt0_percent", "cost", "edge"]
    rows, records = [], []
    for rank, r in enumerate(result.ranked[: args.top], start=1):
        edges = []
        if r.at_boundary:
            edges.append("spacing")
        if r.code.n in args.n_range:
            edges.append("n")
        if r.code.m in args.m_range:
            edges.append("m")
        rows.append([rank, str(r.code), f"{r.spacing_km:.4f}", _pct(r.success_per_timestep), f"{r.cost:.6g}", "+".join(edges)])
        records.append(
            {
                "rank": rank,
                "n": r.code.n,
                "m": r.code.m,
                "spacing_km": r.spacing_km,
                "rt0": r.success_per_timestep,
                "cost": r.cost,
                "stations": r.stations,
                "range_edges": edges,
            }
        )
    return Table(header, rows, records)


def cmd_resources(args) -> Table:
    header = ["code", "dopplers", "multiplex", "multiplexed_source_success"]
    rows, records = [], []
    for code in args.code:
        res = chain.resource_count(code, args.multiplex, args.eta_source)
        rows.append([str(code), res.dopplers, args.multiplex, f"{res.multiplexed_source_success:.4f}"])
        records.append(
            {
                "n": code.n,
                "m": code.m,
                "dopplers": res.dopplers,
                "multiplex": args.multiplex,
                "multiplexed_source_success": res.multiplexed_source_success,
            }
        )
    return Table(header, rows, records)


def cmd_verify(args) -> Table:
    checks = run_all(args.trials, args.seed, args.workers)
    return Table(
        ["check", "passed", "detail"],
        [[c.name, "yes" if c.passed else "no", c.detail] for c in checks],
        [{"check": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
    )


COMMANDS = {
    "bm-prob": cmd_bm_prob,
    "pmu-table": cmd_pmu_table,
    "rate": cmd_rate,
    "curve": cmd_curve,
    "optimize": cmd_optimize,
    "resources": cmd_resources,
    "verify": cmd_verify,
}


# -- output ------------------------------------------------------------------


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, CodeParams):
        return [value.n, value.m]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def render(table: Table, args, fmt: str) -> str:
    if fmt == "json":
        inputs = {
            k: _jsonable(v)
            for k, v in sorted(vars(args).items())
            if k not in ("format", "out")
        }
        doc = {"schema_version": SCHEMA_VERSION, "inputs": inputs, "results": table.records}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.header)
    writer.writerows(table.rows)
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        table = COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"qpc-repeater {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = render(table, args, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and not all(r["passed"] for r in table.records):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
