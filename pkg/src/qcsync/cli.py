"""Command-line front end.

Exit codes: 0 success, 2 usage or scenario parse error, 3 scenario validation
error, 4 runtime (protocol) error, 5 file I/O error.
"""
from __future__ import annotations

import argparse
import sys

from . import estimation as est
from . import harness as hs
from .harness import ResultTable

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_IO = 0, 2, 3, 4, 5

COMMAND_PROTOCOL = {"ramsey": "ramsey", "qcs": "basic-qcs", "teleport": "teleport",
                    "phase-map": "phase-map"}


class _Mismatch(hs.ScenarioValidationError):
    pass


def _load(path, seed):
    scenario = hs.load_scenario(path)
    return scenario.with_seed(seed) if seed is not None else scenario


def _run_protocol(args) -> ResultTable:
    scenario = _load(args.scenario, args.seed)
    expected = COMMAND_PROTOCOL[args.command]
    if scenario.protocol != expected:
        raise _Mismatch("protocol", f"'{args.command}' needs protocol = {expected}, "
                                    f"scenario has {scenario.protocol}")
    return hs.run(scenario, command=args.command)


def _estimate(args) -> ResultTable:
    scenario = _load(args.scenario, args.seed)
    p = scenario.public
    if scenario.protocol not in ("basic-qcs", "teleport"):
        raise _Mismatch("protocol", "estimate works on basic-qcs or teleport scenarios")
    if args.records:
        _, columns, rows = hs.load_csv(args.records)
        expected = hs.TELEPORT_COLUMNS if scenario.protocol == "teleport" else hs.QCS_COLUMNS
        if columns != expected:
            raise hs.RunError(f"{args.records}: columns {columns} do not match {expected}")
        source = args.records
    else:
        rows = hs.run(scenario).rows
        source = "fresh run"
    summarize = hs.teleport_summary if scenario.protocol == "teleport" else hs.qcs_summary
    summary = summarize(p, rows)
    if "estimate_unavailable" in summary:
        raise hs.RunError(summary["estimate_unavailable"])
    columns = tuple(summary)
    header = hs._scenario_header(scenario, "estimate") + [f"records: {source}, {len(rows)} rows"]
    return ResultTable(columns, [tuple(summary.values())], header)


def _audit(args) -> ResultTable:
    a = _load(args.scenario, args.seed)
    if args.other:
        b = _load(args.other, args.seed)
        how = f"second scenario {args.other}"
    else:
        b = hs.gauge_shifted(a, args.shift)
        how = f"gauge shift {hs.fmt(args.shift)}"
    if a.protocol not in ("basic-qcs", "teleport") or b.protocol != a.protocol:
        raise _Mismatch("protocol", "audit-gauge compares two basic-qcs or two teleport runs")
    ta, tb = hs.run(a), hs.run(b)
    identical = hs.record_bytes(ta) == hs.record_bytes(tb)
    header = hs._scenario_header(a, "audit-gauge") + [
        f"compared against {how}",
        "ORACLE-ONLY: observable_phase columns use hidden ground truth"]
    row = (identical, hs.records_digest(ta), hs.records_digest(tb),
           hs.oracle_observable(a), hs.oracle_observable(b))
    columns = ("identical", "records_sha256_a", "records_sha256_b",
               "observable_phase_a", "observable_phase_b")
    return ResultTable(columns, [tuple("" if v is None else v for v in row)], header)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcsync", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario file (INI format)")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--seed", type=lambda t: int(t, 0), help="override the scenario seed")

    for name, text in (("ramsey", "Ramsey fringe scan"),
                       ("qcs", "shared-singlet synchronization rounds"),
                       ("teleport", "teleportation-based synchronization rounds"),
                       ("phase-map", "two-point phase function over worldline grids")):
        common(sub.add_parser(name, help=text))
    p = sub.add_parser("estimate", help="phase/offset estimate from records")
    common(p)
    p.add_argument("--records", help="existing qcs/teleport CSV to analyse instead of rerunning")
    p = sub.add_parser("audit-gauge", help="compare record streams of two scenarios")
    common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--other", help="second scenario file")
    group.add_argument("--shift", type=float, help="gauge shift applied to the first scenario")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"estimate": _estimate, "audit-gauge": _audit}
    handler = handlers.get(args.command, _run_protocol)
    try:
        table = handler(args)
        hs.emit_csv(table, args.out)
    except hs.ScenarioParseError as exc:
        print(f"qcsync: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except hs.ScenarioValidationError as exc:
        print(f"qcsync: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"qcsync: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (hs.RunError, ValueError) as exc:
        print(f"qcsync: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.command == "audit-gauge":
        print("identical" if table.rows[0][0] else "DIFFERENT")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
