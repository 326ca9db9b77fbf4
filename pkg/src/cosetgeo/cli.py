"""Command-line driver.

Subcommands: ``subgroups`` (enumeration + class counts), ``analyze``
(full pipeline over a presentation file), ``permgroup`` (analysis of an
explicit permutation group), ``mic`` (fiducial verification), ``export``
(write report artifacts).  Exit codes: 0 success, 2 parse error,
3 budget exhausted.

Every flag can also be set through an environment variable with the
``COSETGEO_`` prefix (dashes become underscores), e.g.
``COSETGEO_MAX_INDEX=10``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .coset import CosetLimitExceeded
from .fpgroup import ParseError, read_presentation_file, render_word
from .lowindex import SearchBudgetExceeded
from .mic import Fiducial, fiducial_report
from .permgrp import PermutationGroup, parse_cycles
from .pipeline import (
    AnalysisOptions,
    PipelineReport,
    analyze_permutation_group,
    export_report,
    format_table,
    run_pipeline,
)

ENV_PREFIX = "COSETGEO_"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3


def _env_default(name: str, fallback=None, cast=str):
    value = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if value is None:
        return fallback
    return cast(value)


def _add_budget_flags(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--max-cosets",
        type=int,
        default=_env_default("max-cosets", 2_000_000, int),
        help="live-coset bound for coset enumeration",
    )
    parser.add_argument(
        "--node-budget",
        type=int,
        default=_env_default("node-budget", None, int),
        help="search-tree node budget for subgroup enumeration",
    )
    parser.add_argument(
        "--time-budget",
        type=float,
        default=_env_default("time-budget", None, float),
        help="wall-clock budget in seconds for subgroup enumeration",
    )


def _add_mic_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--mic", action="store_true", help="run the fiducial search per subgroup")
    parser.add_argument(
        "--mic-cap",
        type=int,
        default=_env_default("mic-cap", 2000, int),
        help="largest group order the fiducial search will enumerate",
    )
    parser.add_argument(
        "--tolerance",
        type=float,
        default=_env_default("tolerance", 1e-8, float),
        help="numerical tolerance for rank and overlap clustering",
    )
    parser.add_argument(
        "--pauli",
        choices=("wh", "tensor"),
        default=_env_default("pauli", "wh"),
        help="displacement-operator realization",
    )


def _options(args) -> AnalysisOptions:
    return AnalysisOptions(
        mic=getattr(args, "mic", False),
        mic_order_cap=getattr(args, "mic_cap", 2000),
        tolerance=getattr(args, "tolerance", 1e-8),
        pauli=getattr(args, "pauli", "wh"),
        max_cosets=getattr(args, "max_cosets", 2_000_000),
        node_budget=getattr(args, "node_budget", None),
        time_budget=getattr(args, "time_budget", None),
        keep_fiducials=getattr(args, "keep_fiducials", False),
    )


def _write_output(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_subgroups(args) -> int:
    from .lowindex import eta_sequence, low_index_subgroups

    presentation = read_presentation_file(args.presentation)
    complete = True
    try:
        records = low_index_subgroups(
            presentation,
            args.max_index,
            max_nodes=args.node_budget,
            time_budget=args.time_budget,
        )
    except SearchBudgetExceeded as exc:
        records = exc.partial
        complete = False
    data = {
        "presentation": presentation.render(),
        "max_index": args.max_index,
        "complete": complete,
        "eta": eta_sequence(records, args.max_index),
        "subgroups": [
            {
                "index": r.index,
                "class_id": r.class_id,
                "generators": [render_word(w, presentation.names) for w in r.generators],
                "table": r.table.to_json(presentation.names),
            }
            for r in records
        ],
    }
    _write_output(json.dumps(data, sort_keys=True, indent=2) + "\n", args.output)
    return EXIT_OK if complete else EXIT_BUDGET


def cmd_analyze(args) -> int:
    presentation = read_presentation_file(args.presentation)
    report = run_pipeline(presentation, args.max_index, _options(args))
    if args.format == "json":
        _write_output(report.dumps(), args.output)
    else:
        _write_output(format_table(report), args.output)
    if args.export_dir:
        export_report(report, args.export_dir, formats=tuple(args.export_formats.split(",")))
    return EXIT_OK if report.complete else EXIT_BUDGET


def _read_permgroup_file(path) -> PermutationGroup:
    degree = None
    perms = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.lower().startswith("degree"):
                degree = int(line.split()[1])
                continue
            if "=" in line:
                line = line.split("=", 1)[1].strip()
            perms.append(line)
    if not perms:
        raise ParseError("no permutations found in file", 1)
    parsed = [parse_cycles(t) for t in perms]
    n = degree if degree is not None else max((len(p) for p in parsed), default=1)
    return PermutationGroup([p + tuple(range(len(p), n)) for p in parsed], max(n, 1))


def cmd_permgroup(args) -> int:
    group = _read_permgroup_file(args.generators)
    row, geometry = analyze_permutation_group(group, _options(args))
    _write_output(json.dumps(row, sort_keys=True, indent=2) + "\n", args.output)
    if args.export_dir and geometry is not None:
        from . import figures
        from .geometry import geometry_to_dot, recognize

        os.makedirs(args.export_dir, exist_ok=True)
        with open(os.path.join(args.export_dir, "geometry.dot"), "w", encoding="utf-8") as fh:
            fh.write(geometry_to_dot(geometry))
        figures.render_geometry(
            geometry, recognize(geometry), os.path.join(args.export_dir, "geometry.png")
        )
    return EXIT_OK


def cmd_mic(args) -> int:
    with open(args.fiducial, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    fiducial = Fiducial.from_json(data)
    report = fiducial_report(fiducial, tol=args.tolerance, kind=args.pauli, keep_vector=False)
    _write_output(json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_export(args) -> int:
    with open(args.report, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    from .coset import CosetTable
    from .fpgroup import parse_presentation
    from .lowindex import SubgroupRecord, schreier_generators
    from .pipeline import analyze_record

    presentation = parse_presentation(data["presentation"])
    options = _options(args)
    rows = []
    geometries = []
    for row in data["rows"]:
        table = CosetTable.from_json(row["table"])
        record = SubgroupRecord(
            index=table.index,
            table=table,
            generators=schreier_generators(table),
            class_id=row["class_id"],
        )
        fresh, geometry = analyze_record(presentation, record, options)
        rows.append(fresh)
        geometries.append(geometry)
    report = PipelineReport(
        presentation=data["presentation"],
        max_index=data["max_index"],
        eta=data["eta"],
        rows=rows,
        complete=data.get("complete", True),
        geometries=geometries,
    )
    written = export_report(report, args.outdir, formats=tuple(args.formats.split(",")))
    sys.stdout.write("\n".join(written) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosetgeo",
        description="Subgroup enumeration, coset geometries and measurement checks "
        "for finitely presented groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("subgroups", help="enumerate subgroup conjugacy classes")
    p.add_argument("presentation", help="presentation file (# comments allowed)")
    p.add_argument("--max-index", type=int, default=_env_default("max-index", 10, int))
    p.add_argument("-o", "--output", default=None)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_subgroups)

    p = sub.add_parser("analyze", help="full pipeline over a presentation")
    p.add_argument("presentation")
    p.add_argument("--max-index", type=int, default=_env_default("max-index", 10, int))
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--export-dir", default=None, help="also write report artifacts here")
    p.add_argument("--export-formats", default="json,dot,tsv,png")
    p.add_argument("--keep-fiducials", action="store_true")
    _add_budget_flags(p)
    _add_mic_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("permgroup", help="analyze explicit cycle-notation generators")
    p.add_argument("generators", help="file with one permutation per line")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--export-dir", default=None)
    p.add_argument("--keep-fiducials", action="store_true")
    _add_mic_flags(p)
    p.set_defaults(func=cmd_permgroup)

    p = sub.add_parser("mic", help="verify a fiducial vector from JSON [re, im] pairs")
    p.add_argument("fiducial")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--tolerance", type=float, default=_env_default("tolerance", 1e-8, float))
    p.add_argument("--pauli", choices=("wh", "tensor"), default=_env_default("pauli", "wh"))
    p.set_defaults(func=cmd_mic)

    p = sub.add_parser("export", help="write artifacts for an existing report.json")
    p.add_argument("report")
    p.add_argument("-o", "--outdir", required=True)
    p.add_argument("--formats", default="json,dot,tsv,png")
    _add_mic_flags(p)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SearchBudgetExceeded, CosetLimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
