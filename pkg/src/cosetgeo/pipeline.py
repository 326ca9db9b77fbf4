"""End-to-end analysis: enumerate subgroup classes, analyze each coset
action, and assemble a reproducible report.

Reports are plain dicts with canonical key order so identical inputs give
byte-identical JSON; every row embeds its serialized coset table, from
which all other row fields can be regenerated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .coset import CosetTable, coset_representatives
from .fpgroup import Presentation, render_word
from .geometry import (
    IncidenceGeometry,
    axiom_ii_holds,
    binomial_filtration,
    build_geometry,
    geometry_to_dot,
    recognize,
    recognize_all,
)
from .lowindex import (
    SearchBudgetExceeded,
    SubgroupRecord,
    eta_sequence,
    low_index_subgroups,
)
from .mic import find_fiducials
from .permgrp import PermutationGroup, name_group, perm_image


@dataclass
class AnalysisOptions:
    mic: bool = False
    mic_order_cap: int = 2000
    tolerance: float = 1e-8
    pauli: str = "wh"
    max_cosets: int = 2_000_000
    node_budget: int | None = None
    time_budget: float | None = None
    keep_fiducials: bool = False


@dataclass
class PipelineReport:
    presentation: str
    max_index: int
    eta: list[int]
    rows: list[dict]
    complete: bool = True
    budget_note: str | None = None
    geometries: list[IncidenceGeometry] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        data = {
            "presentation": self.presentation,
            "max_index": self.max_index,
            "eta": self.eta,
            "complete": self.complete,
            "rows": self.rows,
        }
        if self.budget_note:
            data["budget_note"] = self.budget_note
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def analyze_record(
    presentation: Presentation, record: SubgroupRecord, options: AnalysisOptions
) -> tuple[dict, IncidenceGeometry | None]:
    """One report row (and its geometry) from a subgroup record."""
    table = record.table
    group = perm_image(table)
    reps = coset_representatives(table)
    row: dict = {
        "index": record.index,
        "class_id": record.class_id,
        "order": group.order(),
        "group": name_group(group),
        "subgroup_generators": [render_word(w, presentation.names) for w in record.generators],
        "table": table.to_json(presentation.names),
    }
    stab_gens = group.chain((0,)).level_group_gens(1) if record.index > 1 else []
    row["axiom_i"] = group.normal_closure_is_full(stab_gens) if record.index > 1 else True

    geometry = None
    if record.index >= 2:
        geometry = build_geometry(group, reps)
        names = recognize_all(geometry)
        row["axiom_ii"] = axiom_ii_holds(geometry)
        row["geometry"] = ", ".join(str(n) for n in names)
        row["geometry_tags"] = [
            {"kind": n.kind, "params": list(n.params)} for n in names
        ]
        row["contextual"] = geometry.is_contextual()
        row["rank"] = group.rank()
        grass = next((n for n in names if n.kind == "grassmannian"), None)
        if grass is not None:
            row["filtration"] = binomial_filtration(geometry, grass)
    else:
        row["axiom_ii"] = True
        row["geometry"] = "point"
        row["geometry_tags"] = []
        row["contextual"] = False
        row["rank"] = 1

    if options.mic:
        row["mic"] = _mic_summary(group, options)
    return row, geometry


def _mic_summary(group: PermutationGroup, options: AnalysisOptions) -> dict:
    if group.degree < 2:
        return {"checked": False, "reason": "trivial degree"}
    if group.order() > options.mic_order_cap:
        return {"checked": False, "reason": f"order {group.order()} above cap"}
    reports = find_fiducials(
        group,
        tol=options.tolerance,
        kind=options.pauli,
        order_cap=options.mic_order_cap,
        keep_vectors=options.keep_fiducials,
    )
    mics = [r for r in reports if r.is_mic]
    summary: dict = {
        "checked": True,
        "candidates": len(reports),
        "found": bool(mics),
    }
    if mics:
        best = mics[0]
        summary["gram_rank"] = best.gram_rank
        summary["pp"] = best.pp
        summary["is_sic"] = best.is_sic
        if options.keep_fiducials and best.fiducial is not None:
            summary["fiducial"] = best.fiducial.to_json()
    return summary


def run_pipeline(
    presentation: Presentation, max_index: int, options: AnalysisOptions | None = None
) -> PipelineReport:
    """Low-index enumeration followed by per-record analysis.

    On a search budget overrun the partial record list is analyzed and the
    report flagged incomplete; the caller decides how loudly to fail.
    """
    options = options or AnalysisOptions()
    complete = True
    note = None
    try:
        records = low_index_subgroups(
            presentation,
            max_index,
            max_nodes=options.node_budget,
            time_budget=options.time_budget,
        )
    except SearchBudgetExceeded as exc:
        records = exc.partial
        complete = False
        note = str(exc)
    rows = []
    geometries = []
    for record in records:
        row, geometry = analyze_record(presentation, record, options)
        rows.append(row)
        geometries.append(geometry)
    eta = eta_sequence(records, max_index)
    return PipelineReport(
        presentation=presentation.render(),
        max_index=max_index,
        eta=eta,
        rows=rows,
        complete=complete,
        budget_note=note,
        geometries=geometries,
    )


def analyze_permutation_group(
    group: PermutationGroup, options: AnalysisOptions | None = None
) -> tuple[dict, IncidenceGeometry | None]:
    """Row-style analysis of an explicitly given permutation group.

    Contextuality is skipped (there are no coset representatives); the
    geometry, recognition and filtration parts match the pipeline rows.
    """
    options = options or AnalysisOptions()
    row: dict = {
        "degree": group.degree,
        "order": group.order(),
        "group": name_group(group),
        "transitive": group.is_transitive(),
    }
    geometry = None
    if group.degree >= 2 and group.is_transitive():
        geometry = build_geometry(group)
        names = recognize_all(geometry)
        row["axiom_ii"] = axiom_ii_holds(geometry)
        row["geometry"] = ", ".join(str(n) for n in names)
        row["geometry_tags"] = [{"kind": n.kind, "params": list(n.params)} for n in names]
        row["config"] = geometry.config_symbol()
        row["rank"] = group.rank()
        grass = next((n for n in names if n.kind == "grassmannian"), None)
        if grass is not None:
            row["filtration"] = binomial_filtration(geometry, grass)
    if options.mic:
        row["mic"] = _mic_summary(group, options)
    return row, geometry


def format_table(report: PipelineReport) -> str:
    """Human-readable table mirroring the report rows."""
    headers = ["d", "class", "group", "order", "geometry", "ctx", "ax(i)", "ax(ii)", "mic"]
    lines = ["\t".join(headers)]
    for row in report.rows:
        mic = row.get("mic")
        if mic is None:
            mic_text = "-"
        elif not mic.get("checked"):
            mic_text = "skipped"
        elif mic.get("found"):
            mic_text = f"pp={mic['pp']}" + (" sic" if mic.get("is_sic") else "")
        else:
            mic_text = "none"
        lines.append(
            "\t".join(
                str(x)
                for x in [
                    row["index"],
                    row["class_id"],
                    row["group"],
                    row["order"],
                    row["geometry"],
                    "yes" if row["contextual"] else "no",
                    "yes" if row["axiom_i"] else "no",
                    "yes" if row["axiom_ii"] else "no",
                    mic_text,
                ]
            )
        )
    return "\n".join(lines) + "\n"


def report_tsv(report: PipelineReport) -> str:
    """Delimited export: one row per subgroup class plus an eta row."""
    out = ["eta\t" + ",".join(str(x) for x in report.eta)]
    headers = [
        "index",
        "class_id",
        "group",
        "order",
        "geometry",
        "contextual",
        "axiom_i",
        "axiom_ii",
        "mic_found",
        "mic_pp",
    ]
    out.append("\t".join(headers))
    for row in report.rows:
        mic = row.get("mic") or {}
        out.append(
            "\t".join(
                str(x)
                for x in [
                    row["index"],
                    row["class_id"],
                    row["group"],
                    row["order"],
                    row["geometry"],
                    row["contextual"],
                    row["axiom_i"],
                    row["axiom_ii"],
                    mic.get("found", ""),
                    mic.get("pp", ""),
                ]
            )
        )
    return "\n".join(out) + "\n"


def regenerate_row(presentation: Presentation, row: dict, options: AnalysisOptions) -> dict:
    """Rebuild a row from its embedded coset table (self-containment check)."""
    from .lowindex import schreier_generators

    table = CosetTable.from_json(row["table"])
    record = SubgroupRecord(
        index=table.index,
        table=table,
        generators=schreier_generators(table),
        class_id=row["class_id"],
    )
    fresh, _ = analyze_record(presentation, record, options)
    return fresh


def export_report(
    report: PipelineReport,
    outdir,
    formats=("json", "dot", "tsv", "png"),
) -> list[str]:
    """Write report artifacts; returns the created file names.

    ``json`` writes report.json, ``tsv`` the delimited table, ``dot`` one
    graph per row with a recognized geometry, and ``png`` renders the
    geometry figures plus the subgroup-count histogram via matplotlib.
    """
    import os

    os.makedirs(outdir, exist_ok=True)
    written = []

    def _path(name):
        return os.path.join(outdir, name)

    if "json" in formats:
        with open(_path("report.json"), "w", encoding="utf-8") as fh:
            fh.write(report.dumps())
        written.append("report.json")
    if "tsv" in formats:
        with open(_path("table.tsv"), "w", encoding="utf-8") as fh:
            fh.write(report_tsv(report))
        written.append("table.tsv")
    if "dot" in formats or "png" in formats:
        from . import figures

        for row, geometry in zip(report.rows, report.geometries):
            if geometry is None:
                continue
            tags = row.get("geometry_tags") or []
            if not tags or all(t["kind"] == "unknown" for t in tags):
                continue
            stem = f"geometry_d{row['index']}_c{row['class_id']}"
            if "dot" in formats:
                with open(_path(stem + ".dot"), "w", encoding="utf-8") as fh:
                    fh.write(geometry_to_dot(geometry, name=stem))
                written.append(stem + ".dot")
            if "png" in formats:
                figures.render_geometry(geometry, recognize(geometry), _path(stem + ".png"))
                written.append(stem + ".png")
        if "png" in formats:
            figures.render_eta(report.eta, _path("eta.png"))
            written.append("eta.png")
    return written
