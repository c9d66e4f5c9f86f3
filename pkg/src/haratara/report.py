"""Render assessments as HARA, TARA, asset and traceability tables.

Every table comes in three encodings: GitHub pipe-table Markdown, fully
quoted CSV, and JSON (an array of flat objects keyed by snake_case column
names). Output is deterministic for equal inputs.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import re
from typing import Optional, Sequence, Union

from .analysis import Assessment
from .model import Limitation, RiskModel, canonicalize


class ReportFormat(enum.Enum):
    MARKDOWN = "md"
    CSV = "csv"
    JSON = "json"

    @classmethod
    def parse(cls, raw: Union[str, "ReportFormat"]) -> "ReportFormat":
        if isinstance(raw, cls):
            return raw
        key = raw.strip().lower()
        if key == "markdown":
            return cls.MARKDOWN
        return cls(key)


HARA_COLUMNS = ("Limitation", "Hazard", "Severity", "Exposure", "Controllability", "ASIL", "Safety Goal")
TARA_COLUMNS = ("Limitation", "Asset", "Threat Scenario", "Impact", "Feasibility", "Risk Level", "Treatment")
ASSET_COLUMNS = ("Asset", "Limitation", "Security Property", "Security Goal", "Threat Scenario")
TRACE_COLUMNS = ("Limitation", "Hazards", "Threats", "Cross-links", "Worst ASIL", "Worst Risk")

OVERRIDE_MARK = "*"


def json_key(column: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", column.lower()).strip("_")


def _md_cell(value) -> str:
    text = " ".join(str(value).split())
    return re.sub(r"([\\|*])", r"\\\1", text)


def _render(columns: Sequence[str], rows: Sequence[Sequence], fmt: ReportFormat,
            footnotes: Sequence[str] = ()) -> str:
    if fmt is ReportFormat.MARKDOWN:
        lines = ["| " + " | ".join(columns) + " |",
                 "|" + "|".join(" --- " for _ in columns) + "|"]
        lines += ["| " + " | ".join(_md_cell(v) for v in row) + " |" for row in rows]
        if footnotes:
            lines.append("")
            lines += [_md_cell(OVERRIDE_MARK) + " " + _md_cell(f) for f in footnotes]
        return "\n".join(lines) + "\n"
    if fmt is ReportFormat.CSV:
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_ALL, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows([[str(v) for v in row] for row in rows])
        return buf.getvalue()
    keys = [json_key(c) for c in columns]
    objects = [dict(zip(keys, row)) for row in rows]
    return json.dumps(objects, indent=2, ensure_ascii=False) + "\n"


def render_hara_table(model: RiskModel, assessment: Assessment,
                      fmt: Union[str, ReportFormat] = ReportFormat.MARKDOWN) -> str:
    rows = []
    for h in canonicalize(model).hazards:
        rows.append((
            h.limitation.label, h.description, h.severity.label, h.exposure.label,
            h.controllability.label, assessment.hazard_ratings[h.id].label, h.safety_goal or "",
        ))
    return _render(HARA_COLUMNS, rows, ReportFormat.parse(fmt))


def render_tara_table(model: RiskModel, assessment: Assessment,
                      fmt: Union[str, ReportFormat] = ReportFormat.MARKDOWN) -> str:
    m = canonicalize(model)
    rows, footnotes = [], []
    for t in m.threats:
        rating = assessment.threat_ratings[t.id]
        risk = rating.effective.label
        if rating.overridden:
            risk += OVERRIDE_MARK
            footnotes.append(f"{t.id}: risk set to {rating.effective.label} "
                             f"(matrix gives {rating.computed.label}); {t.override.rationale}")
        asset = m.asset(t.asset)
        rows.append((
            t.limitation.label, asset.name if asset else t.asset, t.scenario,
            t.impact.label, t.feasibility.label, risk, t.treatment.label,
        ))
    return _render(TARA_COLUMNS, rows, ReportFormat.parse(fmt), footnotes)


def render_asset_table(model: RiskModel,
                       fmt: Union[str, ReportFormat] = ReportFormat.MARKDOWN) -> str:
    m = canonicalize(model)
    rows = []
    for asset in m.assets:
        for prot in asset.protections:
            scenarios = [t.scenario for t in m.threats
                         if t.asset == asset.id and t.limitation is prot.limitation]
            rows.append((asset.name, prot.limitation.label, prot.property.label,
                         prot.goal, "; ".join(scenarios)))
    return _render(ASSET_COLUMNS, rows, ReportFormat.parse(fmt))


def trace_rows(model: RiskModel, assessment: Assessment) -> list[tuple]:
    """One row per limitation: counts plus the worst ASIL and worst effective risk."""
    hazard_lim = {h.id: h.limitation for h in model.hazards}
    rows = []
    for lim in Limitation:
        hazards = [h for h in model.hazards if h.limitation is lim]
        threats = [t for t in model.threats if t.limitation is lim]
        links = [c for c in assessment.cross_links if hazard_lim.get(c.hazard) is lim]
        worst_asil = max((assessment.hazard_ratings[h.id] for h in hazards), default=None)
        worst_risk = max((assessment.threat_ratings[t.id].effective for t in threats), default=None)
        rows.append((
            lim.label, len(hazards), len(threats), len(links),
            worst_asil.label if worst_asil is not None else "-",
            worst_risk.label if worst_risk is not None else "-",
        ))
    return rows


def render_trace_matrix(model: RiskModel, assessment: Assessment,
                        fmt: Union[str, ReportFormat] = ReportFormat.MARKDOWN) -> str:
    return _render(TRACE_COLUMNS, trace_rows(model, assessment), ReportFormat.parse(fmt))


def render_table(kind: str, model: RiskModel, assessment: Optional[Assessment],
                 fmt: Union[str, ReportFormat]) -> str:
    if kind == "assets":
        return render_asset_table(model, fmt)
    renderers = {"hara": render_hara_table, "tara": render_tara_table, "trace": render_trace_matrix}
    return renderers[kind](model, assessment, fmt)
