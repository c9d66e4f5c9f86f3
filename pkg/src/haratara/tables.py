"""Rating tables: S/E/C to ASIL, and impact x feasibility to risk level."""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Mapping

from .diagnostics import Diagnostic, DiagnosticError, SourceSpan, error
from .model import ControllabilityClass, ExposureClass, QualLevel, SeverityClass


class AsilLevel(enum.IntEnum):
    QM = 0
    A = 1
    B = 2
    C = 3
    D = 4

    @property
    def text(self) -> str:
        return self.name

    @property
    def label(self) -> str:
        return self.name

    @classmethod
    def parse(cls, raw: str) -> "AsilLevel":
        key = raw.strip().upper()
        if key.startswith("ASIL "):
            key = key[5:].strip()
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown ASIL literal {raw!r}") from None

    def __str__(self) -> str:
        return self.name


_QM, _A, _B, _C, _D = AsilLevel

# severity -> exposure -> (C1, C2, C3)
ASIL_TABLE: Mapping[SeverityClass, Mapping[ExposureClass, tuple[AsilLevel, AsilLevel, AsilLevel]]] = {
    SeverityClass.S1: {
        ExposureClass.E1: (_QM, _QM, _QM),
        ExposureClass.E2: (_QM, _QM, _QM),
        ExposureClass.E3: (_QM, _QM, _A),
        ExposureClass.E4: (_QM, _A, _B),
    },
    SeverityClass.S2: {
        ExposureClass.E1: (_QM, _QM, _QM),
        ExposureClass.E2: (_QM, _QM, _A),
        ExposureClass.E3: (_QM, _A, _B),
        ExposureClass.E4: (_A, _B, _C),
    },
    SeverityClass.S3: {
        ExposureClass.E1: (_QM, _QM, _A),
        ExposureClass.E2: (_QM, _A, _B),
        ExposureClass.E3: (_A, _B, _C),
        ExposureClass.E4: (_B, _C, _D),
    },
}


def determine_asil(
    severity: SeverityClass,
    exposure: ExposureClass,
    controllability: ControllabilityClass,
) -> AsilLevel:
    """Look up the ASIL for a hazardous event. Any zero class yields QM."""
    if (severity is SeverityClass.S0 or exposure is ExposureClass.E0
            or controllability is ControllabilityClass.C0):
        return AsilLevel.QM
    return ASIL_TABLE[severity][exposure][controllability.level - 1]


Cell = tuple[QualLevel, QualLevel]


@dataclass(frozen=True)
class RiskMatrix:
    """Mapping (impact, feasibility) -> risk. May be partial until validated."""

    cells: Mapping[Cell, QualLevel]

    def __getitem__(self, key: Cell) -> QualLevel:
        return self.cells[key]

    def __hash__(self) -> int:
        return hash(tuple(sorted((i.rank, f.rank, r.rank) for (i, f), r in self.cells.items())))


_L, _M, _H = QualLevel.LOW, QualLevel.MEDIUM, QualLevel.HIGH

_DEFAULT_CELLS = {
    (_L, _L): _L, (_L, _M): _L, (_L, _H): _M,
    (_M, _L): _L, (_M, _M): _M, (_M, _H): _H,
    (_H, _L): _M, (_H, _M): _H, (_H, _H): _H,
}


def default_risk_matrix() -> RiskMatrix:
    return RiskMatrix(dict(_DEFAULT_CELLS))


def determine_risk(impact: QualLevel, feasibility: QualLevel,
                   matrix: RiskMatrix | None = None) -> QualLevel:
    if matrix is None:
        matrix = default_risk_matrix()
    return matrix[(impact, feasibility)]


def validate_matrix(matrix: RiskMatrix) -> list[Diagnostic]:
    """Report missing cells and monotonicity violations; empty iff valid."""
    diags = []
    levels = list(QualLevel)
    for impact, feas in itertools.product(levels, levels):
        if (impact, feas) not in matrix.cells:
            diags.append(error("E-MISSING",
                               f"risk matrix has no cell for impact={impact.text}, "
                               f"feasibility={feas.text}"))
    # every pair on a shared row or column, so gaps from missing cells cannot hide a drop
    for lo, hi in itertools.combinations(levels, 2):
        for other in levels:
            for axis, low_cell, high_cell in (("impact", (lo, other), (hi, other)),
                                              ("feasibility", (other, lo), (other, hi))):
                below, above = matrix.cells.get(low_cell), matrix.cells.get(high_cell)
                if below is not None and above is not None and above < below:
                    diags.append(error(
                        "E-MONOTONE",
                        f"raising {axis} from ({low_cell[0].text}, {low_cell[1].text}) to "
                        f"({high_cell[0].text}, {high_cell[1].text}) lowers risk "
                        f"{below.text} -> {above.text}",
                    ))
    return diags


_COMMENT = re.compile(r"#.*$")


def parse_matrix_config(text: str) -> RiskMatrix:
    """Read ``impact,feasibility,risk`` lines into a matrix.

    Raises DiagnosticError for malformed lines, unknown levels or repeated
    cells. Missing cells are left for validate_matrix to report.
    """
    cells: dict[Cell, QualLevel] = {}
    diags = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw)
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            diags.append(error("E-SYNTAX", "expected 'impact,feasibility,risk'",
                               SourceSpan(lineno, col, len(line.strip()))))
            continue
        try:
            impact, feas, risk = (QualLevel.parse(p) for p in parts)
        except ValueError as exc:
            diags.append(error("E-ENUM", str(exc), SourceSpan(lineno, col, len(line.strip()))))
            continue
        if (impact, feas) in cells:
            diags.append(error("E-DUP", f"cell ({impact.text}, {feas.text}) given twice",
                               SourceSpan(lineno, col, len(line.strip()))))
            continue
        cells[(impact, feas)] = risk
    if diags:
        raise DiagnosticError(diags)
    return RiskMatrix(cells)


def render_matrix_config(matrix: RiskMatrix) -> str:
    lines = [f"{i.text},{f.text},{r.text}"
             for (i, f), r in sorted(matrix.cells.items(), key=lambda kv: (kv[0][0].rank, kv[0][1].rank))]
    return "\n".join(lines) + "\n"
