import itertools

import pytest
from hypothesis import given, strategies as st

from haratara.diagnostics import DiagnosticError
from haratara.model import ControllabilityClass as C
from haratara.model import ExposureClass as E
from haratara.model import QualLevel
from haratara.model import SeverityClass as S
from haratara.tables import (
    AsilLevel,
    RiskMatrix,
    default_risk_matrix,
    determine_asil,
    determine_risk,
    parse_matrix_config,
    render_matrix_config,
    validate_matrix,
)

from oracles import DOMAIN, asil_by_class_sum, matrix_is_monotone, monotone_violations

L, M, H = QualLevel.LOW, QualLevel.MEDIUM, QualLevel.HIGH


@pytest.mark.parametrize("sev, exp, ctl, expected", [
    (S.S3, E.E4, C.C3, AsilLevel.D),   # hazard row G
    (S.S3, E.E3, C.C3, AsilLevel.C),   # hazard row E
    (S.S1, E.E4, C.C3, AsilLevel.B),   # hazard row X
    (S.S2, E.E3, C.C2, AsilLevel.A),   # hazard row P
    (S.S3, E.E4, C.C3, AsilLevel.D),   # hazard row R
    (S.S0, E.E4, C.C3, AsilLevel.QM),
])
def test_asil_examples(sev, exp, ctl, expected):
    assert determine_asil(sev, exp, ctl) is expected


def test_asil_matches_additive_oracle_on_all_80_cells():
    assert len(DOMAIN) == 80
    for s, e, c in DOMAIN:
        assert determine_asil(s, e, c) is asil_by_class_sum(s, e, c), (s, e, c)


def test_asil_monotone_by_brute_force():
    assert monotone_violations(determine_asil) == []


def test_asil_parse():
    assert AsilLevel.parse("asil d") is AsilLevel.D
    assert AsilLevel.parse("qm") is AsilLevel.QM
    with pytest.raises(ValueError):
        AsilLevel.parse("E")


@pytest.mark.parametrize("impact, feas, expected", [
    (H, M, H),  # row G
    (M, L, L),  # row E, perception outputs
    (L, L, L),
    (H, H, H),  # row R, DNN behavior
    (M, M, M),  # row X
    (L, H, M),
])
def test_default_matrix_cells(impact, feas, expected):
    assert default_risk_matrix()[(impact, feas)] is expected
    assert determine_risk(impact, feas, default_risk_matrix()) is expected


def test_default_matrix_is_valid():
    matrix = default_risk_matrix()
    assert validate_matrix(matrix) == []
    assert len(matrix.cells) == 9 and matrix_is_monotone(matrix.cells)


def test_matrix_with_swapped_extremes():
    cells = dict(default_risk_matrix().cells)
    cells[(H, H)], cells[(L, L)] = L, H
    diags = validate_matrix(RiskMatrix(cells))
    assert diags and all(d.code == "E-MONOTONE" for d in diags)


def test_matrix_missing_cell():
    cells = dict(default_risk_matrix().cells)
    del cells[(M, H)]
    assert [d.code for d in validate_matrix(RiskMatrix(cells))] == ["E-MISSING"]


levels = st.sampled_from(QualLevel)


@given(st.lists(levels, min_size=9, max_size=9))
def test_validate_matrix_agrees_with_brute_force(values):
    cells = dict(zip(itertools.product(QualLevel, QualLevel), values))
    assert (validate_matrix(RiskMatrix(cells)) == []) == matrix_is_monotone(cells)


def test_matrix_config_round_trip():
    text = render_matrix_config(default_risk_matrix())
    assert len(text.splitlines()) == 9
    assert parse_matrix_config(text) == default_risk_matrix()


def test_matrix_config_comments_and_case():
    text = "# org scheme\n" + "\n".join(
        f"{i.text.upper()} , {f.text}, {'High' if i is H else 'low'}  # note"
        for i, f in itertools.product(QualLevel, QualLevel))
    matrix = parse_matrix_config(text)
    assert validate_matrix(matrix) == []
    assert determine_risk(H, L, matrix) is H


@pytest.mark.parametrize("text, code", [
    ("low,low\n", "E-SYNTAX"),
    ("low,low,huge\n", "E-ENUM"),
    ("low,low,low\nlow,low,high\n", "E-DUP"),
])
def test_matrix_config_errors(text, code):
    with pytest.raises(DiagnosticError) as exc:
        parse_matrix_config(text)
    assert [d.code for d in exc.value.diagnostics] == [code]
    assert exc.value.diagnostics[0].span.line >= 1
