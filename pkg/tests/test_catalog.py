import itertools

import pytest

from haratara.catalog import STANDARDS, UnknownStandardError, limitations_for, standards_for
from haratara.model import Limitation

G, E, X, P, R = Limitation


def ids(entries):
    return [s.id for s in entries]


def test_catalog_size_and_unique_ids():
    assert len(STANDARDS) == 9
    assert len({s.id for s in STANDARDS}) == 9


@pytest.mark.parametrize("lim, expected", [
    (E, ["ISO PAS 8800", "ANSI/UL 4600"]),
    (P, ["ISO 21448", "ANSI/UL 4600"]),
    (X, ["ISO/IEC TR 24028", "ANSI/UL 4600", "ISO/IEC TR 5469", "EU AI Act"]),
    (G, ["ISO/IEC TR 24028", "ISO 21448", "ISO PAS 8800", "ANSI/UL 4600", "ISO/IEC TR 5469",
         "EU AI Act"]),
])
def test_standards_for(lim, expected):
    assert ids(standards_for(lim)) == expected


def test_robustness_covered_by_all_but_iso_26262():
    assert ids(standards_for("R")) == [s.id for s in STANDARDS if s.id != "ISO 26262"]


@pytest.mark.parametrize("std, expected", [
    ("ISO 26262", set()),
    ("ansi/ul 4600", {G, E, X, P, R}),
    ("ISO/SAE 21434", {R}),
])
def test_limitations_for(std, expected):
    assert limitations_for(std) == expected


def test_unknown_standard():
    with pytest.raises(UnknownStandardError) as exc:
        limitations_for("ISO 9001")
    assert exc.value.diagnostics[0].code == "E-UNKNOWN-STD"


def test_bidirectional_consistency():
    for std, lim in itertools.product(STANDARDS, Limitation):
        assert (std in standards_for(lim)) == (lim in limitations_for(std.id))
