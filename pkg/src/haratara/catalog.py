"""Built-in catalog of standards and the DNN limitations each one addresses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .diagnostics import DiagnosticError, error
from .model import Limitation

G, E, X, P, R = Limitation


class UnknownStandardError(DiagnosticError, KeyError):
    def __init__(self, standard_id: str):
        self.standard_id = standard_id
        DiagnosticError.__init__(self, [error("E-UNKNOWN-STD", f"unknown standard {standard_id!r}")])

    def __str__(self) -> str:
        return DiagnosticError.__str__(self)


@dataclass(frozen=True)
class StandardEntry:
    id: str
    year: int
    description: str
    covers: frozenset[Limitation]

    def __post_init__(self) -> None:
        if not 2000 <= self.year <= 2100:
            raise ValueError(f"implausible year {self.year} for {self.id}")


STANDARDS: tuple[StandardEntry, ...] = (
    StandardEntry("ISO 26262", 2018,
                  "Functional safety of road-vehicle E/E systems; origin of HARA.",
                  frozenset()),
    StandardEntry("ISO/IEC TR 24028", 2020,
                  "Overview of AI trustworthiness: reliability, robustness, security.",
                  frozenset({G, X, R})),
    StandardEntry("ISO/SAE 21434", 2021,
                  "Road-vehicle cybersecurity engineering; origin of TARA.",
                  frozenset({R})),
    StandardEntry("ISO 21448", 2022,
                  "SOTIF: hazards from functional insufficiencies without faults.",
                  frozenset({G, P, R})),
    StandardEntry("ISO PAS 8800", 2022,
                  "Safety of AI/ML components in road vehicles.",
                  frozenset({G, E, R})),
    StandardEntry("ANSI/UL 4600", 2022,
                  "Safety case standard for autonomous products, ML included.",
                  frozenset({G, E, X, P, R})),
    StandardEntry("ISO/IEC TR 24029", 2022,
                  "Methods for assessing neural-network robustness.",
                  frozenset({R})),
    StandardEntry("ISO/IEC TR 5469", 2024,
                  "Functional safety guidance for systems using AI.",
                  frozenset({G, X, R})),
    StandardEntry("EU AI Act", 2024,
                  "EU regulation of AI systems by risk class.",
                  frozenset({G, X, R})),
)

_BY_KEY = {" ".join(s.id.lower().split()): s for s in STANDARDS}
assert len(_BY_KEY) == len(STANDARDS)


def _limitation(value: Union[Limitation, str]) -> Limitation:
    return value if isinstance(value, Limitation) else Limitation.parse(value)


def standards_for(limitation: Union[Limitation, str]) -> list[StandardEntry]:
    """Entries covering ``limitation``, in catalog order."""
    lim = _limitation(limitation)
    return [s for s in STANDARDS if lim in s.covers]


def lookup(standard_id: str) -> StandardEntry:
    try:
        return _BY_KEY[" ".join(standard_id.lower().split())]
    except KeyError:
        raise UnknownStandardError(standard_id) from None


def limitations_for(standard_id: str) -> frozenset[Limitation]:
    """Coverage set of a standard; id match ignores case. Raises UnknownStandardError."""
    return lookup(standard_id).covers
