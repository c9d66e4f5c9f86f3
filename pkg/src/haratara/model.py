"""Domain types of a combined HARA/TARA risk model.

All records are frozen dataclasses holding tuples, so a parsed model can be
shared freely. Source spans ride along for diagnostics but are excluded from
equality: two models that differ only in where they were written compare equal.
"""

from __future__ import annotations

import dataclasses
import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .diagnostics import Diagnostic, SourceSpan, error

ID_PATTERN = re.compile(r"^[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*$")


class _TextEnum(enum.Enum):
    """Enum with a canonical text form and a case-insensitive parser."""

    @property
    def text(self) -> str:
        return self.name.lower()

    @property
    def label(self) -> str:
        return self.text.capitalize()

    @classmethod
    def _aliases(cls) -> dict:
        return {}

    @classmethod
    def parse(cls, raw: str):
        key = raw.strip().lower()
        for member in cls:
            if key in (member.text.lower(), member.label.lower()):
                return member
        alias = cls._aliases().get(key)
        if alias is not None:
            return cls[alias]
        raise ValueError(f"unknown {cls.__name__} literal {raw!r}")

    @classmethod
    def literals(cls) -> list[str]:
        return [m.text for m in cls]

    def __str__(self) -> str:
        return self.text


class _OrderedTextEnum(_TextEnum):
    """Text enum ordered by declaration position."""

    @property
    def rank(self) -> int:
        return list(type(self)).index(self)

    def __lt__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.rank >= other.rank


class Limitation(_OrderedTextEnum):
    """The five DNN insufficiency classes, in the order G, E, X, P, R."""

    GENERALIZATION = "G"
    EFFICIENCY = "E"
    EXPLAINABILITY = "X"
    PLAUSIBILITY = "P"
    ROBUSTNESS = "R"

    @property
    def code(self) -> str:
        return self.value

    @classmethod
    def _aliases(cls) -> dict:
        return {m.value.lower(): m.name for m in cls}


class SecurityProperty(_OrderedTextEnum):
    CONFIDENTIALITY = "confidentiality"
    INTEGRITY = "integrity"
    AVAILABILITY = "availability"
    NON_REPUDIATION = "non-repudiation"

    @property
    def text(self) -> str:
        return self.value

    @classmethod
    def _aliases(cls) -> dict:
        return {"nonrepudiation": "NON_REPUDIATION", "non_repudiation": "NON_REPUDIATION"}


class _ClassEnum(_OrderedTextEnum):
    """S/E/C rating classes; text form is the upper-case code, e.g. ``S3``."""

    @property
    def text(self) -> str:
        return self.name

    @property
    def label(self) -> str:
        return self.name

    @property
    def level(self) -> int:
        return int(self.name[1:])


class SeverityClass(_ClassEnum):
    S0 = 0
    S1 = 1
    S2 = 2
    S3 = 3


class ExposureClass(_ClassEnum):
    E0 = 0
    E1 = 1
    E2 = 2
    E3 = 3
    E4 = 4


class ControllabilityClass(_ClassEnum):
    C0 = 0
    C1 = 1
    C2 = 2
    C3 = 3


class QualLevel(_OrderedTextEnum):
    """Three-step qualitative scale for impact, feasibility and risk."""

    LOW = 0
    MEDIUM = 1
    HIGH = 2


class Treatment(_OrderedTextEnum):
    AVOIDANCE = "avoidance"
    REDUCTION = "reduction"
    SHARING = "sharing"
    ACCEPTANCE = "acceptance"


def _spans() -> dict:
    return field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class Item:
    name: str
    functions: tuple[str, ...]
    spans: Mapping[str, SourceSpan] = _spans()


@dataclass(frozen=True)
class Protection:
    """One (limitation, security property, security goal) row of an asset."""

    limitation: Limitation
    property: SecurityProperty
    goal: str
    spans: Mapping[str, SourceSpan] = _spans()


@dataclass(frozen=True)
class Asset:
    id: str
    name: str
    protections: tuple[Protection, ...] = ()
    spans: Mapping[str, SourceSpan] = _spans()

    def protects(self, limitation: Limitation) -> bool:
        return any(p.limitation is limitation for p in self.protections)


@dataclass(frozen=True)
class Hazard:
    id: str
    limitation: Limitation
    description: str
    severity: SeverityClass
    exposure: ExposureClass
    controllability: ControllabilityClass
    safety_goal: Optional[str] = None
    spans: Mapping[str, SourceSpan] = _spans()


@dataclass(frozen=True)
class RiskOverride:
    level: QualLevel
    rationale: str


@dataclass(frozen=True)
class Threat:
    id: str
    asset: str
    limitation: Limitation
    scenario: str
    impact: QualLevel
    feasibility: QualLevel
    treatment: Treatment
    damage: Optional[str] = None
    override: Optional[RiskOverride] = None
    spans: Mapping[str, SourceSpan] = _spans()


@dataclass(frozen=True)
class Link:
    """A manual hazard-threat link."""

    hazard: str
    threat: str
    spans: Mapping[str, SourceSpan] = _spans()


@dataclass(frozen=True)
class RiskModel:
    item: Item
    assets: tuple[Asset, ...] = ()
    hazards: tuple[Hazard, ...] = ()
    threats: tuple[Threat, ...] = ()
    links: tuple[Link, ...] = ()

    def asset(self, asset_id: str) -> Optional[Asset]:
        return next((a for a in self.assets if a.id == asset_id), None)

    def hazard(self, hazard_id: str) -> Optional[Hazard]:
        return next((h for h in self.hazards if h.id == hazard_id), None)

    def threat(self, threat_id: str) -> Optional[Threat]:
        return next((t for t in self.threats if t.id == threat_id), None)


def span_of(record, key: str = "id") -> Optional[SourceSpan]:
    spans = getattr(record, "spans", None) or {}
    return spans.get(key) or spans.get("id") or spans.get("block")


def is_valid_id(value: str) -> bool:
    return bool(ID_PATTERN.match(value))


def _blank(text: Optional[str]) -> bool:
    return text is None or not text.strip()


def validate_model(model: RiskModel) -> list[Diagnostic]:
    """Return all referential-integrity findings; empty iff well-formed."""
    diags: list[Diagnostic] = []

    def need_text(record, key: str, value: Optional[str], what: str) -> None:
        if _blank(value):
            diags.append(error("E-EMPTY", f"{what} must not be empty", span_of(record, key)))

    need_text(model.item, "name", model.item.name, "item name")
    if not model.item.functions:
        diags.append(error("E-EMPTY", "item declares no functions", span_of(model.item, "block")))
    for i, fn in enumerate(model.item.functions):
        need_text(model.item, f"function{i}", fn, "item function")

    for kind, records in (("asset", model.assets), ("hazard", model.hazards), ("threat", model.threats)):
        seen = Counter()
        for rec in records:
            if not is_valid_id(rec.id):
                diags.append(error("E-ID", f"invalid {kind} id {rec.id!r}", span_of(rec)))
            seen[rec.id] += 1
            if seen[rec.id] == 2:
                diags.append(error("E-DUP", f"duplicate {kind} id {rec.id!r}", span_of(rec)))

    for asset in model.assets:
        need_text(asset, "name", asset.name, f"asset {asset.id} name")
        if not asset.protections:
            diags.append(error("E-EMPTY", f"asset {asset.id} declares no protections", span_of(asset)))
        pairs = Counter()
        for prot in asset.protections:
            need_text(prot, "goal", prot.goal, f"security goal of asset {asset.id}")
            key = (prot.limitation, prot.property)
            pairs[key] += 1
            if pairs[key] == 2:
                diags.append(error(
                    "E-DUP",
                    f"asset {asset.id} protects {prot.property.text} for "
                    f"{prot.limitation.text} twice",
                    span_of(prot, "block"),
                ))

    for hazard in model.hazards:
        need_text(hazard, "description", hazard.description, f"hazard {hazard.id} description")
        if hazard.safety_goal is not None:
            need_text(hazard, "safety_goal", hazard.safety_goal, f"hazard {hazard.id} safety goal")

    asset_ids = {a.id for a in model.assets}
    for threat in model.threats:
        need_text(threat, "scenario", threat.scenario, f"threat {threat.id} scenario")
        if threat.asset not in asset_ids:
            diags.append(error(
                "E-REF", f"threat {threat.id} references undeclared asset {threat.asset!r}",
                span_of(threat, "asset"),
            ))
        if threat.override is not None:
            need_text(threat, "override", threat.override.rationale,
                      f"threat {threat.id} override rationale")

    hazard_ids = {h.id for h in model.hazards}
    threat_ids = {t.id for t in model.threats}
    for link in model.links:
        if link.hazard not in hazard_ids:
            diags.append(error("E-REF", f"link references undeclared hazard {link.hazard!r}",
                               span_of(link, "hazard")))
        if link.threat not in threat_ids:
            diags.append(error("E-REF", f"link references undeclared threat {link.threat!r}",
                               span_of(link, "threat")))
    return diags


def normalize_text(text: str) -> str:
    return " ".join(text.split())


def _norm_opt(text: Optional[str]) -> Optional[str]:
    return None if text is None else normalize_text(text)


def canonicalize(model: RiskModel) -> RiskModel:
    """Sort records by id and collapse whitespace in every text field. Idempotent."""
    item = dataclasses.replace(
        model.item,
        name=normalize_text(model.item.name),
        functions=tuple(normalize_text(f) for f in model.item.functions),
    )
    assets = []
    for asset in sorted(model.assets, key=lambda a: a.id):
        prots = [dataclasses.replace(p, goal=normalize_text(p.goal)) for p in asset.protections]
        prots.sort(key=lambda p: (p.limitation.rank, p.property.rank, p.goal))
        assets.append(dataclasses.replace(asset, name=normalize_text(asset.name),
                                          protections=tuple(prots)))
    hazards = tuple(
        dataclasses.replace(h, description=normalize_text(h.description),
                            safety_goal=_norm_opt(h.safety_goal))
        for h in sorted(model.hazards, key=lambda h: h.id)
    )
    threats = []
    for t in sorted(model.threats, key=lambda t: t.id):
        override = t.override
        if override is not None:
            override = RiskOverride(override.level, normalize_text(override.rationale))
        threats.append(dataclasses.replace(
            t, scenario=normalize_text(t.scenario), damage=_norm_opt(t.damage), override=override,
        ))
    links: dict[tuple[str, str], Link] = {}
    for link in model.links:
        links.setdefault((link.hazard, link.threat), link)
    return RiskModel(
        item=item,
        assets=tuple(assets),
        hazards=hazards,
        threats=tuple(threats),
        links=tuple(links[k] for k in sorted(links)),
    )


def limitations_in(records: Iterable) -> set[Limitation]:
    return {r.limitation for r in records}
