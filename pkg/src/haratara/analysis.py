"""Assessment of a risk model: ratings, cross-links, lint rules and what-if runs."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .diagnostics import Diagnostic, DiagnosticError, error, note, warning
from .model import (
    ControllabilityClass,
    ExposureClass,
    Hazard,
    Limitation,
    QualLevel,
    RiskModel,
    SeverityClass,
    Threat,
    Treatment,
    span_of,
)
from .tables import AsilLevel, RiskMatrix, default_risk_matrix, determine_asil, determine_risk

# diagnostic code -> lint rule that emits it
LINT_RULES = {
    "E-PROTECT": "L1",
    "E-GOAL": "L2",
    "E-ACCEPT": "L3",
    "W-ACCEPT": "L3",
    "W-OVR": "L4",
    "W-UNPAIRED": "L5",
    "N-UNLINKED": "L6",
}


@dataclass(frozen=True)
class ThreatRating:
    computed: QualLevel
    effective: QualLevel
    overridden: bool = False


@dataclass(frozen=True, order=True)
class CrossLink:
    """A hazard/threat pair. ``limitation`` is None for a manual link across limitations."""

    hazard: str
    threat: str
    limitation: Optional[Limitation] = dataclasses.field(default=None, compare=False)
    manual: bool = dataclasses.field(default=False, compare=False)


@dataclass(frozen=True)
class Assessment:
    hazard_ratings: Mapping[str, AsilLevel]
    threat_ratings: Mapping[str, ThreatRating]
    cross_links: tuple[CrossLink, ...]
    diagnostics: tuple[Diagnostic, ...]

    @property
    def has_errors(self) -> bool:
        return any(d.is_error for d in self.diagnostics)


def rate_hazard(hazard: Hazard) -> AsilLevel:
    return determine_asil(hazard.severity, hazard.exposure, hazard.controllability)


def rate_threat(threat: Threat, matrix: RiskMatrix) -> ThreatRating:
    computed = determine_risk(threat.impact, threat.feasibility, matrix)
    if threat.override is not None:
        return ThreatRating(computed, threat.override.level, True)
    return ThreatRating(computed, computed, False)


def derive_cross_links(model: RiskModel) -> tuple[CrossLink, ...]:
    links: dict[tuple[str, str], CrossLink] = {}
    for h in model.hazards:
        for t in model.threats:
            if h.limitation is t.limitation:
                links[(h.id, t.id)] = CrossLink(h.id, t.id, h.limitation)
    for link in model.links:
        key = (link.hazard, link.threat)
        if key in links:
            continue
        h, t = model.hazard(link.hazard), model.threat(link.threat)
        shared = h.limitation if h is not None and t is not None and h.limitation is t.limitation else None
        links[key] = CrossLink(link.hazard, link.threat, shared, manual=True)
    return tuple(links[k] for k in sorted(links))


def assess(model: RiskModel, matrix: Optional[RiskMatrix] = None) -> Assessment:
    if matrix is None:
        matrix = default_risk_matrix()
    hazard_ratings = {h.id: rate_hazard(h) for h in model.hazards}
    threat_ratings = {t.id: rate_threat(t, matrix) for t in model.threats}
    cross_links = derive_cross_links(model)
    diags = lint(model, hazard_ratings, threat_ratings, cross_links)
    return Assessment(hazard_ratings, threat_ratings, cross_links, tuple(diags))


def lint(
    model: RiskModel,
    hazard_ratings: Mapping[str, AsilLevel],
    threat_ratings: Mapping[str, ThreatRating],
    cross_links: Iterable[CrossLink],
) -> list[Diagnostic]:
    """Run rules L1-L6 over a model and its ratings."""
    diags: list[Diagnostic] = []

    # L1: every threat needs a protect entry for its (asset, limitation)
    for t in model.threats:
        asset = model.asset(t.asset)
        if asset is not None and not asset.protects(t.limitation):
            diags.append(error(
                "E-PROTECT",
                f"threat {t.id} targets asset {asset.id} for {t.limitation.text}, "
                f"but the asset declares no security goal for that limitation",
                span_of(t, "limitation"),
            ))

    # L2
    for h in model.hazards:
        asil = hazard_ratings[h.id]
        if asil >= AsilLevel.A and (h.safety_goal is None or not h.safety_goal.strip()):
            diags.append(error("E-GOAL", f"hazard {h.id} rated ASIL {asil.name} has no safety goal",
                               span_of(h)))

    # L3 and L4
    for t in model.threats:
        rating = threat_ratings[t.id]
        if t.treatment is Treatment.ACCEPTANCE:
            if rating.effective is QualLevel.HIGH:
                diags.append(error("E-ACCEPT", f"threat {t.id} accepts a high risk",
                                   span_of(t, "treatment")))
            elif rating.effective is QualLevel.MEDIUM:
                diags.append(warning("W-ACCEPT", f"threat {t.id} accepts a medium risk",
                                     span_of(t, "treatment")))
        if rating.overridden:
            diags.append(warning(
                "W-OVR",
                f"threat {t.id} risk overridden {rating.computed.text} -> {rating.effective.text}: "
                f"{t.override.rationale}",
                span_of(t, "override"),
            ))

    # L5
    in_hazards = {h.limitation for h in model.hazards}
    in_threats = {t.limitation for t in model.threats}
    for lim in Limitation:
        if lim in in_hazards and lim not in in_threats:
            first = next(h for h in model.hazards if h.limitation is lim)
            diags.append(warning("W-UNPAIRED",
                                 f"limitation {lim.text} has hazards but no threat", span_of(first)))
        elif lim in in_threats and lim not in in_hazards:
            first = next(t for t in model.threats if t.limitation is lim)
            diags.append(warning("W-UNPAIRED",
                                 f"limitation {lim.text} has threats but no hazard", span_of(first)))

    # L6
    linked = {c.hazard for c in cross_links}
    for h in model.hazards:
        if h.id not in linked:
            diags.append(note("N-UNLINKED", f"hazard {h.id} has no cross-linked threat", span_of(h)))
    return diags


HAZARD_FIELDS = {
    "severity": SeverityClass,
    "exposure": ExposureClass,
    "controllability": ControllabilityClass,
}
THREAT_FIELDS = {"impact": QualLevel, "feasibility": QualLevel}


@dataclass(frozen=True)
class Delta:
    id: str
    old: Union[AsilLevel, QualLevel]
    new: Union[AsilLevel, QualLevel]

    def __str__(self) -> str:
        return f"{self.id}: {self.old.label} -> {self.new.label}"


def apply_overrides(model: RiskModel, overrides: Sequence[tuple[str, str, object]]) -> RiskModel:
    """Return a copy of ``model`` with the given rating fields replaced."""
    hazards = {h.id: h for h in model.hazards}
    threats = {t.id: t for t in model.threats}
    for target, fieldname, value in overrides:
        fieldname = fieldname.strip().lower()
        if target in hazards:
            fields, records = HAZARD_FIELDS, hazards
        elif target in threats:
            fields, records = THREAT_FIELDS, threats
        else:
            raise DiagnosticError([error("E-REF", f"no hazard or threat with id {target!r}")])
        if fieldname not in fields:
            kind = "hazard" if records is hazards else "threat"
            raise DiagnosticError([error(
                "E-FIELD", f"field {fieldname!r} cannot be set on {kind} {target}; "
                f"expected one of {', '.join(fields)}")])
        cls = fields[fieldname]
        if not isinstance(value, cls):
            try:
                value = cls.parse(str(value))
            except ValueError as exc:
                raise DiagnosticError([error("E-ENUM", str(exc))]) from None
        records[target] = dataclasses.replace(records[target], **{fieldname: value})
    return dataclasses.replace(
        model,
        hazards=tuple(hazards[h.id] for h in model.hazards),
        threats=tuple(threats[t.id] for t in model.threats),
    )


def what_if(
    model: RiskModel,
    matrix: Optional[RiskMatrix] = None,
    overrides: Sequence[tuple[str, str, object]] = (),
) -> list[Delta]:
    """Re-rate the model under field overrides and list the effective ratings that moved.

    Raises DiagnosticError (E-REF, E-FIELD, E-ENUM) for a bad override.
    """
    if matrix is None:
        matrix = default_risk_matrix()
    changed = apply_overrides(model, overrides)
    deltas = []
    for before, after in zip(model.hazards, changed.hazards):
        old, new = rate_hazard(before), rate_hazard(after)
        if old != new:
            deltas.append(Delta(before.id, old, new))
    for before, after in zip(model.threats, changed.threats):
        old = rate_threat(before, matrix).effective
        new = rate_threat(after, matrix).effective
        if old != new:
            deltas.append(Delta(before.id, old, new))
    return deltas
