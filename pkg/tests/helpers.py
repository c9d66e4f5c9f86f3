import dataclasses

from haratara.model import RiskModel


def mutate(model: RiskModel, record_id: str, **changes) -> RiskModel:
    """Replace fields of the hazard or threat ``record_id``."""
    hazards = tuple(dataclasses.replace(h, **changes) if h.id == record_id else h for h in model.hazards)
    threats = tuple(dataclasses.replace(t, **changes) if t.id == record_id else t for t in model.threats)
    assert hazards != model.hazards or threats != model.threats, record_id
    return dataclasses.replace(model, hazards=hazards, threats=threats)


def codes(diagnostics):
    return [(d.code, str(d.severity)) for d in diagnostics]
