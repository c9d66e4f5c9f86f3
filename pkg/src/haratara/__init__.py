"""Combined HARA/TARA risk assessment for DNN-based perception.

Parse ``.rsk`` risk models, rate hazards (ASIL) and threats (risk level),
lint the safety/security cross-consistency, and render the result tables.
"""

from importlib import resources

from .analysis import Assessment, CrossLink, Delta, ThreatRating, assess, lint, what_if
from .catalog import STANDARDS, StandardEntry, UnknownStandardError, limitations_for, standards_for
from .diagnostics import Diagnostic, DiagnosticError, Severity, SourceSpan
from .dsl import ParseError, parse_model, render_canonical
from .model import (
    Asset,
    ControllabilityClass,
    ExposureClass,
    Hazard,
    Item,
    Limitation,
    Link,
    Protection,
    QualLevel,
    RiskModel,
    RiskOverride,
    SecurityProperty,
    SeverityClass,
    Threat,
    Treatment,
    canonicalize,
    validate_model,
)
from .report import (
    ReportFormat,
    render_asset_table,
    render_hara_table,
    render_tara_table,
    render_trace_matrix,
)
from .tables import (
    AsilLevel,
    RiskMatrix,
    default_risk_matrix,
    determine_asil,
    determine_risk,
    parse_matrix_config,
    validate_matrix,
)

__version__ = "0.1.0"


def fixture_text() -> str:
    """Source of the bundled perception case study."""
    return resources.files(__package__).joinpath("data/ad_perception.rsk").read_text(encoding="utf-8")


def load_fixture() -> RiskModel:
    return parse_model(fixture_text())
