"""Reader and canonical printer for ``.rsk`` risk-model files.

A file is a sequence of blocks::

    item "Perception" {
      function "object detection"
    }

    asset A-DNN "DNN behavior" {
      protect integrity for robustness: "Prevent model misbehavior"
    }

    hazard H-R {
      limitation: robustness
      description: "Misclassification from crafted inputs"
      severity: S3
      exposure: E4
      controllability: C3
      safety_goal: "Ensure robustness"
    }

    threat T-R1 {
      asset: A-DNN
      limitation: R
      scenario: "Poisoned training data"
      impact: high
      feasibility: high
      treatment: reduction
      override: medium because "expert judgment"
    }

    link H-R -- T-R1

Keywords and enum literals are case-insensitive. Errors are collected with
source spans; the parser resynchronises at block boundaries so one run
reports every broken block.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from .diagnostics import Diagnostic, DiagnosticError, SourceSpan, error
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

STRING, WORD, NUMBER, LBRACE, RBRACE, COLON, DASHDASH, EOF = (
    "string", "word", "number", "{", "}", ":", "--", "end of input",
)

_WORD = re.compile(r"[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*")
_NUMBER = re.compile(r"[0-9]+(?:\.[0-9]+)*")
_BLANK = re.compile(r"[ \t\r\f\v]+")

TOP_LEVEL = ("item", "asset", "hazard", "threat", "link", "version")


class ParseError(DiagnosticError):
    """Raised by parse_model; ``diagnostics`` holds every error found."""


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int
    length: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, self.length)

    def describe(self) -> str:
        if self.kind == STRING:
            return "string"
        if self.kind in (WORD, NUMBER):
            return repr(self.value)
        if self.kind == EOF:
            return EOF
        return f"'{self.kind}'"


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    text = text.replace("\r\n", "\n")
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        col = pos - line_start + 1
        if ch == "\n":
            pos += 1
            line += 1
            line_start = pos
            continue
        m = _BLANK.match(text, pos)
        if m:
            pos = m.end()
            continue
        if ch == "#":
            end = text.find("\n", pos)
            pos = n if end < 0 else end
            continue
        if ch == '"':
            value, end, problem = _scan_string(text, pos)
            tokens.append(Token(STRING, value, line, col, end - pos))
            if problem is not None:
                bad_col = problem[0] - line_start + 1
                diags.append(error("E-SYNTAX", problem[1], SourceSpan(line, bad_col, 1)))
            pos = end
            continue
        if text.startswith("--", pos):
            tokens.append(Token(DASHDASH, "--", line, col, 2))
            pos += 2
            continue
        if ch in "{}:":
            tokens.append(Token(ch, ch, line, col, 1))
            pos += 1
            continue
        m = _WORD.match(text, pos) or _NUMBER.match(text, pos)
        if m:
            kind = WORD if ch.isalpha() else NUMBER
            tokens.append(Token(kind, m.group(), line, col, m.end() - pos))
            pos = m.end()
            continue
        diags.append(error("E-SYNTAX", f"unexpected character {ch!r}", SourceSpan(line, col, 1)))
        pos += 1
    col = pos - line_start + 1
    tokens.append(Token(EOF, "", line, col, 0))
    return tokens, diags


def _scan_string(text: str, start: int):
    """Scan a quoted string at ``start``; returns (value, end, problem)."""
    out = []
    pos = start + 1
    problem = None
    while True:
        if pos >= len(text) or text[pos] == "\n":
            return "".join(out), pos, (start, "unterminated string")
        ch = text[pos]
        if ch == '"':
            return "".join(out), pos + 1, problem
        if ch == "\\":
            nxt = text[pos + 1] if pos + 1 < len(text) else ""
            if nxt in ('"', "\\"):
                out.append(nxt)
                pos += 2
                continue
            if problem is None:
                problem = (pos, "unknown escape sequence; only \\\" and \\\\ are allowed")
            pos += 1
            continue
        out.append(ch)
        pos += 1


class _Abort(Exception):
    pass


class _Parser:
    def __init__(self, tokens: list[Token], diags: list[Diagnostic]):
        self.tokens = tokens
        self.diags = diags
        self.pos = 0
        self.depth = 0

    # token plumbing

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    @staticmethod
    def keyword(tok: Token) -> Optional[str]:
        return tok.value.lower() if tok.kind == WORD else None

    def report(self, code: str, message: str, tok: Token) -> None:
        self.diags.append(error(code, message, tok.span))

    def fail(self, message: str, tok: Token, code: str = "E-SYNTAX"):
        self.report(code, message, tok)
        raise _Abort

    def expect(self, kind: str, context: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {kind if kind in (STRING, WORD) else repr(kind)} {context}, "
                      f"found {tok.describe()}", tok)
        self.advance()
        if kind == LBRACE:
            self.depth += 1
        elif kind == RBRACE:
            self.depth -= 1
        return tok

    def expect_keyword(self, word: str, context: str) -> Token:
        tok = self.peek()
        if self.keyword(tok) != word:
            self.fail(f"expected '{word}' {context}, found {tok.describe()}", tok)
        return self.advance()

    def identifier(self, context: str) -> Token:
        return self.expect(WORD, context)

    def enum_value(self, cls, context: str):
        """Parse an enum literal; unknown literals are reported without aborting."""
        tok = self.peek()
        if tok.kind not in (WORD, NUMBER):
            self.fail(f"expected {cls.__name__} literal {context}, found {tok.describe()}", tok)
        self.advance()
        try:
            return cls.parse(tok.value), tok
        except ValueError:
            self.report("E-ENUM", f"unknown {cls.__name__} literal {tok.value!r}; expected one of "
                        f"{', '.join(cls.literals())}", tok)
            return None, tok

    def recover(self) -> None:
        while True:
            tok = self.peek()
            if tok.kind == EOF:
                self.depth = 0
                return
            if tok.kind == RBRACE:
                self.advance()
                self.depth -= 1
                if self.depth <= 0:
                    self.depth = 0
                    return
            elif tok.kind == LBRACE:
                self.advance()
                self.depth += 1
            elif self.depth == 0 and self.keyword(tok) in TOP_LEVEL:
                return
            else:
                self.advance()

    # grammar

    def parse(self) -> Optional[RiskModel]:
        items: list[Item] = []
        assets, hazards, threats, links = [], [], [], []
        while self.peek().kind != EOF:
            start = self.pos
            tok = self.peek()
            kw = self.keyword(tok)
            errors_before = len(self.diags)
            try:
                if kw == "item":
                    if items:
                        self.report("E-FIELD", "duplicate item block; a model holds exactly one item", tok)
                    result = self.item_block()
                    if items:
                        result = None
                    target = items
                elif kw == "asset":
                    result, target = self.asset_block(), assets
                elif kw == "hazard":
                    result, target = self.hazard_block(), hazards
                elif kw == "threat":
                    result, target = self.threat_block(), threats
                elif kw == "link":
                    result, target = self.link_line(), links
                elif kw == "version":
                    self.version_line()
                    result, target = None, None
                else:
                    self.fail(f"expected one of {', '.join(TOP_LEVEL)}, found {tok.describe()}", tok)
                if result is not None and len(self.diags) == errors_before:
                    target.append(result)
            except _Abort:
                self.recover()
            if self.pos == start:
                self.advance()
        if not items and not any(d.is_error for d in self.diags):
            self.report("E-FIELD", "missing item block", self.peek())
        if self.diags:
            return None
        return RiskModel(items[0], tuple(assets), tuple(hazards), tuple(threats), tuple(links))

    def version_line(self) -> None:
        self.advance()
        if self.peek().kind == COLON:
            self.advance()
        tok = self.peek()
        if tok.kind not in (STRING, NUMBER, WORD):
            self.fail(f"expected version value, found {tok.describe()}", tok)
        self.advance()

    def item_block(self) -> Optional[Item]:
        kw = self.advance()
        name = self.expect(STRING, "for the item name")
        self.expect(LBRACE, "after the item name")
        functions, spans = [], {"block": kw.span, "id": name.span, "name": name.span}
        while self.peek().kind != RBRACE:
            tok = self.peek()
            if self.keyword(tok) != "function":
                self._bad_entry(tok, "function")
            self.advance()
            value = self.expect(STRING, "after 'function'")
            spans[f"function{len(functions)}"] = value.span
            functions.append(value.value)
        close = self.expect(RBRACE, "to close the item block")
        if not functions:
            self.report("E-FIELD", "item block declares no function", close)
            return None
        return Item(name.value, tuple(functions), spans)

    def _bad_entry(self, tok: Token, allowed: str) -> None:
        if tok.kind == EOF:
            self.fail("unterminated block; expected '}'", tok)
        if tok.kind == WORD:
            self.fail(f"unknown entry {tok.value!r}; expected {allowed}", tok, "E-FIELD")
        self.fail(f"expected {allowed}, found {tok.describe()}", tok)

    def asset_block(self) -> Optional[Asset]:
        kw = self.advance()
        ident = self.identifier("for the asset id")
        name = self.expect(STRING, "for the asset name")
        self.expect(LBRACE, "after the asset name")
        protections = []
        ok = True
        while self.peek().kind != RBRACE:
            tok = self.peek()
            if self.keyword(tok) != "protect":
                self._bad_entry(tok, "'protect'")
            self.advance()
            prop, prop_tok = self.enum_value(SecurityProperty, "after 'protect'")
            self.expect_keyword("for", "after the security property")
            lim, _ = self.enum_value(Limitation, "after 'for'")
            self.expect(COLON, "before the security goal")
            goal = self.expect(STRING, "for the security goal")
            if prop is None or lim is None:
                ok = False
                continue
            protections.append(Protection(lim, prop, goal.value,
                                          {"block": tok.span, "goal": goal.span}))
        close = self.expect(RBRACE, "to close the asset block")
        if not protections and ok:
            self.report("E-FIELD", f"asset {ident.value} declares no 'protect' entry", close)
            return None
        return Asset(ident.value, name.value, tuple(protections),
                     {"block": kw.span, "id": ident.span, "name": name.span})

    def _fields(self, kind: str, owner: Token, spec: dict[str, Callable[[], tuple]],
                required: tuple[str, ...]):
        """Parse ``key: value`` entries up to the closing brace."""
        self.expect(LBRACE, f"to open {kind} {owner.value}")
        values: dict = {}
        spans: dict = {}
        while self.peek().kind != RBRACE:
            tok = self.peek()
            key = self.keyword(tok)
            if key not in spec:
                self._bad_entry(tok, "one of " + ", ".join(spec))
            self.advance()
            self.expect(COLON, f"after '{key}'")
            value, vtok = spec[key]()
            if key in values or key in spans:
                self.report("E-FIELD", f"field '{key}' given more than once", tok)
                continue
            values[key] = value
            spans[key] = vtok.span
        close = self.expect(RBRACE, f"to close {kind} {owner.value}")
        for key in required:
            if key not in spans:
                self.report("E-FIELD", f"{kind} {owner.value} is missing required field '{key}'", close)
        return values, spans

    def _string_field(self):
        tok = self.expect(STRING, "as field value")
        return tok.value, tok

    def _ident_field(self):
        tok = self.identifier("as reference")
        return tok.value, tok

    def _enum_field(self, cls):
        return lambda: self.enum_value(cls, "as field value")

    def hazard_block(self) -> Optional[Hazard]:
        kw = self.advance()
        ident = self.identifier("for the hazard id")
        spec = {
            "limitation": self._enum_field(Limitation),
            "description": self._string_field,
            "severity": self._enum_field(SeverityClass),
            "exposure": self._enum_field(ExposureClass),
            "controllability": self._enum_field(ControllabilityClass),
            "safety_goal": self._string_field,
        }
        before = len(self.diags)
        values, spans = self._fields("hazard", ident, spec, tuple(spec)[:5])
        if len(self.diags) != before:
            return None
        spans.update(block=kw.span, id=ident.span)
        return Hazard(ident.value, values["limitation"], values["description"], values["severity"],
                      values["exposure"], values["controllability"], values.get("safety_goal"), spans)

    def _override_field(self):
        level, tok = self.enum_value(QualLevel, "after 'override:'")
        self.expect_keyword("because", "after the override level")
        rationale = self.expect(STRING, "for the override rationale")
        value = None if level is None else RiskOverride(level, rationale.value)
        return value, tok

    def threat_block(self) -> Optional[Threat]:
        kw = self.advance()
        ident = self.identifier("for the threat id")
        spec = {
            "asset": self._ident_field,
            "limitation": self._enum_field(Limitation),
            "scenario": self._string_field,
            "impact": self._enum_field(QualLevel),
            "feasibility": self._enum_field(QualLevel),
            "treatment": self._enum_field(Treatment),
            "damage": self._string_field,
            "override": self._override_field,
        }
        before = len(self.diags)
        values, spans = self._fields("threat", ident, spec, tuple(spec)[:6])
        if len(self.diags) != before:
            return None
        spans.update(block=kw.span, id=ident.span)
        return Threat(ident.value, values["asset"], values["limitation"], values["scenario"],
                      values["impact"], values["feasibility"], values["treatment"],
                      values.get("damage"), values.get("override"), spans)

    def link_line(self) -> Link:
        kw = self.advance()
        hazard = self.identifier("for the linked hazard")
        self.expect(DASHDASH, "between link endpoints")
        threat = self.identifier("for the linked threat")
        return Link(hazard.value, threat.value,
                    {"block": kw.span, "id": hazard.span, "hazard": hazard.span, "threat": threat.span})


def _position(d: Diagnostic):
    return (d.span.line, d.span.column) if d.span else (0, 0)


def parse_model(text: str) -> RiskModel:
    """Parse ``.rsk`` text into a well-formed RiskModel.

    Raises ParseError carrying every syntax, field, enum and referential
    finding, ordered by source position.
    """
    tokens, diags = tokenize(text)
    model = _Parser(tokens, diags).parse()
    if model is not None:
        diags.extend(validate_model(model))
    if diags:
        raise ParseError(sorted(diags, key=_position))
    return model


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_canonical(model: RiskModel) -> str:
    m = canonicalize(model)
    blocks = []
    lines = [f"item {quote(m.item.name)} {{"]
    lines += [f"  function {quote(f)}" for f in m.item.functions]
    lines.append("}")
    blocks.append(lines)
    for asset in m.assets:
        lines = [f"asset {asset.id} {quote(asset.name)} {{"]
        lines += [f"  protect {p.property.text} for {p.limitation.text}: {quote(p.goal)}"
                  for p in asset.protections]
        lines.append("}")
        blocks.append(lines)
    for h in m.hazards:
        lines = [
            f"hazard {h.id} {{",
            f"  limitation: {h.limitation.text}",
            f"  description: {quote(h.description)}",
            f"  severity: {h.severity.text}",
            f"  exposure: {h.exposure.text}",
            f"  controllability: {h.controllability.text}",
        ]
        if h.safety_goal is not None:
            lines.append(f"  safety_goal: {quote(h.safety_goal)}")
        lines.append("}")
        blocks.append(lines)
    for t in m.threats:
        lines = [
            f"threat {t.id} {{",
            f"  asset: {t.asset}",
            f"  limitation: {t.limitation.text}",
            f"  scenario: {quote(t.scenario)}",
            f"  impact: {t.impact.text}",
            f"  feasibility: {t.feasibility.text}",
            f"  treatment: {t.treatment.text}",
        ]
        if t.damage is not None:
            lines.append(f"  damage: {quote(t.damage)}")
        if t.override is not None:
            lines.append(f"  override: {t.override.level.text} because {quote(t.override.rationale)}")
        lines.append("}")
        blocks.append(lines)
    if m.links:
        blocks.append([f"link {link.hazard} -- {link.threat}" for link in m.links])
    return "\n\n".join("\n".join(b) for b in blocks) + "\n"
