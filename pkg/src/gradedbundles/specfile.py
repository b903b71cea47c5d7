"""Line-oriented declarative spec files for the command-line front end.

A document is a sequence of sections; each section holds ``key = value``
entries.  Polynomial expressions use declared variable names, rational
literals and the operators + - * ^ with parentheses.  The full grammar:

    file        = { line } ;
    line        = blank | comment | header | entry ;
    comment     = "#" , text ;
    header      = "[" , word , { word } , "]" ;
    entry       = key , "=" , value ;
    key         = word , { word } ;
    value       = weightspec | expression        (* by section kind *)
    weightspec  = "weight" , (integer | tuple) , [ "odd" | "even" ] ;
    tuple       = "(" , integer , { "," , integer } , ")" ;
    expression  = term , { ("+" | "-") , term } ;
    term        = factor , { "*" , factor } ;
    factor      = atom , [ "^" , natural ] ;
    atom        = rational | identifier | "(" , expression , ")"
                | "-" , factor ;
    rational    = integer , [ "/" , natural ] ;

Section kinds: ``[bundle]`` (keys arity, degree), ``[chart NAME]`` with
weightspec entries, ``[map SRC -> DST]`` with expression entries keyed by
target coordinates, ``[structure KIND]`` for lie-tower / prolong / tk /
cotangent-linear data, and ``[section NAME]`` for tower sections with keys
``Y a`` and ``Z a r``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .superalg import EVEN, ODD, SuperPolynomial, Variable
from .bundle import CoordinateSystem, GradedBundle, two_chart_bundle


class SpecError(ValueError):
    """Parse-level failure with a location."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = f" at line {line}" if line is not None else ""
        where += f", column {col}" if col is not None else ""
        super().__init__(message + where)


class SpecSyntaxError(SpecError):
    pass


class UnknownVariableError(SpecError):
    pass


class WeightArityMismatchError(SpecError):
    pass


@dataclass
class Entry:
    key: tuple[str, ...]
    value: str
    line: int
    col: int


@dataclass
class Section:
    kind: str
    args: tuple[str, ...]
    entries: list[Entry] = field(default_factory=list)
    line: int = 0


@dataclass
class SpecDocument:
    sections: list[Section]

    def first(self, kind: str) -> Section | None:
        for s in self.sections:
            if s.kind == kind:
                return s
        return None

    def all(self, kind: str) -> list[Section]:
        return [s for s in self.sections if s.kind == kind]

    def render(self) -> str:
        lines = []
        for s in self.sections:
            head = " ".join((s.kind,) + s.args)
            lines.append(f"[{head}]")
            for e in s.entries:
                lines.append(f"{' '.join(e.key)} = {e.value.strip()}")
            lines.append("")
        return "\n".join(lines)


_HEADER_RE = re.compile(r"^\[(?P<body>[^]]*)\]\s*$")


def parse(text: str) -> SpecDocument:
    sections: list[Section] = []
    current: Section | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _HEADER_RE.match(line.strip())
        if m:
            words = m.group("body").split()
            if not words:
                raise SpecSyntaxError("empty section header", lineno, 1)
            current = Section(words[0], tuple(words[1:]), line=lineno)
            sections.append(current)
            continue
        if "=" not in line:
            raise SpecSyntaxError("expected 'key = value'", lineno, 1)
        if current is None:
            raise SpecSyntaxError("entry outside any section", lineno, 1)
        key_text, value = line.split("=", 1)
        key = tuple(key_text.split())
        if not key:
            raise SpecSyntaxError("empty key", lineno, 1)
        col = raw.index("=") + 2
        current.entries.append(Entry(key, value.strip(), lineno, col))
    _check_known(sections)
    return SpecDocument(sections)


_KNOWN_SECTIONS = {"bundle", "chart", "map", "structure", "section", "poisson"}
_BUNDLE_KEYS = {"arity", "degree"}
_STRUCTURE_KINDS = {"lie-tower", "prolong", "tk", "cotangent-linear"}


def _check_known(sections):
    for s in sections:
        if s.kind not in _KNOWN_SECTIONS:
            raise SpecSyntaxError(f"unknown section kind {s.kind!r}", s.line, 1)
        if s.kind == "bundle":
            for e in s.entries:
                if e.key != (e.key[0],) or e.key[0] not in _BUNDLE_KEYS:
                    raise SpecSyntaxError(
                        f"unknown bundle key {' '.join(e.key)!r}", e.line, 1
                    )
        if s.kind == "chart" and len(s.args) != 1:
            raise SpecSyntaxError("chart sections need exactly one name", s.line, 1)
        if s.kind == "map" and (len(s.args) != 3 or s.args[1] != "->"):
            raise SpecSyntaxError("map sections are '[map SRC -> DST]'", s.line, 1)
        if s.kind == "structure":
            if len(s.args) != 1 or s.args[0] not in _STRUCTURE_KINDS:
                raise SpecSyntaxError(
                    f"structure kind must be one of {sorted(_STRUCTURE_KINDS)}",
                    s.line, 1,
                )
        if s.kind == "section" and len(s.args) != 1:
            raise SpecSyntaxError("section blocks need exactly one name", s.line, 1)


# ------------------------------------------------------------- expressions
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()/]))"
)


def _tokenize(text: str, line: int, col0: int):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise SpecSyntaxError(
                f"cannot read expression near {text[pos:pos + 10]!r}",
                line, col0 + pos,
            )
        pos = m.end()
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), col0 + m.start(kind)))
    tokens.append(("end", "", col0 + len(text)))
    return tokens


class _ExprParser:
    def __init__(self, tokens, names, line):
        self.tokens = tokens
        self.pos = 0
        self.names = names
        self.line = line

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val, col = self.take()
        if kind != "op" or val != op:
            raise SpecSyntaxError(f"expected {op!r}", self.line, col)

    def parse(self) -> SuperPolynomial:
        value = self.expression()
        kind, val, col = self.peek()
        if kind != "end":
            raise SpecSyntaxError(f"unexpected {val!r}", self.line, col)
        return value

    def expression(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            value = self.term()
            if val == "-":
                value = -value
        else:
            value = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if val == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                value = value * self.factor()
            else:
                return value

    def factor(self):
        value = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, num, col = self.take()
            if kind != "num":
                raise SpecSyntaxError("exponent must be a natural number",
                                      self.line, col)
            value = value ** int(num)
        return value

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            numer = int(val)
            kind2, val2, _ = self.peek()
            if kind2 == "op" and val2 == "/":
                self.take()
                kind3, val3, col3 = self.take()
                if kind3 != "num" or int(val3) == 0:
                    raise SpecSyntaxError("bad rational literal", self.line, col3)
                return SuperPolynomial.constant(Fraction(numer, int(val3)))
            return SuperPolynomial.constant(numer)
        if kind == "name":
            if val not in self.names:
                raise UnknownVariableError(
                    f"undeclared variable {val!r}", self.line, col
                )
            return SuperPolynomial.from_var(self.names[val])
        if kind == "op" and val == "(":
            value = self.expression()
            self.expect_op(")")
            return value
        if kind == "op" and val == "-":
            return -self.factor()
        raise SpecSyntaxError(f"unexpected {val!r}", self.line, col)


def parse_expression(text: str, names: dict[str, Variable], line: int = 0,
                     col: int = 1) -> SuperPolynomial:
    return _ExprParser(_tokenize(text, line, col), names, line).parse()


# --------------------------------------------------------------- weights
_WEIGHT_RE = re.compile(
    r"^weight\s+(?:(?P<int>\d+)|\((?P<tuple>[\d\s,]+)\))\s*(?P<parity>odd|even)?$"
)


def parse_weight_entry(e: Entry, arity: int):
    m = _WEIGHT_RE.match(e.value)
    if not m:
        raise SpecSyntaxError(
            f"chart entries read 'name = weight W [odd|even]', got {e.value!r}",
            e.line, e.col,
        )
    if m.group("int") is not None:
        weight = (int(m.group("int")),)
    else:
        parts = [p.strip() for p in m.group("tuple").split(",") if p.strip()]
        weight = tuple(int(p) for p in parts)
    if len(weight) != arity:
        raise WeightArityMismatchError(
            f"weight {weight} has arity {len(weight)}, document declares {arity}",
            e.line, e.col,
        )
    parity = ODD if m.group("parity") == "odd" else EVEN
    return weight, parity


# ------------------------------------------------------------ realisation
@dataclass
class BundleSpec:
    bundle: GradedBundle
    charts: list[CoordinateSystem]
    declared_degree: int | None


def build_bundle(doc: SpecDocument) -> BundleSpec:
    """Realise the [bundle]/[chart]/[map] sections as a graded bundle."""
    meta = doc.first("bundle")
    arity = 1
    declared_degree = None
    if meta:
        for e in meta.entries:
            try:
                if e.key == ("arity",):
                    arity = int(e.value)
                elif e.key == ("degree",):
                    declared_degree = int(e.value)
            except ValueError:
                raise SpecSyntaxError(
                    f"{e.key[0]} must be an integer", e.line, e.col
                )
    chart_sections = doc.all("chart")
    if len(chart_sections) < 1:
        raise SpecSyntaxError("documents with bundle commands need charts", 1, 1)
    charts = {}
    order = []
    for s in chart_sections:
        name = s.args[0]
        if name in charts:
            raise SpecSyntaxError(f"duplicate chart {name!r}", s.line, 1)
        specs = []
        for e in s.entries:
            if len(e.key) != 1:
                raise SpecSyntaxError("chart keys are single names", e.line, 1)
            weight, parity = parse_weight_entry(e, arity)
            specs.append((e.key[0], weight, parity))
        charts[name] = CoordinateSystem(specs, name=name, arity=arity)
        order.append(name)

    maps = {}
    for s in doc.all("map"):
        src, _, dst = s.args
        for nm in (src, dst):
            if nm not in charts:
                raise UnknownVariableError(f"unknown chart {nm!r}", s.line, 1)
        src_names = {v.name: v for v in charts[src].variables}
        comp = {}
        for e in s.entries:
            if len(e.key) != 1:
                raise SpecSyntaxError("map keys are single coordinates", e.line, 1)
            if e.key[0] not in charts[dst]:
                raise UnknownVariableError(
                    f"{e.key[0]!r} is not a coordinate of chart {dst!r}",
                    e.line, 1,
                )
            comp[e.key[0]] = parse_expression(e.value, src_names, e.line, e.col)
        missing = [v.name for v in charts[dst].variables if v.name not in comp]
        if missing:
            raise SpecSyntaxError(
                f"map {src} -> {dst} misses components for {', '.join(missing)}",
                s.line, 1,
            )
        maps[(src, dst)] = comp

    if len(order) == 1:
        from .bundle import single_chart_bundle

        bundle = single_chart_bundle(charts[order[0]])
        return BundleSpec(bundle, [charts[order[0]]], declared_degree)
    if len(order) != 2:
        raise SpecSyntaxError("desk-scale documents carry one or two charts", 1, 1)
    a, b = order
    if (a, b) not in maps or (b, a) not in maps:
        raise SpecSyntaxError(
            f"two-chart documents need maps {a} -> {b} and {b} -> {a}", 1, 1
        )
    bundle = two_chart_bundle(charts[a], charts[b], maps[(a, b)], maps[(b, a)])
    return BundleSpec(bundle, [charts[a], charts[b]], declared_degree)


def structure_entries(section: Section) -> dict:
    """Group structure entries by their first key word."""
    grouped: dict[str, list[Entry]] = {}
    for e in section.entries:
        grouped.setdefault(e.key[0], []).append(e)
    return grouped
