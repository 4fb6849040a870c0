"""Plain-text layout format for interferometers.

One declaration or arc per line, ``#`` starts a comment:

    source S
    splitter BS1 T=1/3
    mirror B symbol=B phase=pi freq=53 tilt=0.01
    phase P1 phi=3*pi/4
    detector D
    BS1:1 -> E
    B -> BS3:1
"""
from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Dict, List, Tuple, Union

from wmzi.errors import DanglingEdgeError, DuplicateLabelError, LayoutSyntaxError
from wmzi.interferometer import (
    MIRROR_SYMBOLS,
    Edge,
    Element,
    ElementKind,
    InterferometerGraph,
)

_LABEL = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_DECIMAL = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_TOKEN = re.compile(r"\S+")

_PARAMETERS = {
    ElementKind.source: set(),
    ElementKind.detector: set(),
    ElementKind.splitter: {"t", "T"},
    ElementKind.mirror: {"symbol", "phase", "freq", "tilt"},
    ElementKind.phase: {"phi"},
}


def parse_number(s: str) -> float:
    """Parse a layout number: a decimal, a fraction a/b, or a multiple of pi such as -3*pi/4"""
    s = s.replace(" ", "")
    if not s:
        raise ValueError("expected a number, got nothing")
    sign = 1.0
    if s[0] in "+-":
        sign = -1.0 if s[0] == "-" else 1.0
        s = s[1:]

    def take_num(st):
        """ Split a leading decimal literal off the string

        Returns: the value and the rest of the string (tuple[float, str])
        """
        match = _DECIMAL.match(st)
        if match is None:
            raise ValueError(f"expected a number, got {st!r}")
        return float(match.group(0)), st[match.end():]

    if s.startswith("pi"):
        value, rest = math.pi, s[2:]
    else:
        value, rest = take_num(s)
        if rest.startswith("*pi"):
            value *= math.pi
            rest = rest[3:]
    if rest.startswith("/"):
        denominator, rest = take_num(rest[1:])
        if denominator == 0:
            raise ValueError("division by zero")
        value /= denominator
    if rest:
        raise ValueError(f"unexpected trailing text {rest!r}")
    if not math.isfinite(value):
        raise ValueError("number is not finite")
    return sign * value


def _tokens(line: str) -> List[Tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(line)]


def _label(text: str, line: int, column: int) -> str:
    if not _LABEL.match(text):
        raise LayoutSyntaxError(f"invalid label {text!r}", line, column)
    return text


def _parse_declaration(line: str, number: int) -> Element:
    tokens = _tokens(line)
    keyword, column = tokens[0]
    try:
        kind = ElementKind(keyword)
    except ValueError:
        raise LayoutSyntaxError(f"unknown keyword {keyword!r}", number, column) from None
    if len(tokens) < 2:
        raise LayoutSyntaxError(f"{keyword} needs a label", number, column + len(keyword))
    label = _label(tokens[1][0], number, tokens[1][1])

    params: Dict[str, Tuple[str, int]] = {}
    for token, column in tokens[2:]:
        key, eq, value = token.partition("=")
        if not eq or not value:
            raise LayoutSyntaxError(f"expected key=value, got {token!r}", number, column)
        if key not in _PARAMETERS[kind]:
            raise LayoutSyntaxError(f"{keyword} does not take {key!r}", number, column)
        if key in params:
            raise LayoutSyntaxError(f"{key!r} given twice", number, column)
        params[key] = (value, column + len(key) + 1)

    def number_of(key: str) -> float:
        value, column = params[key]
        try:
            return parse_number(value)
        except ValueError as e:
            raise LayoutSyntaxError(str(e), number, column) from None

    element = Element(label, kind)
    if kind == ElementKind.splitter:
        if ("t" in params) == ("T" in params):
            raise LayoutSyntaxError("splitter needs exactly one of t= or T=", number, tokens[1][1])
        key = "t" if "t" in params else "T"
        value = number_of(key)
        if not 0.0 <= value <= 1.0:
            raise LayoutSyntaxError(f"{key} must lie in [0, 1], got {value}", number, params[key][1])
        element.transmissivity = value if key == "t" else math.sqrt(value)
    elif kind == ElementKind.mirror:
        if "symbol" in params:
            symbol, column = params["symbol"]
            if symbol not in MIRROR_SYMBOLS:
                raise LayoutSyntaxError(
                    f"unknown coupling symbol {symbol!r}, expected one of {', '.join(MIRROR_SYMBOLS)}",
                    number,
                    column,
                )
            element.symbol = symbol
        if "phase" in params:
            element.phase = number_of("phase")
        if "freq" in params:
            element.frequency = number_of("freq")
            if element.frequency <= 0:
                raise LayoutSyntaxError("freq must be positive", number, params["freq"][1])
        if "tilt" in params:
            element.tilt = number_of("tilt")
    elif kind == ElementKind.phase:
        if "phi" not in params:
            raise LayoutSyntaxError("phase shifter needs phi=", number, tokens[1][1])
        element.phase = number_of("phi")
    return element


def _parse_endpoint(text: str, number: int, column: int) -> Tuple[str, int]:
    label, colon, port = text.partition(":")
    label = _label(label, number, column)
    if not colon:
        return label, 0
    if port not in ("0", "1"):
        raise LayoutSyntaxError(f"port must be 0 or 1, got {port!r}", number, column + len(label) + 1)
    return label, int(port)


def _parse_edge(line: str, number: int) -> Edge:
    arrow = line.index("->")
    left, right = line[:arrow], line[arrow + 2:]
    left_tokens = _tokens(left)
    right_tokens = [(t, c + arrow + 2) for t, c in _tokens(right)]
    if len(left_tokens) != 1:
        column = left_tokens[1][1] if left_tokens else arrow + 1
        raise LayoutSyntaxError("expected exactly one endpoint before '->'", number, column)
    if len(right_tokens) != 1:
        column = right_tokens[1][1] if right_tokens else arrow + 3
        raise LayoutSyntaxError("expected exactly one endpoint after '->'", number, column)
    source, out_port = _parse_endpoint(left_tokens[0][0], number, left_tokens[0][1])
    target, in_port = _parse_endpoint(right_tokens[0][0], number, right_tokens[0][1])
    return Edge(source, target, out_port, in_port)


def parse_layout(text: str) -> InterferometerGraph:
    """ Parse layout text into a validated InterferometerGraph

    Raises:
        LayoutSyntaxError, DuplicateLabelError and DanglingEdgeError with line numbers,
        then CycleError, NoSourceError or TopologyError from graph validation.
    """
    elements: Dict[str, Element] = {}
    declared_on: Dict[str, int] = {}
    edges: List[Tuple[Edge, int]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "->" in line:
            edges.append((_parse_edge(line, number), number))
            continue
        element = _parse_declaration(line, number)
        if element.label in elements:
            raise DuplicateLabelError(
                f"label {element.label!r} already declared on line {declared_on[element.label]}", line=number
            )
        elements[element.label] = element
        declared_on[element.label] = number

    symbols: Dict[str, str] = {}
    for label, element in elements.items():
        if element.symbol is None:
            continue
        if element.symbol in symbols:
            raise DuplicateLabelError(
                f"coupling symbol {element.symbol} used by {symbols[element.symbol]} and {label}",
                line=declared_on[label],
            )
        symbols[element.symbol] = label

    for edge, number in edges:
        for end in (edge.source, edge.target):
            if end not in elements:
                raise DanglingEdgeError(f"arc refers to undeclared label {end!r}", line=number)

    return InterferometerGraph.from_parts(elements.values(), [edge for edge, _ in edges])


def load_layout(path: Union[str, Path]) -> InterferometerGraph:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data[: e.start].count(b"\n") + 1
        column = e.start - (data.rfind(b"\n", 0, e.start) + 1) + 1
        raise LayoutSyntaxError("layout is not valid UTF-8", line, column) from None
    return parse_layout(text)
