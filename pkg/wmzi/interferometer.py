from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import jsonpickle
import networkx as nx

from wmzi.errors import (
    CycleError,
    DanglingEdgeError,
    DuplicateLabelError,
    InvalidPathError,
    NoSourceError,
    TopologyError,
    UnknownDetectorError,
    UnknownMirrorSymbolError,
    ValidationError,
)

# canonical order of the probe symbols, used for every sorted output
MIRROR_SYMBOLS = ("A", "B", "C", "E", "F")

DEFAULT_OUTER_SPLIT = math.sqrt(1 / 3)
DEFAULT_INNER_SPLIT = math.sqrt(1 / 2)


class ElementKind(str, Enum):
    source = "source"
    splitter = "splitter"
    mirror = "mirror"
    phase = "phase"
    detector = "detector"


def phase_factor(phi: float) -> complex:
    """e^{i phi}, returned exactly when phi is a multiple of pi/2"""
    quarter = phi / (math.pi / 2)
    nearest = round(quarter)
    if abs(quarter - nearest) < 1e-12:
        return (complex(1, 0), complex(0, 1), complex(-1, 0), complex(0, -1))[nearest % 4]
    return cmath.exp(1j * phi)


@dataclass
class Element:
    """ A station of the optical network

    Splitters use the symmetric convention: amplitude t when the photon keeps its
    port index, i*r when it changes port. Mirrors and phase shifters multiply by
    e^{i phase}.
    """
    label: str
    kind: ElementKind
    transmissivity: float = 1.0
    phase: float = 0.0
    symbol: Optional[str] = None
    frequency: Optional[float] = None
    tilt: Optional[float] = None

    @property
    def reflectivity(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.transmissivity * self.transmissivity))

    def transfer(self, in_port: int = 0, out_port: int = 0) -> complex:
        if self.kind == ElementKind.splitter:
            if in_port == out_port:
                return complex(self.transmissivity, 0.0)
            return complex(0.0, self.reflectivity)
        if self.kind in (ElementKind.mirror, ElementKind.phase):
            return phase_factor(self.phase)
        return complex(1.0, 0.0)

    def check(self) -> None:
        if not self.label:
            raise TopologyError("element with an empty label")
        for name in ("transmissivity", "phase", "frequency", "tilt"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise TopologyError(f"{self.label}: {name} must be finite, got {value}")
        if self.kind == ElementKind.splitter and not 0.0 <= self.transmissivity <= 1.0:
            raise TopologyError(
                f"{self.label}: splitter amplitude t must lie in [0, 1], got {self.transmissivity}"
            )
        if self.symbol is not None:
            if self.kind != ElementKind.mirror:
                raise TopologyError(f"{self.label}: only mirrors carry a coupling symbol")
            if self.symbol not in MIRROR_SYMBOLS:
                raise UnknownMirrorSymbolError(
                    f"{self.label}: symbol {self.symbol!r} is not one of {', '.join(MIRROR_SYMBOLS)}"
                )
        if self.frequency is not None and self.frequency <= 0:
            raise TopologyError(f"{self.label}: oscillation frequency must be positive")


@dataclass
class Edge:
    source: str
    target: str
    out_port: int = 0
    in_port: int = 0

    def __str__(self) -> str:
        return f"{self.source}:{self.out_port} -> {self.target}:{self.in_port}"


@dataclass(frozen=True, order=True)
class PathDescriptor:
    """ Ordered element labels from the source to a detector """
    labels: Tuple[str, ...]

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __str__(self) -> str:
        return " -> ".join(self.labels)

    @property
    def detector(self) -> str:
        return self.labels[-1]

    def mirrors(self, graph: InterferometerGraph) -> Tuple[str, ...]:
        """ The coupling symbols met along the path, in order """
        symbols = []
        for label in self.labels:
            element = graph.elements[label]
            if element.symbol is not None:
                symbols.append(element.symbol)
        return tuple(symbols)


PathLike = Union[PathDescriptor, Sequence[str]]


@dataclass
class InterferometerGraph:
    """ Directed acyclic optical network over a networkx DiGraph """
    elements: Dict[str, Element]
    edges: List[Edge]

    @staticmethod
    def from_parts(
        elements: Iterable[Element], edges: Iterable[Edge], validate: bool = True
    ) -> InterferometerGraph:
        table: Dict[str, Element] = {}
        for element in elements:
            if element.label in table:
                raise DuplicateLabelError(f"label {element.label!r} declared twice")
            table[element.label] = element
        graph = InterferometerGraph(table, list(edges))
        if validate:
            graph.validate()
        return graph

    @staticmethod
    def from_json(text: str) -> InterferometerGraph:
        graph = jsonpickle.decode(text)
        if not isinstance(graph, InterferometerGraph):
            raise ValidationError("serialized text does not hold an interferometer graph")
        graph.validate()
        return graph

    def to_json(self) -> str:
        return jsonpickle.encode(self)

    def __getstate__(self):
        return {"elements": self.elements, "edges": self.edges}

    def __setstate__(self, state):
        self.elements = state["elements"]
        self.edges = state["edges"]

    @cached_property
    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for label, element in self.elements.items():
            g.add_node(label, element=element)
        for edge in self.edges:
            g.add_edge(edge.source, edge.target, out_port=edge.out_port, in_port=edge.in_port)
        return g

    @cached_property
    def _arcs(self) -> Dict[Tuple[str, str], Edge]:
        return {(edge.source, edge.target): edge for edge in self.edges}

    def arc(self, u: str, v: str) -> Optional[Edge]:
        return self._arcs.get((u, v))

    def n(self) -> int:
        """ Number of elements """
        return len(self.elements)

    def m(self) -> int:
        """ Number of arcs """
        return len(self.edges)

    def labels_of(self, kind: ElementKind) -> List[str]:
        return sorted(label for label, element in self.elements.items() if element.kind == kind)

    @property
    def source(self) -> str:
        sources = self.labels_of(ElementKind.source)
        if not sources:
            raise NoSourceError("network declares no source")
        if len(sources) > 1:
            raise TopologyError(f"expected exactly one source, found {', '.join(sources)}")
        return sources[0]

    @property
    def detectors(self) -> List[str]:
        return self.labels_of(ElementKind.detector)

    @property
    def probes(self) -> Dict[str, str]:
        """ Coupling symbol -> mirror label, in canonical symbol order """
        found = {
            element.symbol: label
            for label, element in self.elements.items()
            if element.symbol is not None
        }
        return {symbol: found[symbol] for symbol in MIRROR_SYMBOLS if symbol in found}

    def require_detector(self, detector: str) -> None:
        element = self.elements.get(detector)
        if element is None or element.kind != ElementKind.detector:
            raise UnknownDetectorError(
                f"{detector!r} is not a detector of this network (detectors: {', '.join(self.detectors)})"
            )

    def is_lossless(self) -> bool:
        """ Every splitter output port leads somewhere and the source is connected """
        used = defaultdict(set)
        for edge in self.edges:
            used[edge.source].add(edge.out_port)
        for label, element in self.elements.items():
            if element.kind == ElementKind.splitter and used[label] != {0, 1}:
                return False
            if element.kind in (ElementKind.source, ElementKind.mirror, ElementKind.phase) and not used[label]:
                return False
        return True

    def validate(self) -> None:
        for element in self.elements.values():
            element.check()
        source = self.source

        seen = set()
        out_ports = defaultdict(set)
        in_ports = defaultdict(set)
        for edge in self.edges:
            for end in (edge.source, edge.target):
                if end not in self.elements:
                    raise DanglingEdgeError(f"edge {edge} refers to undeclared label {end!r}")
            if edge.source == edge.target:
                raise CycleError(f"{edge.source} feeds itself")
            if (edge.source, edge.target) in seen:
                raise TopologyError(f"{edge.source} -> {edge.target} declared twice")
            seen.add((edge.source, edge.target))
            self._check_port(edge.source, edge.out_port, out_ports, "output")
            self._check_port(edge.target, edge.in_port, in_ports, "input")

        if in_ports[source]:
            raise TopologyError(f"source {source} cannot have incoming arcs")
        for label in self.detectors:
            if out_ports[label]:
                raise TopologyError(f"detector {label} cannot have outgoing arcs")
        if not self.detectors:
            raise TopologyError("network declares no detector")

        symbols = defaultdict(list)
        for label, element in self.elements.items():
            if element.symbol is not None:
                symbols[element.symbol].append(label)
        for symbol, labels in symbols.items():
            if len(labels) > 1:
                raise DuplicateLabelError(f"coupling symbol {symbol} used by {', '.join(sorted(labels))}")

        g = self.digraph
        if not nx.is_directed_acyclic_graph(g):
            cycle = nx.find_cycle(g)
            raise CycleError("cycle through " + " -> ".join(u for u, _ in cycle))
        unreachable = set(self.elements) - {source} - nx.descendants(g, source)
        if unreachable:
            raise TopologyError(f"not reachable from {source}: {', '.join(sorted(unreachable))}")

    def _check_port(self, label: str, port: int, used: Dict[str, set], direction: str) -> None:
        element = self.elements[label]
        allowed = (0, 1) if element.kind == ElementKind.splitter else (0,)
        if port not in allowed:
            raise TopologyError(f"{label} has no {direction} port {port}")
        if port in used[label]:
            raise TopologyError(f"{direction} port {port} of {label} used twice")
        used[label].add(port)


def enumerate_paths(graph: InterferometerGraph, detector: Optional[str] = None) -> List[PathDescriptor]:
    """ All simple source -> detector paths, lexicographic by label sequence """
    if detector is None:
        targets = graph.detectors
    else:
        graph.require_detector(detector)
        targets = [detector]
    source = graph.source
    paths = []
    for target in targets:
        if target == source or target not in graph.digraph:
            continue
        paths.extend(PathDescriptor(tuple(p)) for p in nx.all_simple_paths(graph.digraph, source, target))
    return sorted(paths)


def path_amplitude(graph: InterferometerGraph, path: PathLike) -> complex:
    """ Product of the transfer amplitudes along a path

    The first label contributes nothing, so amplitudes multiply when two paths are
    joined at a mirror or phase shifter. A splitter at either end of a partial path
    has no defined port pair and contributes 1.
    """
    labels = tuple(path)
    if not labels:
        raise InvalidPathError("empty path")
    if len(set(labels)) != len(labels):
        raise InvalidPathError(f"path repeats a label: {' -> '.join(labels)}")
    for label in labels:
        if label not in graph.elements:
            raise InvalidPathError(f"path refers to unknown label {label!r}")
    arcs = []
    for u, v in zip(labels, labels[1:]):
        edge = graph.arc(u, v)
        if edge is None:
            raise InvalidPathError(f"no arc {u} -> {v}")
        arcs.append(edge)

    amplitude = complex(1.0, 0.0)
    for i in range(1, len(labels)):
        element = graph.elements[labels[i]]
        if element.kind == ElementKind.splitter:
            if i == len(labels) - 1:
                continue
            amplitude *= element.transfer(arcs[i - 1].in_port, arcs[i].out_port)
        else:
            amplitude *= element.transfer()
    return amplitude


def detector_probabilities(graph: InterferometerGraph) -> Dict[str, float]:
    """ |sum of path amplitudes|^2 at every detector; sums to 1 for a lossless network """
    probabilities = {}
    for detector in graph.detectors:
        total = sum((path_amplitude(graph, p) for p in enumerate_paths(graph, detector)), complex(0.0))
        probabilities[detector] = abs(total) ** 2
    return probabilities


def build_nested_mzi(
    inner_phase: float = math.pi,
    outer_split: float = DEFAULT_OUTER_SPLIT,
    inner_split: float = DEFAULT_INNER_SPLIT,
    outer_arm_phase: float = -math.pi / 2,
) -> InterferometerGraph:
    """ Canonical nested interferometer

    Outer splitter BS1 sends the transmitted beam to mirror C and the reflected beam
    to E. E feeds the inner interferometer BS2 -> {A, B} -> BS3, whose port 1 goes
    through F. F and C recombine on BS4 in front of the post-selection detector D.
    D2 and D3 collect the remaining output ports. inner_phase sits on mirror B,
    inner_phase = pi makes the paths through A and B cancel at F.

    Parameters:
        inner_phase (float)     : static phase on mirror B, radians
        outer_split (float)     : transmission amplitude of BS1 and BS4
        inner_split (float)     : transmission amplitude of BS2 and BS3
        outer_arm_phase (float) : static phase on mirror C

    Returns:
        a validated InterferometerGraph
    """
    for name, value in (("outer_split", outer_split), ("inner_split", inner_split)):
        if not 0.0 < value < 1.0:
            raise ValidationError(f"{name} must lie strictly between 0 and 1, got {value}")

    elements = [
        Element("S", ElementKind.source),
        Element("BS1", ElementKind.splitter, transmissivity=outer_split),
        Element("E", ElementKind.mirror, symbol="E"),
        Element("BS2", ElementKind.splitter, transmissivity=inner_split),
        Element("A", ElementKind.mirror, symbol="A"),
        Element("B", ElementKind.mirror, symbol="B", phase=inner_phase),
        Element("BS3", ElementKind.splitter, transmissivity=inner_split),
        Element("F", ElementKind.mirror, symbol="F"),
        Element("C", ElementKind.mirror, symbol="C", phase=outer_arm_phase),
        Element("BS4", ElementKind.splitter, transmissivity=outer_split),
        Element("D", ElementKind.detector),
        Element("D2", ElementKind.detector),
        Element("D3", ElementKind.detector),
    ]
    edges = [
        Edge("S", "BS1", 0, 0),
        Edge("BS1", "C", 0, 0),
        Edge("BS1", "E", 1, 0),
        Edge("E", "BS2", 0, 0),
        Edge("BS2", "A", 0, 0),
        Edge("BS2", "B", 1, 0),
        Edge("A", "BS3", 0, 0),
        Edge("B", "BS3", 0, 1),
        Edge("BS3", "D3", 0, 0),
        Edge("BS3", "F", 1, 0),
        Edge("C", "BS4", 0, 0),
        Edge("F", "BS4", 0, 1),
        Edge("BS4", "D", 0, 0),
        Edge("BS4", "D2", 1, 0),
    ]
    return InterferometerGraph.from_parts(elements, edges)
