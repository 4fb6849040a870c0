"""Forward and backward states of the network and the weak values built from them."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import jsonpickle
import networkx as nx
import pandas as pd
from structlog import get_logger

from wmzi.errors import (
    IncompleteCutError,
    UnknownMirrorSymbolError,
    ValidationError,
    ZeroOverlapError,
)
from wmzi.interferometer import (
    ElementKind,
    Edge,
    InterferometerGraph,
    PathDescriptor,
    enumerate_paths,
    path_amplitude,
)

log = get_logger(__name__)

ZERO_OVERLAP = 1e-12


def _regions(graph: InterferometerGraph) -> List[str]:
    # a splitter mixes two modes, so it is not a region a projector can act on
    return [label for label in nx.lexicographical_topological_sort(graph.digraph)
            if graph.elements[label].kind != ElementKind.splitter]


def _in_edges(graph: InterferometerGraph) -> Dict[str, List[Edge]]:
    incoming = defaultdict(list)
    for edge in graph.edges:
        incoming[edge.target].append(edge)
    return incoming


def _out_edges(graph: InterferometerGraph) -> Dict[str, List[Edge]]:
    outgoing = defaultdict(list)
    for edge in graph.edges:
        outgoing[edge.source].append(edge)
    return outgoing


def forward_state(graph: InterferometerGraph) -> Dict[str, complex]:
    """ Amplitude of the pre-selected photon at every region, the region's own phase included """
    source = graph.source
    incoming = _in_edges(graph)
    outgoing = _out_edges(graph)
    on_arc: Dict[Tuple[str, str], complex] = {}
    forward: Dict[str, complex] = {}
    for label in nx.lexicographical_topological_sort(graph.digraph):
        element = graph.elements[label]
        arriving = [(edge, on_arc[(edge.source, edge.target)]) for edge in incoming[label]]
        if element.kind == ElementKind.splitter:
            for out in outgoing[label]:
                on_arc[(out.source, out.target)] = sum(
                    (amp * element.transfer(edge.in_port, out.out_port) for edge, amp in arriving), 0j
                )
            continue
        value = complex(1.0) if label == source else sum((amp for _, amp in arriving), 0j)
        value *= element.transfer()
        forward[label] = value
        for out in outgoing[label]:
            on_arc[(out.source, out.target)] = value
    return forward


def backward_state(graph: InterferometerGraph, detector: str) -> Dict[str, complex]:
    """ Conjugated amplitude from every region to the detector, the region's own phase excluded """
    graph.require_detector(detector)
    incoming = _in_edges(graph)
    outgoing = _out_edges(graph)
    from_arc: Dict[Tuple[str, str], complex] = {}
    backward: Dict[str, complex] = {}
    for label in reversed(list(nx.lexicographical_topological_sort(graph.digraph))):
        element = graph.elements[label]
        if element.kind == ElementKind.splitter:
            for edge in incoming[label]:
                from_arc[(edge.source, edge.target)] = sum(
                    (element.transfer(edge.in_port, out.out_port) * from_arc[(out.source, out.target)]
                     for out in outgoing[label]),
                    0j,
                )
            continue
        if element.kind == ElementKind.detector:
            downstream = complex(1.0) if label == detector else 0j
        else:
            downstream = sum((from_arc[(out.source, out.target)] for out in outgoing[label]), 0j)
        backward[label] = downstream.conjugate()
        for edge in incoming[label]:
            from_arc[(edge.source, edge.target)] = element.transfer() * downstream
    return backward


@dataclass
class TwoStateVector:
    """ Forward and backward states at one post-selection detector """
    detector: str
    forward: Dict[str, complex]
    backward: Dict[str, complex]
    overlap: complex
    symbols: Dict[str, str] = field(default_factory=dict)
    paths: Dict[PathDescriptor, complex] = field(default_factory=dict)

    @property
    def post_selection_probability(self) -> float:
        return abs(self.overlap) ** 2

    def resolve(self, mirror: str) -> str:
        """ Region label for a coupling symbol or a label """
        if mirror in self.symbols:
            return self.symbols[mirror]
        if mirror in self.forward:
            return mirror
        raise UnknownMirrorSymbolError(f"{mirror!r} is neither a coupling symbol nor a region of the network")

    def require_overlap(self) -> None:
        if abs(self.overlap) < ZERO_OVERLAP:
            raise ZeroOverlapError(
                f"post-selection on {self.detector} is impossible (|overlap| = {abs(self.overlap):.3g})"
            )


def two_state_vector(graph: InterferometerGraph, detector: str) -> TwoStateVector:
    forward = forward_state(graph)
    backward = backward_state(graph, detector)
    paths = {p: path_amplitude(graph, p) for p in enumerate_paths(graph, detector)}
    return TwoStateVector(
        detector=detector,
        forward=forward,
        backward=backward,
        overlap=forward[detector],
        symbols=graph.probes,
        paths=paths,
    )


def projector_weak_value(tsv: TwoStateVector, mirror: str) -> complex:
    label = tsv.resolve(mirror)
    tsv.require_overlap()
    return tsv.backward[label].conjugate() * tsv.forward[label] / tsv.overlap


def cumulative_weak_value(tsv: TwoStateVector, mirrors: Sequence[str]) -> complex:
    """ Sum of projector weak values along the listed mirrors """
    tsv.require_overlap()
    return sum((projector_weak_value(tsv, m) for m in mirrors), 0j)


def completeness_check(tsv: TwoStateVector, cut: Iterable[str]) -> complex:
    """ Sum of weak values over a cut that every path to the detector crosses exactly once; equals 1 """
    labels = {tsv.resolve(m) for m in cut}
    for path in tsv.paths:
        crossings = [label for label in path if label in labels]
        if len(crossings) != 1:
            raise IncompleteCutError(
                f"path {path} crosses the cut {len(crossings)} times, expected exactly once"
            )
    if not labels:
        raise IncompleteCutError("empty cut")
    return cumulative_weak_value(tsv, sorted(labels))


def sequential_weak_value(tsv: TwoStateVector, mirrors: Sequence[str]) -> complex:
    """ Weak value of the ordered product of mirror projectors

    The amplitude of the paths that visit every listed mirror in the given order,
    divided by the overlap. An empty list gives 1.
    """
    labels = [tsv.resolve(m) for m in mirrors]
    tsv.require_overlap()
    total = 0j
    for path, amplitude in tsv.paths.items():
        remaining = iter(path.labels)
        if all(label in remaining for label in labels):
            total += amplitude
    return total / tsv.overlap


@dataclass
class WeakValueResult:
    detector: str
    per_mirror: Dict[str, complex]
    cumulative: Dict[str, complex]
    post_selection_probability: float
    overlap: complex

    @staticmethod
    def from_json(text: str) -> WeakValueResult:
        result = jsonpickle.decode(text)
        if not isinstance(result, WeakValueResult):
            raise ValidationError("serialized text does not hold a weak-value result")
        return result

    def to_json(self) -> str:
        return jsonpickle.encode(self)

    def __getstate__(self):
        def split(values: Mapping[str, complex]):
            return {k: [v.real, v.imag] for k, v in values.items()}

        return {
            "detector": self.detector,
            "per_mirror": split(self.per_mirror),
            "cumulative": split(self.cumulative),
            "post_selection_probability": self.post_selection_probability,
            "overlap": [self.overlap.real, self.overlap.imag],
        }

    def __setstate__(self, state):
        def join(values):
            return {k: complex(re, im) for k, (re, im) in values.items()}

        self.detector = state["detector"]
        self.per_mirror = join(state["per_mirror"])
        self.cumulative = join(state["cumulative"])
        self.post_selection_probability = state["post_selection_probability"]
        self.overlap = complex(*state["overlap"])

    def to_frame(self) -> pd.DataFrame:
        rows = [{"kind": "mirror", "key": k, "re": v.real, "im": v.imag} for k, v in self.per_mirror.items()]
        rows += [{"kind": "cumulative", "key": k, "re": v.real, "im": v.imag} for k, v in self.cumulative.items()]
        rows.append({"kind": "probability", "key": self.detector, "re": self.post_selection_probability, "im": 0.0})
        return pd.DataFrame(rows, columns=["kind", "key", "re", "im"])


def weak_values(graph: InterferometerGraph, detector: str) -> WeakValueResult:
    """ Weak values of every coupled mirror, cumulative per path and for the whole detector """
    tsv = two_state_vector(graph, detector)
    tsv.require_overlap()
    per_mirror = {symbol: projector_weak_value(tsv, symbol) for symbol in tsv.symbols}
    cumulative = {}
    for path in tsv.paths:
        mirrors = path.mirrors(graph)
        key = "-".join(mirrors) or "-".join(path.labels)
        cumulative[key] = cumulative_weak_value(tsv, mirrors)
    cumulative["detector"] = cumulative_weak_value(tsv, list(per_mirror))
    log.info(
        "computed weak values",
        detector=detector,
        probability=tsv.post_selection_probability,
        mirrors=len(per_mirror),
    )
    return WeakValueResult(
        detector=detector,
        per_mirror=per_mirror,
        cumulative=cumulative,
        post_selection_probability=tsv.post_selection_probability,
        overlap=tsv.overlap,
    )
