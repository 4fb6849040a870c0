"""Truncated polynomials in the mirror interaction terms eps_A .. eps_F.

Each path contributes amplitude * prod(1 - eps_n) over the mirrors it meets; the
detector amplitude is the sum over paths, kept order by order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import jsonpickle
import pandas as pd
from structlog import get_logger

from wmzi.errors import (
    MissingAssignmentError,
    OrderMismatchError,
    OrderOutOfRangeError,
    UnknownMirrorSymbolError,
    ValidationError,
    ZeroOverlapError,
)
from wmzi.interferometer import (
    MIRROR_SYMBOLS,
    InterferometerGraph,
    enumerate_paths,
    path_amplitude,
)

log = get_logger(__name__)

DEFAULT_ORDER = 3
DEFAULT_PRUNE_TOL = 1e-14


def _check_symbol(symbol: str) -> int:
    try:
        return MIRROR_SYMBOLS.index(symbol)
    except ValueError:
        raise UnknownMirrorSymbolError(
            f"unknown mirror symbol {symbol!r}, expected one of {', '.join(MIRROR_SYMBOLS)}"
        ) from None


@dataclass(frozen=True, order=True)
class EpsilonMonomial:
    """ Product of eps_n powers, exponents stored in (A, B, C, E, F) order """
    exponents: Tuple[int, ...] = (0,) * len(MIRROR_SYMBOLS)

    @staticmethod
    def one() -> EpsilonMonomial:
        return EpsilonMonomial()

    @staticmethod
    def from_symbols(symbols: Iterable[str]) -> EpsilonMonomial:
        exponents = [0] * len(MIRROR_SYMBOLS)
        for symbol in symbols:
            exponents[_check_symbol(symbol)] += 1
        return EpsilonMonomial(tuple(exponents))

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def as_dict(self) -> Dict[str, int]:
        """ Nonzero exponents keyed by symbol """
        return {s: e for s, e in zip(MIRROR_SYMBOLS, self.exponents) if e}

    def __mul__(self, other: EpsilonMonomial) -> EpsilonMonomial:
        return EpsilonMonomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __str__(self) -> str:
        factors = []
        for symbol, exponent in self.as_dict().items():
            factors.append(f"eps_{symbol}" if exponent == 1 else f"eps_{symbol}^{exponent}")
        return "*".join(factors) if factors else "1"


Scalar = Union[int, float, complex]


def _format_real(value: float) -> str:
    return format(value, ".17g")


class EpsilonPolynomial:
    """ Polynomial in eps_A .. eps_F truncated at a fixed total degree

    Terms above the truncation order are dropped and exact zeros are never stored,
    so arithmetic on exact inputs keeps cancellations exact.
    """

    def __init__(self, terms: Optional[Mapping[EpsilonMonomial, Scalar]] = None, order: int = DEFAULT_ORDER):
        if order < 0:
            raise OrderOutOfRangeError(f"truncation order must be non-negative, got {order}")
        self._order = order
        self._terms: Dict[EpsilonMonomial, complex] = {}
        for monomial, coefficient in (terms or {}).items():
            self._accumulate(monomial, complex(coefficient))

    def _accumulate(self, monomial: EpsilonMonomial, coefficient: complex) -> None:
        if monomial.degree > self._order:
            return
        total = self._terms.get(monomial, 0j) + coefficient
        if total == 0:
            self._terms.pop(monomial, None)
        else:
            self._terms[monomial] = total

    @staticmethod
    def constant(value: Scalar, order: int = DEFAULT_ORDER) -> EpsilonPolynomial:
        return EpsilonPolynomial({EpsilonMonomial.one(): value}, order)

    @staticmethod
    def variable(symbol: str, order: int = DEFAULT_ORDER) -> EpsilonPolynomial:
        return EpsilonPolynomial({EpsilonMonomial.from_symbols([symbol]): 1}, order)

    @staticmethod
    def from_json(text: str) -> EpsilonPolynomial:
        poly = jsonpickle.decode(text)
        if not isinstance(poly, EpsilonPolynomial):
            raise ValidationError("serialized text does not hold an epsilon polynomial")
        return poly

    def to_json(self) -> str:
        return jsonpickle.encode(self)

    def __getstate__(self):
        return {
            "order": self._order,
            "terms": [[list(m.exponents), c.real, c.imag] for m, c in self.sorted_terms()],
        }

    def __setstate__(self, state):
        self._order = state["order"]
        self._terms = {}
        for exponents, re, im in state["terms"]:
            self._accumulate(EpsilonMonomial(tuple(exponents)), complex(re, im))

    @property
    def order(self) -> int:
        return self._order

    @property
    def terms(self) -> Dict[EpsilonMonomial, complex]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        """ Highest degree carrying a nonzero coefficient, -1 for the zero polynomial """
        return max((m.degree for m in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def symbols(self) -> Tuple[str, ...]:
        present = {s for m in self._terms for s in m.as_dict()}
        return tuple(s for s in MIRROR_SYMBOLS if s in present)

    def coefficient(self, monomial: Union[EpsilonMonomial, str, Sequence[str]] = ()) -> complex:
        """ Coefficient of a monomial, given as EpsilonMonomial, "E" or ["E", "F"] """
        if isinstance(monomial, str):
            monomial = [monomial] if monomial else []
        if not isinstance(monomial, EpsilonMonomial):
            monomial = EpsilonMonomial.from_symbols(monomial)
        return self._terms.get(monomial, 0j)

    def sorted_terms(self) -> List[Tuple[EpsilonMonomial, complex]]:
        """ Terms by ascending degree, then exponent tuple descending (A before B before ...) """
        return sorted(self._terms.items(), key=lambda item: (item[0].degree, tuple(-e for e in item[0].exponents)))

    def _check_order(self, other: EpsilonPolynomial) -> None:
        if other._order != self._order:
            raise OrderMismatchError(f"truncation orders differ: {self._order} and {other._order}")

    def __add__(self, other: EpsilonPolynomial) -> EpsilonPolynomial:
        self._check_order(other)
        result = EpsilonPolynomial(self._terms, self._order)
        for monomial, coefficient in other._terms.items():
            result._accumulate(monomial, coefficient)
        return result

    def __neg__(self) -> EpsilonPolynomial:
        return EpsilonPolynomial({m: -c for m, c in self._terms.items()}, self._order)

    def __sub__(self, other: EpsilonPolynomial) -> EpsilonPolynomial:
        return self + (-other)

    def __mul__(self, other: Union[EpsilonPolynomial, Scalar]) -> EpsilonPolynomial:
        if not isinstance(other, EpsilonPolynomial):
            factor = complex(other)
            return EpsilonPolynomial({m: c * factor for m, c in self._terms.items()}, self._order)
        self._check_order(other)
        result = EpsilonPolynomial(order=self._order)
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                if m1.degree + m2.degree <= self._order:
                    result._accumulate(m1 * m2, c1 * c2)
        return result

    def __rmul__(self, other: Scalar) -> EpsilonPolynomial:
        return self * other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EpsilonPolynomial):
            return NotImplemented
        return self._order == other._order and self._terms == other._terms

    def __repr__(self) -> str:
        return f"EpsilonPolynomial({self.to_text()!r}, order={self._order})"

    def prune(self, tol: float = DEFAULT_PRUNE_TOL) -> EpsilonPolynomial:
        """ Drop coefficients with magnitude at or below tol """
        return EpsilonPolynomial({m: c for m, c in self._terms.items() if abs(c) > tol}, self._order)

    def to_text(self) -> str:
        """ Canonical one-line form, e.g. ``3 - eps_A - 2*eps_E + eps_A*eps_E`` """
        if not self._terms:
            return "0"
        out = []
        for monomial, coefficient in self.sorted_terms():
            constant = monomial.degree == 0
            if coefficient.imag != 0:
                im = coefficient.imag
                body = f"({_format_real(coefficient.real)}{'+' if im >= 0 else '-'}{_format_real(abs(im))}j)"
                body = body if constant else f"{body}*{monomial}"
                out.append((" + " if out else "") + body)
                continue
            value = coefficient.real
            magnitude = abs(value)
            if constant:
                body = _format_real(magnitude)
            elif magnitude == 1:
                body = str(monomial)
            else:
                body = f"{_format_real(magnitude)}*{monomial}"
            if not out:
                out.append(("-" if value < 0 else "") + body)
            else:
                out.append((" - " if value < 0 else " + ") + body)
        return "".join(out)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"monomial": str(m), "degree": m.degree, "re": c.real, "im": c.imag}
            for m, c in self.sorted_terms()
        ]
        return pd.DataFrame(rows, columns=["monomial", "degree", "re", "im"])


def expand_path(amplitude: Scalar, mirrors: Sequence[str], order: int = DEFAULT_ORDER) -> EpsilonPolynomial:
    """ amplitude * prod over mirrors of (1 - eps_n), truncated at order """
    if order < 0:
        raise OrderOutOfRangeError(f"truncation order must be non-negative, got {order}")
    poly = EpsilonPolynomial.constant(amplitude, order)
    for symbol in mirrors:
        factor = EpsilonPolynomial(
            {EpsilonMonomial.one(): 1, EpsilonMonomial.from_symbols([symbol]): -1}, order
        )
        poly = poly * factor
    return poly


def sum_paths(polys: Sequence[EpsilonPolynomial], order: Optional[int] = None) -> EpsilonPolynomial:
    """ Termwise sum; order is only needed when polys is empty """
    if not polys:
        if order is None:
            raise ValidationError("cannot sum an empty list of polynomials without an order")
        return EpsilonPolynomial(order=order)
    total = EpsilonPolynomial(order=polys[0].order if order is None else order)
    for poly in polys:
        total = total + poly
    return total


def extract_order(poly: EpsilonPolynomial, k: int) -> EpsilonPolynomial:
    if not 0 <= k <= poly.order:
        raise OrderOutOfRangeError(f"order {k} outside 0..{poly.order}")
    return EpsilonPolynomial({m: c for m, c in poly.terms.items() if m.degree == k}, poly.order)


def evaluate(poly: EpsilonPolynomial, assignment: Mapping[str, Scalar]) -> complex:
    for symbol in assignment:
        _check_symbol(symbol)
    missing = [s for s in poly.symbols() if s not in assignment]
    if missing:
        raise MissingAssignmentError(f"no value given for {', '.join('eps_' + s for s in missing)}")
    total = 0j
    for monomial, coefficient in poly.sorted_terms():
        term = coefficient
        for symbol, exponent in monomial.as_dict().items():
            term *= complex(assignment[symbol]) ** exponent
        total += term
    return total


def detector_expansion(
    graph: InterferometerGraph,
    detector: str,
    order: int = DEFAULT_ORDER,
    amplitudes: str = "network",
    normalize: bool = False,
    prune_tol: float = DEFAULT_PRUNE_TOL,
) -> EpsilonPolynomial:
    """ Order-by-order amplitude at a detector

    Parameters:
        amplitudes (str) : "network" uses the actual path amplitudes, "unit" sets each to 1
        normalize (bool) : divide by the unperturbed detector amplitude, so the first-order
                           coefficient of eps_n becomes minus the weak value of mirror n
        prune_tol (float): coefficients at or below this magnitude are dropped for network
                           amplitudes, where cancellations are only exact up to rounding
    """
    if amplitudes not in ("network", "unit"):
        raise ValidationError(f"amplitudes must be 'network' or 'unit', got {amplitudes!r}")
    graph.require_detector(detector)
    paths = enumerate_paths(graph, detector)
    weights = [path_amplitude(graph, p) if amplitudes == "network" else complex(1.0) for p in paths]
    total = sum_paths([expand_path(w, p.mirrors(graph), order) for w, p in zip(weights, paths)], order)
    if normalize:
        overlap = sum(weights, 0j)
        if abs(overlap) < 1e-12:
            raise ZeroOverlapError(f"detector {detector} has zero unperturbed amplitude")
        total = total * (1 / overlap)
    if amplitudes == "network":
        total = total.prune(prune_tol)
    log.debug("expanded detector amplitude", detector=detector, order=order, paths=len(paths), terms=len(total.terms))
    return total
