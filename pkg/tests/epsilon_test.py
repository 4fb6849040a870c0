import math
from pathlib import Path

import numpy as np
import pytest

from wmzi.epsilon import (
    EpsilonMonomial,
    EpsilonPolynomial,
    detector_expansion,
    evaluate,
    expand_path,
    extract_order,
    sum_paths,
)
from wmzi.errors import (
    MissingAssignmentError,
    OrderMismatchError,
    OrderOutOfRangeError,
    UnknownMirrorSymbolError,
    ZeroOverlapError,
)
from wmzi.interferometer import MIRROR_SYMBOLS, build_nested_mzi, enumerate_paths, path_amplitude
from wmzi.tsvf import weak_values

from networks import random_nested_mzi

GOLDEN = Path(__file__).parent / "golden"


def test_monomial_text():
    assert str(EpsilonMonomial.one()) == "1"
    assert str(EpsilonMonomial.from_symbols(["E", "A"])) == "eps_A*eps_E"
    assert str(EpsilonMonomial.from_symbols(["E", "E"])) == "eps_E^2"
    with pytest.raises(UnknownMirrorSymbolError):
        EpsilonMonomial.from_symbols(["G"])


def test_truncation_drops_high_degrees():
    poly = expand_path(1, ["A", "B", "C"], order=2)

    assert poly.degree == 2
    assert poly.coefficient(["A", "B"]) == 1
    assert poly.coefficient(["A", "B", "C"]) == 0


def test_square_of_a_variable():
    eps = EpsilonPolynomial.variable("E", order=2)
    assert (eps * eps).to_text() == "eps_E^2"
    assert (eps * eps * eps).is_zero()


def test_arithmetic():
    a = EpsilonPolynomial.variable("A")
    one = EpsilonPolynomial.constant(1)

    assert (one - a) + a == one
    assert (2 * a).coefficient("A") == 2
    assert (-a).coefficient("A") == -1
    with pytest.raises(OrderMismatchError):
        a + EpsilonPolynomial.variable("A", order=1)


def test_unit_expansion_matches_golden():
    poly = detector_expansion(build_nested_mzi(), "D", order=3, amplitudes="unit")
    assert poly.to_text() + "\n" == (GOLDEN / "expand_unit_order3.txt").read_text()


def test_order_zero_is_the_path_count():
    poly = detector_expansion(build_nested_mzi(), "D", order=0, amplitudes="unit")
    assert poly.to_text() == "3"


def test_dark_arm_cancels_at_first_order():
    poly = detector_expansion(build_nested_mzi(), "D", order=1)

    assert poly.symbols() == ("A", "B", "C")
    assert poly.coefficient(()) == pytest.approx(-1j / 3)


def test_dark_tuning_second_order_dark_terms():
    poly = detector_expansion(build_nested_mzi(), "D", order=2, prune_tol=0.0)

    # the two paths through E and F cancel exactly, not just up to rounding
    assert poly.coefficient("E") == 0
    assert poly.coefficient("F") == 0
    assert poly.coefficient(["E", "F"]) == 0
    assert poly.coefficient(["A", "E"]) == pytest.approx(-1j / 3, abs=1e-12)
    assert poly.coefficient(["A", "F"]) == pytest.approx(-1j / 3, abs=1e-12)
    assert poly.coefficient(["B", "E"]) == pytest.approx(1j / 3, abs=1e-12)
    assert poly.coefficient(["B", "F"]) == pytest.approx(1j / 3, abs=1e-12)


def test_normalized_first_order_is_minus_weak_value():
    for phase in (math.pi, math.pi / 2):
        G = build_nested_mzi(inner_phase=phase)
        poly = detector_expansion(G, "D", order=1, normalize=True)
        result = weak_values(G, "D")

        assert poly.coefficient(()) == pytest.approx(1)
        for symbol, value in result.per_mirror.items():
            assert poly.coefficient(symbol) == pytest.approx(-value, abs=1e-12)


def test_zero_overlap():
    # balanced outer splitters with the inner arms in phase leave D dark
    G = build_nested_mzi(inner_phase=0.0, outer_split=math.sqrt(0.5), outer_arm_phase=math.pi / 2)
    with pytest.raises(ZeroOverlapError):
        detector_expansion(G, "D", normalize=True)


def test_extract_order():
    poly = detector_expansion(build_nested_mzi(), "D", amplitudes="unit")
    second = extract_order(poly, 2)

    assert all(m.degree == 2 for m in second.terms)
    assert second.coefficient(["E", "F"]) == 2
    with pytest.raises(OrderOutOfRangeError):
        extract_order(poly, 4)


def test_evaluate():
    poly = detector_expansion(build_nested_mzi(), "D", amplitudes="unit")
    values = dict(A=0.1, B=0.2, C=0.3, E=0.4, F=0.5)
    exact = (1 - 0.3) + (1 - 0.4) * (1 - 0.1) * (1 - 0.5) + (1 - 0.4) * (1 - 0.2) * (1 - 0.5)

    assert evaluate(poly, values) == pytest.approx(exact)
    with pytest.raises(MissingAssignmentError):
        evaluate(poly, {"A": 0.1})


def test_sum_paths_of_nothing():
    assert sum_paths([], order=2).is_zero()
    assert sum_paths([], order=2).to_text() == "0"


def test_json_round_trip():
    poly = detector_expansion(build_nested_mzi(inner_phase=math.pi / 2), "D")
    assert EpsilonPolynomial.from_json(poly.to_json()) == poly


def test_frame_columns():
    frame = detector_expansion(build_nested_mzi(), "D", amplitudes="unit").to_frame()

    assert list(frame.columns) == ["monomial", "degree", "re", "im"]
    assert frame["monomial"].iloc[0] == "1"
    assert len(frame) == 13


def random_polynomial(rng, order=3, terms=6):
    poly = EpsilonPolynomial(order=order)
    for _ in range(terms):
        symbols = [str(s) for s in rng.choice(MIRROR_SYMBOLS, size=int(rng.integers(0, order + 1)))]
        coefficient = complex(rng.normal(), rng.normal())
        poly = poly + EpsilonPolynomial({EpsilonMonomial.from_symbols(symbols): coefficient}, order)
    return poly


def assert_close(p, q, tol=1e-12):
    for monomial in set(p.terms) | set(q.terms):
        assert abs(p.coefficient(monomial) - q.coefficient(monomial)) <= tol, str(monomial)


def test_ring_laws():
    rng = np.random.default_rng(31)
    one = EpsilonPolynomial.constant(1)
    for _ in range(30):
        a, b, c = (random_polynomial(rng) for _ in range(3))

        assert_close(a + b, b + a)
        assert_close((a + b) + c, a + (b + c))
        assert_close(a * b, b * a)
        assert_close((a * b) * c, a * (b * c))
        assert_close(a * (b + c), a * b + a * c)
        assert (a - a).is_zero()
        assert one * a == a


def test_random_first_order_is_minus_weak_value():
    rng = np.random.default_rng(32)
    for _ in range(100):
        G = random_nested_mzi(rng)
        poly = detector_expansion(G, "D", order=1, normalize=True)
        for symbol, value in weak_values(G, "D").per_mirror.items():
            assert abs(poly.coefficient(symbol) + value) <= 1e-10


def test_evaluate_within_truncation_error():
    rng = np.random.default_rng(33)
    for _ in range(20):
        G = random_nested_mzi(rng)
        paths = enumerate_paths(G, "D")
        weights = [path_amplitude(G, p) for p in paths]
        values = {s: rng.uniform(-0.3, 0.3) for s in MIRROR_SYMBOLS}
        exact = sum(
            w * math.prod(1 - values[s] for s in p.mirrors(G)) for w, p in zip(weights, paths)
        )

        # every path meets at most three mirrors, so order 3 is the whole product
        full = detector_expansion(G, "D", order=3)
        assert evaluate(full, values) == pytest.approx(exact, abs=1e-12)

        for order in (1, 2):
            truncated = evaluate(detector_expansion(G, "D", order=order), values)
            bound = sum(
                abs(w) * sum(math.comb(len(p.mirrors(G)), j) * 0.3**j for j in range(order + 1, 4))
                for w, p in zip(weights, paths)
            )
            assert abs(truncated - exact) <= bound + 1e-12
