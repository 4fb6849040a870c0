import math

import numpy as np
import pytest

from wmzi.errors import IncompleteCutError, UnknownMirrorSymbolError, ZeroOverlapError
from wmzi.interferometer import build_nested_mzi
from wmzi.tsvf import (
    WeakValueResult,
    backward_state,
    completeness_check,
    cumulative_weak_value,
    forward_state,
    projector_weak_value,
    sequential_weak_value,
    two_state_vector,
    weak_values,
)

from networks import random_nested_mzi


def test_forward_state_of_dark_arm():
    forward = forward_state(build_nested_mzi())

    assert forward["S"] == 1
    assert forward["C"] == pytest.approx(-1j / math.sqrt(3))
    assert forward["F"] == pytest.approx(0, abs=1e-15)
    assert abs(forward["D"]) ** 2 == pytest.approx(1 / 9)
    assert "BS1" not in forward


def test_backward_state_marks_the_detector():
    backward = backward_state(build_nested_mzi(), "D")

    assert backward["D"] == 1
    assert backward["D2"] == 0
    assert backward["D3"] == 0


def test_dark_tuned_weak_values():
    result = weak_values(build_nested_mzi(), "D")

    assert result.per_mirror["A"] == pytest.approx(1)
    assert result.per_mirror["B"] == pytest.approx(-1)
    assert result.per_mirror["C"] == pytest.approx(1)
    # the A and B paths cancel exactly, not just up to rounding
    assert result.per_mirror["E"] == 0
    assert result.per_mirror["F"] == 0
    assert result.post_selection_probability == pytest.approx(1 / 9)


def test_dark_tuned_cumulative_values():
    result = weak_values(build_nested_mzi(), "D")

    assert list(result.cumulative) == ["C", "E-A-F", "E-B-F", "detector"]
    assert result.cumulative["C"] == pytest.approx(1)
    assert result.cumulative["E-A-F"] == pytest.approx(1)
    assert result.cumulative["E-B-F"] == pytest.approx(-1)
    assert result.cumulative["detector"] == pytest.approx(1)


def test_misaligned_weak_values():
    result = weak_values(build_nested_mzi(inner_phase=math.pi / 2), "D")

    assert result.per_mirror["A"] == pytest.approx((2 - 1j) / 5)
    assert result.per_mirror["B"] == pytest.approx((1 + 2j) / 5)
    assert result.per_mirror["C"] == pytest.approx((2 - 1j) / 5)
    assert result.per_mirror["E"] == pytest.approx((3 + 1j) / 5)
    assert result.per_mirror["F"] == pytest.approx((3 + 1j) / 5)


def test_weak_values_match_path_sums():
    G = build_nested_mzi(inner_phase=1.1, outer_split=0.4, inner_split=0.8)
    tsv = two_state_vector(G, "D")
    overlap = sum(tsv.paths.values())

    assert tsv.overlap == pytest.approx(overlap)
    for symbol, label in G.probes.items():
        through = sum(a for p, a in tsv.paths.items() if label in p.labels)
        assert projector_weak_value(tsv, symbol) == pytest.approx(through / overlap)


def test_complete_cut_sums_to_one():
    for phase in (math.pi, math.pi / 2, 0.3):
        tsv = two_state_vector(build_nested_mzi(inner_phase=phase), "D")
        assert completeness_check(tsv, ["A", "B", "C"]) == pytest.approx(1)
        assert completeness_check(tsv, ["C", "E"]) == pytest.approx(1)


def test_random_configurations_keep_the_cut_complete():
    rng = np.random.default_rng(21)
    for _ in range(100):
        tsv = two_state_vector(random_nested_mzi(rng), "D")
        assert completeness_check(tsv, ["A", "B", "C"]) == pytest.approx(1, abs=1e-12)


def test_incomplete_cut():
    tsv = two_state_vector(build_nested_mzi(), "D")
    with pytest.raises(IncompleteCutError):
        completeness_check(tsv, ["A", "C"])
    with pytest.raises(IncompleteCutError):
        completeness_check(tsv, ["E", "F", "C"])


def test_sequential_weak_value():
    tsv = two_state_vector(build_nested_mzi(), "D")

    assert sequential_weak_value(tsv, ["E", "A", "F"]) == pytest.approx(1)
    assert sequential_weak_value(tsv, ["E", "F"]) == pytest.approx(0, abs=1e-12)
    assert sequential_weak_value(tsv, ["A", "E"]) == 0
    assert sequential_weak_value(tsv, []) == pytest.approx(1)


def test_cumulative_is_a_sum():
    tsv = two_state_vector(build_nested_mzi(inner_phase=math.pi / 2), "D")
    assert cumulative_weak_value(tsv, ["A", "B"]) == pytest.approx(
        projector_weak_value(tsv, "A") + projector_weak_value(tsv, "B")
    )


def test_unknown_mirror():
    tsv = two_state_vector(build_nested_mzi(), "D")
    with pytest.raises(UnknownMirrorSymbolError):
        projector_weak_value(tsv, "Q")


def test_zero_overlap():
    G = build_nested_mzi(inner_phase=0.0, outer_split=math.sqrt(0.5), outer_arm_phase=math.pi / 2)
    with pytest.raises(ZeroOverlapError):
        weak_values(G, "D")


def test_result_serialization():
    result = weak_values(build_nested_mzi(inner_phase=math.pi / 2), "D")
    restored = WeakValueResult.from_json(result.to_json())

    assert restored.per_mirror == result.per_mirror
    assert restored.overlap == result.overlap
    frame = result.to_frame()
    assert list(frame.columns) == ["kind", "key", "re", "im"]
    assert frame["kind"].tolist().count("mirror") == 5
