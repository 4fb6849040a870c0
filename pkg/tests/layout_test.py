import math

import pytest

from wmzi.errors import DanglingEdgeError, DuplicateLabelError, LayoutSyntaxError
from wmzi.interferometer import build_nested_mzi, detector_probabilities, enumerate_paths, path_amplitude
from wmzi.layout import load_layout, parse_layout, parse_number

from run_wmzi import LAYOUTS


def test_parse_number():
    assert parse_number("0.25") == 0.25
    assert parse_number("1/3") == pytest.approx(1 / 3)
    assert parse_number("pi") == pytest.approx(math.pi)
    assert parse_number("-pi/2") == pytest.approx(-math.pi / 2)
    assert parse_number("3*pi/4") == pytest.approx(3 * math.pi / 4)
    assert parse_number("1e-3") == pytest.approx(1e-3)
    for bad in ("", "pi*3", "1/0", "abc", "2x"):
        with pytest.raises(ValueError):
            parse_number(bad)


def test_canonical_layout_matches_builder():
    G = load_layout(LAYOUTS / "nested_mzi.layout")
    H = build_nested_mzi()

    assert enumerate_paths(G) == enumerate_paths(H)
    for p in enumerate_paths(G):
        assert path_amplitude(G, p) == pytest.approx(path_amplitude(H, p))


def test_misaligned_layout():
    G = load_layout(LAYOUTS / "misaligned_mzi.layout")
    assert detector_probabilities(G) == pytest.approx(detector_probabilities(build_nested_mzi(math.pi / 2)))


def test_single_arm_layout_reads_oscillation_fields():
    G = load_layout(LAYOUTS / "single_arm.layout")

    assert G.elements["BS1"].transmissivity == pytest.approx(0.6)
    assert G.elements["A"].frequency == 37
    assert G.elements["C"].tilt == pytest.approx(0.02)
    assert G.elements["C"].phase == pytest.approx(math.pi / 2)


def test_comments_and_blank_lines():
    G = parse_layout("# header\n\nsource S  # the photon\ndetector D\nS -> D\n")
    assert [str(p) for p in enumerate_paths(G)] == ["S -> D"]


def test_unknown_keyword_reports_position():
    with pytest.raises(LayoutSyntaxError) as e:
        parse_layout("source S\nlens L\n")
    assert e.value.line == 2
    assert e.value.column == 1
    assert str(e.value).startswith("line 2, column 1:")


def test_splitter_needs_one_amplitude():
    with pytest.raises(LayoutSyntaxError) as e:
        parse_layout("source S\nsplitter BS t=0.5 T=0.25\n")
    assert e.value.line == 2


def test_bad_port():
    with pytest.raises(LayoutSyntaxError) as e:
        parse_layout("source S\ndetector D\nS:2 -> D\n")
    assert e.value.line == 3
    assert e.value.column == 3


def test_duplicate_label_reports_line():
    with pytest.raises(DuplicateLabelError) as e:
        parse_layout("source S\ndetector D\ndetector D\n")
    assert e.value.line == 3


def test_duplicate_symbol():
    text = "source S\nmirror M1 symbol=A\nmirror M2 symbol=A\ndetector D\nS -> M1\nM1 -> M2\nM2 -> D\n"
    with pytest.raises(DuplicateLabelError):
        parse_layout(text)


def test_dangling_edge_reports_line():
    with pytest.raises(DanglingEdgeError) as e:
        parse_layout("source S\ndetector D\nS -> X\n")
    assert e.value.line == 3


def test_invalid_utf8(tmp_path):
    path = tmp_path / "bad.layout"
    path.write_bytes(b"source S\ndetector \xff\n")
    with pytest.raises(LayoutSyntaxError) as e:
        load_layout(path)
    assert e.value.line == 2
    assert e.value.column == 10
