import json
import math

import pytest

from wmzi.config import RunConfig
from wmzi.errors import ConfigError


def write(tmp_path, data):
    path = tmp_path / "pipeline.json"
    path.write_text(json.dumps(data))
    return path


PIPELINE = {
    "title": "run",
    "output_dir": "samples",
    "detector": "D",
    "inner_phase": "pi/2",
    "stages": [
        {"name": "expand", "order": 2},
        {"name": "pointer-shift", "g": [0.01, 0.001]},
        {"name": "expand", "order": 1, "detector": "D2"},
    ],
}


def test_stage_overrides_top_level(tmp_path):
    cfg = RunConfig.load(write(tmp_path, PIPELINE), "expand", 3)

    assert cfg.get("detector") == "D2"
    assert cfg.get("order") == 1
    assert "title" not in cfg.values
    assert "name" not in cfg.values


def test_first_matching_stage_without_index(tmp_path):
    cfg = RunConfig.load(write(tmp_path, PIPELINE), "expand")
    assert cfg.get("order") == 2


def test_flags_win(tmp_path):
    cfg = RunConfig.load(write(tmp_path, PIPELINE), "expand", 1)

    assert cfg.get("order", 3) == 3
    assert cfg.get("missing", None, "fallback") == "fallback"


def test_numbers(tmp_path):
    cfg = RunConfig.load(write(tmp_path, PIPELINE), "pointer-shift", 2)

    assert cfg.number("inner_phase") == pytest.approx(math.pi / 2)
    assert cfg.numbers("g") == [0.01, 0.001]
    assert cfg.numbers("g", "1e-2, 1/1000") == pytest.approx([0.01, 0.001])
    assert cfg.numbers("deltas", None, (0.1, 0.01)) == [0.1, 0.01]


def test_bad_number(tmp_path):
    cfg = RunConfig({"sigma": "wide"})
    with pytest.raises(ConfigError):
        cfg.number("sigma")
    with pytest.raises(ConfigError):
        RunConfig({"sigma": True}).number("sigma")


def test_paths_resolve_against_the_file(tmp_path):
    cfg = RunConfig.load(write(tmp_path, dict(PIPELINE, layout="nested.layout")), "paths")

    assert cfg.path("layout") == tmp_path.resolve() / "nested.layout"
    assert str(cfg.path("layout", "other.layout")) == "other.layout"
    assert cfg.path("export") is None


def test_stage_mismatch(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(write(tmp_path, PIPELINE), "expand", 2)
    with pytest.raises(ConfigError):
        RunConfig.load(write(tmp_path, PIPELINE), "expand", 9)


def test_unknown_stage_name(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(write(tmp_path, {"stages": [{"name": "clustering"}]}), "expand")


def test_stage_needs_config():
    with pytest.raises(ConfigError):
        RunConfig.load(None, "expand", 1)


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.read_json(path)
    with pytest.raises(ConfigError):
        RunConfig.read_json(tmp_path / "missing.json")


def test_effective_skips_unset_values():
    cfg = RunConfig({"order": 2, "detector": "D"})
    assert cfg.effective(order=3, detector=None) == {"order": 3, "detector": "D"}
