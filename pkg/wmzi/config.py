"""JSON run configuration shared by the CLI and the pipeline runner.

    {
        "title": "nested-mzi",
        "output_dir": "samples",
        "layout": "layouts/nested_mzi.layout",
        "detector": "D",
        "stages": [
            {"name": "expand", "order": 3, "amplitudes": "unit"},
            {"name": "pointer-shift", "g": [0.1, 0.05, 0.02, 0.01]}
        ]
    }

A command reads the top-level keys, then its stage, then its own flags; later
sources win.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from wmzi.errors import ConfigError
from wmzi.layout import parse_number

COMMANDS = ("paths", "expand", "weakvalues", "pointer-shift", "spectrum", "propagator-check")
# keys that describe the run itself rather than a command parameter
RUN_KEYS = ("title", "output_dir", "stages", "name")


@dataclass
class RunConfig:
    values: Dict[str, Any] = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path.cwd)
    source: Optional[Path] = None

    @staticmethod
    def read_json(path: Union[str, Path]) -> Dict[str, Any]:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        return data

    @staticmethod
    def select_stage(data: Dict[str, Any], command: str, stage: Optional[int] = None) -> Dict[str, Any]:
        stages = data.get("stages", [])
        if not isinstance(stages, list) or not all(isinstance(s, dict) for s in stages):
            raise ConfigError("'stages' must be a list of objects")
        for s in stages:
            if s.get("name") not in COMMANDS:
                raise ConfigError(f"unknown stage name {s.get('name')!r}, expected one of {', '.join(COMMANDS)}")
        if stage is not None:
            if not 1 <= stage <= len(stages):
                raise ConfigError(f"--stage {stage} is out of range, the config has {len(stages)} stages")
            chosen = stages[stage - 1]
            if chosen["name"] != command:
                raise ConfigError(f"stage {stage} is a {chosen['name']!r} stage, not {command!r}")
            return chosen
        for s in stages:
            if s["name"] == command:
                return s
        return {}

    @staticmethod
    def load(path: Optional[Union[str, Path]], command: str, stage: Optional[int] = None) -> RunConfig:
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        if path is None:
            if stage is not None:
                raise ConfigError("--stage needs --config")
            return RunConfig()
        data = RunConfig.read_json(path)
        values = {k: v for k, v in data.items() if k not in RUN_KEYS}
        values.update({k: v for k, v in RunConfig.select_stage(data, command, stage).items() if k not in RUN_KEYS})
        source = Path(path).resolve()
        return RunConfig(values, source.parent, source)

    def get(self, key: str, flag: Any = None, default: Any = None) -> Any:
        if flag is not None:
            return flag
        return self.values.get(key, default)

    def number(self, key: str, flag: Optional[float] = None, default: Optional[float] = None) -> Optional[float]:
        """ A float that may be written like a layout number in the file ("pi", "-pi/2", "1/3") """
        value = self.get(key, flag, default)
        if value is None:
            return None
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        if isinstance(value, str):
            try:
                return parse_number(value)
            except ValueError as e:
                raise ConfigError(f"{key}: {e}") from None
        raise ConfigError(f"{key} must be a number, got {value!r}")

    def numbers(self, key: str, flag: Optional[str] = None, default: Sequence[float] = ()) -> List[float]:
        """ A list of floats, from a comma-separated flag or a JSON list """
        if flag is not None:
            raw: Any = [part for part in flag.split(",") if part.strip()]
        else:
            raw = self.values.get(key, list(default))
        if not isinstance(raw, list):
            raw = [raw]
        out = []
        for item in raw:
            try:
                out.append(parse_number(item) if isinstance(item, str) else float(item))
            except (TypeError, ValueError) as e:
                raise ConfigError(f"{key}: {e}") from None
        return out

    def path(self, key: str, flag: Optional[str] = None) -> Optional[Path]:
        """ Paths from the file resolve against its directory, paths from flags against the cwd """
        if flag is not None:
            return Path(flag)
        value = self.values.get(key)
        if value is None:
            return None
        path = Path(value)
        return path if path.is_absolute() else self.base_dir / path

    def effective(self, **resolved: Any) -> Dict[str, Any]:
        """ The configuration actually used, for output headers """
        merged = dict(self.values)
        merged.update({k: v for k, v in resolved.items() if v is not None})
        return merged
