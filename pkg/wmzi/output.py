"""Writers for tables and texts produced by the commands.

Every table is a pandas DataFrame; complex values are already split into re/im
columns by the producing module.
"""
from __future__ import annotations

import json
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, TextIO, Union

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"


class OutputFormat(str, Enum):
    text = "text"
    csv = "csv"
    json = "json"


def _plain(value: Any) -> Any:
    """ JSON-safe copy of config values (paths, enums, numpy scalars) """
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def config_header(config: Mapping[str, Any]) -> str:
    return "# config: " + json.dumps(_plain(config), sort_keys=True)


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def frame_to_text(frame: pd.DataFrame) -> str:
    """ Aligned columns, floats with 17 significant digits """
    if frame.empty:
        return "  ".join(frame.columns) + "\n"
    return frame.to_string(index=False, float_format=format_float) + "\n"


def frame_to_csv(frame: pd.DataFrame, config: Optional[Mapping[str, Any]] = None) -> str:
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return (config_header(config) + "\n" + body) if config is not None else body


def frame_to_json(frame: pd.DataFrame, config: Optional[Mapping[str, Any]] = None) -> str:
    rows = [_plain(row) for row in frame.to_dict(orient="records")]
    return json.dumps({"config": _plain(config or {}), "rows": rows}, sort_keys=True, indent=2) + "\n"


def render(frame: pd.DataFrame, fmt: Union[OutputFormat, str], config: Optional[Mapping[str, Any]] = None) -> str:
    fmt = OutputFormat(fmt)
    if fmt == OutputFormat.csv:
        return frame_to_csv(frame, config)
    if fmt == OutputFormat.json:
        return frame_to_json(frame, config)
    return frame_to_text(frame)


def emit(text: str, out: Optional[Union[str, Path]] = None, stream: TextIO = sys.stdout) -> None:
    """ Write to out when given, else to stdout """
    if out is None:
        stream.write(text)
        stream.flush()
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def write_csv(frame: pd.DataFrame, path: Union[str, Path], config: Optional[Mapping[str, Any]] = None) -> None:
    emit(frame_to_csv(frame, config), path)


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    """ Read a csv written by write_csv, skipping the config header """
    return pd.read_csv(path, comment="#")


def read_config_header(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline()
    if not first.startswith("# config: "):
        return {}
    return json.loads(first[len("# config: "):])
