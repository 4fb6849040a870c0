"""Command-line interface: one command per experiment, data on stdout, logs on stderr."""
from __future__ import annotations

import functools
import logging
import math
import sys
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
import structlog
import typer
from structlog import get_logger

from wmzi.config import RunConfig
from wmzi.epsilon import DEFAULT_ORDER, DEFAULT_PRUNE_TOL, detector_expansion
from wmzi.errors import ConfigError, WmziError
from wmzi.interferometer import (
    DEFAULT_INNER_SPLIT,
    DEFAULT_OUTER_SPLIT,
    InterferometerGraph,
    build_nested_mzi,
    enumerate_paths,
    path_amplitude,
)
from wmzi.layout import load_layout
from wmzi.oracle import DEFAULT_STEPS, schrodinger_oracle
from wmzi.output import OutputFormat, emit, format_float, render, write_csv
from wmzi.pointer import (
    evolve_exact,
    grid_post_select_stats,
    residual_slopes,
    shift_vs_weakvalue,
)
from wmzi.propcheck import BornScenario, results_frame, run_checks
from wmzi.spectrum import OscillationConfig, SpectrumMode, peak_scaling, spectrum_for, spectrum_lines
from wmzi.tsvf import completeness_check, sequential_weak_value, two_state_vector, weak_values

app = typer.Typer(add_completion=False, help="Weak measurements in nested Mach-Zehnder interferometers.")

DEFAULT_G_VALUES = (1e-2, 1e-3, 1e-4)
DEFAULT_DELTAS = (0.1, 0.05, 0.02, 0.01)


def configure_logging(quiet: bool) -> None:
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(logging.WARNING if quiet else logging.INFO),
        logger_factory=structlog.PrintLoggerFactory(sys.stderr),
    )


def handle_errors(command):
    """ Map WmziError to `error: <message>` on stderr and the error's exit code """

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except WmziError as e:
            typer.echo(f"error: {e}", err=True)
            raise typer.Exit(code=e.exit_code)

    return wrapper


def _config_option():
    return typer.Option(None, "--config", "-c", help="JSON run configuration.")


def _stage_option():
    return typer.Option(None, "--stage", help="1-based index of the stage to read from the config.")


def _layout_option():
    return typer.Option(None, "--layout", "-l", help="Layout file; the canonical nested interferometer if omitted.")


def _detector_option():
    return typer.Option(None, "--detector", "-d", help="Post-selection detector (default D).")


def _format_option():
    return typer.Option(None, "--format", "-f", help="Output format.")


def _out_option():
    return typer.Option(None, "--out", "-o", help="Write the output to this file instead of stdout.")


def _quiet_option():
    return typer.Option(False, "--quiet", "-q", help="Only log warnings.")


def _inner_phase_option():
    return typer.Option(None, "--inner-phase", help="Phase on mirror B of the nested interferometer, radians.")


def _outer_split_option():
    return typer.Option(None, "--outer-split", help="Transmission amplitude of the outer splitters.")


def _inner_split_option():
    return typer.Option(None, "--inner-split", help="Transmission amplitude of the inner splitters.")


def load_graph(
    cfg: RunConfig,
    layout: Optional[str],
    inner_phase: Optional[float],
    outer_split: Optional[float],
    inner_split: Optional[float],
) -> Tuple[InterferometerGraph, Dict[str, Any]]:
    """ The network from a layout file, or the nested interferometer with overrides """
    path = cfg.path("layout", layout)
    if path is not None:
        if not path.is_file():
            raise ConfigError(f"layout file {path} does not exist")
        return load_layout(path), {"layout": cfg.get("layout", layout)}
    params = {
        "inner_phase": cfg.number("inner_phase", inner_phase, math.pi),
        "outer_split": cfg.number("outer_split", outer_split, DEFAULT_OUTER_SPLIT),
        "inner_split": cfg.number("inner_split", inner_split, DEFAULT_INNER_SPLIT),
        "outer_arm_phase": cfg.number("outer_arm_phase", None, -math.pi / 2),
    }
    return build_nested_mzi(**params), params


def _setup(
    command: str, config: Optional[str], stage: Optional[int], quiet: bool
) -> RunConfig:
    configure_logging(quiet)
    cfg = RunConfig.load(config, command, stage)
    get_logger(__name__).info("starting command", command=command, config=config, stage=stage)
    return cfg


def _format(cfg: RunConfig, fmt: Optional[OutputFormat]) -> OutputFormat:
    try:
        return OutputFormat(cfg.get("format", fmt, OutputFormat.text))
    except ValueError:
        raise ConfigError(f"unknown format {cfg.get('format')!r}") from None


def _symbols(value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    return [s.strip() for s in value.split(",") if s.strip()]


def _symbol_list(value: Any) -> Optional[List[str]]:
    """ Mirror symbols from a comma-separated flag or a JSON list """
    if value is None or isinstance(value, str):
        return _symbols(value)
    return [str(s) for s in value]


def _per_mirror(cfg: RunConfig, key: str, known: Dict[str, float]) -> Dict[str, float]:
    """ {"A": 37, ...} overrides from the config, limited to the coupled mirrors """
    values = cfg.get(key, None, {})
    if not isinstance(values, dict):
        raise ConfigError(f"{key} must map mirror symbols to numbers")
    unknown = sorted(set(values) - set(known))
    if unknown:
        raise ConfigError(f"{key}: no coupled mirror with symbol {', '.join(unknown)}")
    return {k: cfg.number(f"{key}.{k}", values[k]) for k in values}


@app.command("paths")
@handle_errors
def paths(
    config: Optional[str] = _config_option(),
    stage: Optional[int] = _stage_option(),
    layout: Optional[str] = _layout_option(),
    detector: Optional[str] = _detector_option(),
    all_detectors: bool = typer.Option(False, "--all", help="List the paths to every detector."),
    fmt: Optional[OutputFormat] = _format_option(),
    out: Optional[str] = _out_option(),
    quiet: bool = _quiet_option(),
    inner_phase: Optional[float] = _inner_phase_option(),
    outer_split: Optional[float] = _outer_split_option(),
    inner_split: Optional[float] = _inner_split_option(),
):
    """ List source -> detector paths with their mirrors and amplitudes. """
    cfg = _setup("paths", config, stage, quiet)
    graph, graph_params = load_graph(cfg, layout, inner_phase, outer_split, inner_split)
    detector = None if all_detectors else cfg.get("detector", detector, "D")
    found = enumerate_paths(graph, detector)
    fmt = _format(cfg, fmt)
    rows = []
    for p in found:
        amplitude = path_amplitude(graph, p)
        rows.append({
            "path": str(p),
            "detector": p.detector,
            "mirrors": "-".join(p.mirrors(graph)),
            "re": amplitude.real,
            "im": amplitude.imag,
        })
    frame = pd.DataFrame(rows, columns=["path", "detector", "mirrors", "re", "im"])
    if fmt == OutputFormat.text:
        text = "".join(
            f"{r['path']}  [{r['mirrors'] or '-'}]  {format_float(r['re'])} {format_float(r['im'])}j\n" for r in rows
        )
    else:
        text = render(frame, fmt, cfg.effective(detector=detector, **graph_params))
    emit(text, cfg.get("out", out))


@app.command("expand")
@handle_errors
def expand(
    config: Optional[str] = _config_option(),
    stage: Optional[int] = _stage_option(),
    layout: Optional[str] = _layout_option(),
    detector: Optional[str] = _detector_option(),
    order: Optional[int] = typer.Option(None, "--order", help=f"Truncation order (default {DEFAULT_ORDER})."),
    amplitudes: Optional[str] = typer.Option(None, "--amplitudes", help="network or unit path amplitudes."),
    normalize: bool = typer.Option(False, "--normalize", help="Divide by the unperturbed detector amplitude."),
    prune_tol: Optional[float] = typer.Option(None, "--prune-tol", help="Drop coefficients at or below this size."),
    fmt: Optional[OutputFormat] = _format_option(),
    out: Optional[str] = _out_option(),
    quiet: bool = _quiet_option(),
    inner_phase: Optional[float] = _inner_phase_option(),
    outer_split: Optional[float] = _outer_split_option(),
    inner_split: Optional[float] = _inner_split_option(),
):
    """ Order-by-order expansion of the detector amplitude in the mirror interactions. """
    cfg = _setup("expand", config, stage, quiet)
    graph, graph_params = load_graph(cfg, layout, inner_phase, outer_split, inner_split)
    resolved = {
        "detector": cfg.get("detector", detector, "D"),
        "order": int(cfg.get("order", order, DEFAULT_ORDER)),
        "amplitudes": cfg.get("amplitudes", amplitudes, "network"),
        "normalize": bool(normalize or cfg.get("normalize", None, False)),
        "prune_tol": cfg.number("prune_tol", prune_tol, DEFAULT_PRUNE_TOL),
    }
    poly = detector_expansion(graph, **resolved)
    fmt = _format(cfg, fmt)
    if fmt == OutputFormat.text:
        text = poly.to_text() + "\n"
    else:
        text = render(poly.to_frame(), fmt, cfg.effective(**resolved, **graph_params))
    emit(text, cfg.get("out", out))


@app.command("weakvalues")
@handle_errors
def weakvalues(
    config: Optional[str] = _config_option(),
    stage: Optional[int] = _stage_option(),
    layout: Optional[str] = _layout_option(),
    detector: Optional[str] = _detector_option(),
    cut: Optional[str] = typer.Option(None, "--cut", help="Comma-separated complete cut, e.g. A,B,C."),
    chain: Optional[str] = typer.Option(None, "--chain", help="Ordered mirrors of a sequential weak value, e.g. E,A,F."),
    fmt: Optional[OutputFormat] = _format_option(),
    out: Optional[str] = _out_option(),
    quiet: bool = _quiet_option(),
    inner_phase: Optional[float] = _inner_phase_option(),
    outer_split: Optional[float] = _outer_split_option(),
    inner_split: Optional[float] = _inner_split_option(),
):
    """ Weak values of the mirror projectors, per path and for the whole detector. """
    cfg = _setup("weakvalues", config, stage, quiet)
    graph, graph_params = load_graph(cfg, layout, inner_phase, outer_split, inner_split)
    detector = cfg.get("detector", detector, "D")
    result = weak_values(graph, detector)
    frame = result.to_frame()
    cut_symbols = _symbol_list(cfg.get("cut", cut))
    chain_symbols = _symbol_list(cfg.get("chain", chain))
    extra = []
    if cut_symbols:
        value = completeness_check(two_state_vector(graph, detector), cut_symbols)
        extra.append({"kind": "completeness", "key": ",".join(cut_symbols), "re": value.real, "im": value.imag})
    if chain_symbols:
        value = sequential_weak_value(two_state_vector(graph, detector), chain_symbols)
        extra.append({"kind": "sequential", "key": ",".join(chain_symbols), "re": value.real, "im": value.imag})
    if extra:
        frame = pd.concat([frame, pd.DataFrame(extra, columns=frame.columns)], ignore_index=True)
    fmt = _format(cfg, fmt)
    emit(render(frame, fmt, cfg.effective(detector=detector, cut=cut_symbols, chain=chain_symbols, **graph_params)),
         cfg.get("out", out))


@app.command("pointer-shift")
@handle_errors
def pointer_shift(
    config: Optional[str] = _config_option(),
    stage: Optional[int] = _stage_option(),
    layout: Optional[str] = _layout_option(),
    detector: Optional[str] = _detector_option(),
    g: Optional[str] = typer.Option(None, "--g", help="Comma-separated couplings (default 1e-2,1e-3,1e-4)."),
    sigma: Optional[float] = typer.Option(None, "--sigma", help="Pointer width (default 1)."),
    workers: Optional[int] = typer.Option(None, "--workers", "-n", help="Processes used for the g values."),
    oracle: bool = typer.Option(False, "--oracle", help="Add the 2048-point grid evaluation of every mean."),
    branches: bool = typer.Option(False, "--branches", help="Print the per-path branch state at the first g."),
    slopes: bool = typer.Option(False, "--slopes", help="Print the log-log residual slope per mirror."),
    fmt: Optional[OutputFormat] = _format_option(),
    out: Optional[str] = _out_option(),
    quiet: bool = _quiet_option(),
    inner_phase: Optional[float] = _inner_phase_option(),
    outer_split: Optional[float] = _outer_split_option(),
    inner_split: Optional[float] = _inner_split_option(),
):
    """ Exact post-selected pointer shifts against g Re(P_w). """
    cfg = _setup("pointer-shift", config, stage, quiet)
    graph, graph_params = load_graph(cfg, layout, inner_phase, outer_split, inner_split)
    resolved = {
        "detector": cfg.get("detector", detector, "D"),
        "g": cfg.numbers("g", g, DEFAULT_G_VALUES),
        "sigma": cfg.number("sigma", sigma, 1.0),
        "workers": int(cfg.get("workers", workers, 1)),
    }
    g_values = [value * resolved["sigma"] for value in resolved["g"]]
    if branches:
        frame = evolve_exact(graph, g_values[0], resolved["sigma"]).to_frame()
    else:
        frame = shift_vs_weakvalue(graph, resolved["detector"], g_values, resolved["sigma"], resolved["workers"])
        if oracle or cfg.get("oracle", None, False):
            grid = []
            for value in g_values:
                stats = grid_post_select_stats(evolve_exact(graph, value, resolved["sigma"]), resolved["detector"])
                grid.extend(stats.mean_shift[m] for m in stats.mean_shift)
            frame["grid_mean_shift"] = grid
            frame["grid_difference"] = (frame["grid_mean_shift"] - frame["mean_shift"]).abs()
        if slopes:
            frame = residual_slopes(frame)
    fmt = _format(cfg, fmt)
    emit(render(frame, fmt, cfg.effective(**resolved, **graph_params)), cfg.get("out", out))


@app.command("spectrum")
@handle_errors
def spectrum(
    config: Optional[str] = _config_option(),
    stage: Optional[int] = _stage_option(),
    layout: Optional[str] = _layout_option(),
    detector: Optional[str] = _detector_option(),
    mode: Optional[SpectrumMode] = typer.Option(None, "--mode", help="exact or first-order signal model."),
    delta: Optional[float] = typer.Option(None, "--delta", help="Tilt amplitude of every mirror, in pointer widths."),
    sample_rate: Optional[float] = typer.Option(None, "--sample-rate", help="Samples per second."),
    duration: Optional[float] = typer.Option(None, "--duration", help="Record length in seconds."),
    scaling: bool = typer.Option(False, "--scaling", help="Fit peak power against delta instead."),
    deltas: Optional[str] = typer.Option(None, "--deltas", help="Comma-separated deltas for --scaling, in pointer widths."),
    workers: Optional[int] = typer.Option(None, "--workers", "-n", help="Processes used for the exact signal."),
    signal_out: Optional[str] = typer.Option(None, "--signal-out", help="Write the centroid time series here."),
    spectrum_out: Optional[str] = typer.Option(None, "--spectrum-out", help="Write the full power spectrum here."),
    fmt: Optional[OutputFormat] = _format_option(),
    out: Optional[str] = _out_option(),
    quiet: bool = _quiet_option(),
    inner_phase: Optional[float] = _inner_phase_option(),
    outer_split: Optional[float] = _outer_split_option(),
    inner_split: Optional[float] = _inner_split_option(),
):
    """ Peak power of every mirror line in the post-selected centroid spectrum. """
    cfg = _setup("spectrum", config, stage, quiet)
    graph, graph_params = load_graph(cfg, layout, inner_phase, outer_split, inner_split)
    detector = cfg.get("detector", detector, "D")
    sigma = cfg.number("sigma", None, 1.0)
    osc = OscillationConfig.from_graph(
        graph,
        delta=cfg.number("delta", delta, 0.05),
        mode=SpectrumMode(cfg.get("mode", mode, SpectrumMode.exact)),
        sample_rate=cfg.number("sample_rate", sample_rate, 1024.0),
        duration=cfg.number("duration", duration, 1.0),
    )
    osc.frequencies.update(_per_mirror(cfg, "frequencies", osc.frequencies))
    osc.tilts.update(_per_mirror(cfg, "tilts", osc.tilts))
    # tilts are given in pointer widths, like the couplings of pointer-shift
    osc.tilts = {s: value * sigma for s, value in osc.tilts.items()}
    osc.sigma = sigma
    osc.workers = int(cfg.get("workers", workers, 1))
    header = cfg.effective(
        detector=detector,
        mode=osc.mode,
        sample_rate=osc.sample_rate,
        duration=osc.duration,
        frequencies=osc.frequencies,
        tilts=osc.tilts,
        **graph_params,
    )
    fmt = _format(cfg, fmt)

    if scaling or cfg.get("scaling", None, False):
        values = cfg.numbers("deltas", deltas, DEFAULT_DELTAS)
        frame = peak_scaling(graph, osc, [value * sigma for value in values], detector)
        emit(render(frame, fmt, dict(header, deltas=values)), cfg.get("out", out))
        return

    trace, result = spectrum_for(graph, osc, detector)
    lines = spectrum_lines(osc)
    reference = result.peak_power.get("C")
    frame = pd.DataFrame(
        [
            {
                "line": name,
                "freq": lines[name],
                "peak_power": power,
                "relative_to_C": power / reference if reference else float("nan"),
            }
            for name, power in result.peak_power.items()
        ],
        columns=["line", "freq", "peak_power", "relative_to_C"],
    )
    signal_path = cfg.path("signal_out", signal_out)
    if signal_path is not None:
        write_csv(trace.to_frame(), signal_path, header)
    spectrum_path = cfg.path("spectrum_out", spectrum_out)
    if spectrum_path is not None:
        write_csv(result.to_frame(), spectrum_path, header)
    emit(render(frame, fmt, header), cfg.get("out", out))


@app.command("propagator-check")
@handle_errors
def propagator_check(
    config: Optional[str] = _config_option(),
    stage: Optional[int] = _stage_option(),
    semigroup_tol: Optional[float] = typer.Option(None, "--semigroup-tol", help="Composition tolerance."),
    born_tol: Optional[float] = typer.Option(None, "--born-tol", help="Born vs oracle relative tolerance."),
    linearity_tol: Optional[float] = typer.Option(None, "--linearity-tol", help="Born linearity tolerance."),
    slicing_tol: Optional[float] = typer.Option(None, "--slicing-tol", help="Time-slicing tolerance."),
    unitarity_tol: Optional[float] = typer.Option(None, "--unitarity-tol", help="Oracle norm drift tolerance."),
    steps: Optional[int] = typer.Option(None, "--steps", help=f"Split-step steps in the kick (default {DEFAULT_STEPS})."),
    export: Optional[str] = typer.Option(None, "--export", help="Write the oracle wavefunction (x, re, im) here."),
    strict: bool = typer.Option(False, "--strict", help="Exit with code 3 when a check fails."),
    fmt: Optional[OutputFormat] = _format_option(),
    out: Optional[str] = _out_option(),
    quiet: bool = _quiet_option(),
):
    """ Semigroup, Born-series, time-slicing and oracle checks of the propagator toolkit. """
    cfg = _setup("propagator-check", config, stage, quiet)
    resolved = {
        "semigroup_tol": cfg.number("semigroup_tol", semigroup_tol, 1e-8),
        "born_tol": cfg.number("born_tol", born_tol, 1e-2),
        "linearity_tol": cfg.number("linearity_tol", linearity_tol, 1e-9),
        "slicing_tol": cfg.number("slicing_tol", slicing_tol, 1e-10),
        "unitarity_tol": cfg.number("unitarity_tol", unitarity_tol, 1e-10),
        "steps": int(cfg.get("steps", steps, DEFAULT_STEPS)),
    }
    scenario = BornScenario()
    results = run_checks(scenario, **resolved)
    export_path = cfg.path("export", export)
    if export_path is not None:
        wave = schrodinger_oracle(scenario.packet, scenario.kick, scenario.t_b, scenario.t_a, steps=resolved["steps"])
        write_csv(wave.to_frame(), export_path, cfg.effective(**resolved))
    fmt = _format(cfg, fmt)
    if fmt == OutputFormat.text:
        text = "".join(
            f"{r.status} {r.name} {r.value:.3e} (tolerance {r.tolerance:.1e}) {r.detail}\n" for r in results
        )
    else:
        text = render(results_frame(results), fmt, cfg.effective(**resolved))
    emit(text, cfg.get("out", out))
    if (strict or cfg.get("strict", None, False)) and not all(r.passed for r in results):
        raise typer.Exit(code=3)


def entry_point():
    app()


if __name__ == "__main__":
    entry_point()
