"""Oscillating-mirror signal at a post-selection detector and its power spectrum.

Every coupled mirror oscillates at its own frequency, g_n(t) = delta_n sin(2 pi f_n t).
The detector reads the sum of the post-selected pointer means, so a mirror the
photon visited shows up as a line at its frequency.
"""
from __future__ import annotations

import dataclasses
import multiprocessing as mp
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import fft
from scipy.signal.windows import hann
from structlog import get_logger

from wmzi.errors import (
    DarkPortZeroNormError,
    EmptySignalError,
    NyquistError,
    OscillationConfigError,
    ValidationError,
)
from wmzi.interferometer import MIRROR_SYMBOLS, InterferometerGraph
from wmzi.pointer import conditional_means, evolve_exact
from wmzi.tsvf import weak_values

log = get_logger(__name__)

# bin-centred over a 1 s record and free of 2:1 ratios, so E+F = 228 Hz is clear of every line
DEFAULT_FREQUENCIES = {"A": 37.0, "B": 53.0, "C": 71.0, "E": 97.0, "F": 131.0}
DEFAULT_SAMPLE_RATE = 1024.0
DEFAULT_DURATION = 1.0
DEFAULT_DELTA = 0.05
MIN_CYCLES = 8
MIN_SAMPLES = 16
INTERMODULATION = ("E", "F")


class SpectrumMode(str, Enum):
    first_order = "first-order"
    exact = "exact"


@dataclass
class OscillationConfig:
    frequencies: Dict[str, float]
    tilts: Dict[str, float]
    sample_rate: float = DEFAULT_SAMPLE_RATE
    duration: float = DEFAULT_DURATION
    mode: SpectrumMode = SpectrumMode.exact
    sigma: float = 1.0
    workers: int = 1

    @staticmethod
    def default(
        delta: float = DEFAULT_DELTA,
        mode: SpectrumMode = SpectrumMode.exact,
        sample_rate: float = DEFAULT_SAMPLE_RATE,
        duration: float = DEFAULT_DURATION,
        symbols: Sequence[str] = MIRROR_SYMBOLS,
    ) -> OscillationConfig:
        return OscillationConfig(
            frequencies={s: DEFAULT_FREQUENCIES[s] for s in symbols},
            tilts={s: delta for s in symbols},
            sample_rate=sample_rate,
            duration=duration,
            mode=SpectrumMode(mode),
        )

    @staticmethod
    def from_graph(graph: InterferometerGraph, delta: float = DEFAULT_DELTA, **kwargs) -> OscillationConfig:
        """ Defaults for every coupled mirror, overridden by freq= and tilt= from the layout """
        cfg = OscillationConfig.default(delta=delta, symbols=list(graph.probes), **kwargs)
        for symbol, label in graph.probes.items():
            element = graph.elements[label]
            if element.frequency is not None:
                cfg.frequencies[symbol] = element.frequency
            if element.tilt is not None:
                cfg.tilts[symbol] = element.tilt
        return cfg

    def with_delta(self, delta: float) -> OscillationConfig:
        return dataclasses.replace(self, tilts={s: delta for s in self.tilts})

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.sample_rate

    def validate(self, symbols: Optional[Sequence[str]] = None) -> None:
        if not self.sample_rate > 0 or not self.duration > 0:
            raise OscillationConfigError("sample rate and duration must be positive")
        if self.sigma <= 0:
            raise OscillationConfigError("pointer width sigma must be positive")
        if set(self.tilts) != set(self.frequencies):
            raise OscillationConfigError("every oscillating mirror needs both a frequency and a tilt")
        for symbol in symbols or ():
            if symbol not in self.frequencies:
                raise OscillationConfigError(f"no oscillation frequency for mirror {symbol}")
        values = list(self.frequencies.values())
        if len(set(values)) != len(values):
            raise OscillationConfigError(f"mirror frequencies must be distinct: {self.frequencies}")
        for symbol, f in self.frequencies.items():
            if f <= 0:
                raise OscillationConfigError(f"frequency of {symbol} must be positive")
            if self.duration * f < MIN_CYCLES:
                raise OscillationConfigError(
                    f"{symbol} at {f} Hz completes fewer than {MIN_CYCLES} cycles in {self.duration} s"
                )
        if self.sample_rate <= 2 * max(values, default=0.0):
            raise NyquistError(f"sample rate {self.sample_rate} Hz does not exceed twice {max(values)} Hz")
        if self.n_samples < MIN_SAMPLES:
            raise OscillationConfigError(f"record holds {self.n_samples} samples, need at least {MIN_SAMPLES}")

    def couplings(self, symbols: Sequence[str]) -> np.ndarray:
        """ g_n(t) for every sample, shape (T, N) """
        t = self.times()[:, None]
        f = np.array([self.frequencies[s] for s in symbols])[None, :]
        delta = np.array([self.tilts[s] for s in symbols])[None, :]
        return delta * np.sin(2 * np.pi * f * t)


@dataclass
class SignalTrace:
    times: np.ndarray
    centroid: np.ndarray
    skipped: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def to_frame(self) -> pd.DataFrame:
        flags = np.zeros(self.times.size, dtype=bool)
        flags[self.skipped] = True
        return pd.DataFrame({"time": self.times, "centroid": self.centroid, "skipped": flags})


@dataclass
class SpectrumResult:
    freqs: np.ndarray
    power: np.ndarray
    peak_power: Dict[str, float]
    windowed_mean_square: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"freq": self.freqs, "power": self.power})

    def peaks_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"line": k, "peak_power": v} for k, v in self.peak_power.items()], columns=["line", "peak_power"]
        )


def _fill_skipped(times: np.ndarray, centroid: np.ndarray, bad: np.ndarray) -> np.ndarray:
    skipped = np.flatnonzero(bad)
    if skipped.size == 0:
        return skipped
    if skipped.size == centroid.size or np.any(np.diff(skipped) == 1):
        raise DarkPortZeroNormError(
            f"post-selection weight vanishes on {skipped.size} samples, not all of them isolated"
        )
    good = ~bad
    centroid[bad] = np.interp(times[bad], times[good], centroid[good])
    log.warning("skipped dark samples", count=int(skipped.size), first=float(times[skipped[0]]))
    return skipped


def simulate_signal(graph: InterferometerGraph, cfg: OscillationConfig, detector: str = "D") -> SignalTrace:
    """ Centroid time series at the detector

    First-order mode sums g_n(t) Re(P_n)_w. Exact mode sums the post-selected pointer
    means; samples whose post-selection weight vanishes are interpolated and flagged.
    """
    graph.require_detector(detector)
    symbols = list(graph.probes)
    cfg.validate(symbols)
    times = cfg.times()
    g = cfg.couplings(symbols)

    if cfg.mode == SpectrumMode.first_order:
        result = weak_values(graph, detector)
        prediction = np.array([result.per_mirror[s].real for s in symbols])
        return SignalTrace(times, g @ prediction)

    state = evolve_exact(graph, 0.0, cfg.sigma)
    branches = state.branches_to(detector)
    if branches.size == 0:
        raise ValidationError(f"no path reaches {detector}")
    on_path = _membership(graph, state, branches)
    shifts = g[:, None, :] * on_path[None, :, :]
    amplitudes = state.amplitudes[branches]
    if cfg.workers > 1:
        chunks = np.array_split(shifts, cfg.workers)
        with mp.Pool(cfg.workers) as pool:
            parts = pool.starmap(conditional_means, [(amplitudes, chunk, state.sigma) for chunk in chunks])
        means = np.concatenate([m for m, _ in parts])
        norms = np.concatenate([n for _, n in parts])
    else:
        means, norms = conditional_means(amplitudes, shifts, state.sigma)
    centroid = np.nansum(means, axis=-1)
    bad = np.abs(norms) < 1e-14
    skipped = _fill_skipped(times, centroid, bad)
    log.info("simulated signal", detector=detector, mode=cfg.mode.value, samples=times.size)
    return SignalTrace(times, centroid, skipped)


def _membership(graph: InterferometerGraph, state, branches: np.ndarray) -> np.ndarray:
    """ 1.0 where the branch passes the mirror, shape (K, N) """
    marks = np.zeros((branches.size, len(state.mirrors)))
    for row, k in enumerate(branches):
        visited = set(state.paths[k].mirrors(graph))
        for n, symbol in enumerate(state.mirrors):
            marks[row, n] = 1.0 if symbol in visited else 0.0
    return marks


def power_spectrum(
    signal: Sequence[float], sample_rate: float, lines: Optional[Mapping[str, float]] = None
) -> SpectrumResult:
    """ Hann-windowed one-sided periodogram

    The record is zero-padded to the next power of two M. power sums to the mean square
    of the windowed signal. peak_power at a line is |Y_k|^2 / (sum w)^2 in the nearest
    bin, which is a^2/4 for a bin-centred sinusoid of amplitude a.
    """
    x = np.asarray(signal, dtype=float)
    if x.size < MIN_SAMPLES:
        raise EmptySignalError(f"signal holds {x.size} samples, need at least {MIN_SAMPLES}")
    if not sample_rate > 0:
        raise ValidationError("sample rate must be positive")
    n = x.size
    m = 1 << (n - 1).bit_length()
    w = hann(n, sym=False)
    windowed = x * w
    spectrum = fft.rfft(windowed, n=m)
    freqs = fft.rfftfreq(m, d=1.0 / sample_rate)
    magnitude = np.abs(spectrum) ** 2
    power = magnitude / (n * m)
    power[1:] *= 2
    if m % 2 == 0:
        power[-1] /= 2

    gain = np.sum(w) ** 2
    peak_power = {}
    for name, f in (lines or {}).items():
        k = int(np.argmin(np.abs(freqs - f)))
        peak_power[name] = float(magnitude[k] / gain)
    return SpectrumResult(freqs, power, peak_power, float(np.mean(windowed**2)))


def spectrum_lines(cfg: OscillationConfig) -> Dict[str, float]:
    """ Mirror frequencies plus the E+F intermodulation line when both oscillate """
    lines = dict(cfg.frequencies)
    if all(s in cfg.frequencies for s in INTERMODULATION):
        lines["+".join(INTERMODULATION)] = sum(cfg.frequencies[s] for s in INTERMODULATION)
    return lines


def spectrum_for(
    graph: InterferometerGraph, cfg: OscillationConfig, detector: str = "D"
) -> Tuple[SignalTrace, SpectrumResult]:
    trace = simulate_signal(graph, cfg, detector)
    return trace, power_spectrum(trace.centroid, cfg.sample_rate, spectrum_lines(cfg))


def peak_scaling(
    graph: InterferometerGraph, cfg: OscillationConfig, deltas: Sequence[float], detector: str = "D"
) -> pd.DataFrame:
    """ Log-log slope of each line's peak power against delta, exact mode only """
    deltas = [float(d) for d in deltas]
    if len(deltas) < 4:
        raise ValidationError(f"need at least 4 delta values, got {len(deltas)}")
    if any(d <= 0 for d in deltas):
        raise ValidationError("delta values must be positive")
    if max(deltas) / min(deltas) < 10 * (1 - 1e-9):
        raise ValidationError("delta values must span at least one decade")
    if cfg.mode != SpectrumMode.exact:
        raise OscillationConfigError("peak scaling runs in exact mode")

    peaks: List[Dict[str, float]] = []
    for delta in deltas:
        _, result = spectrum_for(graph, cfg.with_delta(delta), detector)
        peaks.append(result.peak_power)
    rows = []
    for line in peaks[0]:
        values = np.array([p[line] for p in peaks])
        usable = values > 0
        if usable.sum() < 2:
            slope = float("nan")
        else:
            slope = float(np.polyfit(np.log(np.array(deltas)[usable]), np.log(values[usable]), 1)[0])
        rows.append({"line": line, "slope": slope, "peak_at_max_delta": float(values[int(np.argmax(deltas))])})
    log.info("fitted peak scaling", detector=detector, deltas=len(deltas))
    return pd.DataFrame(rows, columns=["line", "slope", "peak_at_max_delta"])
