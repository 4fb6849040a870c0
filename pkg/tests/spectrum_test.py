import math

import numpy as np
import pytest

from wmzi.errors import DarkPortZeroNormError, EmptySignalError, NyquistError, OscillationConfigError, ValidationError
from wmzi.interferometer import build_nested_mzi
from wmzi.layout import load_layout
from wmzi.spectrum import (
    OscillationConfig,
    SpectrumMode,
    _fill_skipped,
    peak_scaling,
    power_spectrum,
    simulate_signal,
    spectrum_for,
    spectrum_lines,
)
from wmzi.tsvf import weak_values

from run_wmzi import LAYOUTS

DELTA = 0.05
DELTAS = [0.1, 0.05, 0.02, 0.01]


def test_bin_centred_sine_peak():
    t = np.arange(1024) / 1024
    result = power_spectrum(0.3 * np.sin(2 * np.pi * 71 * t), 1024, {"C": 71})
    assert result.peak_power["C"] == pytest.approx(0.3**2 / 4, rel=1e-9)


def test_power_sums_to_windowed_mean_square():
    rng = np.random.default_rng(7)
    result = power_spectrum(rng.normal(size=1000), 1000.0)

    assert result.freqs.size == 513
    assert result.power.sum() == pytest.approx(result.windowed_mean_square, rel=1e-10)


def test_short_signal():
    with pytest.raises(EmptySignalError):
        power_spectrum(np.zeros(8), 1024)


def test_lines_include_intermodulation():
    lines = spectrum_lines(OscillationConfig.default())
    assert lines["E+F"] == 228.0
    assert list(lines) == ["A", "B", "C", "E", "F", "E+F"]


def test_first_order_peaks_follow_weak_values():
    for phase in (math.pi, math.pi / 2):
        G = build_nested_mzi(inner_phase=phase)
        cfg = OscillationConfig.default(DELTA, SpectrumMode.first_order)
        _, result = spectrum_for(G, cfg)
        expected = weak_values(G, "D").per_mirror
        for mirror, value in expected.items():
            assert result.peak_power[mirror] == pytest.approx((DELTA * value.real) ** 2 / 4, rel=1e-6, abs=1e-20)


def test_exact_signal_close_to_first_order():
    G = build_nested_mzi()
    exact = simulate_signal(G, OscillationConfig.default(0.01, SpectrumMode.exact))
    first = simulate_signal(G, OscillationConfig.default(0.01, SpectrumMode.first_order))

    assert exact.skipped.size == 0
    assert np.max(np.abs(exact.centroid - first.centroid)) < 1e-3


def test_dark_arm_lines_are_suppressed():
    _, result = spectrum_for(build_nested_mzi(), OscillationConfig.default(DELTA))
    peaks = result.peak_power

    assert peaks["C"] == pytest.approx(DELTA**2 / 4, rel=0.05)
    for line in ("E", "F", "E+F"):
        assert peaks[line] <= 1e-3 * peaks["C"]


def test_misaligned_lines_all_show():
    G = build_nested_mzi(inner_phase=math.pi / 2)
    _, result = spectrum_for(G, OscillationConfig.default(DELTA, SpectrumMode.exact))
    peaks = result.peak_power

    for line in ("A", "B", "E", "F"):
        assert peaks[line] > 1e-2 * peaks["C"]
    assert peaks["C"] > 0


def test_pooled_signal_matches_serial():
    G = build_nested_mzi(inner_phase=math.pi / 2)
    cfg = OscillationConfig.default(DELTA)
    serial = simulate_signal(G, cfg)
    cfg.workers = 3
    pooled = simulate_signal(G, cfg)
    assert np.allclose(serial.centroid, pooled.centroid, rtol=1e-12, atol=1e-15)


def test_peak_scaling_dark_tuned():
    slopes = peak_scaling(build_nested_mzi(), OscillationConfig.default(), DELTAS).set_index("line")

    for mirror in ("A", "B", "C"):
        assert slopes.loc[mirror, "slope"] == pytest.approx(2.0, abs=0.2)
    # the dark arm only appears through odd products of three couplings
    assert slopes.loc["E", "slope"] == pytest.approx(6.0, abs=0.3)
    assert 3.7 <= slopes.loc["F", "slope"] <= 6.5


def test_peak_scaling_misaligned():
    slopes = peak_scaling(build_nested_mzi(inner_phase=math.pi / 2), OscillationConfig.default(), DELTAS)
    slopes = slopes.set_index("line")

    assert slopes.loc["E", "slope"] == pytest.approx(2.0, abs=0.2)
    assert slopes.loc["E", "peak_at_max_delta"] > 1e-4


def test_peak_scaling_arguments():
    G = build_nested_mzi()
    with pytest.raises(ValidationError):
        peak_scaling(G, OscillationConfig.default(), [0.1, 0.05, 0.02])
    with pytest.raises(ValidationError):
        peak_scaling(G, OscillationConfig.default(), [0.1, 0.08, 0.06, 0.05])
    with pytest.raises(OscillationConfigError):
        peak_scaling(G, OscillationConfig.default(mode=SpectrumMode.first_order), DELTAS)


def test_nyquist():
    with pytest.raises(NyquistError):
        simulate_signal(build_nested_mzi(), OscillationConfig.default(sample_rate=200.0))


def test_too_few_cycles():
    with pytest.raises(OscillationConfigError):
        simulate_signal(build_nested_mzi(), OscillationConfig.default(duration=0.1))


def test_layout_frequencies():
    cfg = OscillationConfig.from_graph(load_layout(LAYOUTS / "single_arm.layout"), delta=0.01)

    assert cfg.frequencies == {"A": 37.0, "C": 71.0}
    assert cfg.tilts == {"A": 0.01, "C": 0.02}


def test_isolated_dark_samples_are_interpolated():
    times = np.arange(20, dtype=float)
    centroid = times.copy()
    bad = np.zeros(20, dtype=bool)
    bad[[4, 9]] = True
    centroid[bad] = np.nan

    skipped = _fill_skipped(times, centroid, bad)

    assert skipped.tolist() == [4, 9]
    assert centroid[4] == 4.0


def test_adjacent_dark_samples():
    times = np.arange(20, dtype=float)
    bad = np.zeros(20, dtype=bool)
    bad[[4, 5]] = True
    with pytest.raises(DarkPortZeroNormError):
        _fill_skipped(times, times.copy(), bad)
