import numpy as np
import pytest

from wmzi.errors import GridResolutionError, NonPositiveTimeError
from wmzi.oracle import schrodinger_oracle
from wmzi.potential import LocalizedKick
from wmzi.propagator import GaussianPacket

PACKET = GaussianPacket(x0=0.0, k0=0.5, sigma=1.0)
KICK = LocalizedKick(center=0.25, time=0.5, strength=0.5, width=0.5, duration=0.2)


def test_free_evolution_is_exact():
    result = schrodinger_oracle(PACKET, None, 2.0)

    assert result.steps == 0
    assert np.max(np.abs(result.psi - PACKET(result.x, 2.0))) < 1e-10
    assert result.transition_probability(PACKET) == pytest.approx(1.0, abs=1e-10)


def test_kick_outside_the_run_is_free():
    late = LocalizedKick(center=0.0, time=5.0, strength=1.0, width=1.0)
    result = schrodinger_oracle(PACKET, late, 1.0)
    assert result.steps == 0


def test_kick_keeps_the_norm():
    result = schrodinger_oracle(PACKET, KICK, 1.0, steps=500)

    assert result.steps == 500
    assert result.norm_drift < 1e-10
    assert result.norm() == pytest.approx(1.0, abs=1e-10)


def test_kick_lowers_the_return_probability():
    p = schrodinger_oracle(PACKET, KICK, 1.0).transition_probability(PACKET)
    assert 0.9 < p < 1.0


def test_frame():
    frame = schrodinger_oracle(PACKET, None, 0.5).to_frame()
    assert list(frame.columns) == ["x", "re", "im"]
    assert len(frame) == 4096


def test_grid_checks():
    with pytest.raises(GridResolutionError):
        schrodinger_oracle(PACKET, None, 1.0, points=256)
    with pytest.raises(GridResolutionError):
        schrodinger_oracle(GaussianPacket(k0=200.0), None, 1.0)
    with pytest.raises(GridResolutionError):
        schrodinger_oracle(PACKET, None, 100.0)
    with pytest.raises(NonPositiveTimeError):
        schrodinger_oracle(PACKET, None, 0.0)
