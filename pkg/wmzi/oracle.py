"""Split-step Fourier reference solution of the 1D Schroedinger equation.

Outside the potential's window the free evolution is applied exactly in one
momentum-space step; inside it the evolution uses Strang splitting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd
from scipy import fft
from structlog import get_logger

from wmzi.errors import GridResolutionError, NonPositiveTimeError
from wmzi.potential import Potential
from wmzi.propagator import GaussianPacket

log = get_logger(__name__)

DEFAULT_POINTS = 4096
DEFAULT_SPAN = 80.0
DEFAULT_STEPS = 1000
MIN_POINTS_PER_SIGMA = 16
# momentum and position tails are resolved out to this many standard deviations
TAIL = 8.0


@dataclass
class OracleResult:
    x: np.ndarray
    psi: np.ndarray
    t_final: float
    steps: int
    norm_drift: float

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.dx)

    def overlap(self, target: GaussianPacket) -> complex:
        """ <target(t_final)|psi> on the grid """
        return complex(np.sum(np.conj(target(self.x, self.t_final)) * self.psi) * self.dx)

    def transition_probability(self, target: GaussianPacket) -> float:
        return abs(self.overlap(target)) ** 2

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.x, "re": self.psi.real, "im": self.psi.imag})


def _grid(initial: GaussianPacket, t_initial: float, t_final: float, points: int, span: float) -> np.ndarray:
    dx = span / points
    if initial.sigma / dx < MIN_POINTS_PER_SIGMA:
        raise GridResolutionError(
            f"grid spacing {dx:.3g} gives {initial.sigma / dx:.1f} points per sigma, need {MIN_POINTS_PER_SIGMA}"
        )
    k_max = math.pi / dx
    if abs(initial.k0) + TAIL / (2 * initial.sigma) >= k_max:
        raise GridResolutionError(f"momentum {initial.k0} is not resolved below the grid Nyquist {k_max:.3g}")
    start, end = initial.center(t_initial), initial.center(t_final)
    center = 0.5 * (start + end)
    reach = 0.5 * abs(end - start) + TAIL * max(initial.width(t_initial), initial.width(t_final))
    if reach >= span / 2:
        raise GridResolutionError(f"packet reaches {reach:.3g} from the grid centre, grid half-span is {span / 2}")
    return center + (np.arange(points) - points // 2) * dx


def schrodinger_oracle(
    initial: GaussianPacket,
    potential: Optional[Potential],
    t_final: float,
    t_initial: Optional[float] = None,
    points: int = DEFAULT_POINTS,
    span: float = DEFAULT_SPAN,
    steps: int = DEFAULT_STEPS,
) -> OracleResult:
    t_initial = initial.t0 if t_initial is None else t_initial
    if not t_final > t_initial:
        raise NonPositiveTimeError(f"oracle needs t_final > t_initial, got {t_initial} -> {t_final}")
    x = _grid(initial, t_initial, t_final, points, span)
    dx = x[1] - x[0]
    k = 2 * np.pi * fft.fftfreq(points, d=dx)
    psi = initial(x, t_initial).astype(complex)
    norm0 = float(np.sum(np.abs(psi) ** 2) * dx)

    def free(psi: np.ndarray, tau: float) -> np.ndarray:
        if tau <= 0:
            return psi
        return fft.ifft(fft.fft(psi) * np.exp(-0.5j * k**2 * tau))

    taken = 0
    if potential is None:
        psi = free(psi, t_final - t_initial)
    else:
        t0, t1 = potential.window()
        t0, t1 = max(t0, t_initial), min(t1, t_final)
        if t1 <= t0:
            psi = free(psi, t_final - t_initial)
        else:
            psi = free(psi, t0 - t_initial)
            dt = (t1 - t0) / steps
            half = np.exp(-0.25j * k**2 * dt)
            for n in range(steps):
                t_mid = t0 + (n + 0.5) * dt
                psi = fft.ifft(half * fft.fft(psi))
                psi = psi * np.exp(-1j * potential.value(x, t_mid) * dt)
                psi = fft.ifft(half * fft.fft(psi))
            taken = steps
            psi = free(psi, t_final - t1)

    result = OracleResult(x, psi, t_final, taken, 0.0)
    result.norm_drift = abs(result.norm() - norm0)
    log.debug("ran split-step oracle", points=points, steps=taken, norm_drift=result.norm_drift)
    return result
