from __future__ import annotations

import dataclasses
import math
from abc import abstractmethod
from dataclasses import dataclass
from typing import Protocol, Tuple

import numpy as np

from wmzi.errors import PotentialError


class Potential(Protocol):
    """ A potential V(x, t) that is switched on only inside a time window """

    @abstractmethod
    def window(self) -> Tuple[float, float]:
        """ (t_start, t_end) of the active period """
        raise NotImplementedError

    @abstractmethod
    def value(self, x: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def scaled(self, factor: float) -> Potential:
        raise NotImplementedError


@dataclass(frozen=True)
class LocalizedKick:
    """ Gaussian bump strength * exp(-(x - center)^2 / (2 width^2)), on for duration around time """
    center: float
    time: float
    strength: float
    width: float
    duration: float = 0.2

    def __post_init__(self):
        for name in ("center", "time", "strength", "width", "duration"):
            if not math.isfinite(getattr(self, name)):
                raise PotentialError(f"kick {name} must be finite")
        if self.width <= 0:
            raise PotentialError(f"kick width must be positive, got {self.width}")
        if self.duration <= 0:
            raise PotentialError(f"kick duration must be positive, got {self.duration}")

    @property
    def area(self) -> float:
        """ strength * width * duration, the weak-kick scale """
        return self.strength * self.width * self.duration

    def window(self) -> Tuple[float, float]:
        return self.time - self.duration / 2, self.time + self.duration / 2

    def value(self, x: np.ndarray, t: float) -> np.ndarray:
        x = np.asarray(x)
        t0, t1 = self.window()
        if not t0 <= t <= t1:
            return np.zeros(x.shape)
        return self.strength * np.exp(-((x - self.center) ** 2) / (2 * self.width**2))

    def scaled(self, factor: float) -> LocalizedKick:
        return dataclasses.replace(self, strength=self.strength * factor)


@dataclass(frozen=True)
class GridPotential:
    """ Sampled V(x), linearly interpolated, zero outside the samples and the window """
    x: Tuple[float, ...]
    values: Tuple[float, ...]
    t_start: float
    t_end: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.size < 2 or x.shape != v.shape:
            raise PotentialError("grid potential needs matching 1D sample arrays of length >= 2")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise PotentialError("grid potential samples must be finite")
        if np.any(np.diff(x) <= 0):
            raise PotentialError("grid positions must be strictly increasing")
        if not self.t_end > self.t_start:
            raise PotentialError("grid potential window must have t_end > t_start")

    @staticmethod
    def from_arrays(x, values, t_start: float, t_end: float) -> GridPotential:
        return GridPotential(tuple(float(v) for v in x), tuple(float(v) for v in values), t_start, t_end)

    def window(self) -> Tuple[float, float]:
        return self.t_start, self.t_end

    def value(self, x: np.ndarray, t: float) -> np.ndarray:
        x = np.asarray(x)
        if not self.t_start <= t <= self.t_end:
            return np.zeros(x.shape)
        return np.interp(np.real(x), self.x, self.values, left=0.0, right=0.0)

    def scaled(self, factor: float) -> GridPotential:
        return dataclasses.replace(self, values=tuple(v * factor for v in self.values))
