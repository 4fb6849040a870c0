"""Gaussian pointers coupled to the mirror projectors of each path.

A photon travelling along path k shifts the pointer of every coupled mirror it
meets by g. The joint state is the branch sum over paths, each branch a product of
shifted real Gaussians, which keeps the model exact without a grid over all
pointers. Post-selected means then follow from Gaussian overlap moments.
"""
from __future__ import annotations

import math
import multiprocessing as mp
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from structlog import get_logger

from wmzi.errors import (
    NegativePhotonNumberError,
    UnknownMirrorSymbolError,
    ValidationError,
    ZeroNormError,
)
from wmzi.interferometer import InterferometerGraph, PathDescriptor, enumerate_paths, path_amplitude
from wmzi.tsvf import weak_values

log = get_logger(__name__)

ZERO_NORM = 1e-14
WEAKNESS_LIMIT = 0.3

PerMirror = Union[float, Mapping[str, float]]


@dataclass
class GaussianPointer:
    mirror: str
    sigma: float = 1.0
    mean: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError(f"pointer {self.mirror}: sigma must be positive, got {self.sigma}")

    def wavefunction(self, x: np.ndarray, shift: float = 0.0) -> np.ndarray:
        """ Real Gaussian amplitude centred at mean + shift, normalized in |psi|^2 """
        return (2 * math.pi * self.sigma**2) ** -0.25 * np.exp(
            -((x - self.mean - shift) ** 2) / (4 * self.sigma**2)
        )


@dataclass
class BranchPointerState:
    """ One branch per path: amplitude c_k and the shift left on each pointer """
    paths: List[PathDescriptor]
    amplitudes: np.ndarray
    pointers: List[GaussianPointer]
    shifts: np.ndarray

    @property
    def mirrors(self) -> Tuple[str, ...]:
        return tuple(p.mirror for p in self.pointers)

    @property
    def sigma(self) -> np.ndarray:
        return np.array([p.sigma for p in self.pointers], dtype=float)

    def branches_to(self, detector: str) -> np.ndarray:
        return np.array([i for i, p in enumerate(self.paths) if p.detector == detector], dtype=int)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for path, amplitude, shifts in zip(self.paths, self.amplitudes, self.shifts):
            row = {"path": str(path), "detector": path.detector, "re": amplitude.real, "im": amplitude.imag}
            row.update({f"shift_{m}": s for m, s in zip(self.mirrors, shifts)})
            rows.append(row)
        return pd.DataFrame(rows)


@dataclass
class ConditionalPointerStats:
    detector: str
    mean_shift: Dict[str, float]
    normalization: float
    means: Dict[str, float] = field(default_factory=dict)


def _per_mirror(value: PerMirror, symbols: Sequence[str], name: str, default: float) -> np.ndarray:
    if isinstance(value, Mapping):
        for key in value:
            if key not in symbols:
                raise UnknownMirrorSymbolError(f"{name} given for {key!r}, which is not a coupled mirror")
        return np.array([float(value.get(s, default)) for s in symbols], dtype=float)
    return np.full(len(symbols), float(value))


def evolve_exact(graph: InterferometerGraph, g: PerMirror, sigma: PerMirror = 1.0) -> BranchPointerState:
    """ Branch state after every path has coupled to its mirrors

    Parameters:
        g (float or dict)     : coupling, one value for all mirrors or per symbol (missing ones 0)
        sigma (float or dict) : pointer width, one value or per symbol (missing ones 1)
    """
    symbols = list(graph.probes)
    couplings = _per_mirror(g, symbols, "g", 0.0)
    widths = _per_mirror(sigma, symbols, "sigma", 1.0)
    if not np.all(np.isfinite(couplings)):
        raise ValidationError("g must be finite")
    pointers = [GaussianPointer(s, w) for s, w in zip(symbols, widths)]
    ratio = np.max(np.abs(couplings) / widths) if symbols else 0.0
    if ratio > WEAKNESS_LIMIT:
        log.warning("coupling is not weak", g_over_sigma=float(ratio), limit=WEAKNESS_LIMIT)

    paths = enumerate_paths(graph)
    amplitudes = np.array([path_amplitude(graph, p) for p in paths], dtype=complex)
    shifts = np.zeros((len(paths), len(symbols)))
    for k, path in enumerate(paths):
        on_path = set(path.mirrors(graph))
        for n, symbol in enumerate(symbols):
            if symbol in on_path:
                shifts[k, n] = couplings[n]
    return BranchPointerState(paths, amplitudes, pointers, shifts)


def conditional_means(
    amplitudes: np.ndarray, shifts: np.ndarray, sigma: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """ Post-selected mean shifts and norms from the analytic overlap moments

    amplitudes has shape (K,), shifts (..., K, N), sigma (N,). Returns means of shape
    (..., N), NaN where the norm vanishes, and norms of shape (...).
    """
    c = np.asarray(amplitudes, dtype=complex)
    s = np.asarray(shifts, dtype=float)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), s.shape[-1:])
    diff = s[..., :, None, :] - s[..., None, :, :]
    overlap = np.exp(-np.sum(diff**2 / (4 * sigma**2), axis=-1))
    weights = np.outer(c, c.conj()) * overlap
    norm = weights.sum(axis=(-2, -1)).real
    mid = (s[..., :, None, :] + s[..., None, :, :]) / 2
    first = np.einsum("...kl,...kln->...n", weights, mid).real
    ok = np.abs(norm)[..., None] >= ZERO_NORM
    means = np.divide(first, norm[..., None], out=np.full_like(first, np.nan), where=ok)
    return means, norm


def _stats(state: BranchPointerState, detector: str, means: np.ndarray, norm: float) -> ConditionalPointerStats:
    if abs(norm) < ZERO_NORM:
        raise ZeroNormError(f"post-selection weight at {detector} vanishes ({norm:.3g})")
    return ConditionalPointerStats(
        detector=detector,
        mean_shift=dict(zip(state.mirrors, (float(m) for m in means))),
        normalization=float(norm),
        means={p.mirror: p.mean + float(m) for p, m in zip(state.pointers, means)},
    )


def post_select_stats(state: BranchPointerState, detector: str) -> ConditionalPointerStats:
    branches = state.branches_to(detector)
    if branches.size == 0:
        raise ValidationError(f"no path reaches {detector}")
    means, norm = conditional_means(state.amplitudes[branches], state.shifts[branches], state.sigma)
    return _stats(state, detector, means, float(norm))


def grid_post_select_stats(
    state: BranchPointerState, detector: str, points: int = 2048, span: float = 8.0
) -> ConditionalPointerStats:
    """ Brute-force check of post_select_stats on a grid of +-span sigma per pointer """
    branches = state.branches_to(detector)
    if branches.size == 0:
        raise ValidationError(f"no path reaches {detector}")
    c = state.amplitudes[branches]
    s = state.shifts[branches]
    K, N = s.shape
    # per pointer: I[n, k, l] = <G_k|G_l>, J[n, k, l] = <G_k|x - mean|G_l>
    I = np.empty((N, K, K))
    J = np.empty((N, K, K))
    for n, pointer in enumerate(state.pointers):
        x = np.linspace(pointer.mean - span * pointer.sigma, pointer.mean + span * pointer.sigma, points)
        waves = np.array([pointer.wavefunction(x, shift) for shift in s[:, n]])
        products = waves[:, None, :] * waves[None, :, :]
        I[n] = trapezoid(products, x, axis=-1)
        J[n] = trapezoid(products * (x - pointer.mean), x, axis=-1)
    weights = np.outer(c, c.conj())
    overlap = np.prod(I, axis=0)
    norm = float((weights * overlap).sum().real)
    means = np.empty(N)
    for n in range(N):
        others = np.prod(np.delete(I, n, axis=0), axis=0)
        means[n] = (weights * J[n] * others).sum().real / norm if abs(norm) >= ZERO_NORM else np.nan
    return _stats(state, detector, means, norm)


def _rows_for_g(
    graph: InterferometerGraph, detector: str, g: float, sigma: PerMirror, predictions: Dict[str, float]
) -> List[dict]:
    stats = post_select_stats(evolve_exact(graph, g, sigma), detector)
    rows = []
    for mirror, shift in stats.mean_shift.items():
        predicted = g * predictions[mirror]
        rows.append({
            "mirror": mirror,
            "g": g,
            "mean_shift": shift,
            "first_order_prediction": predicted,
            "residual": abs(shift - predicted),
        })
    return rows


def shift_vs_weakvalue(
    graph: InterferometerGraph,
    detector: str,
    g_values: Sequence[float],
    sigma: PerMirror = 1.0,
    workers: int = 1,
) -> pd.DataFrame:
    """ Exact post-selected shifts against the first-order law g * Re(P_w), one row per (g, mirror) """
    if not len(g_values):
        raise ValidationError("no g values given")
    if any(not g > 0 for g in g_values):
        raise ValidationError("g values must be positive")
    predictions = {m: v.real for m, v in weak_values(graph, detector).per_mirror.items()}
    args = [(graph, detector, float(g), sigma, predictions) for g in g_values]
    if workers > 1:
        with mp.Pool(workers) as pool:
            blocks = pool.starmap(_rows_for_g, args)
    else:
        blocks = [_rows_for_g(*a) for a in args]
    table = pd.DataFrame(
        [row for block in blocks for row in block],
        columns=["mirror", "g", "mean_shift", "first_order_prediction", "residual"],
    )
    log.info("computed pointer shifts", detector=detector, g_values=len(g_values), workers=workers)
    return table


def residual_slopes(table: pd.DataFrame, floor: float = 1e-15) -> pd.DataFrame:
    """ Log-log slope of residual against g per mirror; NaN when fewer than two residuals exceed floor """
    rows = []
    for mirror, group in table.groupby("mirror", sort=False):
        usable = group[group["residual"] > floor]
        if len(usable) < 2:
            slope = float("nan")
        else:
            slope = float(np.polyfit(np.log(usable["g"]), np.log(usable["residual"]), 1)[0])
        rows.append({"mirror": mirror, "slope": slope, "points": len(usable)})
    return pd.DataFrame(rows, columns=["mirror", "slope", "points"])


def mirror_momentum_kick(nbar: float, omega: float, theta_prime: float) -> float:
    """ Mean momentum given to a mirror by nbar photons at incidence theta_prime, in units of hbar """
    if nbar < 0:
        raise NegativePhotonNumberError(f"mean photon number must be non-negative, got {nbar}")
    return 2.0 * nbar * omega * math.cos(theta_prime)
