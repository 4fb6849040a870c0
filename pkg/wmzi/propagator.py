"""Free-particle kernels, scattering chains and first-order Born terms in 1D.

Natural units hbar = m = 1. Every Fresnel integral here is a Gaussian integral, so
the code keeps integrands as exp(a x^2 + b x + c) and integrates them in closed
form, or by Gauss-Hermite quadrature along the steepest-descent line.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad, trapezoid
from structlog import get_logger

from wmzi.errors import (
    NonPositiveTimeError,
    PotentialError,
    QuadratureNonconvergenceError,
    UnorderedEventsError,
    ValidationError,
)
from wmzi.potential import GridPotential, LocalizedKick, Potential

log = get_logger(__name__)

HERMITE_NODES = 64
QUAD_LIMIT = 200


@dataclass(frozen=True)
class SpacetimePoint:
    x: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.t)):
            raise ValidationError(f"spacetime point must be finite, got ({self.x}, {self.t})")


def _elapsed(a: SpacetimePoint, b: SpacetimePoint) -> float:
    dt = b.t - a.t
    if not dt > 0:
        raise NonPositiveTimeError(f"kernel needs t_b > t_a, got {a.t} -> {b.t}")
    return dt


def free_kernel(dx, dt: float):
    """ sqrt(1 / (2 pi i dt)) exp(i dx^2 / (2 dt)), vectorized over dx (complex dx allowed) """
    return np.sqrt(1 / (2j * np.pi * dt)) * np.exp(1j * np.asarray(dx) ** 2 / (2 * dt))


def free_propagator(a: SpacetimePoint, b: SpacetimePoint) -> complex:
    return complex(free_kernel(b.x - a.x, _elapsed(a, b)))


@dataclass(frozen=True)
class KernelValue:
    """ A propagator value between two spacetime points """
    value: complex
    start: SpacetimePoint
    end: SpacetimePoint

    def __post_init__(self):
        _elapsed(self.start, self.end)
        if not cmath.isfinite(self.value):
            raise ValidationError(f"kernel value must be finite, got {self.value}")

    @staticmethod
    def free(a: SpacetimePoint, b: SpacetimePoint) -> KernelValue:
        return KernelValue(free_propagator(a, b), a, b)

    def relative_error(self, other: KernelValue) -> float:
        if (other.start, other.end) != (self.start, self.end):
            raise ValidationError("kernel values connect different spacetime points")
        return abs(other.value - self.value) / abs(self.value)


@dataclass(frozen=True)
class ComplexGaussian:
    """ exp(a x^2 + b x + c) """
    a: complex
    b: complex = 0j
    c: complex = 0j

    @staticmethod
    def kernel(fixed: float, dt: float) -> ComplexGaussian:
        """ free kernel between a fixed end point and a variable x, dt apart """
        log_norm = cmath.log(cmath.sqrt(1 / (2j * math.pi * dt)))
        return ComplexGaussian(1j / (2 * dt), -1j * fixed / dt, 1j * fixed**2 / (2 * dt) + log_norm)

    @staticmethod
    def bump(center: float, width: float) -> ComplexGaussian:
        """ exp(-(x - center)^2 / (2 width^2)) """
        s = 2 * width**2
        return ComplexGaussian(-1 / s, 2 * center / s, -(center**2) / s)

    def __mul__(self, other: ComplexGaussian) -> ComplexGaussian:
        return ComplexGaussian(self.a + other.a, self.b + other.b, self.c + other.c)

    def conj(self) -> ComplexGaussian:
        """ complex conjugate on the real axis """
        return ComplexGaussian(complex(self.a).conjugate(), complex(self.b).conjugate(), complex(self.c).conjugate())

    def __call__(self, x):
        x = np.asarray(x)
        return np.exp(self.a * x**2 + self.b * x + self.c)

    def stationary_point(self) -> complex:
        return -self.b / (2 * self.a)

    def integrate(self) -> complex:
        """ integral over the real line, principal branch of the square root """
        a = complex(self.a)
        if a == 0 or a.real > 0:
            raise ValidationError(f"Gaussian integral diverges for curvature {a}")
        return cmath.sqrt(math.pi / -a) * cmath.exp(self.c - self.b**2 / (4 * a))


def gauss_hermite_integral(
    f: Callable[[np.ndarray], np.ndarray], curvature: complex, center: complex = 0.0, nodes: int = HERMITE_NODES
) -> complex:
    """ Integral of f over the real line with x = center + u / sqrt(-curvature)

    Exact for f = Gaussian of that curvature times a polynomial of degree < 2 nodes;
    f must be analytic, since the substitution rotates the contour.
    """
    if complex(curvature) == 0 or complex(curvature).real > 0:
        raise ValidationError(f"Gauss-Hermite rule needs a decaying curvature, got {curvature}")
    u, w = np.polynomial.hermite.hermgauss(nodes)
    scale = 1 / np.sqrt(-complex(curvature))
    return complex(scale * np.sum(w * f(center + u * scale) * np.exp(u**2)))


def compose_by_quadrature(a: SpacetimePoint, b: SpacetimePoint, t_c: float, nodes: int = HERMITE_NODES) -> complex:
    """ Integral over x_c of K(b; x_c, t_c) K(x_c, t_c; a) """
    mid = SpacetimePoint(0.0, t_c)
    late = _elapsed(mid, b)
    early = _elapsed(a, mid)
    product = ComplexGaussian.kernel(b.x, late) * ComplexGaussian.kernel(a.x, early)
    return gauss_hermite_integral(
        lambda x: free_kernel(b.x - x, late) * free_kernel(x - a.x, early),
        product.a,
        product.stationary_point(),
        nodes,
    )


def scattering_chain(
    a: SpacetimePoint, events: Sequence[Tuple[SpacetimePoint, float]], b: SpacetimePoint
) -> complex:
    """ K(b, c_n) (-i V_n) ... (-i V_1) K(c_1, a) """
    _elapsed(a, b)
    points = [a] + [point for point, _ in events] + [b]
    for before, after in zip(points, points[1:]):
        if not after.t > before.t:
            raise UnorderedEventsError(
                f"scattering events must lie strictly inside ({a.t}, {b.t}) in increasing time order"
            )
    value = complex(1.0)
    for before, after in zip(points, points[1:]):
        value *= free_propagator(before, after)
    for _, strength in events:
        value *= -1j * strength
    return value


def time_sliced_propagator(
    a: SpacetimePoint, b: SpacetimePoint, n: int, potential: Optional[Potential] = None
) -> complex:
    """ N-slice discretized path integral of the free particle

    The N - 1 intermediate integrals are carried out one at a time as Gaussian
    integrals, so the result equals the continuum kernel for every N up to rounding.
    """
    if potential is not None:
        raise PotentialError("time slicing is implemented for the free particle only")
    if n < 2:
        raise ValidationError(f"time slicing needs at least 2 slices, got {n}")
    eps = _elapsed(a, b) / n
    log_norm = cmath.log(cmath.sqrt(1 / (2j * math.pi * eps)))
    # exp(qa y^2 + qb y + qc) after integrating out every earlier slice point
    qa = 1j / (2 * eps)
    qb = -1j * a.x / eps
    qc = 1j * a.x**2 / (2 * eps) + log_norm
    for _ in range(n - 1):
        big = qa + 1j / (2 * eps)
        qc = qc + log_norm - qb**2 / (4 * big) + 0.5 * cmath.log(math.pi / -big)
        qb = 1j * qb / (2 * big * eps)
        qa = 1j / (2 * eps) + 1 / (4 * big * eps**2)
    return cmath.exp(qa * b.x**2 + qb * b.x + qc)


@dataclass(frozen=True)
class GaussianPacket:
    """ Free Gaussian packet, exp(-(x - x0)^2 / (4 sigma^2) + i k0 (x - x0)) at time t0, normalized """
    x0: float = 0.0
    k0: float = 0.0
    sigma: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError(f"packet width must be positive, got {self.sigma}")

    def as_gaussian(self, t: float) -> ComplexGaussian:
        tau = t - self.t0
        s = self.sigma**2 + 0.5j * tau
        m = self.x0 + self.k0 * tau
        log_norm = -0.25 * math.log(2 * math.pi * self.sigma**2) + 0.5 * cmath.log(self.sigma**2 / s)
        return ComplexGaussian(
            -1 / (4 * s),
            m / (2 * s) + 1j * self.k0,
            -(m**2) / (4 * s) - 1j * self.k0 * self.x0 - 0.5j * self.k0**2 * tau + log_norm,
        )

    def __call__(self, x, t: float):
        return self.as_gaussian(t)(x)

    def center(self, t: float) -> float:
        return self.x0 + self.k0 * (t - self.t0)

    def width(self, t: float) -> float:
        tau = t - self.t0
        return math.sqrt(self.sigma**2 + (tau / (2 * self.sigma)) ** 2)


def propagate_by_kernel(packet: GaussianPacket, x: float, t: float, nodes: int = HERMITE_NODES) -> complex:
    """ psi(x, t) as the kernel integral over psi(y, t0) """
    dt = t - packet.t0
    if not dt > 0:
        raise NonPositiveTimeError(f"propagation needs t > {packet.t0}, got {t}")
    initial = packet.as_gaussian(packet.t0)
    product = ComplexGaussian.kernel(x, dt) * initial
    return gauss_hermite_integral(
        lambda y: free_kernel(x - y, dt) * initial(y), product.a, product.stationary_point(), nodes
    )


def _require_inside(potential: Potential, t_a: float, t_b: float) -> Tuple[float, float]:
    t0, t1 = potential.window()
    if not t_a < t0 <= t1 < t_b:
        raise PotentialError(f"potential window [{t0}, {t1}] must lie strictly inside ({t_a}, {t_b})")
    return t0, t1


def _spatial_integral(g: ComplexGaussian, potential: Potential, t: float) -> complex:
    """ integral over x of g(x) V(x, t) """
    if isinstance(potential, LocalizedKick):
        if potential.strength == 0:
            return 0j
        return potential.strength * (g * ComplexGaussian.bump(potential.center, potential.width)).integrate()
    if isinstance(potential, GridPotential):
        x = np.asarray(potential.x, dtype=float)
        return complex(trapezoid(g(x) * potential.value(x, t), x))
    raise PotentialError(f"unsupported potential {type(potential).__name__}")


def _time_integral(f: Callable[[float], complex], t0: float, t1: float, limit: int = QUAD_LIMIT) -> complex:
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            re = quad(lambda t: f(t).real, t0, t1, limit=limit, epsabs=1e-13, epsrel=1e-10)[0]
            im = quad(lambda t: f(t).imag, t0, t1, limit=limit, epsabs=1e-13, epsrel=1e-10)[0]
        except IntegrationWarning as e:
            raise QuadratureNonconvergenceError(f"time quadrature did not converge: {e}") from None
    return complex(re, im)


def born_first_order(a: SpacetimePoint, b: SpacetimePoint, potential: Potential) -> complex:
    """ -i times the integral of K(b; x, t) V(x, t) K(x, t; a) over the active window """
    _elapsed(a, b)
    t0, t1 = _require_inside(potential, a.t, b.t)

    def spatial(t: float) -> complex:
        g = ComplexGaussian.kernel(b.x, b.t - t) * ComplexGaussian.kernel(a.x, t - a.t)
        return _spatial_integral(g, potential, t)

    return -1j * _time_integral(spatial, t0, t1)


def born_transition_amplitude(
    initial: GaussianPacket,
    potential: Potential,
    t_a: float,
    t_b: float,
    target: Optional[GaussianPacket] = None,
) -> Tuple[complex, complex]:
    """ Zeroth and first-order amplitudes <target(t_b)| U |initial(t_a)>

    target defaults to the freely evolved initial packet, which makes the zeroth
    order exactly 1.
    """
    if not t_b > t_a:
        raise NonPositiveTimeError(f"need t_b > t_a, got {t_a} -> {t_b}")
    target = target or initial
    t0, t1 = _require_inside(potential, t_a, t_b)
    zeroth = (target.as_gaussian(t_b).conj() * initial.as_gaussian(t_b)).integrate()

    def spatial(t: float) -> complex:
        return _spatial_integral(target.as_gaussian(t).conj() * initial.as_gaussian(t), potential, t)

    first = -1j * _time_integral(spatial, t0, t1)
    log.debug("computed born amplitudes", zeroth=abs(zeroth), first=abs(first))
    return zeroth, first
