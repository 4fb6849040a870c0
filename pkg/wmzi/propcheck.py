"""Self-checks of the propagator toolkit against closed forms and the split-step oracle."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from structlog import get_logger

from wmzi.oracle import DEFAULT_STEPS, schrodinger_oracle
from wmzi.potential import LocalizedKick
from wmzi.propagator import (
    GaussianPacket,
    KernelValue,
    SpacetimePoint,
    born_transition_amplitude,
    compose_by_quadrature,
    free_propagator,
    time_sliced_propagator,
)

log = get_logger(__name__)

SLICES = (2, 4, 8, 16, 32)
SLICING_FLOOR = 1e-12
SCALING_FACTORS = (1.0, 0.5, 0.25, 0.125)


@dataclass
class BornScenario:
    """ Gaussian packet crossing a weak Gaussian kick """
    packet: GaussianPacket = field(default_factory=lambda: GaussianPacket(x0=0.0, k0=0.5, sigma=1.0))
    kick: LocalizedKick = field(default_factory=lambda: LocalizedKick(center=0.25, time=0.5, strength=0.5, width=0.5, duration=0.2))
    t_a: float = 0.0
    t_b: float = 1.0


@dataclass
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


def born_relative_error(scenario: BornScenario, steps: int = DEFAULT_STEPS) -> float:
    """ |P_born - P_oracle| / P_oracle for the transition back into the freely evolved packet """
    zeroth, first = born_transition_amplitude(scenario.packet, scenario.kick, scenario.t_a, scenario.t_b)
    predicted = abs(zeroth + first) ** 2
    oracle = schrodinger_oracle(scenario.packet, scenario.kick, scenario.t_b, scenario.t_a, steps=steps)
    exact = oracle.transition_probability(scenario.packet)
    return abs(predicted - exact) / exact


def check_semigroup(tolerance: float = 1e-8) -> CheckResult:
    a, b = SpacetimePoint(-0.3, 0.0), SpacetimePoint(0.7, 1.0)
    worst = 0.0
    direct = KernelValue.free(a, b)
    for t_c in (0.2, 0.5, 0.8):
        composed = KernelValue(compose_by_quadrature(a, b, t_c), a, b)
        worst = max(worst, direct.relative_error(composed))
    return CheckResult("semigroup", worst, tolerance, worst <= tolerance, "max relative error over t_c")


def check_born_vs_oracle(scenario: BornScenario, tolerance: float = 1e-2, steps: int = DEFAULT_STEPS) -> CheckResult:
    error = born_relative_error(scenario, steps)
    return CheckResult(
        "born-vs-oracle", error, tolerance, error <= tolerance, f"kick area {scenario.kick.area:.4g}"
    )


def born_scaling_table(
    scenario: BornScenario, factors: Sequence[float] = SCALING_FACTORS, steps: int = DEFAULT_STEPS
) -> pd.DataFrame:
    rows = []
    for factor in factors:
        scaled = BornScenario(scenario.packet, scenario.kick.scaled(factor), scenario.t_a, scenario.t_b)
        rows.append({"area": scaled.kick.area, "relative_error": born_relative_error(scaled, steps)})
    return pd.DataFrame(rows, columns=["area", "relative_error"])


def check_born_scaling(
    scenario: BornScenario, expected: float = 2.0, tolerance: float = 0.3, steps: int = DEFAULT_STEPS
) -> CheckResult:
    table = born_scaling_table(scenario, steps=steps)
    slope = float(np.polyfit(np.log(table["area"]), np.log(table["relative_error"]), 1)[0])
    return CheckResult(
        "born-scaling", slope, tolerance, abs(slope - expected) <= tolerance, f"expected slope {expected}"
    )


def check_born_linearity(scenario: BornScenario, tolerance: float = 1e-9) -> CheckResult:
    _, single = born_transition_amplitude(scenario.packet, scenario.kick, scenario.t_a, scenario.t_b)
    _, double = born_transition_amplitude(scenario.packet, scenario.kick.scaled(2.0), scenario.t_a, scenario.t_b)
    deviation = abs(double - 2 * single) / abs(2 * single)
    return CheckResult("born-linearity", deviation, tolerance, deviation <= tolerance, "first order at 2 V0 vs 2x")


def slicing_errors(slices: Sequence[int] = SLICES) -> Dict[int, float]:
    a, b = SpacetimePoint(-0.4, 0.0), SpacetimePoint(0.9, 1.3)
    exact = free_propagator(a, b)
    return {n: abs(time_sliced_propagator(a, b, n) - exact) / abs(exact) for n in slices}


def check_slicing(tolerance: float = 1e-10, slices: Sequence[int] = SLICES) -> CheckResult:
    errors = slicing_errors(slices)
    values = list(errors.values())
    monotone = all(
        later <= earlier or later <= SLICING_FLOOR for earlier, later in zip(values, values[1:])
    )
    worst = max(values)
    if all(v <= SLICING_FLOOR for v in values):
        log.warning("slicing errors at rounding floor", floor=SLICING_FLOOR, worst=worst)
    detail = ", ".join(f"N={n}: {e:.2e}" for n, e in errors.items())
    return CheckResult("slicing-convergence", worst, tolerance, worst <= tolerance and monotone, detail)


def check_unitarity(scenario: BornScenario, tolerance: float = 1e-10, steps: int = DEFAULT_STEPS) -> CheckResult:
    oracle = schrodinger_oracle(scenario.packet, scenario.kick, scenario.t_b, scenario.t_a, steps=steps)
    return CheckResult(
        "oracle-unitarity", oracle.norm_drift, tolerance, oracle.norm_drift <= tolerance, f"{oracle.steps} steps"
    )


def run_checks(
    scenario: Optional[BornScenario] = None,
    semigroup_tol: float = 1e-8,
    born_tol: float = 1e-2,
    linearity_tol: float = 1e-9,
    slicing_tol: float = 1e-10,
    unitarity_tol: float = 1e-10,
    steps: int = DEFAULT_STEPS,
) -> List[CheckResult]:
    scenario = scenario or BornScenario()
    results = [
        check_semigroup(semigroup_tol),
        check_born_vs_oracle(scenario, born_tol, steps),
        check_born_scaling(scenario, steps=steps),
        check_born_linearity(scenario, linearity_tol),
        check_slicing(slicing_tol),
        check_unitarity(scenario, unitarity_tol, steps),
    ]
    for r in results:
        log.info("propagator check", name=r.name, status=r.status, value=r.value)
    return results


def results_frame(results: Sequence[CheckResult]) -> pd.DataFrame:
    return pd.DataFrame(
        [{"check": r.name, "status": r.status, "value": r.value, "tolerance": r.tolerance, "detail": r.detail}
         for r in results],
        columns=["check", "status", "value", "tolerance", "detail"],
    )
