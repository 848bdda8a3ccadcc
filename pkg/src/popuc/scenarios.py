"""Built-in named scenarios mirroring the worked figure configurations.

Each scenario is a full run configuration (measure, degree, grid, policy,
theorem) so sweeps and verification need no external files.
"""
from __future__ import annotations

from .dynamics import SweepConfig, ZeroPolicy
from .measures import ACWeight, MassPoint, Measure

__all__ = ["SCENARIOS", "scenario_config", "scenario_json"]

_BS_LAMBDA = complex(0.0, -1.0 / 3.0)


def _bs_mass_gamma() -> SweepConfig:
    """Bernstein-Szego weight plus a mass at 2 pi/3 whose weight is the
    parameter; the POPUC keeps a zero pinned at i."""
    measure = Measure.of(
        ACWeight.bernstein_szego(_BS_LAMBDA),
        [MassPoint.of("t", "2*pi/3")],
    )
    return SweepConfig(
        measure=measure,
        degree=5,
        t_start=0.01,
        t_stop=5.0,
        steps=50,
        policy=ZeroPolicy.fixed_xi(1j),
        theorem="t23",
    )


def _bs_mass_omega() -> SweepConfig:
    """Same weight, unit mass whose location angle is the parameter."""
    measure = Measure.of(
        ACWeight.bernstein_szego(_BS_LAMBDA),
        [MassPoint.of("1", "2*pi/3 + t")],
    )
    return SweepConfig(
        measure=measure,
        degree=5,
        t_start=0.0,
        t_stop=0.5,
        steps=50,
        policy=ZeroPolicy.fixed_xi(1j),
        theorem="t23",
    )


def _lebesgue_mass(b: complex = -1.0 + 0.0j) -> SweepConfig:
    """(1-gamma) Lebesgue plus the mass gamma at angle 0, constant b."""
    measure = Measure.of(
        ACWeight.lebesgue("1 - t"),
        [MassPoint.of("t", "0")],
    )
    return SweepConfig(
        measure=measure,
        degree=5,
        t_start=0.1,
        t_stop=0.9,
        steps=50,
        policy=ZeroPolicy.fixed_b(b),
        theorem="t23",
    )


def _lebesgue_mass_fixed_one() -> SweepConfig:
    """Same measure with the POPUC zero pinned at 1 (the mass location);
    every zero then stays put as gamma varies."""
    measure = Measure.of(
        ACWeight.lebesgue("1 - t"),
        [MassPoint.of("t", "0")],
    )
    return SweepConfig(
        measure=measure,
        degree=5,
        t_start=0.05,
        t_stop=0.95,
        steps=50,
        policy=ZeroPolicy.fixed_xi(1.0 + 0.0j),
        theorem="t23",
    )


SCENARIOS = {
    "bs_mass_gamma": _bs_mass_gamma,
    "bs_mass_omega": _bs_mass_omega,
    "lebesgue_mass_b": _lebesgue_mass,
    "lebesgue_mass_fixed_one": _lebesgue_mass_fixed_one,
}


def scenario_config(name: str, b: complex | None = None) -> SweepConfig:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    if name == "lebesgue_mass_b" and b is not None:
        return _lebesgue_mass(b)
    return SCENARIOS[name]()


def scenario_json(name: str, b: complex | None = None) -> dict:
    cfg = scenario_config(name, b)
    return {
        "measure": cfg.measure.to_json(),
        "degree": cfg.degree,
        "grid": {"start": cfg.t_start, "stop": cfg.t_stop, "steps": cfg.steps},
        "policy": {
            "kind": cfg.policy.kind,
            "value": [cfg.policy.value.real, cfg.policy.value.imag],
        },
        "theorem": cfg.theorem,
        "h": cfg.h,
        "nodes": cfg.nodes,
    }
