"""Motion functionals and verdicts for the tracked POPUC zero.

Three regimes are supported:

  - ``t21``: purely discrete measures (per-mass functionals W_j);
  - ``t22``: a tracked pair of complex-conjugate zeros (functionals W~_j);
  - ``t23``: mixed measures (W_j with a continuous correction, plus the
    density functional W(theta) and the monotonicity of
    f(theta) = (d/dt weight)/weight).

A verdict of CCW (counterclockwise), CW, Stationary, or Inconclusive is
returned together with the supporting numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .expressions import differentiate, evaluate
from .measures import ANGLE_TOL, Measure, circular_gap
from .paraorthogonal import ZeroSet

__all__ = [
    "MotionContext",
    "VerdictReport",
    "PredicateError",
    "motion_context",
    "s_factor",
    "s_sum",
    "s_conj",
    "s_sum_conj",
    "w_discrete",
    "w_conjugate",
    "w_continuous",
    "w_mixed",
    "verdict",
]

# "nonnegative" slack and "strictly positive" threshold, relative to scale
NONNEG_TOL = 1e-12
STRICT_TOL = 1e-10
POLE_TOL = 1e-12


class PredicateError(ValueError):
    """Pole collision or ill-posed motion context."""


@dataclass(frozen=True)
class MotionContext:
    """Zero configuration plus measure derivative data at one parameter value."""

    phases: np.ndarray
    fixed_index: int
    tracked_index: int
    gammas: np.ndarray
    omegas: np.ndarray
    dgammas: np.ndarray
    domegas: np.ndarray
    t: float
    f_theta: Callable[[float], float] | None = None
    ac_nodes: np.ndarray = field(default_factory=lambda: np.array([]))

    @property
    def theta0(self) -> float:
        return float(self.phases[self.fixed_index])

    @property
    def phi(self) -> float:
        return float(self.phases[self.tracked_index])

    @property
    def f_at_phi(self) -> float:
        return 0.0 if self.f_theta is None else self.f_theta(self.phi)

    def collisions(self) -> list[tuple[int, int]]:
        """(mass index, zero index) pairs closer than the angle tolerance."""
        hits = []
        for j, om in enumerate(self.omegas):
            for k, ph in enumerate(self.phases):
                if circular_gap(om, ph) < ANGLE_TOL:
                    hits.append((j, k))
        return hits

    def flipped(self) -> "MotionContext":
        """Same configuration with every derivative input sign-flipped."""
        flipped_f = None
        if self.f_theta is not None:
            original = self.f_theta
            flipped_f = lambda theta: -original(theta)  # noqa: E731
        return MotionContext(
            phases=self.phases,
            fixed_index=self.fixed_index,
            tracked_index=self.tracked_index,
            gammas=self.gammas,
            omegas=self.omegas,
            dgammas=-self.dgammas,
            domegas=-self.domegas,
            t=self.t,
            f_theta=flipped_f,
            ac_nodes=self.ac_nodes,
        )


def _ac_log_derivative(m: Measure, t: float) -> Callable[[float], float] | None:
    """f(theta; t) = (d/dt weight)/weight for the AC part, or None if absent."""
    ac = m.ac
    if ac.kind == "none":
        return None
    if ac.kind in ("lebesgue", "bernstein_szego"):
        dscale = differentiate(ac.scale, "t")
        s = evaluate(ac.scale, {"t": t})
        if s <= 0:
            raise PredicateError(f"AC scale {s} not positive at t={t}")
        value = evaluate(dscale, {"t": t}) / s
        return lambda theta: value
    dw = differentiate(ac.weight, "t")

    def f(theta: float) -> float:
        w = evaluate(ac.weight, {"theta": theta, "t": t})
        if w <= 0:
            raise PredicateError(f"weight vanishes at theta={theta}")
        return evaluate(dw, {"theta": theta, "t": t}) / w

    return f


def motion_context(
    m: Measure, zs: ZeroSet, t: float, nodes: int = 512
) -> MotionContext:
    """Assemble a :class:`MotionContext` from a measure and a marked zero set.

    Mass derivative data comes from exact symbolic differentiation of the
    gamma/omega expressions.
    """
    if zs.fixed_index is None or zs.tracked_index is None:
        raise PredicateError("zero set must carry fixed and tracked markers")
    gam, om = m.mass_values(t)
    dgam = np.array(
        [evaluate(differentiate(mp.gamma, "t"), {"t": t}) for mp in m.masses]
    )
    dom = np.array(
        [evaluate(differentiate(mp.omega, "t"), {"t": t}) for mp in m.masses]
    )
    theta0 = zs.phases[zs.fixed_index]
    grid = theta0 + 2.0 * math.pi * (np.arange(nodes) + 0.5) / nodes
    return MotionContext(
        phases=zs.phases,
        fixed_index=int(zs.fixed_index),
        tracked_index=int(zs.tracked_index),
        gammas=gam,
        omegas=om,
        dgammas=dgam,
        domegas=dom,
        t=t,
        f_theta=_ac_log_derivative(m, t),
        ac_nodes=grid,
    )


def s_factor(theta: float, phi: float, theta0: float) -> float:
    """sin((phi-theta0)/2) / (2 sin((phi-theta)/2) sin((theta0-theta)/2))."""
    if circular_gap(theta, phi) < POLE_TOL or circular_gap(theta, theta0) < POLE_TOL:
        raise PredicateError("s-factor pole: theta collides with phi or theta0")
    return math.sin(0.5 * (phi - theta0)) / (
        2.0 * math.sin(0.5 * (phi - theta)) * math.sin(0.5 * (theta0 - theta))
    )


def s_sum(theta: float, ctx: MotionContext) -> float:
    """Cotangent sum over all zeros; the fixed and tracked terms weigh 1/2."""
    total = 0.0
    for k, ph in enumerate(ctx.phases):
        if circular_gap(theta, ph) < POLE_TOL:
            raise PredicateError("cotangent pole: theta collides with a zero")
        weight = 0.5 if k in (ctx.fixed_index, ctx.tracked_index) else 1.0
        total += weight / math.tan(0.5 * (ph - theta))
    return total


def s_conj(theta: float, phi: float) -> float:
    """Conjugate-pair variant: 1 / (2 (cos(phi) - cos(theta)))."""
    den = math.cos(phi) - math.cos(theta)
    if abs(den) < POLE_TOL:
        raise PredicateError("conjugate s-factor pole: cos(theta) = cos(phi)")
    return 0.5 / den


def s_sum_conj(theta: float, ctx: MotionContext) -> float:
    """sin(theta)/(cos(theta)-cos(phi)) plus cotangents over the other zeros."""
    phi = ctx.phi
    den = math.cos(theta) - math.cos(phi)
    if abs(den) < POLE_TOL:
        raise PredicateError("conjugate sum pole: cos(theta) = cos(phi)")
    total = math.sin(theta) / den
    for k, ph in enumerate(ctx.phases):
        if k in (ctx.fixed_index, ctx.tracked_index):
            continue
        if circular_gap(theta, ph) < POLE_TOL:
            raise PredicateError("cotangent pole: theta collides with a zero")
        total += 1.0 / math.tan(0.5 * (ph - theta))
    return total


def w_discrete(j: int, ctx: MotionContext) -> float:
    """Per-mass functional for purely discrete measures."""
    s = s_factor(ctx.omegas[j], ctx.phi, ctx.theta0)
    value = s * ctx.dgammas[j]
    if ctx.domegas[j] != 0.0:
        value -= ctx.gammas[j] * s * s_sum(ctx.omegas[j], ctx) * ctx.domegas[j]
    return value


def w_conjugate(j: int, ctx: MotionContext) -> float:
    """Per-mass functional when the tracked pair is complex-conjugate."""
    st = s_conj(ctx.omegas[j], ctx.phi)
    value = st * ctx.dgammas[j]
    if ctx.domegas[j] != 0.0:
        value -= ctx.gammas[j] * st * s_sum_conj(ctx.omegas[j], ctx) * ctx.domegas[j]
    return value


def w_continuous(theta: float, ctx: MotionContext) -> float:
    """Density functional s(theta) * (f(theta) - f(phi)) for mixed measures."""
    if ctx.f_theta is None:
        return 0.0
    return s_factor(theta, ctx.phi, ctx.theta0) * (ctx.f_theta(theta) - ctx.f_at_phi)


def w_mixed(j: int, ctx: MotionContext) -> float:
    """Discrete functional with the continuous-part correction term."""
    value = w_discrete(j, ctx)
    f_phi = ctx.f_at_phi
    if f_phi != 0.0:
        value -= ctx.gammas[j] * s_factor(ctx.omegas[j], ctx.phi, ctx.theta0) * f_phi
    return value


@dataclass(frozen=True)
class VerdictReport:
    verdict: str  # CCW | CW | Stationary | Inconclusive
    theorem: str  # t21 | t22 | t23
    w_masses: np.ndarray
    w_continuous_min: float
    w_continuous_max: float
    flags: tuple[str, ...]
    mirrored: bool
    tracked_phase: float
    fixed_phase: float

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "theorem": self.theorem,
            "w_masses": [float(w) for w in self.w_masses],
            "w_continuous_min": self.w_continuous_min,
            "w_continuous_max": self.w_continuous_max,
            "flags": list(self.flags),
            "mirrored": self.mirrored,
            "tracked_phase": self.tracked_phase,
            "fixed_phase": self.fixed_phase,
        }


def _inconclusive(ctx: MotionContext, theorem: str, flags: list[str]) -> VerdictReport:
    return VerdictReport(
        verdict="Inconclusive",
        theorem=theorem,
        w_masses=np.array([]),
        w_continuous_min=0.0,
        w_continuous_max=0.0,
        flags=tuple(flags),
        mirrored=False,
        tracked_phase=ctx.phi,
        fixed_phase=ctx.theta0,
    )


def _f_monotone(ctx: MotionContext) -> tuple[bool, bool]:
    """(nondecreasing, nonincreasing) of f across the sorted node grid."""
    if ctx.f_theta is None:
        return True, True
    values = np.array([ctx.f_theta(th) for th in ctx.ac_nodes])
    tol = NONNEG_TOL * (1.0 + float(np.max(np.abs(values), initial=0.0)))
    diffs = np.diff(values)
    return bool(np.all(diffs >= -tol)), bool(np.all(diffs <= tol))


def verdict(ctx: MotionContext, theorem: str = "t21") -> VerdictReport:
    """Classify the tracked zero's motion as CCW, CW, Stationary, or
    Inconclusive, with a ``mirrored`` flag when the clockwise (sign-flipped)
    criterion fired.
    """
    if theorem not in ("t21", "t22", "t23"):
        raise ValueError(f"unknown theorem selector {theorem!r}")
    flags: list[str] = []
    if ctx.collisions():
        return _inconclusive(ctx, theorem, ["collision"])
    if theorem == "t22":
        phi = math.remainder(ctx.phi, 2.0 * math.pi)
        partner = math.remainder(ctx.phases[ctx.fixed_index], 2.0 * math.pi)
        if not (0.0 < phi < math.pi) or abs(phi + partner) > 1e-8:
            return _inconclusive(ctx, theorem, ["non_conjugate_pair"])

    functional = {"t21": w_discrete, "t22": w_conjugate, "t23": w_mixed}[theorem]
    try:
        w_masses = np.array([functional(j, ctx) for j in range(len(ctx.gammas))])
    except PredicateError:
        return _inconclusive(ctx, theorem, ["pole"])

    wc_min = wc_max = 0.0
    nondecreasing = nonincreasing = True
    if theorem == "t23" and ctx.f_theta is not None:
        usable = [
            th
            for th in ctx.ac_nodes
            if circular_gap(th, ctx.phi) > 1e-9 and circular_gap(th, ctx.theta0) > 1e-9
        ]
        wc = np.array([w_continuous(th, ctx) for th in usable])
        if len(wc):
            wc_min = float(np.min(wc))
            wc_max = float(np.max(wc))
        nondecreasing, nonincreasing = _f_monotone(ctx)
        if not nondecreasing:
            flags.append("f_not_nondecreasing")

    scale = float(np.max(np.abs(w_masses), initial=0.0)) + max(abs(wc_min), abs(wc_max))
    stationary = bool(np.all(np.abs(w_masses) <= NONNEG_TOL)) and max(
        abs(wc_min), abs(wc_max)
    ) <= NONNEG_TOL
    if stationary:
        label = "Stationary"
        mirrored = False
    elif (
        bool(np.all(w_masses >= -NONNEG_TOL * scale))
        and (float(np.max(w_masses, initial=0.0)) > STRICT_TOL * scale or wc_max > STRICT_TOL * scale)
        and (theorem != "t23" or nondecreasing)
    ):
        label = "CCW"
        mirrored = False
    elif (
        bool(np.all(w_masses <= NONNEG_TOL * scale))
        and (float(np.min(w_masses, initial=0.0)) < -STRICT_TOL * scale or wc_min < -STRICT_TOL * scale)
        and (theorem != "t23" or nonincreasing)
    ):
        label = "CW"
        mirrored = True
        flags.append("mirrored")
    else:
        label = "Inconclusive"
        mirrored = False
    return VerdictReport(
        verdict=label,
        theorem=theorem,
        w_masses=w_masses,
        w_continuous_min=wc_min,
        w_continuous_max=wc_max,
        flags=tuple(flags),
        mirrored=mirrored,
        tracked_phase=ctx.phi,
        fixed_phase=ctx.theta0,
    )
