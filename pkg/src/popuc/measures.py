"""Parameter-dependent measures on the unit circle and their trigonometric moments.

A measure is an optional absolutely continuous weight (against dtheta/2pi)
plus a finite list of point masses whose weights and locations are
expressions in the parameter ``t``.  Moments c_k = int e^{-ik theta} dmu
are produced in closed form where available and by periodic trapezoid
quadrature otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .expressions import Expr, evaluate, free_vars, parse, to_source

__all__ = [
    "MassPoint",
    "ACWeight",
    "Measure",
    "MomentSequence",
    "MeasureError",
    "moments",
    "quadrature_moment",
    "validate",
    "circular_gap",
    "DEFAULT_NODES",
]

DEFAULT_NODES = 4096

# coincidence / collision tolerance for angles, modulo 2 pi
ANGLE_TOL = 1e-9


class MeasureError(ValueError):
    """Invalid measure data at the queried parameter value."""


def circular_gap(a: float, b: float) -> float:
    """Distance between angles ``a`` and ``b`` modulo 2 pi, in [0, pi]."""
    d = math.fmod(a - b, 2.0 * math.pi)
    if d < 0:
        d += 2.0 * math.pi
    return min(d, 2.0 * math.pi - d)


def _as_expr(value: Expr | str | float) -> Expr:
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, (int, float)):
        return parse(repr(float(value)))
    return value


@dataclass(frozen=True)
class MassPoint:
    """Point mass gamma(t) * delta(theta - omega(t))."""

    gamma: Expr
    omega: Expr

    @classmethod
    def of(cls, gamma: Expr | str | float, omega: Expr | str | float) -> "MassPoint":
        return cls(_as_expr(gamma), _as_expr(omega))


@dataclass(frozen=True)
class ACWeight:
    """Absolutely continuous part, a density against dtheta/2pi.

    kinds:
      - ``none``: no continuous part
      - ``lebesgue``: scale(t), constant in theta
      - ``bernstein_szego``: scale(t) * (1-|lam|^2)/|1-lam e^{i theta}|^2
      - ``custom``: arbitrary nonnegative expression in theta and t
    """

    kind: str
    scale: Expr | None = None
    lam: complex = 0j
    weight: Expr | None = None
    theta0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "lebesgue", "bernstein_szego", "custom"):
            raise MeasureError(f"unknown AC kind {self.kind!r}")
        if self.kind == "bernstein_szego" and abs(self.lam) >= 1.0:
            raise MeasureError("bernstein_szego requires |lambda| < 1")
        if self.kind == "custom" and self.weight is None:
            raise MeasureError("custom weight requires an expression")

    @classmethod
    def none(cls) -> "ACWeight":
        return cls("none")

    @classmethod
    def lebesgue(cls, scale: Expr | str | float = 1.0, theta0: float = 0.0) -> "ACWeight":
        return cls("lebesgue", scale=_as_expr(scale), theta0=theta0)

    @classmethod
    def bernstein_szego(
        cls, lam: complex, scale: Expr | str | float = 1.0, theta0: float = 0.0
    ) -> "ACWeight":
        return cls("bernstein_szego", scale=_as_expr(scale), lam=complex(lam), theta0=theta0)

    @classmethod
    def custom(cls, weight: Expr | str, theta0: float = 0.0) -> "ACWeight":
        return cls("custom", weight=_as_expr(weight), theta0=theta0)

    def density(self, theta: float, t: float) -> float:
        """Evaluate the density w(theta; t) against dtheta/2pi."""
        if self.kind == "none":
            return 0.0
        if self.kind == "lebesgue":
            return evaluate(self.scale, {"t": t})
        if self.kind == "bernstein_szego":
            s = evaluate(self.scale, {"t": t})
            z = complex(math.cos(theta), math.sin(theta))
            return s * (1.0 - abs(self.lam) ** 2) / abs(1.0 - self.lam * z) ** 2
        return evaluate(self.weight, {"theta": theta, "t": t})


@dataclass(frozen=True)
class Measure:
    ac: ACWeight
    masses: tuple[MassPoint, ...] = ()

    @classmethod
    def of(cls, ac: ACWeight, masses: Iterable[MassPoint] = ()) -> "Measure":
        return cls(ac, tuple(masses))

    def mass_values(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(gamma_j(t), omega_j(t)) arrays, with invariant checks."""
        gam = np.array([evaluate(m.gamma, {"t": t}) for m in self.masses], dtype=float)
        om = np.array([evaluate(m.omega, {"t": t}) for m in self.masses], dtype=float)
        if np.any(gam < 0):
            raise MeasureError(f"negative mass weight at t={t}")
        for i in range(len(om)):
            for j in range(i + 1, len(om)):
                if circular_gap(om[i], om[j]) < ANGLE_TOL:
                    raise MeasureError(f"coincident mass points at t={t}")
        return gam, om

    @classmethod
    def from_json(cls, obj: dict) -> "Measure":
        ac_obj = obj.get("ac", {"kind": "none"})
        kind = ac_obj.get("kind", "none")
        theta0 = float(ac_obj.get("theta0", 0.0))
        if kind == "none":
            ac = ACWeight.none()
        elif kind == "lebesgue":
            ac = ACWeight.lebesgue(ac_obj.get("scale", "1"), theta0)
        elif kind == "bernstein_szego":
            re, im = ac_obj["lambda"]
            ac = ACWeight.bernstein_szego(complex(re, im), ac_obj.get("scale", "1"), theta0)
        elif kind == "custom":
            ac = ACWeight.custom(ac_obj["w"], theta0)
        else:
            raise MeasureError(f"unknown AC kind {kind!r}")
        masses = tuple(
            MassPoint.of(m["gamma"], m["omega"]) for m in obj.get("masses", ())
        )
        return cls(ac, masses)

    def to_json(self) -> dict:
        ac_obj: dict = {"kind": self.ac.kind, "theta0": self.ac.theta0}
        if self.ac.scale is not None:
            ac_obj["scale"] = to_source(self.ac.scale)
        if self.ac.kind == "bernstein_szego":
            ac_obj["lambda"] = [self.ac.lam.real, self.ac.lam.imag]
        if self.ac.weight is not None:
            ac_obj["w"] = to_source(self.ac.weight)
        return {
            "ac": ac_obj,
            "masses": [
                {"gamma": to_source(m.gamma), "omega": to_source(m.omega)}
                for m in self.masses
            ],
        }


@dataclass(frozen=True)
class MomentSequence:
    """Trigonometric moments c_k for k = -K..K at a fixed parameter value.

    Hermitian symmetry c_{-k} = conj(c_k) holds exactly by construction.
    """

    t: float
    K: int
    c: np.ndarray = field(repr=False)

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.K:
            raise IndexError(f"moment order {k} exceeds K={self.K}")
        return complex(self.c[k + self.K])

    def toeplitz(self, size: int) -> np.ndarray:
        """The size x size matrix [c_{j-k}]_{0<=j,k<size}."""
        if size - 1 > self.K:
            raise IndexError("insufficient moment order for requested Toeplitz size")
        return np.array(
            [[self[j - k] for k in range(size)] for j in range(size)], dtype=complex
        )


def quadrature_moment(w: ACWeight, t: float, k: int, nodes: int = DEFAULT_NODES) -> complex:
    """Composite trapezoid value of int e^{-ik theta} w(theta; t) dtheta/2pi.

    The rule is applied over one period starting at ``w.theta0``; for smooth
    periodic integrands the convergence is spectral.
    """
    if nodes < 16:
        raise MeasureError("quadrature needs at least 16 nodes")
    thetas = w.theta0 + 2.0 * math.pi * np.arange(nodes) / nodes
    vals = np.array([w.density(th, t) for th in thetas], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise MeasureError("weight evaluates non-finite at a quadrature node")
    phases = np.exp(-1j * k * thetas)
    # periodic trapezoid == midpoint-free uniform average over one period
    return complex(np.mean(vals * phases))


def _ac_moment(ac: ACWeight, t: float, k: int, nodes: int) -> complex:
    if ac.kind == "none":
        return 0.0 + 0.0j
    if ac.kind == "lebesgue":
        s = evaluate(ac.scale, {"t": t})
        return complex(s) if k == 0 else 0.0 + 0.0j
    if ac.kind == "bernstein_szego":
        # geometric moments of the Poisson-kernel (squared-modulus) weight
        s = evaluate(ac.scale, {"t": t})
        if k >= 0:
            return s * ac.lam**k
        return s * np.conj(ac.lam) ** (-k)
    return quadrature_moment(ac, t, k, nodes)


def moments(m: Measure, t: float, K: int, nodes: int = DEFAULT_NODES) -> MomentSequence:
    """Moments c_k, k = -K..K, of ``m`` at parameter value ``t``."""
    if K < 0:
        raise MeasureError("K must be nonnegative")
    gam, om = m.mass_values(t)
    c = np.zeros(2 * K + 1, dtype=complex)
    for k in range(K + 1):
        value = _ac_moment(m.ac, t, k, nodes)
        if len(gam):
            value += np.sum(gam * np.exp(-1j * k * om))
        c[K + k] = value
        c[K - k] = np.conj(value)
    c[K] = c[K].real
    if c[K].real <= 0:
        raise MeasureError(f"total mass {c[K].real} is not positive at t={t}")
    return MomentSequence(t=t, K=K, c=c)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str


def validate(m: Measure, t: float, nodes: int = 256) -> list[Diagnostic]:
    """Pure report of measure defects at ``t``: negative weights, coincident
    masses, negative AC density at quadrature nodes, vanishing total mass."""
    report: list[Diagnostic] = []
    gam = []
    om = []
    for idx, mass in enumerate(m.masses):
        g = evaluate(mass.gamma, {"t": t})
        w = evaluate(mass.omega, {"t": t})
        gam.append(g)
        om.append(w)
        if g < 0:
            report.append(Diagnostic("negative_mass", f"gamma_{idx}({t}) = {g} < 0"))
    for i in range(len(om)):
        for j in range(i + 1, len(om)):
            if circular_gap(om[i], om[j]) < ANGLE_TOL:
                report.append(
                    Diagnostic("coincident_masses", f"masses {i} and {j} coincide at t={t}")
                )
    total = float(sum(gam))
    if m.ac.kind != "none":
        thetas = m.ac.theta0 + 2.0 * math.pi * np.arange(nodes) / nodes
        dens = np.array([m.ac.density(th, t) for th in thetas])
        if np.any(dens < 0):
            report.append(Diagnostic("negative_weight", f"AC density negative at t={t}"))
        total += float(np.mean(dens))
    if total <= 0:
        report.append(Diagnostic("vanishing_mass", f"total mass {total} at t={t}"))
    return report
