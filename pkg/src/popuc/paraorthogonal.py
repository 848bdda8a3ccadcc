"""POPUC construction and unit-circle zero finding.

P(z) = z Q_n(z) - conj(b) Q_n*(z) with |b| = 1.  All zeros of a valid
POPUC lie on the unit circle and are simple; they are located by
Aberth-Ehrlich simultaneous iteration with a Newton polish, then projected
to exact modulus one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .opuc import MonicPoly, polyval, reversed_poly

__all__ = [
    "PopucInstance",
    "ZeroSet",
    "RootFindingError",
    "build_popuc",
    "fix_zero_param",
    "zeros_on_circle",
    "aberth_roots",
    "deflate",
]

UNIMODULAR_TOL = 1e-12
MODULUS_TOL = 1e-6
RESIDUAL_TOL = 1e-9


class RootFindingError(RuntimeError):
    """Zero finder failed to converge or the zeros are not on the circle."""


@dataclass(frozen=True)
class PopucInstance:
    """POPUC of degree n+1 built from Q_n and a unimodular parameter b."""

    poly: MonicPoly
    b: complex
    source_degree: int
    fixed_xi: complex | None = None

    @property
    def degree(self) -> int:
        return self.poly.degree

    def __call__(self, z):
        return self.poly(z)


@dataclass(frozen=True)
class ZeroSet:
    """Sorted unit-circle zero phases of a POPUC.

    Phases live in [theta_ref, theta_ref + 2 pi); ``fixed_index`` and
    ``tracked_index`` designate the pinned zero and the zero under study.
    """

    phases: np.ndarray
    theta_ref: float
    residuals: np.ndarray
    pre_projection_deviation: float
    fixed_index: int | None = None
    tracked_index: int | None = None

    def __len__(self) -> int:
        return len(self.phases)

    @property
    def zeros(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    @property
    def min_gap(self) -> float:
        ph = np.sort(self.phases)
        gaps = np.diff(np.concatenate([ph, [ph[0] + 2.0 * math.pi]]))
        return float(np.min(gaps))

    def nearest_index(self, phase: float) -> int:
        d = np.abs(np.angle(np.exp(1j * (self.phases - phase))))
        return int(np.argmin(d))

    def with_markers(
        self, fixed_index: int | None = None, tracked_index: int | None = None
    ) -> "ZeroSet":
        return replace(self, fixed_index=fixed_index, tracked_index=tracked_index)


def build_popuc(q: MonicPoly, b: complex) -> PopucInstance:
    """z Q_n(z) - conj(b) Q_n*(z), monic of degree n+1."""
    if abs(abs(b) - 1.0) > UNIMODULAR_TOL:
        raise ValueError(f"|b| = {abs(b)} is off the unit circle")
    n = q.degree
    coeffs = np.zeros(n + 2, dtype=complex)
    coeffs[1:] = q.coeffs
    coeffs[: n + 1] -= np.conj(b) * reversed_poly(q.coeffs)
    return PopucInstance(MonicPoly(coeffs), complex(b), n)


def fix_zero_param(q: MonicPoly, xi: complex) -> complex:
    """Unimodular b such that the POPUC built from ``q`` vanishes at ``xi``.

    b = conj(xi) conj(Q_n(xi)) / conj(Q_n*(xi)); on the circle
    |Q_n*| = |Q_n| so |b| = 1 up to roundoff, and it is renormalized exactly.
    """
    if abs(abs(xi) - 1.0) > UNIMODULAR_TOL:
        raise ValueError(f"|xi| = {abs(xi)} is off the unit circle")
    qs = polyval(reversed_poly(q.coeffs), xi)
    if abs(qs) < 1e-14:
        raise ValueError("reversed polynomial vanishes at xi (degenerate input)")
    b = np.conj(xi) * np.conj(q(xi)) / np.conj(qs)
    return complex(b / abs(b))


def aberth_roots(
    coeffs: np.ndarray, max_sweeps: int = 200, tol: float = 1e-14
) -> np.ndarray:
    """All roots of the polynomial by Aberth-Ehrlich simultaneous iteration.

    Initial guesses sit equispaced on the unit circle, offset by half a slot
    (ideal for zeros that are themselves on the circle).
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    m = len(coeffs) - 1
    if m < 1:
        return np.array([], dtype=complex)
    deriv = coeffs[1:] * np.arange(1, m + 1)
    z = np.exp(1j * (2.0 * np.pi * (np.arange(m) + 0.5) / m))
    scale = np.max(np.abs(coeffs))
    for _ in range(max_sweeps):
        p = polyval(coeffs, z)
        dp = polyval(deriv, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dp != 0, p / np.where(dp != 0, dp, 1.0), 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        repulsion = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - ratio * repulsion
        step = np.where(np.abs(denom) > 1e-300, ratio / denom, ratio)
        z = z - step
        if np.max(np.abs(step)) < tol * max(1.0, np.max(np.abs(z))):
            break
    else:
        if np.max(np.abs(polyval(coeffs, z))) > 1e-8 * scale:
            raise RootFindingError("Aberth-Ehrlich iteration did not converge")
    # Newton polish
    for _ in range(3):
        p = polyval(coeffs, z)
        dp = polyval(deriv, z)
        z = z - np.where(dp != 0, p / np.where(dp != 0, dp, 1.0), 0.0)
    return z


def zeros_on_circle(p: PopucInstance, theta_ref: float = -math.pi) -> ZeroSet:
    """Locate all zeros of a POPUC, project them to the circle, sort phases.

    Raises :class:`RootFindingError` when a root strays further than 1e-6
    from the circle before projection (the input was not a POPUC) or when a
    projected residual exceeds 1e-9 * max|coeff|.
    """
    coeffs = p.poly.coeffs
    roots = aberth_roots(coeffs)
    deviation = float(np.max(np.abs(np.abs(roots) - 1.0)))
    if deviation > MODULUS_TOL:
        raise RootFindingError(
            f"root modulus deviates {deviation:.3e} from 1; input is not a POPUC"
        )
    phases = np.angle(roots)
    # reduce into [theta_ref, theta_ref + 2 pi)
    phases = theta_ref + np.mod(phases - theta_ref, 2.0 * math.pi)
    order = np.argsort(phases)
    phases = phases[order]
    scale = float(np.max(np.abs(coeffs)))
    residuals = np.abs(polyval(coeffs, np.exp(1j * phases)))
    if np.max(residuals) > RESIDUAL_TOL * scale:
        raise RootFindingError(
            f"projected residual {np.max(residuals):.3e} exceeds tolerance"
        )
    zs = ZeroSet(
        phases=phases,
        theta_ref=theta_ref,
        residuals=residuals,
        pre_projection_deviation=deviation,
    )
    if zs.min_gap <= 0:
        raise RootFindingError("coincident zeros; POPUC zeros must be simple")
    return zs


def deflate(coeffs: np.ndarray, root: complex) -> np.ndarray:
    """Synthetic division: coefficients of p(z)/(z - root), remainder dropped.

    Intended for known zeros; the remainder is the residual p(root).
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    m = len(coeffs) - 1
    out = np.zeros(m, dtype=complex)
    acc = coeffs[m]
    for k in range(m - 1, -1, -1):
        out[k] = acc
        acc = coeffs[k] + acc * root
    return out
