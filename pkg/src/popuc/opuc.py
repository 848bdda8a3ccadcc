"""Monic orthogonal polynomials on the unit circle from a moment sequence.

Coefficient arrays are ascending: coeffs[k] multiplies z**k.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import MomentSequence

__all__ = [
    "MonicPoly",
    "OpucFamily",
    "DegenerateMeasureError",
    "gram_opuc",
    "reversed_poly",
    "inner_product",
    "polyval",
]

# relative pivot threshold flagging exhausted finite support
DEGENERACY_THRESHOLD = 1e-12


class DegenerateMeasureError(ValueError):
    """Toeplitz moment matrix lost positive definiteness (finite support exhausted)."""


def polyval(coeffs: np.ndarray, z: complex | np.ndarray) -> complex | np.ndarray:
    """Horner evaluation of an ascending coefficient array."""
    result = np.zeros_like(np.asarray(z, dtype=complex))
    for c in np.asarray(coeffs)[::-1]:
        result = result * z + c
    if np.isscalar(z) or np.asarray(z).ndim == 0:
        return complex(result)
    return result


@dataclass(frozen=True)
class MonicPoly:
    """Complex polynomial with leading coefficient exactly 1."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or len(coeffs) == 0:
            raise ValueError("coefficient array must be one-dimensional and non-empty")
        if abs(coeffs[-1] - 1.0) > 1e-9:
            raise ValueError(f"leading coefficient {coeffs[-1]} is not 1")
        coeffs = coeffs.copy()
        coeffs[-1] = 1.0
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return polyval(self.coeffs, z)


def reversed_poly(coeffs: np.ndarray) -> np.ndarray:
    """Reversed polynomial p*(z) = z^m conj(p(1/conj(z))): b_k = conj(a_{m-k})."""
    return np.conj(np.asarray(coeffs, dtype=complex))[::-1].copy()


def inner_product(p: np.ndarray, q: np.ndarray, ms: MomentSequence) -> complex:
    """<p, q> = int p(e^{i theta}) conj(q(e^{i theta})) dmu = sum p_j conj(q_k) c_{k-j}."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    if (len(p) - 1) > ms.K or (len(q) - 1) > ms.K:
        raise IndexError("insufficient moment order for inner product")
    total = 0.0 + 0.0j
    for j, pj in enumerate(p):
        if pj == 0:
            continue
        for k, qk in enumerate(q):
            if qk == 0:
                continue
            total += pj * np.conj(qk) * ms[k - j]
    return total


@dataclass(frozen=True)
class OpucFamily:
    """Q_0..Q_n with squared norms and Verblunsky coefficients.

    alphas[k] = -conj(Q_{k+1}(0)), for k = 0..n-1.
    """

    polys: tuple[MonicPoly, ...]
    norms: np.ndarray
    alphas: np.ndarray

    @property
    def max_degree(self) -> int:
        return len(self.polys) - 1

    def __getitem__(self, degree: int) -> MonicPoly:
        return self.polys[degree]


def gram_opuc(ms: MomentSequence, n: int) -> OpucFamily:
    """Build Q_0..Q_n by solving the dense Toeplitz system for each degree.

    Q_m is determined by <Q_m, z^p> = 0 for p < m.  Raises
    :class:`DegenerateMeasureError` when the moment matrix loses positive
    definiteness or the squared norm collapses, which for a pure N+1-point
    measure happens at degree N+1.
    """
    if n > ms.K:
        raise IndexError(f"need moments up to order {n}, have K={ms.K}")
    c0 = ms[0].real
    polys = [MonicPoly(np.array([1.0 + 0.0j]))]
    norms = [c0]
    alphas = []
    for m in range(1, n + 1):
        T = ms.toeplitz(m)
        eigs = np.linalg.eigvalsh(T)
        if eigs[0] <= DEGENERACY_THRESHOLD * c0:
            raise DegenerateMeasureError(
                f"moment matrix not positive definite at degree {m} "
                f"(min eigenvalue {eigs[0]:.3e})"
            )
        rhs = -np.array([ms[p - m] for p in range(m)], dtype=complex)
        low = np.linalg.solve(T, rhs)
        coeffs = np.concatenate([low, [1.0 + 0.0j]])
        # <Q_m, Q_m> = <Q_m, z^m> since Q_m is orthogonal to lower degrees
        kappa = sum(coeffs[j] * ms[m - j] for j in range(m + 1)).real
        if kappa <= DEGENERACY_THRESHOLD * c0:
            raise DegenerateMeasureError(
                f"squared norm collapsed at degree {m} (kappa = {kappa:.3e})"
            )
        polys.append(MonicPoly(coeffs))
        norms.append(kappa)
        alphas.append(-np.conj(coeffs[0]))
    return OpucFamily(tuple(polys), np.array(norms), np.array(alphas, dtype=complex))
