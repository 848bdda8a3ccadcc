"""Closed-form ground truth for the two worked measures.

These formulas are independent of the moment pipeline (no shared code below
complex arithmetic) and serve as oracles for cross-checks:

  - OPUC of the Bernstein-Szego weight plus one point mass;
  - POPUC of the Lebesgue measure plus one point mass at angle 0;
  - the per-mass motion functionals W_0 for both configurations.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .opuc import MonicPoly

__all__ = [
    "bs_mass_opuc",
    "lebesgue_mass_popuc",
    "w0_bs",
    "w0_lebesgue",
]


def bs_mass_opuc(n: int, lam: complex, gamma: float, omega: float) -> MonicPoly:
    """Degree-n monic OPUC for the Bernstein-Szego weight with parameter
    ``lam`` plus the mass ``gamma`` at angle ``omega``.

    The rational factor (1 - (e^{-i omega} z)^{n-1}) / (1 - e^{-i omega} z)
    is expanded to the finite geometric sum, so the removable singularity at
    z = e^{i omega} never appears.
    """
    if abs(lam) >= 1.0:
        raise ValueError("need |lambda| < 1")
    if gamma < 0:
        raise ValueError("need gamma >= 0")
    if n < 1:
        raise ValueError("need n >= 1")
    lam = complex(lam)
    lam_bar = np.conj(lam)
    ei = cmath.exp(1j * omega)
    one_minus = 1.0 - abs(lam) ** 2
    prefactor = (
        gamma
        * ei ** (n - 1)
        * (ei - lam_bar)
        / (1.0 + gamma * (1.0 + (n - 1) * abs(ei - lam_bar) ** 2 / one_minus))
    )
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[n] = 1.0
    coeffs[n - 1] = -lam_bar
    # constant term of the bracket
    coeffs[0] -= prefactor
    # (z - lam_bar)(e^{-i omega} - lam)/(1-|lam|^2) * sum_{m=0}^{n-2} (e^{-i omega} z)^m
    factor = (np.conj(ei) - lam) / one_minus
    for m in range(n - 1):
        em = np.conj(ei) ** m
        coeffs[m + 1] -= prefactor * factor * em
        coeffs[m] -= prefactor * factor * em * (-lam_bar)
    return MonicPoly(coeffs)


def lebesgue_mass_popuc(n: int, b: complex, gamma: float) -> MonicPoly:
    """Degree-(n+1) POPUC for (1-gamma) dtheta/2pi + gamma delta_0:
    z^{n+1} - conj(b) - (1-conj(b)) gamma / (1+(n-1) gamma) * sum_{j=1}^n z^j.
    """
    if abs(abs(b) - 1.0) > 1e-12:
        raise ValueError("need |b| = 1")
    if not 0.0 < gamma < 1.0:
        raise ValueError("need gamma in (0, 1)")
    if n < 1:
        raise ValueError("need n >= 1")
    b_bar = np.conj(complex(b))
    coeffs = np.zeros(n + 2, dtype=complex)
    coeffs[n + 1] = 1.0
    coeffs[0] = -b_bar
    coeffs[1 : n + 1] -= (1.0 - b_bar) * gamma / (1.0 + (n - 1) * gamma)
    return MonicPoly(coeffs)


def w0_bs(phi: float, theta0: float, omega: float) -> float:
    """Motion functional of the single mass in the Bernstein-Szego scenario:
    sin((phi-theta0)/2) / (2 sin((phi-omega)/2) sin((theta0-omega)/2)).

    Positive for phi in (theta0, omega), negative on (omega, theta0 + 2 pi).
    """
    num = math.sin(0.5 * (phi - theta0))
    den = 2.0 * math.sin(0.5 * (phi - omega)) * math.sin(0.5 * (theta0 - omega))
    if den == 0.0:
        raise ZeroDivisionError("pole: phi or theta0 collides with omega")
    return num / den


def w0_lebesgue(phi: float, theta0: float, gamma: float) -> float:
    """Motion functional of the inserted mass in the Lebesgue scenario:
    1/(2(1-gamma)) * sin((phi-theta0)/2) / (sin(phi/2) sin(theta0/2)).

    Positive for phi in (theta0, 2 pi), negative on (2 pi, theta0 + 2 pi).
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("need gamma in (0, 1)")
    den = 2.0 * (1.0 - gamma) * math.sin(0.5 * phi) * math.sin(0.5 * theta0)
    if den == 0.0:
        raise ZeroDivisionError("pole: phi or theta0 collides with the mass at 0")
    return math.sin(0.5 * (phi - theta0)) / den
