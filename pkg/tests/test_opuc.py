import math

import numpy as np
import pytest

from popuc.measures import ACWeight, MassPoint, Measure, moments
from popuc.opuc import (
    DegenerateMeasureError,
    MonicPoly,
    gram_opuc,
    inner_product,
    polyval,
    reversed_poly,
)


def _random_measure(rng):
    n_masses = int(rng.integers(2, 6))
    om = np.sort(rng.uniform(0, 2 * math.pi, n_masses))
    om += 0.01 * np.arange(n_masses)
    masses = [MassPoint.of(float(rng.uniform(0.1, 2.0)), float(o)) for o in om]
    lam = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
    return Measure.of(ACWeight.bernstein_szego(lam), masses)


def _gram_schmidt_oracle(ms, n):
    """Monic orthogonal polynomials by modified Gram-Schmidt on {1, z, ..., z^n}."""
    basis = []
    for m in range(n + 1):
        e = np.zeros(m + 1, dtype=complex)
        e[m] = 1.0
        q = e
        for p in basis:
            padded = np.zeros(m + 1, dtype=complex)
            padded[: len(p)] = p
            coef = inner_product(q, p, ms) / inner_product(p, p, ms)
            q = q - coef * padded
        basis.append(q)
    return basis


def test_monic_poly_validates_leading_coefficient():
    with pytest.raises(ValueError):
        MonicPoly(np.array([1.0, 2.0], dtype=complex))
    p = MonicPoly(np.array([0.5, 1.0], dtype=complex))
    assert p.degree == 1
    assert p(2.0) == pytest.approx(2.5)


def test_polyval_horner():
    coeffs = np.array([1.0, -2.0, 3.0], dtype=complex)
    z = 1.5 + 0.5j
    assert polyval(coeffs, z) == pytest.approx(1 - 2 * z + 3 * z * z)
    zz = np.array([1.0, 1j])
    assert np.allclose(polyval(coeffs, zz), 1 - 2 * zz + 3 * zz * zz)


def test_reversed_poly_on_circle():
    rng = np.random.default_rng(3)
    coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)
    z = np.exp(1j * 0.7)
    lhs = polyval(reversed_poly(coeffs), z)
    rhs = z**4 * np.conj(polyval(coeffs, z))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_inner_product_matches_direct_sum():
    m = Measure.of(ACWeight.none(), [MassPoint.of(0.7, 0.5), MassPoint.of(1.2, 2.5)])
    ms = moments(m, 0.0, 4)
    rng = np.random.default_rng(5)
    p = rng.normal(size=3) + 1j * rng.normal(size=3)
    q = rng.normal(size=4) + 1j * rng.normal(size=4)
    gam, om = m.mass_values(0.0)
    zm = np.exp(1j * om)
    direct = np.sum(gam * polyval(p, zm) * np.conj(polyval(q, zm)))
    assert inner_product(p, q, ms) == pytest.approx(direct, abs=1e-12)


def test_gram_opuc_matches_gram_schmidt():
    rng = np.random.default_rng(9)
    for _ in range(10):
        m = _random_measure(rng)
        n = 4
        ms = moments(m, 0.0, 2 * n + 2)
        fam = gram_opuc(ms, n)
        oracle = _gram_schmidt_oracle(ms, n)
        for k in range(n + 1):
            assert np.max(np.abs(fam[k].coeffs - oracle[k])) < 1e-9


def test_orthogonality():
    rng = np.random.default_rng(13)
    m = _random_measure(rng)
    n = 5
    ms = moments(m, 0.0, 2 * n + 2)
    fam = gram_opuc(ms, n)
    for j in range(n + 1):
        for k in range(j):
            ip = inner_product(fam[j].coeffs, fam[k].coeffs, ms)
            assert abs(ip) < 1e-10 * ms[0].real
        norm = inner_product(fam[j].coeffs, fam[j].coeffs, ms)
        assert norm.real == pytest.approx(fam.norms[j], rel=1e-9)
        assert norm.real > 0


def test_szego_recurrence():
    # Q_{k+1}(z) = z Q_k(z) - conj(alpha_k) Q_k*(z)
    rng = np.random.default_rng(17)
    m = _random_measure(rng)
    n = 5
    fam = gram_opuc(moments(m, 0.0, 2 * n + 2), n)
    for k in range(n):
        lhs = fam[k + 1].coeffs
        rhs = np.zeros(k + 2, dtype=complex)
        rhs[1:] = fam[k].coeffs
        rhs[: k + 1] -= np.conj(fam.alphas[k]) * reversed_poly(fam[k].coeffs)
        assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_verblunsky_inside_disc():
    rng = np.random.default_rng(21)
    m = _random_measure(rng)
    fam = gram_opuc(moments(m, 0.0, 12), 5)
    assert np.all(np.abs(fam.alphas) < 1.0)


def test_bernstein_szego_has_explicit_opuc():
    # pure BS weight: Q_n(z) = z^{n-1} (z - conj(lambda)) for n >= 1
    lam = 0.3 - 0.4j
    m = Measure.of(ACWeight.bernstein_szego(lam))
    fam = gram_opuc(moments(m, 0.0, 10), 4)
    for n in range(1, 5):
        expected = np.zeros(n + 1, dtype=complex)
        expected[n] = 1.0
        expected[n - 1] = -np.conj(lam)
        assert np.max(np.abs(fam[n].coeffs - expected)) < 1e-13


def test_finite_support_degenerates():
    # N masses support Q_0..Q_{N-1}; at degree N the squared norm collapses
    # (the monic polynomial vanishing at all N points), so it must fail loudly
    N = 3
    om = [0.5, 2.0, 4.0]
    m = Measure.of(ACWeight.none(), [MassPoint.of(1.0, o) for o in om])
    ms = moments(m, 0.0, 2 * N + 4)
    fam = gram_opuc(ms, N - 1)
    assert fam.max_degree == N - 1
    with pytest.raises(DegenerateMeasureError):
        gram_opuc(ms, N)
