import cmath
import math
from dataclasses import replace

import numpy as np
import pytest

from popuc.dynamics import (
    SweepConfig,
    TrackingError,
    ZeroPolicy,
    balance_check,
    fd_velocity,
    solve_at,
    sweep,
    tracked_velocity,
)
from popuc.measures import ACWeight, MassPoint, Measure
from popuc.scenarios import scenario_config

DISCRETE = Measure.of(
    ACWeight.none(),
    [
        MassPoint.of("0.8 + 0.1*t", "0.6"),
        MassPoint.of("1.1 - 0.2*t", "1.9"),
        MassPoint.of("0.5 + 0.3*t", "3.1"),
        MassPoint.of("0.9", "4.4 + 0.05*t"),
        MassPoint.of("0.7", "5.6"),
    ],
)

MIXED = Measure.of(ACWeight.lebesgue("1 - t"), [MassPoint.of("t", "0")])


def test_zero_policy_validation():
    with pytest.raises(ValueError):
        ZeroPolicy("fixed_xi", 0.5 + 0j)
    with pytest.raises(ValueError):
        ZeroPolicy("other", 1.0 + 0j)
    assert ZeroPolicy.fixed_b(-1.0 + 0j).kind == "fixed_b"


def test_sweep_config_validation():
    pol = ZeroPolicy.fixed_b(1.0 + 0j)
    with pytest.raises(ValueError):
        SweepConfig(DISCRETE, 4, 0.0, 1.0, 2, pol)
    with pytest.raises(ValueError):
        SweepConfig(DISCRETE, 1, 0.0, 1.0, 10, pol)
    with pytest.raises(ValueError):
        SweepConfig(DISCRETE, 4, 0.0, 1.0, 10, pol, h=0.2)
    cfg = SweepConfig(DISCRETE, 4, 0.0, 1.0, 11, pol)
    assert len(cfg.grid()) == 11


def test_solve_at_marks_fixed_zero():
    xi = cmath.exp(1j * 2.0)
    st = solve_at(DISCRETE, 4, ZeroPolicy.fixed_xi(xi), 0.0)
    zs = st.zero_set
    assert zs.fixed_index is not None
    assert abs(zs.phases[zs.fixed_index] - 2.0) < 1e-9
    assert abs(st.popuc(xi)) < 1e-10
    # window starts at the fixed zero, which is therefore index 0
    assert zs.fixed_index == 0


def test_solve_at_fixed_b_has_no_marker():
    st = solve_at(DISCRETE, 4, ZeroPolicy.fixed_b(1.0 + 0j), 0.0)
    assert st.zero_set.fixed_index is None


def test_sweep_produces_continuous_chains():
    cfg = SweepConfig(DISCRETE, 4, 0.0, 0.5, 21, ZeroPolicy.fixed_xi(cmath.exp(1j * 2.0)))
    traj = sweep(cfg)
    assert traj.chains.shape == (21, 4)
    steps = np.abs(np.diff(traj.chains, axis=0))
    assert np.max(steps) < 0.3
    assert traj.fixed_chain == 0
    # the pinned chain does not move
    assert np.max(np.abs(traj.chains[:, 0] - traj.chains[0, 0])) < 1e-9


def test_fd_and_tracked_velocities_agree():
    cfg = SweepConfig(DISCRETE, 4, 0.0, 0.5, 21, ZeroPolicy.fixed_xi(cmath.exp(1j * 2.0)))
    traj = sweep(cfg)
    k = 2
    v_grid = fd_velocity(traj, k)
    mid = 10
    v_fresh = tracked_velocity(
        DISCRETE, 4, cfg.policy, float(traj.ts[mid]), float(traj.chains[mid, k])
    )
    assert v_grid[mid] == pytest.approx(v_fresh, abs=5e-3)


def test_fd_velocity_linear_chain_is_exact():
    cfg = SweepConfig(DISCRETE, 4, 0.0, 0.5, 11, ZeroPolicy.fixed_xi(cmath.exp(1j * 2.0)))
    traj = sweep(cfg)
    fake = traj.chains.copy()
    fake[:, 1] = 0.3 + 1.7 * traj.ts
    traj = replace(traj, chains=fake)
    v = fd_velocity(traj, 1)
    assert np.allclose(v, 1.7, atol=1e-12)


def test_tracking_error_on_count_change():
    from popuc.dynamics import _match

    st = solve_at(DISCRETE, 4, ZeroPolicy.fixed_b(1.0 + 0j), 0.0)
    with pytest.raises(TrackingError):
        _match(np.array([0.0, 1.0, 2.0]), st.zero_set, 1.0, 0.0)


def test_balance_discrete():
    pol = ZeroPolicy.fixed_xi(cmath.exp(1j * 2.0))
    zs = solve_at(DISCRETE, 4, pol, 0.1).zero_set
    for k in range(len(zs)):
        if k == zs.fixed_index:
            continue
        be = balance_check(DISCRETE, 4, pol, 0.1, zs.phases[k], "t21")
        assert be.mismatch < 1e-4
        assert be.C > 0


def test_balance_mixed():
    pol = ZeroPolicy.fixed_xi(cmath.exp(1j * math.pi / 2))
    zs = solve_at(MIXED, 5, pol, 0.4, nodes=1024).zero_set
    k = (zs.fixed_index + 2) % len(zs)
    be = balance_check(MIXED, 5, pol, 0.4, zs.phases[k], "t23", nodes=1024)
    assert be.mismatch < 1e-4


def test_balance_conjugate():
    masses = [
        MassPoint.of("0.5 + 0.2*t", "1.0"),
        MassPoint.of("0.5 + 0.2*t", "-1.0"),
        MassPoint.of("0.8 - 0.1*t", "2.2"),
        MassPoint.of("0.8 - 0.1*t", "-2.2"),
    ]
    m = Measure.of(ACWeight.none(), masses)
    pol = ZeroPolicy.fixed_b(1.0 + 0j)
    zs = solve_at(m, 4, pol, 0.0).zero_set
    tracked = [k for k, p in enumerate(zs.phases) if 1e-6 < p < math.pi - 1e-6][0]
    be = balance_check(m, 4, pol, 0.0, zs.phases[tracked], "t22")
    assert be.mismatch < 1e-4


def test_balance_requires_fixed_zero_for_t21():
    with pytest.raises(TrackingError):
        balance_check(DISCRETE, 4, ZeroPolicy.fixed_b(1.0 + 0j), 0.1, 1.0, "t21")


def test_stationary_scenario_sweep():
    cfg = scenario_config("lebesgue_mass_fixed_one")
    traj = sweep(cfg)
    assert np.max(np.abs(traj.chains - traj.chains[0])) < 1e-8
