"""Parameter sweeps: zero trajectories, velocities, and balance identities.

The per-grid-point pipeline is moments -> OPUC -> paraorthogonality
parameter (per policy) -> POPUC -> zero set; consecutive zero sets are
matched by nearest circular phase and chained into continuous trajectories.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .measures import DEFAULT_NODES, Measure, MomentSequence, moments
from .opuc import OpucFamily, gram_opuc, inner_product, polyval
from .paraorthogonal import (
    PopucInstance,
    ZeroSet,
    build_popuc,
    deflate,
    fix_zero_param,
    zeros_on_circle,
)
from .predicates import (
    VerdictReport,
    motion_context,
    verdict,
    w_conjugate,
    w_discrete,
    w_mixed,
)

__all__ = [
    "ZeroPolicy",
    "SweepConfig",
    "Trajectory",
    "BalanceEntry",
    "TrackingError",
    "solve_at",
    "sweep",
    "fd_velocity",
    "tracked_velocity",
    "balance_check",
    "sweep_verdicts",
]


class TrackingError(RuntimeError):
    """Trajectory matching became ambiguous or the pipeline failed mid-sweep."""


@dataclass(frozen=True)
class ZeroPolicy:
    """How the paraorthogonality parameter is chosen along the sweep.

    ``fixed_xi`` recomputes b at every t so the POPUC keeps a zero at xi;
    ``fixed_b`` holds b constant.
    """

    kind: str  # "fixed_xi" | "fixed_b"
    value: complex

    def __post_init__(self):
        if self.kind not in ("fixed_xi", "fixed_b"):
            raise ValueError(f"unknown zero policy {self.kind!r}")
        if abs(abs(self.value) - 1.0) > 1e-9:
            raise ValueError("policy value must lie on the unit circle")

    @classmethod
    def fixed_xi(cls, xi: complex) -> "ZeroPolicy":
        return cls("fixed_xi", complex(xi))

    @classmethod
    def fixed_b(cls, b: complex) -> "ZeroPolicy":
        return cls("fixed_b", complex(b))


@dataclass(frozen=True)
class SweepConfig:
    measure: Measure
    degree: int  # POPUC degree n+1
    t_start: float
    t_stop: float
    steps: int
    policy: ZeroPolicy
    h: float = 1e-5
    theorem: str = "t21"
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        if self.steps < 3:
            raise ValueError("grid too small: need steps >= 3")
        if self.degree < 2:
            raise ValueError("POPUC degree must be at least 2")
        spacing = abs(self.t_stop - self.t_start) / (self.steps - 1)
        if self.h > spacing / 2:
            raise ValueError("finite-difference step h must be <= grid spacing / 2")

    def grid(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_stop, self.steps)


@dataclass(frozen=True)
class PipelineState:
    """Everything the pipeline produced at one parameter value."""

    t: float
    ms: MomentSequence
    family: OpucFamily
    popuc: PopucInstance
    zero_set: ZeroSet


def solve_at(
    m: Measure,
    degree: int,
    policy: ZeroPolicy,
    t: float,
    nodes: int = DEFAULT_NODES,
    moment_order: int | None = None,
) -> PipelineState:
    """Run moments -> OPUC -> b -> POPUC -> zeros at a single t.

    Under the fixed_xi policy the zero window starts at the fixed zero's
    phase and ``fixed_index`` is marked (it is always index 0 there).
    """
    n = degree - 1
    K = moment_order if moment_order is not None else 2 * degree + 2
    ms = moments(m, t, K, nodes)
    family = gram_opuc(ms, n)
    q = family[n]
    if policy.kind == "fixed_xi":
        b = fix_zero_param(q, policy.value)
        theta_ref = cmath.phase(policy.value)
    else:
        b = policy.value
        theta_ref = -math.pi
    p = build_popuc(q, b)
    if policy.kind == "fixed_xi":
        popuc = PopucInstance(p.poly, p.b, p.source_degree, policy.value)
    else:
        popuc = p
    zs = zeros_on_circle(popuc, theta_ref)
    if policy.kind == "fixed_xi":
        zs = zs.with_markers(fixed_index=zs.nearest_index(cmath.phase(policy.value)))
    return PipelineState(t=t, ms=ms, family=family, popuc=popuc, zero_set=zs)


@dataclass(frozen=True)
class Trajectory:
    """Matched zero chains over the sweep grid.

    ``chains[i, k]`` is the unwrapped phase of zero ``k`` at grid point
    ``i``; chain indices follow the sorted order of the first zero set.
    """

    ts: np.ndarray
    zero_sets: tuple[ZeroSet, ...]
    chains: np.ndarray
    match_quality: float
    fixed_chain: int | None

    @property
    def n_zeros(self) -> int:
        return self.chains.shape[1]


def _match(prev_phases: np.ndarray, new_set: ZeroSet, min_gap: float, t: float) -> np.ndarray:
    """Permutation p with new_set.phases[p[k]] continuing chain k.

    Greedy nearest circular phase; a non-bijective assignment or a jump
    beyond half the previous minimum gap aborts the sweep loudly.
    """
    m = len(prev_phases)
    if len(new_set) != m:
        raise TrackingError(f"zero count changed at t={t}")
    perm = np.empty(m, dtype=int)
    jumps = np.empty(m)
    for k in range(m):
        d = np.abs(np.angle(np.exp(1j * (new_set.phases - prev_phases[k]))))
        perm[k] = int(np.argmin(d))
        jumps[k] = d[perm[k]]
    if len(set(perm.tolist())) != m:
        raise TrackingError(f"ambiguous zero matching at t={t}")
    if np.max(jumps) >= min_gap / 2:
        raise TrackingError(
            f"phase jump {np.max(jumps):.3e} exceeds half the minimum gap at t={t}; "
            "refine the grid"
        )
    return perm


def sweep(cfg: SweepConfig) -> Trajectory:
    """Track all zeros of the POPUC across the t grid."""
    ts = cfg.grid()
    states = [solve_at(cfg.measure, cfg.degree, cfg.policy, t, cfg.nodes) for t in ts]
    zero_sets = [st.zero_set for st in states]
    m = len(zero_sets[0])
    chains = np.zeros((len(ts), m))
    chains[0] = zero_sets[0].phases
    current = zero_sets[0].phases.copy()
    max_jump = 0.0
    fixed_chain = zero_sets[0].fixed_index
    for i in range(1, len(ts)):
        prev_gap = zero_sets[i - 1].min_gap
        perm = _match(current, zero_sets[i], prev_gap, ts[i])
        matched = zero_sets[i].phases[perm]
        delta = np.angle(np.exp(1j * (matched - current)))
        max_jump = max(max_jump, float(np.max(np.abs(delta))))
        chains[i] = chains[i - 1] + delta
        current = matched
    return Trajectory(
        ts=ts,
        zero_sets=tuple(zero_sets),
        chains=chains,
        match_quality=max_jump,
        fixed_chain=fixed_chain,
    )


def fd_velocity(traj: Trajectory, k: int) -> np.ndarray:
    """d phi_k / dt on the grid: central differences inside, one-sided at ends."""
    phi = traj.chains[:, k]
    ts = traj.ts
    v = np.empty_like(phi)
    v[1:-1] = (phi[2:] - phi[:-2]) / (ts[2:] - ts[:-2])
    v[0] = (phi[1] - phi[0]) / (ts[1] - ts[0])
    v[-1] = (phi[-1] - phi[-2]) / (ts[-1] - ts[-2])
    return v


def tracked_velocity(
    m: Measure,
    degree: int,
    policy: ZeroPolicy,
    t: float,
    phi_ref: float,
    h: float = 1e-5,
    nodes: int = DEFAULT_NODES,
) -> float:
    """Central-difference angular velocity of the zero nearest ``phi_ref``,
    using fresh pipeline solves at t - h and t + h."""
    lo = solve_at(m, degree, policy, t - h, nodes).zero_set
    hi = solve_at(m, degree, policy, t + h, nodes).zero_set
    phi_lo = lo.phases[lo.nearest_index(phi_ref)]
    phi_hi = hi.phases[hi.nearest_index(phi_ref)]
    return float(np.angle(np.exp(1j * (phi_hi - phi_lo)))) / (2.0 * h)


@dataclass(frozen=True)
class BalanceEntry:
    """One evaluation of the velocity balance identity.

    lhs = C(t) * dphi/dt with dphi/dt by central finite difference;
    rhs is the theorem's weighted sum/integral of motion functionals.
    """

    t: float
    C: float
    dphi_dt: float
    lhs: float
    rhs: float
    mismatch: float

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "C": self.C,
            "dphi_dt": self.dphi_dt,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "mismatch": self.mismatch,
        }


def _ac_quadrature(measure: Measure, t: float, integrand, nodes: int) -> float:
    """Trapezoid integral of integrand(theta) * w(theta; t) over one period,
    against dtheta/2pi; zero when there is no AC part."""
    if measure.ac.kind == "none":
        return 0.0
    thetas = measure.ac.theta0 + 2.0 * math.pi * (np.arange(nodes) + 0.5) / nodes
    total = 0.0
    for th in thetas:
        total += integrand(th) * measure.ac.density(th, t)
    return total / nodes


def _c_integral(
    measure: Measure, ms: MomentSequence, popuc: PopucInstance, zeta: complex
) -> float:
    """C-type integral int |P/(e^{i theta} - zeta)|^2 dmu over the full measure."""
    d = deflate(popuc.poly.coeffs, zeta)
    return float(inner_product(d, d, ms).real)


def balance_check(
    m: Measure,
    degree: int,
    policy: ZeroPolicy,
    t: float,
    tracked_phi: float,
    theorem: str = "t21",
    h: float = 1e-5,
    nodes: int = DEFAULT_NODES,
) -> BalanceEntry:
    """Evaluate the balance identity at one t for the zero nearest ``tracked_phi``.

    The left side multiplies C(t) by a finite-difference velocity from fresh
    solves at t +- h; the right side is computed from the motion functionals,
    so the two sides are independent numerical routes to the same quantity.
    """
    state = solve_at(m, degree, policy, t, nodes)
    zs = state.zero_set
    tracked = zs.nearest_index(tracked_phi)
    if theorem == "t22":
        # conjugate partner of the tracked zero plays the reference role
        partner = zs.nearest_index(-zs.phases[tracked])
        zs = zs.with_markers(fixed_index=partner, tracked_index=tracked)
    else:
        if zs.fixed_index is None:
            raise TrackingError("balance check needs a fixed zero (fixed_xi policy)")
        if tracked == zs.fixed_index:
            raise TrackingError("tracked zero coincides with the fixed zero")
        zs = zs.with_markers(fixed_index=zs.fixed_index, tracked_index=tracked)
    ctx = motion_context(m, zs, t, nodes=min(nodes, 1024))
    zeta = complex(np.exp(1j * ctx.phi))
    p = state.popuc
    pvals_at_masses = np.abs(polyval(p.poly.coeffs, np.exp(1j * ctx.omegas))) ** 2

    if theorem == "t22":
        C = _c_integral(m, state.ms, p, zeta) + _c_integral(m, state.ms, p, np.conj(zeta))
        w = np.array([w_conjugate(j, ctx) for j in range(len(ctx.gammas))])
        rhs = 2.0 * math.sin(ctx.phi) * float(np.sum(w * pvals_at_masses))
    elif theorem == "t23":
        C = _c_integral(m, state.ms, p, zeta)
        w = np.array([w_mixed(j, ctx) for j in range(len(ctx.gammas))])
        rhs = float(np.sum(w * pvals_at_masses))
        xi = complex(np.exp(1j * ctx.theta0))
        # s(theta)|P|^2 = Re[i (zeta - xi) e^{i theta} D2 conj(P)] with
        # D2 = P/((z-xi)(z-zeta)); smooth through both poles
        d2 = deflate(deflate(p.poly.coeffs, xi), zeta)
        pref = 1j * (zeta - xi)

        def integrand(th: float) -> float:
            z = cmath.exp(1j * th)
            s_p2 = (pref * z * polyval(d2, z) * np.conj(polyval(p.poly.coeffs, z))).real
            return s_p2 * (ctx.f_theta(th) - ctx.f_at_phi) if ctx.f_theta else 0.0

        rhs += _ac_quadrature(m, t, integrand, min(nodes, 2048))
    else:
        C = _c_integral(m, state.ms, p, zeta)
        w = np.array([w_discrete(j, ctx) for j in range(len(ctx.gammas))])
        rhs = float(np.sum(w * pvals_at_masses))

    dphi = tracked_velocity(m, degree, policy, t, ctx.phi, h, nodes)
    lhs = C * dphi
    mismatch = abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1e-14)
    return BalanceEntry(t=t, C=C, dphi_dt=dphi, lhs=lhs, rhs=rhs, mismatch=mismatch)


def sweep_verdicts(
    cfg: SweepConfig, traj: Trajectory
) -> list[dict]:
    """Per-grid-point verdicts for every non-fixed zero chain."""
    out = []
    for i, t in enumerate(traj.ts):
        zs = traj.zero_sets[i]
        entry: dict = {"t": float(t), "verdicts": []}
        for k in range(len(zs)):
            if zs.fixed_index is None or k == zs.fixed_index:
                continue
            marked = zs.with_markers(fixed_index=zs.fixed_index, tracked_index=k)
            try:
                rep: VerdictReport = verdict(
                    motion_context(cfg.measure, marked, float(t)), cfg.theorem
                )
            except Exception as exc:  # collision mid-sweep degrades gracefully
                entry["verdicts"].append({"zero_index": k, "error": str(exc)})
                continue
            item = rep.to_json()
            item["zero_index"] = k
            entry["verdicts"].append(item)
        out.append(entry)
    return out
