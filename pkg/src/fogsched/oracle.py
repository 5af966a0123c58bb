"""Brute-force verifiers and theoretical constants.

Nothing in here calls the scheduler: every check recomputes its answer by
grid search or enumeration so it can be compared against the closed forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .config import NetworkConfig
from .environment import Environment
from .model import Control, SlotState, check_control
from .queues import execution_amount, execution_power, link_capacity
from .utility import utility

MAX_BRUTE_WD, MAX_BRUTE_FOG, MAX_BRUTE_R = 4, 2, 2
MAX_ENUM_WD, MAX_ENUM_FOG = 8, 4


class InstanceTooLarge(ValueError):
    pass


def p4_objective(control: Control, state: SlotState, eta_t: float, cfg: NetworkConfig) -> float:
    """Per-slot drift-plus-penalty objective for a feasible control.

    The constant c0 term is omitted: it does not depend on the control.
    """
    bad = check_control(control, state, cfg)
    if bad:
        raise ValueError("infeasible control: " + "; ".join(bad))
    u = utility(cfg.utility_kind, control.gamma, cfg.utility_alpha)
    power = np.sum(execution_power(control.f, cfg)) + np.sum(control.p_tr)
    offload = control.alpha * link_capacity(control.p_tr, state.gains, cfg)
    mu = execution_amount(control.f, cfg)
    a = control.admitted_a
    return float(
        -cfg.v_param * (np.sum(u) - eta_t * power)
        + np.dot(state.q_fog, offload.sum(axis=0) - mu)
        + np.dot(state.z_virtual, control.gamma - a)
        + np.dot(state.s_wd, a - offload.sum(axis=1))
    )


def feasible_assignments(num_wd: int, num_fog: int, capacity: int):
    """Yield every binary offloading matrix with row sums <= 1 and column
    sums <= ``capacity``, as a tuple of per-WD choices (-1 = none)."""
    for choice in itertools.product(range(-1, num_fog), repeat=num_wd):
        load = [0] * num_fog
        ok = True
        for j in choice:
            if j >= 0:
                load[j] += 1
                if load[j] > capacity:
                    ok = False
                    break
        if ok:
            yield choice


def _choice_matrix(choice, num_fog: int) -> np.ndarray:
    alpha = np.zeros((len(choice), num_fog), dtype=np.int8)
    for i, j in enumerate(choice):
        if j >= 0:
            alpha[i, j] = 1
    return alpha


def enumerate_matchings(weights, capacity: int) -> tuple[float, np.ndarray]:
    """Exhaustive optimum of sum(alpha * weights) over feasible binary alpha.

    Ties go to the first assignment in enumeration order.
    """
    w = np.asarray(weights, dtype=float)
    n, m = w.shape
    if n > MAX_ENUM_WD or m > MAX_ENUM_FOG:
        raise InstanceTooLarge(f"enumeration limited to {MAX_ENUM_WD} WDs x {MAX_ENUM_FOG} fogs")
    best_value, best = 0.0, (-1,) * n
    for choice in feasible_assignments(n, m, capacity):
        value = sum(w[i, j] for i, j in enumerate(choice) if j >= 0)
        if value > best_value:
            best_value, best = value, choice
    return float(best_value), _choice_matrix(best, m)


def relaxed_offloading_vertices(weights, capacity: int, tol: float = 1e-9):
    """Optimum of the continuous offloading relaxation by vertex enumeration.

    Variables alpha_ij in [0, 1], row sums <= 1, column sums <= capacity.
    Every basic solution (n linearly independent tight constraints) is
    solved for and kept if feasible; the best one is returned as
    ``(value, vertex)``.  Meant for instances with at most 6 variables.
    """
    w = np.asarray(weights, dtype=float)
    n_wd, n_fog = w.shape
    nv = n_wd * n_fog
    if nv > 6:
        raise InstanceTooLarge("vertex enumeration limited to 6 variables")
    rows_a, rows_b = [], []
    for i in range(n_wd):
        r = np.zeros((n_wd, n_fog))
        r[i, :] = 1
        rows_a.append(r.ravel())
        rows_b.append(1.0)
    for j in range(n_fog):
        r = np.zeros((n_wd, n_fog))
        r[:, j] = 1
        rows_a.append(r.ravel())
        rows_b.append(float(capacity))
    for k in range(nv):
        e = np.zeros(nv)
        e[k] = 1
        rows_a.append(e)
        rows_b.append(1.0)
        rows_a.append(-e)
        rows_b.append(0.0)
    A, b = np.array(rows_a), np.array(rows_b)
    best_value, best_x = -math.inf, None
    for idx in itertools.combinations(range(len(A)), nv):
        sub = A[list(idx)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, b[list(idx)])
        if np.all(A @ x <= b + tol):
            value = float(w.ravel() @ x)
            if value > best_value + tol:
                best_value, best_x = value, x
    return best_value, best_x.reshape(n_wd, n_fog)


@dataclass(frozen=True)
class GridSizes:
    gamma: int = 10_001
    admit: int = 101
    clock: int = 10_001
    power: int = 2_001


def brute_force_slot(
    state: SlotState,
    eta_t: float,
    cfg: NetworkConfig,
    grid: GridSizes = GridSizes(),
) -> Control:
    """Grid / enumeration minimiser of the per-slot objective on a tiny
    instance.

    The objective is a sum of a gamma term, an admission term, a clock term
    and a (power, offloading) term over a product of feasible sets, so each
    block is searched on its own grid; offloading patterns are enumerated
    exhaustively and, for each one, every active link's power is grid
    searched.
    """
    n, m = state.num_wd, state.num_fog
    if n > MAX_BRUTE_WD or m > MAX_BRUTE_FOG or cfg.antennas_R > MAX_BRUTE_R:
        raise InstanceTooLarge(
            f"brute force limited to {MAX_BRUTE_WD} WDs, {MAX_BRUTE_FOG} fogs, R <= {MAX_BRUTE_R}"
        )
    V = cfg.v_param

    g_grid = np.linspace(0.0, cfg.a_max, grid.gamma)
    u_grid = utility(cfg.utility_kind, g_grid, cfg.utility_alpha)
    gamma = np.array([g_grid[np.argmin(-V * u_grid + z * g_grid)] for z in state.z_virtual])

    admitted = np.zeros(n)
    for i in range(n):
        a_grid = np.linspace(0.0, state.arrivals[i], grid.admit)
        admitted[i] = a_grid[np.argmin(a_grid * (state.s_wd[i] - state.z_virtual[i]))]

    f_grid = np.linspace(cfg.f_min, cfg.f_max, grid.clock)
    f_cost = lambda q: V * eta_t * cfg.kappa * f_grid**3 - q * cfg.slot_len_tau * f_grid / cfg.cycles_per_bit_L
    f = np.array([f_grid[np.argmin(f_cost(q))] for q in state.q_fog])

    p_grid = np.linspace(0.0, cfg.p_max, grid.power)
    link_best_p = np.zeros((n, m))
    link_best_v = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            cap = link_capacity(p_grid, state.gains[i, j], cfg)
            vals = V * eta_t * p_grid + (state.q_fog[j] - state.s_wd[i]) * cap
            k = int(np.argmin(vals))
            link_best_p[i, j], link_best_v[i, j] = p_grid[k], vals[k]

    best_value, best_choice = 0.0, (-1,) * n
    for choice in feasible_assignments(n, m, cfg.antennas_R):
        value = sum(link_best_v[i, j] for i, j in enumerate(choice) if j >= 0)
        if value < best_value:
            best_value, best_choice = value, choice
    alpha = _choice_matrix(best_choice, m)
    p_tr = np.where(alpha == 1, link_best_p, 0.0)
    return Control(f=f, p_tr=p_tr, alpha=alpha, admitted_a=admitted, gamma=gamma)


def max_link_capacity(cfg: NetworkConfig) -> float:
    """Per-slot link capacity at p_max and the best-case gain (distance d0,
    fading ``vartheta_sigma_max``)."""
    g = cfg.vartheta_sigma_max * cfg.pathloss_g0
    return float(link_capacity(cfg.p_max, g, cfg))


def compute_vartheta(cfg: NetworkConfig, c_max: float | None = None) -> float:
    """Constant bounding the squared-rate terms of the one-slot drift.

    Worst-case substitution of per-slot maxima: mu_max = tau f_max / L,
    R links of capacity c_max into each fog, one link out of each WD,
    arrivals and auxiliary targets up to a_max.
    """
    c_max = max_link_capacity(cfg) if c_max is None else c_max
    mu_max = cfg.mu_max
    M, N, R = cfg.num_fog, cfg.num_wd, cfg.antennas_R
    gamma_max = cfg.a_max
    vt = (
        0.5 * M * (mu_max**2 + (R * c_max) ** 2)
        + 0.5 * N * (cfg.a_max**2 + c_max**2)
        + 0.5 * N * max(gamma_max, cfg.a_max) ** 2
    )
    if not vt > 0:
        raise ValueError("vartheta must be positive; all rate maxima are zero")
    return float(vt)


def max_total_power(cfg: NetworkConfig) -> float:
    """e_max: all CPUs at f_max plus every WD transmitting at p_max."""
    return float(cfg.num_fog * cfg.kappa * cfg.f_max**3 + cfg.num_wd * cfg.p_max)


@dataclass(frozen=True)
class SlaterProbe:
    epsilon: float
    fog_margin: float  # mu_max - largest mean fog intake capacity
    wd_margin: float  # mean WD service - mean admitted
    mean_service: float
    admit_fraction: float
    samples: int


def slater_probe(cfg: NetworkConfig, samples: int = 2000, seed: int = 12345) -> SlaterProbe:
    """Estimate a Slater slack from a simple stationary randomised policy.

    Probe policy, per independent network snapshot: every CPU at f_max;
    links carry at most mu_max / (2R) bits (power cut back accordingly,
    never above p_max); offloading is the max-weight matching on those
    capped capacities; each WD admits a fixed fraction of its arrivals equal
    to half of what its mean link service could absorb.  WDs and fogs are
    exchangeable under uniform placement, so margins are pooled.
    """
    from .scheduler import max_weight_matching

    rng = np.random.default_rng(seed)
    cap_target = cfg.mu_max / (2 * cfg.antennas_R)
    omega_tau = cfg.bandwidth_omega * cfg.slot_len_tau
    fog_load = np.zeros(cfg.num_fog)
    service = np.zeros(cfg.num_wd)
    for k in range(samples):
        env = Environment(cfg, seed=int(rng.integers(2**63)))
        _, _, gains, _ = env.observe()
        need = (2.0 ** (cap_target / omega_tau) - 1.0) * cfg.noise_power / gains
        p = np.minimum(need, cfg.p_max)
        cap = np.minimum(link_capacity(p, gains, cfg), cap_target)
        # random jitter breaks systematic ties between equal capped links
        jitter = 1.0 + 1e-6 * rng.random(cap.shape)
        alpha = max_weight_matching(cap * jitter, cfg.antennas_R)
        carried = alpha * cap
        fog_load += carried.sum(axis=0)
        service += carried.sum(axis=1)
    fog_load /= samples
    service /= samples
    mean_service = float(service.mean())
    mean_arrival = cfg.a_max / 2.0
    admit_fraction = min(1.0, 0.5 * mean_service / mean_arrival) if mean_arrival > 0 else 0.0
    fog_margin = float(cfg.mu_max - fog_load.max())
    wd_margin = mean_service - admit_fraction * mean_arrival
    return SlaterProbe(
        epsilon=min(fog_margin, wd_margin),
        fog_margin=fog_margin,
        wd_margin=wd_margin,
        mean_service=mean_service,
        admit_fraction=admit_fraction,
        samples=samples,
    )


@dataclass(frozen=True)
class BoundsReport:
    v_param: float
    vartheta: float
    e_max: float
    epsilon_est: float
    eta_star_est: float
    eta_measured: float
    d_measured: float
    eta_lower_bound: float
    d_upper_bound: float
    eta_ok: bool
    d_ok: bool

    def to_dict(self) -> dict:
        return asdict(self)


def bounds_report(
    eta_measured: float,
    d_measured: float,
    cfg: NetworkConfig,
    eta_star_est: float,
    epsilon: float,
) -> BoundsReport:
    """Check one run against the efficiency lower bound and backlog upper
    bound.  ``eta_star_est`` is an empirical stand-in for the optimum."""
    if not epsilon > 0:
        raise ValueError(f"Slater slack estimate must be positive, got {epsilon}")
    vt = compute_vartheta(cfg)
    e_max = max_total_power(cfg)
    eta_lb = eta_star_est - vt / (cfg.v_param * cfg.c0)
    d_ub = vt / epsilon + cfg.v_param * eta_measured * e_max / epsilon
    return BoundsReport(
        v_param=cfg.v_param,
        vartheta=vt,
        e_max=e_max,
        epsilon_est=epsilon,
        eta_star_est=eta_star_est,
        eta_measured=eta_measured,
        d_measured=d_measured,
        eta_lower_bound=eta_lb,
        d_upper_bound=d_ub,
        eta_ok=bool(eta_measured >= eta_lb),
        d_ok=bool(d_measured <= d_ub),
    )
