"""Online utility-power efficient scheduler.

Each slot the controller minimises a drift-plus-penalty bound that splits
into four independent blocks:

* auxiliary targets gamma: closed form via (U')^{-1}
* admission a: threshold on S_i - Z_i
* CPU clocks f: square-root closed form
* powers P and offloading alpha: Gauss-Seidel alternation between a
  capacitated max-weight matching (alpha | P) and a water-filling style
  closed form (P | alpha)

The running efficiency estimate eta(t) replaces the unknown optimal ratio in
the penalty term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import NetworkConfig
from .model import Control, EtaTracker, SlotState
from .queues import execution_power, link_capacity
from .utility import utility, utility_prime_inverse

LN2 = math.log(2.0)


def eta_update(
    tracker: EtaTracker,
    gamma_t: np.ndarray,
    exec_power_t: float,
    tx_power_t: float,
    cfg: NetworkConfig,
) -> float:
    """Fold one slot into the running sums and return eta for the next slot.

    eta = sum_i U(mean gamma_i) / (mean total power + c0).  A zero ratio
    (nothing targeted yet) keeps the previous positive value, since the clock
    and power rules divide by eta.
    """
    if exec_power_t < 0 or tx_power_t < 0:
        raise ValueError("powers must be non-negative")
    tracker.cum_gamma = tracker.cum_gamma + np.asarray(gamma_t, dtype=float)
    tracker.cum_power += float(exec_power_t) + float(tx_power_t)
    tracker.slots_seen += 1
    t = tracker.slots_seen
    num = float(np.sum(utility(cfg.utility_kind, tracker.cum_gamma / t, cfg.utility_alpha)))
    ratio = num / (tracker.cum_power / t + cfg.c0)
    if ratio > 0 and math.isfinite(ratio):
        tracker.eta_current = ratio
    return tracker.eta_current


# sp1
def solve_auxiliary(z, cfg: NetworkConfig) -> np.ndarray:
    y = np.asarray(z, dtype=float) / cfg.v_param
    return np.clip(utility_prime_inverse(cfg.utility_kind, y, cfg.utility_alpha), 0.0, cfg.a_max)


# sp2
def solve_admission(s, z, arrivals) -> np.ndarray:
    s, z = np.asarray(s, dtype=float), np.asarray(z, dtype=float)
    return np.where(s - z < 0, np.asarray(arrivals, dtype=float), 0.0)


# sp3
def solve_cpu_clock(q, eta_t: float, cfg: NetworkConfig) -> np.ndarray:
    if not eta_t > 0:
        raise ValueError(f"eta must be positive, got {eta_t}")
    q = np.asarray(q, dtype=float)
    f = np.sqrt(q * cfg.slot_len_tau / (3.0 * cfg.kappa * cfg.v_param * eta_t * cfg.cycles_per_bit_L))
    return np.clip(f, cfg.f_min, cfg.f_max)


def solve_power_given_alpha(alpha, s, q, gains, eta_t: float, cfg: NetworkConfig) -> np.ndarray:
    """Per-link optimal transmit power for fixed offloading indicators."""
    if not eta_t > 0:
        raise ValueError(f"eta must be positive, got {eta_t}")
    backlog_gap = np.asarray(s, dtype=float)[:, None] - np.asarray(q, dtype=float)[None, :]
    omega_tau = cfg.bandwidth_omega * cfg.slot_len_tau
    level = backlog_gap * alpha * omega_tau / (cfg.v_param * eta_t * LN2)
    p = level - cfg.noise_power / np.asarray(gains, dtype=float)
    return np.minimum(cfg.p_max, np.maximum(p, 0.0))


def max_weight_matching(weights: np.ndarray, capacity: int) -> np.ndarray:
    """Binary alpha maximising sum(alpha * weights) with at most one fog per
    WD (row) and at most ``capacity`` WDs per fog (column).

    Every fog column is replicated ``capacity`` times and the resulting
    assignment problem is solved exactly.  Non-positive edges are never
    selected.
    """
    w = np.asarray(weights, dtype=float)
    n, m = w.shape
    alpha = np.zeros((n, m), dtype=np.int8)
    if n == 0 or m == 0 or not np.any(w > 0):
        return alpha
    gain = np.repeat(np.maximum(w, 0.0), capacity, axis=1)
    rows, cols = linear_sum_assignment(gain, maximize=True)
    fogs = cols // capacity
    keep = w[rows, fogs] > 0
    alpha[rows[keep], fogs[keep]] = 1
    return alpha


def solve_offloading_given_power(p_tr, s, q, gains, cfg: NetworkConfig) -> np.ndarray:
    cap = link_capacity(p_tr, gains, cfg)
    weights = (np.asarray(s, dtype=float)[:, None] - np.asarray(q, dtype=float)[None, :]) * cap
    return max_weight_matching(weights, cfg.antennas_R)


def sp4_objective(p_tr, alpha, s, q, gains, eta_t: float, cfg: NetworkConfig) -> float:
    cap = alpha * link_capacity(p_tr, gains, cfg)
    return float(
        cfg.v_param * eta_t * np.sum(p_tr)
        + np.dot(q, cap.sum(axis=0))
        - np.dot(s, cap.sum(axis=1))
    )


@dataclass
class GsTrace:
    objectives: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    @property
    def nonincreasing(self) -> bool:
        obj = self.objectives
        return all(b <= a + 1e-9 * max(1.0, abs(a)) for a, b in zip(obj, obj[1:]))


def gauss_seidel_sp4(state: SlotState, eta_t: float, cfg: NetworkConfig):
    """Alternate matching and power updates from P = p_max on every link.

    Returns ``(p_tr, alpha, trace)``.  Stops on a repeated offloading pattern,
    an all-zero pattern, or a relative objective change below ``gs_rel_tol``.
    """
    s, q, g = state.s_wd, state.q_fog, state.gains
    p = np.full(g.shape, cfg.p_max)
    trace = GsTrace()
    prev_alpha = None
    alpha = np.zeros(g.shape, dtype=np.int8)
    for k in range(1, cfg.gs_max_iters + 1):
        alpha = solve_offloading_given_power(p, s, q, g, cfg)
        p = solve_power_given_alpha(alpha, s, q, g, eta_t, cfg)
        obj = sp4_objective(p, alpha, s, q, g, eta_t, cfg)
        trace.objectives.append(obj)
        trace.iterations = k
        if not alpha.any():
            trace.converged = True
            break
        if prev_alpha is not None:
            prev_obj = trace.objectives[-2]
            if np.array_equal(alpha, prev_alpha) or abs(obj - prev_obj) <= cfg.gs_rel_tol * max(abs(prev_obj), 1e-300):
                trace.converged = True
                break
        prev_alpha = alpha
    return p, alpha, trace


def decide_slot(state: SlotState, eta_t: float, cfg: NetworkConfig) -> tuple[Control, GsTrace]:
    """Solve the per-slot problem; also return the Gauss-Seidel trace."""
    gamma = solve_auxiliary(state.z_virtual, cfg)
    admitted = solve_admission(state.s_wd, state.z_virtual, state.arrivals)
    f = solve_cpu_clock(state.q_fog, eta_t, cfg)
    p_tr, alpha, trace = gauss_seidel_sp4(state, eta_t, cfg)
    return Control(f=f, p_tr=p_tr, alpha=alpha, admitted_a=admitted, gamma=gamma), trace


def schedule_slot(state: SlotState, tracker: EtaTracker | float, cfg: NetworkConfig) -> Control:
    eta_t = tracker.eta_current if isinstance(tracker, EtaTracker) else float(tracker)
    return decide_slot(state, eta_t, cfg)[0]


def slot_powers(control: Control, cfg: NetworkConfig) -> tuple[float, float]:
    """(total CPU power, total transmit power) drawn by ``control``."""
    return float(np.sum(execution_power(control.f, cfg))), float(np.sum(control.p_tr))


__all__ = [
    "GsTrace",
    "decide_slot",
    "eta_update",
    "gauss_seidel_sp4",
    "max_weight_matching",
    "schedule_slot",
    "slot_powers",
    "solve_admission",
    "solve_auxiliary",
    "solve_cpu_clock",
    "solve_offloading_given_power",
    "solve_power_given_alpha",
    "sp4_objective",
]
