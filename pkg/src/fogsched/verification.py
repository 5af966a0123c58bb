"""Randomised scheduler-vs-oracle checks, shared by the CLI and the tests.

Each check draws its own instances from a seeded generator and returns a
:class:`CheckResult`; none of them raise on a failed comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig, default_config
from .environment import Environment
from .model import SlotState
from .oracle import (
    brute_force_slot,
    enumerate_matchings,
    p4_objective,
    relaxed_offloading_vertices,
)
from .queues import link_capacity
from .scheduler import (
    decide_slot,
    max_weight_matching,
    solve_auxiliary,
    solve_cpu_clock,
    solve_power_given_alpha,
)
from .utility import utility

V_CHOICES = tuple(float(v) for v in np.arange(1, 8) * 1e6)


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    worst: float  # worst observed gap in the check's own units
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.cases} cases, worst gap {self.worst:.3g} {self.detail}".rstrip()


def _loguniform(rng, lo, hi, size):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size))


def random_state(cfg: NetworkConfig, rng: np.random.Generator, queue_hi: float = 4e4) -> SlotState:
    """Network snapshot from the environment model plus uniform queues."""
    env = Environment(cfg, seed=int(rng.integers(2**63)))
    pf, pw, gains, arrivals = env.observe()
    return SlotState(
        t=0,
        positions_fog=pf,
        positions_wd=pw,
        gains=gains,
        arrivals=arrivals,
        q_fog=rng.uniform(0, queue_hi, cfg.num_fog),
        s_wd=rng.uniform(0, queue_hi, cfg.num_wd),
        z_virtual=rng.uniform(0, queue_hi, cfg.num_wd),
    )


def check_closed_forms(states: int = 100, grid: int = 10_000, rel_tol: float = 1e-6, seed: int = 1) -> list[CheckResult]:
    """Auxiliary-variable, CPU-clock and per-link power closed forms against
    uniform grid search of their own objectives."""
    rng = np.random.default_rng(seed)
    base = default_config()
    worst = {"aux": 0.0, "clock": 0.0, "power": 0.0}
    for _ in range(states):
        cfg = base.replace(v_param=float(rng.choice(V_CHOICES)), rng_seed=int(rng.integers(2**31)))
        eta = float(rng.uniform(0.5, 5.0))
        z = _loguniform(rng, 1.0, 1e7, cfg.num_wd)
        q = _loguniform(rng, 1.0, 1e6, cfg.num_fog)
        s = _loguniform(rng, 1.0, 1e6, cfg.num_wd)
        gains = Environment(cfg, seed=int(rng.integers(2**63))).observe()[2]
        V = cfg.v_param

        def rel(closed, best):
            return float(np.max((closed - best) / np.maximum(np.abs(best), 1.0)))

        g_grid = np.linspace(0.0, cfg.a_max, grid)
        aux_obj = lambda g, zz: -V * utility(cfg.utility_kind, g, cfg.utility_alpha) + zz * g
        gamma = solve_auxiliary(z, cfg)
        grid_best = np.min(aux_obj(g_grid[None, :], z[:, None]), axis=1)
        worst["aux"] = max(worst["aux"], rel(aux_obj(gamma, z), grid_best))

        f_grid = np.linspace(0.0, cfg.f_max, grid)
        clock_obj = lambda f, qq: V * eta * cfg.kappa * f**3 - qq * cfg.slot_len_tau * f / cfg.cycles_per_bit_L
        f = solve_cpu_clock(q, eta, cfg)
        grid_best = np.min(clock_obj(f_grid[None, :], q[:, None]), axis=1)
        worst["clock"] = max(worst["clock"], rel(clock_obj(f, q), grid_best))

        alpha = np.ones_like(gains, dtype=np.int8)
        p = solve_power_given_alpha(alpha, s, q, gains, eta, cfg)
        gap = (q[None, :] - s[:, None])
        link_obj = lambda pp: V * eta * pp + gap[..., None] * link_capacity(pp, gains[..., None], cfg)
        p_grid = np.linspace(0.0, cfg.p_max, grid)
        grid_best = np.min(link_obj(p_grid[None, None, :]), axis=2)
        closed = link_obj(p[..., None])[..., 0]
        worst["power"] = max(worst["power"], rel(closed, grid_best))

    names = {
        "aux": "auxiliary-variable closed form vs grid",
        "clock": "CPU-clock closed form vs grid",
        "power": "per-link power closed form vs grid",
    }
    return [
        CheckResult(names[k], worst[k] <= rel_tol, states, worst[k], f"(tol {rel_tol:g} rel)")
        for k in ("aux", "clock", "power")
    ]


def check_matching(instances: int = 200, seed: int = 2) -> CheckResult:
    """Scheduler matching vs exhaustive enumeration, |N|<=6, |M|<=3, R<=2."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    mismatched = 0
    tie_cases = 0
    for k in range(instances):
        n, m, R = int(rng.integers(1, 7)), int(rng.integers(1, 4)), int(rng.integers(1, 3))
        if k % 4 == 3:
            # small integer weights: plenty of exact ties
            w = rng.integers(-3, 6, size=(n, m)).astype(float)
        else:
            cfg = default_config(num_wd=n, num_fog=m, antennas_R=R)
            st = random_state(cfg, rng)
            cap = link_capacity(cfg.p_max, st.gains, cfg)
            w = (st.s_wd[:, None] - st.q_fog[None, :]) * cap
        alpha = max_weight_matching(w, R)
        ok_shape = alpha.sum(axis=1).max() <= 1 and alpha.sum(axis=0).max() <= R
        best, alpha_enum = enumerate_matchings(w, R)
        got = float(np.sum(w * alpha))
        best = float(np.sum(w * alpha_enum))
        if not np.array_equal(alpha, alpha_enum):
            tie_cases += 1
            gap = abs(got - best) / max(abs(best), 1.0)
        else:
            gap = abs(got - best)
        worst = max(worst, gap)
        if not ok_shape or gap > 1e-12:
            mismatched += 1
    return CheckResult(
        "matching vs exhaustive enumeration",
        mismatched == 0,
        instances,
        worst,
        f"({tie_cases} tie-broken differently)",
    )


def check_integrality(instances: int = 30, seed: int = 3) -> CheckResult:
    """Continuous relaxation optimum sits at a binary vertex with the
    matching value."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    for _ in range(instances):
        n, m = int(rng.integers(1, 4)), int(rng.integers(1, 3))
        R = int(rng.integers(1, 3))
        w = rng.normal(size=(n, m)) * 1e3
        lp_value, vertex = relaxed_offloading_vertices(w, R)
        value, _ = enumerate_matchings(w, R)
        binary = np.allclose(vertex, np.round(vertex), atol=1e-9)
        gap = abs(lp_value - value) / max(abs(value), 1.0)
        worst = max(worst, gap)
        if not binary or gap > 1e-9:
            failures += 1
    return CheckResult("offloading relaxation attains a binary optimum", failures == 0, instances, worst)


def check_slot_oracle(instances: int = 20, rel_tol: float = 1e-4, seed: int = 4) -> CheckResult:
    """Whole-slot objective of the scheduler vs grid/enumeration optimum."""
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(instances):
        n, m, R = int(rng.integers(1, 5)), int(rng.integers(1, 3)), int(rng.integers(1, 3))
        cfg = default_config(num_wd=n, num_fog=m, antennas_R=R, v_param=float(rng.choice(V_CHOICES)))
        st = random_state(cfg, rng)
        eta = float(rng.uniform(1.0, 4.0))
        ours = p4_objective(decide_slot(st, eta, cfg)[0], st, eta, cfg)
        oracle = p4_objective(brute_force_slot(st, eta, cfg), st, eta, cfg)
        worst = max(worst, (ours - oracle) / max(abs(oracle), 1.0))
    return CheckResult(
        "slot objective vs brute force", worst <= rel_tol, instances, worst, f"(tol {rel_tol:g} rel)"
    )


def run_all(quick: bool = False) -> list[CheckResult]:
    scale = 4 if quick else 1
    results = check_closed_forms(states=100 // scale)
    results.append(check_matching(instances=200 // scale))
    results.append(check_integrality(instances=30 // scale))
    results.append(check_slot_oracle(instances=20 // scale))
    return results
