"""Slot loop, run summaries and parameter sweeps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .config import NetworkConfig
from .environment import Environment
from .model import EtaTracker, QueueState, RunRecord, SlotState, check_control
from .queues import DelayMeter, apply_flows, slot_flows
from .scheduler import decide_slot, eta_update, slot_powers
from .utility import utility

log = logging.getLogger(__name__)

SWEEP_AXES = ("V", "num_fog", "num_wd", "none")
_AXIS_FIELD = {"V": "v_param", "num_fog": "num_fog", "num_wd": "num_wd"}


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SummaryRow:
    sweep_value: float
    eta: float  # achieved: sum_i U(mean a_i) / (mean power + c0)
    d_metric: float
    total_utility: float
    total_power: float
    mean_admitted: float
    eta_t_final: float  # last running estimate used by the controller

    def as_row(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


SUMMARY_COLUMNS: tuple[str, ...] = tuple(f.name for f in fields(SummaryRow))


@dataclass
class RunResult:
    cfg: NetworkConfig
    records: list[RunRecord]
    summary: SummaryRow
    mean_admitted: np.ndarray  # per WD
    mean_gamma: np.ndarray  # per WD
    gs_iterations: np.ndarray
    gs_converged: np.ndarray
    gs_nonincreasing: np.ndarray
    drift_excess: np.ndarray  # per slot: Lyapunov difference minus cross terms
    violations: int = 0
    violation_examples: list[str] = field(default_factory=list)
    subqueue_mismatch: float = 0.0
    positions: list[tuple] | None = None

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def backlog(self) -> np.ndarray:
        """Per-slot mean fog backlog plus mean WD backlog."""
        return self.column("mean_q_fog") + self.column("mean_s_wd")


def run_simulation(cfg: NetworkConfig, trace_positions: bool = False) -> RunResult:
    """Run ``cfg.num_slots`` slots and collect per-slot records.

    Within a slot: observe state, take eta(t), solve the controls, move bits,
    update the queues, record, fold the slot into eta, then move the nodes.
    """
    env = Environment(cfg)
    queues = QueueState.empty(cfg)
    tracker = EtaTracker.fresh(cfg)
    delay = DelayMeter()
    T = cfg.num_slots

    records: list[RunRecord] = []
    cum_a = np.zeros(cfg.num_wd)
    cum_power = 0.0
    gs_iter = np.zeros(T, dtype=int)
    gs_conv = np.zeros(T, dtype=bool)
    gs_mono = np.zeros(T, dtype=bool)
    excess = np.zeros(T)
    violations = 0
    examples: list[str] = []
    sub_mismatch = 0.0
    positions: list[tuple] | None = [] if trace_positions else None

    for t in range(T):
        pos_f, pos_w, gains, arrivals = env.observe()
        state = SlotState(t, pos_f, pos_w, gains, arrivals, queues.q_fog, queues.s_wd, queues.z_virtual)
        eta_t = tracker.eta_current
        control, trace = decide_slot(state, eta_t, cfg)

        bad = check_control(control, state, cfg)
        if bad:
            violations += len(bad)
            if len(examples) < 10:
                examples.extend(f"slot {t}: {msg}" for msg in bad)

        flows = slot_flows(control, state, cfg)
        nxt = apply_flows(queues, control, flows)

        offload = flows.offload_total
        cross = (
            float(queues.q_fog @ (flows.offload_capacity.sum(axis=0) - flows.mu_fog))
            + float(queues.s_wd @ (flows.admitted - offload))
            + float(queues.z_virtual @ (control.gamma - flows.admitted))
        )
        excess[t] = nxt.lyapunov() - queues.lyapunov() - cross
        if nxt.q_sub is not None:
            sub_mismatch = max(sub_mismatch, float(np.max(np.abs(nxt.q_sub.sum(axis=0) - nxt.q_fog))))

        exec_p, tx_p = slot_powers(control, cfg)
        rec = RunRecord(
            t=t,
            eta_t=eta_t,
            mean_q_fog=float(np.mean(queues.q_fog)),
            mean_s_wd=float(np.mean(queues.s_wd)),
            mean_z=float(np.mean(queues.z_virtual)),
            total_exec_power=exec_p,
            total_tx_power=tx_p,
            sum_admitted=float(np.sum(flows.admitted)),
            sum_gamma=float(np.sum(control.gamma)),
            d_metric=delay.add(queues.q_fog, queues.s_wd),
        )
        if not all(math.isfinite(v) for v in rec.as_row()):
            raise SimulationError(f"non-finite metric at slot {t}: {rec}")
        records.append(rec)
        if positions is not None:
            positions.extend((t, "fog", j, x, y) for j, (x, y) in enumerate(pos_f))
            positions.extend((t, "wd", i, x, y) for i, (x, y) in enumerate(pos_w))

        cum_a += flows.admitted
        cum_power += exec_p + tx_p
        gs_iter[t], gs_conv[t], gs_mono[t] = trace.iterations, trace.converged, trace.nonincreasing
        eta_update(tracker, control.gamma, exec_p, tx_p, cfg)
        queues = nxt
        env.advance()

    mean_a = cum_a / T
    mean_power = cum_power / T
    total_u = float(np.sum(utility(cfg.utility_kind, mean_a, cfg.utility_alpha)))
    summary = SummaryRow(
        sweep_value=float("nan"),
        eta=total_u / (mean_power + cfg.c0),
        d_metric=delay.value,
        total_utility=total_u,
        total_power=mean_power,
        mean_admitted=float(np.mean(mean_a)),
        eta_t_final=tracker.eta_current,
    )
    if violations:
        log.warning("%d constraint violations, e.g. %s", violations, examples[:3])
    return RunResult(
        cfg=cfg,
        records=records,
        summary=summary,
        mean_admitted=mean_a,
        mean_gamma=tracker.cum_gamma / T,
        gs_iterations=gs_iter,
        gs_converged=gs_conv,
        gs_nonincreasing=gs_mono,
        drift_excess=excess,
        violations=violations,
        violation_examples=examples,
        subqueue_mismatch=sub_mismatch,
        positions=positions,
    )


@dataclass(frozen=True)
class ExperimentSpec:
    base: NetworkConfig
    axis: str = "none"
    values: tuple[float, ...] = ()
    seeds: tuple[int, ...] = (0,)
    out_dir: str | None = None

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"sweep axis must be one of {SWEEP_AXES}")
        if self.axis != "none" and not self.values:
            raise ValueError("sweep values must be non-empty")
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            raise ValueError("replication seeds must be non-empty and distinct")

    def point_config(self, value: float | None, seed: int) -> NetworkConfig:
        changes: dict = {"rng_seed": int(seed)}
        if self.axis != "none":
            name = _AXIS_FIELD[self.axis]
            changes[name] = int(value) if name in ("num_fog", "num_wd") else float(value)
        return self.base.replace(**changes)


@dataclass
class SweepResult:
    spec: ExperimentSpec
    rows: list[SummaryRow]
    runs: dict[tuple[float, int], RunResult]


def average_rows(value: float, rows: list[SummaryRow]) -> SummaryRow:
    names = [f.name for f in fields(SummaryRow) if f.name != "sweep_value"]
    means = {n: float(np.mean([getattr(r, n) for r in rows])) for n in names}
    return SummaryRow(sweep_value=float(value), **means)


def sweep(spec: ExperimentSpec, keep_records: bool = True) -> SweepResult:
    """One summary row per sweep value, averaged over the replication seeds."""
    values = spec.values if spec.axis != "none" else (float("nan"),)
    rows: list[SummaryRow] = []
    runs: dict[tuple[float, int], RunResult] = {}
    for value in values:
        per_seed = []
        for seed in spec.seeds:
            try:
                res = run_simulation(spec.point_config(value, seed))
            except Exception as exc:
                raise SimulationError(f"sweep {spec.axis}={value} seed={seed} failed: {exc}") from exc
            log.info("%s=%s seed=%d eta=%.4f D=%.1f", spec.axis, value, seed, res.summary.eta, res.summary.d_metric)
            if not keep_records:
                res.records = []
            runs[(value, seed)] = res
            per_seed.append(res.summary)
        rows.append(average_rows(value, per_seed))
    return SweepResult(spec=spec, rows=rows, runs=runs)
