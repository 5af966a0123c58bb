"""Shared per-slot value types.

Array conventions: matrices indexed ``[wd, fog]`` (shape ``(num_wd, num_fog)``),
per-fog vectors of length ``num_fog``, per-WD vectors of length ``num_wd``.
Bits, watts, hertz and seconds throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from .config import NetworkConfig


@dataclass(frozen=True)
class SlotState:
    """Everything the controller observes at the start of slot ``t``."""

    t: int
    positions_fog: np.ndarray  # (M, 2) m
    positions_wd: np.ndarray  # (N, 2) m
    gains: np.ndarray  # (N, M) composite channel power gain
    arrivals: np.ndarray  # (N,) bits
    q_fog: np.ndarray  # (M,) bits
    s_wd: np.ndarray  # (N,) bits
    z_virtual: np.ndarray  # (N,) bits

    @property
    def num_wd(self) -> int:
        return len(self.s_wd)

    @property
    def num_fog(self) -> int:
        return len(self.q_fog)


@dataclass(frozen=True)
class Control:
    """One slot's decision: CPU clocks, transmit powers, offloading
    indicators, admitted bits, plus the auxiliary targets ``gamma``."""

    f: np.ndarray  # (M,) Hz
    p_tr: np.ndarray  # (N, M) W
    alpha: np.ndarray  # (N, M) in {0, 1}
    admitted_a: np.ndarray  # (N,) bits
    gamma: np.ndarray  # (N,) bits


def check_control(control: Control, state: SlotState, cfg: NetworkConfig, atol: float = 1e-9) -> list[str]:
    """Return a description of every violated per-slot constraint (empty if
    the control is feasible)."""
    bad: list[str] = []
    f, p, alpha, a, g = control.f, control.p_tr, control.alpha, control.admitted_a, control.gamma
    if np.any(f < -atol) or np.any(f > cfg.f_max * (1 + atol)):
        bad.append("cpu clock outside [0, f_max]")
    if np.any(p < -atol) or np.any(p > cfg.p_max * (1 + atol)):
        bad.append("transmit power outside [0, p_max]")
    if np.any(a < -atol) or np.any(a > state.arrivals + atol):
        bad.append("admitted data outside [0, A_i(t)]")
    if np.any(g < -atol) or np.any(g > cfg.a_max * (1 + atol)):
        bad.append("auxiliary variable outside [0, a_max]")
    if not np.all((alpha == 0) | (alpha == 1)):
        bad.append("offloading indicator not binary")
    if np.any(alpha.sum(axis=1) > 1):
        bad.append("WD offloads to more than one fog node")
    if np.any(alpha.sum(axis=0) > cfg.antennas_R):
        bad.append("fog node serves more than R WDs")
    if np.any((alpha == 0) & (p > 0)):
        bad.append("positive power on an inactive link")
    for name in ("f", "p_tr", "alpha", "admitted_a", "gamma"):
        if not np.all(np.isfinite(getattr(control, name))):
            bad.append(f"non-finite {name}")
    return bad


@dataclass
class EtaTracker:
    """Running sums behind the per-slot efficiency estimate eta(t).

    Mutable, owned by a single simulation run.
    """

    cum_gamma: np.ndarray
    cum_power: float = 0.0
    slots_seen: int = 0
    eta_current: float = 1.0

    @classmethod
    def fresh(cls, cfg: NetworkConfig) -> "EtaTracker":
        return cls(cum_gamma=np.zeros(cfg.num_wd), eta_current=cfg.eta_init)


@dataclass(frozen=True)
class RunRecord:
    t: int
    eta_t: float
    mean_q_fog: float
    mean_s_wd: float
    mean_z: float
    total_exec_power: float
    total_tx_power: float
    sum_admitted: float
    sum_gamma: float
    d_metric: float

    def as_row(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


RUN_RECORD_COLUMNS: tuple[str, ...] = tuple(f.name for f in fields(RunRecord))


@dataclass
class QueueState:
    """Mutable queue vector theta(t) = [Q, S, Z] carried through a run."""

    q_fog: np.ndarray
    s_wd: np.ndarray
    z_virtual: np.ndarray
    q_sub: np.ndarray | None = field(default=None)  # (N, M) debug sub-queues

    @classmethod
    def empty(cls, cfg: NetworkConfig) -> "QueueState":
        return cls(
            q_fog=np.zeros(cfg.num_fog),
            s_wd=np.zeros(cfg.num_wd),
            z_virtual=np.zeros(cfg.num_wd),
            q_sub=np.zeros((cfg.num_wd, cfg.num_fog)) if cfg.debug_subqueues else None,
        )

    def lyapunov(self) -> float:
        return 0.5 * (
            float(self.q_fog @ self.q_fog) + float(self.s_wd @ self.s_wd) + float(self.z_virtual @ self.z_virtual)
        )
