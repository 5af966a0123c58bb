"""Physical rates and queue dynamics.

Every function here is a direct transcription of a rate or update law; they
accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig
from .model import Control, QueueState, SlotState


def execution_amount(f, cfg: NetworkConfig):
    """Bits executed in one slot at clock ``f``: tau * f / L."""
    return cfg.slot_len_tau * np.asarray(f, dtype=float) / cfg.cycles_per_bit_L


def execution_power(f, cfg: NetworkConfig):
    """CPU power kappa * f^3 (W)."""
    return cfg.kappa * np.asarray(f, dtype=float) ** 3


def link_capacity(p, g, cfg: NetworkConfig):
    """Shannon capacity of one WD-fog link over a slot, in bits."""
    snr = np.asarray(p, dtype=float) * np.asarray(g, dtype=float) / cfg.noise_power
    return cfg.bandwidth_omega * cfg.slot_len_tau * np.log2(1.0 + snr)


def update_wd_queue(s, offload_total, a):
    """S(t+1) = [S(t) - sum_j alpha C]^+ + a(t)."""
    return np.maximum(np.asarray(s, dtype=float) - offload_total, 0.0) + a


def update_fog_queue(q, mu, transferred_sum):
    """Q(t+1) = [Q(t) - mu(t)]^+ + sum_i min{alpha C, alpha S}."""
    return np.maximum(np.asarray(q, dtype=float) - mu, 0.0) + transferred_sum


def update_virtual_queue(z, gamma, a):
    """Z(t+1) = [Z(t) + gamma(t) - a(t)]^+."""
    return np.maximum(np.asarray(z, dtype=float) + gamma - a, 0.0)


@dataclass(frozen=True)
class SlotFlows:
    mu_fog: np.ndarray  # (M,) bits the fog CPUs can execute this slot
    offload_capacity: np.ndarray  # (N, M) alpha * C
    transferred: np.ndarray  # (N, M) min{alpha C, alpha S}: real bits moved
    admitted: np.ndarray  # (N,)

    @property
    def offload_total(self) -> np.ndarray:
        return self.offload_capacity.sum(axis=1)


def slot_flows(control: Control, state: SlotState, cfg: NetworkConfig) -> SlotFlows:
    capacity = control.alpha * link_capacity(control.p_tr, state.gains, cfg)
    # Surplus link capacity beyond S_i(t) carries dummy bits only.
    transferred = np.minimum(capacity, control.alpha * state.s_wd[:, None])
    return SlotFlows(
        mu_fog=execution_amount(control.f, cfg),
        offload_capacity=capacity,
        transferred=transferred,
        admitted=np.asarray(control.admitted_a, dtype=float),
    )


def apply_flows(queues: QueueState, control: Control, flows: SlotFlows) -> QueueState:
    """End-of-slot transition of all real and virtual queues."""
    q_sub = None
    if queues.q_sub is not None:
        q_sub = _update_subqueues(queues.q_sub, queues.q_fog, flows)
    return QueueState(
        q_fog=update_fog_queue(queues.q_fog, flows.mu_fog, flows.transferred.sum(axis=0)),
        s_wd=update_wd_queue(queues.s_wd, flows.offload_total, flows.admitted),
        z_virtual=update_virtual_queue(queues.z_virtual, control.gamma, flows.admitted),
        q_sub=q_sub,
    )


def _update_subqueues(q_sub: np.ndarray, q_fog: np.ndarray, flows: SlotFlows) -> np.ndarray:
    """Per-(WD, fog) backlogs.  Each fog drains min(Q_j, mu_j) bits across
    its sub-queues in WD-index order, so the sub-queues always sum to Q_j."""
    out = q_sub.copy()
    budget = np.minimum(q_fog, flows.mu_fog)
    for j in range(out.shape[1]):
        left = budget[j]
        for i in range(out.shape[0]):
            if left <= 0:
                break
            take = min(out[i, j], left)
            out[i, j] -= take
            left -= take
    out += flows.transferred
    return out


class DelayMeter:
    """Running time-average of mean fog backlog plus mean WD backlog."""

    def __init__(self) -> None:
        self.total = 0.0
        self.count = 0

    def add(self, q_fog: np.ndarray, s_wd: np.ndarray) -> float:
        self.total += float(np.mean(q_fog)) + float(np.mean(s_wd))
        self.count += 1
        return self.value

    @property
    def value(self) -> float:
        if self.count == 0:
            raise ValueError("delay metric needs at least one recorded slot")
        return self.total / self.count


def delay_metric(q_history, s_history) -> float:
    """Time-average of mean(Q) + mean(S) over a recorded history.

    ``q_history`` is (T, M) and ``s_history`` is (T, N).
    """
    q = np.atleast_2d(np.asarray(q_history, dtype=float))
    s = np.atleast_2d(np.asarray(s_history, dtype=float))
    if q.size == 0 or s.size == 0 or len(q) != len(s):
        raise ValueError("delay metric needs a non-empty, aligned history")
    return float(np.mean(q.mean(axis=1) + s.mean(axis=1)))
