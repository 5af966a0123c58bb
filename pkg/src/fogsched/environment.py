"""Stochastic world: random-waypoint mobility, block-fading channels, arrivals.

Each concern draws from its own generator, all spawned from the run seed, so
a run is reproducible and any one stream can be replayed on its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig


@dataclass
class MobilityState:
    """Random-waypoint state for a group of nodes with a common speed range."""

    position: np.ndarray  # (K, 2)
    waypoint: np.ndarray  # (K, 2)
    speed: np.ndarray  # (K,)
    pause: np.ndarray  # (K,) seconds left to wait at the current waypoint
    area_side: float
    speed_range: tuple[float, float]
    pause_max: float = 0.0

    @classmethod
    def random(
        cls,
        count: int,
        area_side: float,
        speed_range: tuple[float, float],
        rng: np.random.Generator,
        pause_max: float = 0.0,
    ) -> "MobilityState":
        return cls(
            position=rng.uniform(0.0, area_side, size=(count, 2)),
            waypoint=rng.uniform(0.0, area_side, size=(count, 2)),
            speed=rng.uniform(*speed_range, size=count),
            pause=np.zeros(count),
            area_side=area_side,
            speed_range=speed_range,
            pause_max=pause_max,
        )

    def copy(self) -> "MobilityState":
        return MobilityState(
            self.position.copy(),
            self.waypoint.copy(),
            self.speed.copy(),
            self.pause.copy(),
            self.area_side,
            self.speed_range,
            self.pause_max,
        )


def step_mobility(m: MobilityState, dt: float, rng: np.random.Generator) -> MobilityState:
    """Advance every node by ``dt`` seconds.

    A moving node travels ``speed * dt`` straight toward its waypoint.  If it
    reaches the waypoint it stops there for the rest of the step; if it is
    then not pausing, it draws a fresh uniform waypoint, speed and pause.
    """
    out = m.copy()
    waiting = out.pause > 0
    out.pause[waiting] = np.maximum(out.pause[waiting] - dt, 0.0)

    moving = ~waiting
    delta = out.waypoint - out.position
    dist = np.hypot(delta[:, 0], delta[:, 1])
    travel = out.speed * dt
    arrive = moving & (travel >= dist)
    partial = moving & ~arrive & (dist > 0)

    scale = np.zeros_like(dist)
    scale[partial] = travel[partial] / dist[partial]
    out.position[partial] += delta[partial] * scale[partial, None]
    out.position[arrive] = out.waypoint[arrive]

    # Nodes sitting on their waypoint with no pause left pick the next leg.
    done = arrive | (waiting & (out.pause <= 0))
    k = int(done.sum())
    if k:
        out.waypoint[done] = rng.uniform(0.0, out.area_side, size=(k, 2))
        out.speed[done] = rng.uniform(*out.speed_range, size=k)
        if out.pause_max > 0:
            out.pause[done] = rng.uniform(0.0, out.pause_max, size=k)
    np.clip(out.position, 0.0, out.area_side, out=out.position)
    return out


def pair_distances(positions_wd: np.ndarray, positions_fog: np.ndarray) -> np.ndarray:
    diff = positions_wd[:, None, :] - positions_fog[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def path_gain(distance, cfg: NetworkConfig):
    """Large-scale gain g0 * (d0 / d)^theta, distance floored at d0."""
    d = np.maximum(np.asarray(distance, dtype=float), cfg.pathloss_d0)
    return cfg.pathloss_g0 * (cfg.pathloss_d0 / d) ** cfg.pathloss_exp_theta


def draw_fading(shape, rng: np.random.Generator) -> np.ndarray:
    """Small-scale power gains: Rayleigh amplitude, so exponential power with
    unit mean."""
    return rng.exponential(1.0, size=shape)


def draw_gains(
    positions_wd: np.ndarray,
    positions_fog: np.ndarray,
    cfg: NetworkConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    d = pair_distances(positions_wd, positions_fog)
    return draw_fading(d.shape, rng) * path_gain(d, cfg)


def draw_arrivals(cfg: NetworkConfig, rng: np.random.Generator) -> np.ndarray:
    """A_i(t) ~ Uniform[0, a_max], independent across WDs and slots."""
    return rng.uniform(0.0, 1.0, size=cfg.num_wd) * cfg.a_max


class Environment:
    """Owns the three RNG streams and the mobility state of one run."""

    def __init__(self, cfg: NetworkConfig, seed: int | None = None):
        self.cfg = cfg
        seed = cfg.rng_seed if seed is None else seed
        ss_mob, ss_fade, ss_arr = np.random.SeedSequence(seed).spawn(3)
        self.rng_mobility = np.random.default_rng(ss_mob)
        self.rng_fading = np.random.default_rng(ss_fade)
        self.rng_arrivals = np.random.default_rng(ss_arr)
        self.fog = MobilityState.random(
            cfg.num_fog,
            cfg.area_side,
            (cfg.fog_speed_min, cfg.fog_speed_max),
            self.rng_mobility,
            cfg.pause_max,
        )
        self.wd = MobilityState.random(
            cfg.num_wd,
            cfg.area_side,
            (cfg.wd_speed_min, cfg.wd_speed_max),
            self.rng_mobility,
            cfg.pause_max,
        )

    def observe(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Positions, gains and arrivals for the current slot."""
        gains = draw_gains(self.wd.position, self.fog.position, self.cfg, self.rng_fading)
        arrivals = draw_arrivals(self.cfg, self.rng_arrivals)
        return self.fog.position.copy(), self.wd.position.copy(), gains, arrivals

    def advance(self) -> None:
        dt = self.cfg.slot_len_tau
        self.fog = step_mobility(self.fog, dt, self.rng_mobility)
        self.wd = step_mobility(self.wd, dt, self.rng_mobility)
