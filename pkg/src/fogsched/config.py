"""Network configuration: schema, defaults, validation and JSON I/O.

All fields of :class:`NetworkConfig` are held in linear SI units.  The JSON
file format keeps the two logarithmic quantities (path-loss constant and noise
density) in dB / dBm so that config files read like a parameter table; they are
converted exactly once, in :func:`config_from_dict`.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

UTILITY_KINDS = ("log1p", "alpha_fair")

# JSON section -> field names.  dB-valued entries are listed under their
# on-disk name.
SECTIONS: dict[str, tuple[str, ...]] = {
    "network": (
        "num_fog",
        "num_wd",
        "area_side",
        "slot_len_tau",
        "cycles_per_bit_L",
        "kappa",
        "f_max",
        "f_min",
        "p_max",
        "a_max",
        "antennas_R",
        "c0",
        "fog_speed_min",
        "fog_speed_max",
        "wd_speed_min",
        "wd_speed_max",
        "pause_max",
    ),
    "channel": (
        "bandwidth_omega",
        "noise_n0_dbm",
        "pathloss_g0_db",
        "pathloss_d0",
        "pathloss_exp_theta",
        "vartheta_sigma_max",
    ),
    "algorithm": (
        "v_param",
        "utility_kind",
        "utility_alpha",
        "eta_init",
        "gs_max_iters",
        "gs_rel_tol",
    ),
    "experiment": ("num_slots", "rng_seed", "debug_subqueues"),
}


class ConfigError(ValueError):
    """Raised when a configuration violates one or more invariants."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid config: " + "; ".join(self.problems))


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w) + 30.0


@dataclass(frozen=True)
class NetworkConfig:
    """Physical and algorithmic parameters of one simulated fog network.

    Defaults reproduce the evaluation setup: 8 mobile fog nodes, 40 wireless
    devices (WDs) in a 150 m square, -40 dB path-loss constant, exponent 5,
    -174 dBm/Hz noise, 10 MHz per link, 1 ms slots, 10 000 slots.

    ``c0`` (control-node power) is given without a unit in the source; it is
    treated as watts.
    """

    # network
    num_fog: int = 8
    num_wd: int = 40
    area_side: float = 150.0  # m
    slot_len_tau: float = 1e-3  # s
    cycles_per_bit_L: float = 500.0
    kappa: float = 1e-27  # W s^3
    f_max: float = 2e9  # Hz
    f_min: float = 0.0  # Hz
    p_max: float = 0.2  # W, per WD-fog link
    a_max: float = 4000.0  # bits per slot
    antennas_R: int = 3
    c0: float = 64.0  # W
    fog_speed_min: float = 1.0  # m/s
    fog_speed_max: float = 5.0
    wd_speed_min: float = 0.0
    wd_speed_max: float = 1.0
    pause_max: float = 0.0  # s
    # channel (linear units)
    bandwidth_omega: float = 10e6  # Hz
    noise_n0: float = dbm_to_watts(-174.0)  # W/Hz
    pathloss_g0: float = db_to_linear(-40.0)
    pathloss_d0: float = 1.0  # m
    pathloss_exp_theta: float = 5.0
    vartheta_sigma_max: float = 1.0
    # algorithm
    v_param: float = 3e6
    utility_kind: str = "log1p"
    utility_alpha: float = 0.5
    eta_init: float = 1.0
    gs_max_iters: int = 20
    gs_rel_tol: float = 1e-6
    # experiment
    num_slots: int = 10_000
    rng_seed: int = 0
    debug_subqueues: bool = False

    def replace(self, **changes: Any) -> "NetworkConfig":
        return validate_config(replace(self, **changes))

    @property
    def noise_power(self) -> float:
        """Noise power over one link's bandwidth, omega * N0 (W)."""
        return self.bandwidth_omega * self.noise_n0

    @property
    def mu_max(self) -> float:
        """Bits a fog node executes in one slot at ``f_max``."""
        return self.slot_len_tau * self.f_max / self.cycles_per_bit_L


def validate_config(cfg: NetworkConfig) -> NetworkConfig:
    """Check every invariant and return ``cfg`` unchanged, or raise
    :class:`ConfigError` naming all offending fields at once."""
    problems: list[str] = []

    def need(cond: bool, msg: str) -> None:
        if not cond:
            problems.append(msg)

    for name in ("num_fog", "num_wd", "antennas_R", "gs_max_iters", "num_slots"):
        value = getattr(cfg, name)
        need(isinstance(value, int) and not isinstance(value, bool), f"{name} must be an integer")
    need(cfg.num_fog >= 1, "num_fog must be >= 1")
    need(cfg.num_wd >= 1, "num_wd must be >= 1")
    need(cfg.antennas_R >= 1, "antennas_R must be >= 1")
    need(cfg.gs_max_iters >= 1, "gs_max_iters must be >= 1")
    need(cfg.num_slots >= 1, "num_slots must be >= 1")

    for name in (
        "area_side",
        "slot_len_tau",
        "cycles_per_bit_L",
        "kappa",
        "f_max",
        "p_max",
        "bandwidth_omega",
        "noise_n0",
        "pathloss_g0",
        "pathloss_d0",
        "pathloss_exp_theta",
        "vartheta_sigma_max",
        "eta_init",
        "gs_rel_tol",
    ):
        value = getattr(cfg, name)
        need(math.isfinite(value) and value > 0, f"{name} must be positive and finite")
    need(math.isfinite(cfg.v_param) and cfg.v_param > 0, "V must be positive (v_param)")
    need(math.isfinite(cfg.c0) and cfg.c0 > 0, "c0 must be positive")
    # a_max = 0 is a legal degenerate setting (no arrivals at all).
    need(math.isfinite(cfg.a_max) and cfg.a_max >= 0, "a_max must be >= 0")
    need(0 <= cfg.f_min <= cfg.f_max, "f_min must lie in [0, f_max]")

    for lo, hi in (("fog_speed_min", "fog_speed_max"), ("wd_speed_min", "wd_speed_max")):
        vlo, vhi = getattr(cfg, lo), getattr(cfg, hi)
        need(0 <= vlo <= vhi and math.isfinite(vhi), f"{lo}/{hi} must satisfy 0 <= min <= max")
    need(cfg.pause_max >= 0, "pause_max must be >= 0")

    need(cfg.utility_kind in UTILITY_KINDS, f"utility_kind must be one of {UTILITY_KINDS}")
    if cfg.utility_kind == "alpha_fair":
        # alpha >= 1 sends U(0) to -inf, which breaks the efficiency ratio.
        need(0 < cfg.utility_alpha < 1, "utility_alpha must lie in (0, 1)")

    if problems:
        raise ConfigError(problems)
    return cfg


def default_config(**overrides: Any) -> NetworkConfig:
    return validate_config(NetworkConfig(**overrides))


def config_to_dict(cfg: NetworkConfig) -> dict[str, dict[str, Any]]:
    """Nested, file-format representation (dB fields converted back)."""
    flat = asdict(cfg)
    flat["noise_n0_dbm"] = watts_to_dbm(flat.pop("noise_n0"))
    flat["pathloss_g0_db"] = linear_to_db(flat.pop("pathloss_g0"))
    return {section: {k: flat[k] for k in keys} for section, keys in SECTIONS.items()}


def config_from_dict(doc: dict[str, Any]) -> NetworkConfig:
    """Build a validated config from the nested JSON layout.

    Missing sections or keys fall back to defaults; unknown keys are errors so
    that typos do not silently run the default experiment.
    """
    if "config" in doc and isinstance(doc["config"], dict):
        # A run manifest embeds the full config under "config".
        doc = doc["config"]
    known = {k for keys in SECTIONS.values() for k in keys}
    flat: dict[str, Any] = {}
    problems = []
    for section, body in doc.items():
        if section not in SECTIONS:
            problems.append(f"unknown section {section!r}")
            continue
        for key, value in body.items():
            if key not in known or key not in SECTIONS[section]:
                problems.append(f"unknown field {section}.{key}")
            else:
                flat[key] = value
    if problems:
        raise ConfigError(problems)

    if "noise_n0_dbm" in flat:
        flat["noise_n0"] = dbm_to_watts(float(flat.pop("noise_n0_dbm")))
    if "pathloss_g0_db" in flat:
        flat["pathloss_g0"] = db_to_linear(float(flat.pop("pathloss_g0_db")))

    types = {f.name: f.type for f in fields(NetworkConfig)}
    for key, value in list(flat.items()):
        if types[key] in ("float",) and isinstance(value, int) and not isinstance(value, bool):
            flat[key] = float(value)
    return validate_config(NetworkConfig(**flat))


def load_config(path: str | Path) -> NetworkConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def dump_config(cfg: NetworkConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2, sort_keys=False)
        fh.write("\n")


def config_hash(cfg: NetworkConfig) -> str:
    """Stable SHA-256 over the linear-unit field values."""
    blob = json.dumps(asdict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
