import json
import math

import pytest

from fogsched.config import (
    ConfigError,
    NetworkConfig,
    config_from_dict,
    config_hash,
    config_to_dict,
    default_config,
    dump_config,
    load_config,
    validate_config,
)


def test_defaults_match_evaluation_setup(cfg):
    assert (cfg.num_fog, cfg.num_wd, cfg.antennas_R) == (8, 40, 3)
    assert cfg.area_side == 150.0
    assert cfg.pathloss_g0 == pytest.approx(1e-4, rel=1e-12)
    assert cfg.pathloss_exp_theta == 5.0 and cfg.pathloss_d0 == 1.0
    # -174 dBm/Hz = 10^-20.4 W/Hz
    assert cfg.noise_n0 == pytest.approx(10 ** -20.4, rel=1e-12)
    assert cfg.bandwidth_omega == 10e6
    assert cfg.kappa == 1e-27 and cfg.cycles_per_bit_L == 500
    assert cfg.p_max == 0.2 and cfg.f_max == 2e9
    assert cfg.c0 == 64 and cfg.a_max == 4000 and cfg.slot_len_tau == 1e-3
    assert cfg.num_slots == 10_000


def test_zero_v_rejected():
    with pytest.raises(ConfigError, match="V must be positive"):
        default_config(v_param=0.0)


def test_zero_antennas_rejected():
    with pytest.raises(ConfigError, match="antennas_R"):
        default_config(antennas_R=0)


def test_every_violation_reported():
    with pytest.raises(ConfigError) as info:
        validate_config(NetworkConfig(v_param=-1.0, c0=0.0, num_wd=0, kappa=-1.0))
    joined = " ".join(info.value.problems)
    for name in ("V must be positive", "c0", "num_wd", "kappa"):
        assert name in joined


def test_alpha_fair_needs_alpha_below_one():
    with pytest.raises(ConfigError, match="utility_alpha"):
        default_config(utility_kind="alpha_fair", utility_alpha=1.0)
    default_config(utility_kind="alpha_fair", utility_alpha=0.3)


def test_file_keeps_db_fields():
    doc = config_to_dict(default_config())
    assert doc["channel"]["pathloss_g0_db"] == pytest.approx(-40.0)
    assert doc["channel"]["noise_n0_dbm"] == pytest.approx(-174.0)
    assert set(doc) == {"network", "channel", "algorithm", "experiment"}


def test_round_trip_linear_values(tmp_path):
    original = default_config(v_param=4.5e6, rng_seed=9, utility_kind="alpha_fair", utility_alpha=0.25)
    path = tmp_path / "cfg.json"
    dump_config(original, path)
    again = load_config(path)
    for name in ("noise_n0", "pathloss_g0", "v_param", "kappa", "utility_alpha"):
        a, b = getattr(original, name), getattr(again, name)
        assert math.isclose(a, b, rel_tol=1e-12), name
    assert again.rng_seed == 9 and again.utility_kind == "alpha_fair"


def test_partial_file_uses_defaults():
    cfg = config_from_dict({"algorithm": {"v_param": 1e6}, "channel": {"pathloss_g0_db": -30}})
    assert cfg.v_param == 1e6
    assert cfg.pathloss_g0 == pytest.approx(1e-3)
    assert cfg.num_wd == 40


def test_unknown_fields_rejected():
    with pytest.raises(ConfigError, match="unknown field network.num_fogs"):
        config_from_dict({"network": {"num_fogs": 3}})
    with pytest.raises(ConfigError, match="unknown section"):
        config_from_dict({"physics": {}})


def test_manifest_document_is_accepted(tmp_path):
    doc = {"tool": "fogsched", "config": config_to_dict(default_config(num_wd=5))}
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(doc))
    assert load_config(path).num_wd == 5


def test_hash_tracks_content():
    assert config_hash(default_config()) == config_hash(default_config())
    assert config_hash(default_config()) != config_hash(default_config(rng_seed=1))
