"""
Tests for configuration loading from the environment.
"""
import os

import pytest

from src.combinators import CantorPairing, GammaPairing, default_engine, set_default_engine
from src.config import ENV_VARS, Config
from src.game_core import Bounds


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    # load_dotenv writes into os.environ; give each test its own copy
    environ = {k: v for k, v in os.environ.items() if k not in ENV_VARS.values()}
    monkeypatch.setattr(os, "environ", environ)
    return tmp_path / "missing.env"


def test_defaults(clean_env):
    config = Config.from_env(clean_env)
    assert config.y_depth == 32
    assert config.bounds() == Bounds(max_nat=8, max_index=8, max_len=64, max_steps=100000)
    assert config.depth == 3
    assert config.pairing == "gamma"
    assert not config.audit


def test_environment_values(clean_env, monkeypatch):
    monkeypatch.setenv("GPCF_MAX_NAT", "3")
    monkeypatch.setenv("GPCF_PAIRING", "cantor")
    monkeypatch.setenv("GPCF_AUDIT", "yes")
    config = Config.from_env(clean_env)
    assert config.max_nat == 3
    assert config.pairing == "cantor"
    assert config.audit


def test_flags_override_the_environment(clean_env, monkeypatch):
    monkeypatch.setenv("GPCF_DEPTH", "5")
    config = Config.from_env(clean_env, depth=2, max_len=None)
    assert config.depth == 2
    assert config.max_len == 64


def test_env_file_is_read(tmp_path):
    env_file = tmp_path / ".env"
    env_file.write_text("GPCF_Y_DEPTH=7\n")
    assert Config.from_env(env_file).y_depth == 7


@pytest.mark.parametrize("var,value", [
    ("GPCF_MAX_NAT", "zero"),
    ("GPCF_MAX_STEPS", "-4"),
    ("GPCF_PAIRING", "hilbert"),
])
def test_bad_values_name_the_variable(clean_env, monkeypatch, var, value):
    monkeypatch.setenv(var, value)
    with pytest.raises(ValueError) as info:
        Config.from_env(clean_env)
    assert var in str(info.value)


def test_with_overrides():
    config = Config().with_overrides(max_nat=2, pairing=None)
    assert config.max_nat == 2 and config.pairing == "gamma"
    with pytest.raises(ValueError):
        Config().with_overrides(output_format="yaml")


def test_apply_installs_the_engine():
    previous = default_engine()
    try:
        Config(pairing="cantor", max_steps=77).apply()
        assert isinstance(default_engine().pairing, CantorPairing)
        assert default_engine().max_steps == 77
        Config().apply()
        assert isinstance(default_engine().pairing, GammaPairing)
    finally:
        set_default_engine(previous)


def test_helpers():
    config = Config(y_depth=4, max_steps=50)
    assert config.fuel().y_depth == 4
    assert config.engine().max_steps == 50
    assert isinstance(config.engine().pairing, GammaPairing)
    assert config.to_dict()["run_log"] == "data/run_log.jsonl"
