import pytest

from scpkit.config import GenConfig, Suite, SuiteConfig
from scpkit.syntax import Calculus


def test_suite_config_defaults():
    config = SuiteConfig()

    assert config.suite is Suite.ALL
    assert config.seed == 0
    assert config.count == 100
    assert config.size == 3
    assert config.max_depth == 4
    assert config.equiv_depth == 2


def test_suite_config_accepts_aliases():
    config = SuiteConfig.from_config({"suite": "lemmas", "max_size": 2, "depth": 3})

    assert config == SuiteConfig(suite=Suite.LEMMAS, size=2, max_depth=3)


def test_suite_config_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown SuiteConfig key: sizes"):
        SuiteConfig.from_config({"sizes": 2})


def test_suite_config_lists_every_problem():
    with pytest.raises(ValueError, match="Invalid suite config") as error:
        SuiteConfig(suite="everything", count=-1, equiv_depth=True)

    message = str(error.value)
    assert "unknown suite: 'everything'" in message
    assert "count must be an integer >= 0" in message
    assert "equiv_depth must be an integer >= 0" in message


def test_suite_config_round_trip():
    config = SuiteConfig(suite=Suite.AGREEMENT, seed=5, count=7)

    assert config.to_config()["suite"] == "agreement"
    assert SuiteConfig.from_config(config.to_config()) == config


def test_suite_config_expands_all():
    assert Suite.ALL not in SuiteConfig().suites()
    assert len(SuiteConfig().suites()) == len(Suite) - 1
    assert SuiteConfig(suite=Suite.DUALITY).suites() == [Suite.DUALITY]


def test_generator_offsets_the_seed():
    cfg = SuiteConfig(seed=10, max_depth=2).generator(3, Calculus.SCP)

    assert cfg == GenConfig(seed=13, max_depth=2, calculus=Calculus.SCP)


def test_gen_config_validation():
    assert GenConfig.from_config({"depth": 2, "calculus": "scp"}).calculus is Calculus.SCP

    with pytest.raises(ValueError, match="calculus must be 'cp' or 'scp'"):
        GenConfig(calculus="pi")
    with pytest.raises(ValueError, match="max_depth must be an integer >= 1"):
        GenConfig(max_depth=0)
    with pytest.raises(ValueError, match="unknown GenConfig key: size"):
        GenConfig.from_config({"size": 1})


def test_gen_config_round_trip():
    cfg = GenConfig(seed=3, calculus=Calculus.SCP)

    assert cfg.to_config() == {"seed": 3, "max_depth": 3, "type_depth": 2, "calculus": "scp"}
    assert GenConfig.from_config(cfg.to_config()) == cfg
