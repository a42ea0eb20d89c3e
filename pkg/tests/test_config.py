import pytest
from pydantic import ValidationError

from src.config import DEFAULT_LIMITS, EngineLimits, OutputFormat, RunConfig


def test_default_limits():
    assert DEFAULT_LIMITS.max_truncation == 128
    assert DEFAULT_LIMITS.truncation == "bracket"
    assert DEFAULT_LIMITS.workers == 1


def test_limits_are_hashable():
    assert hash(EngineLimits()) == hash(EngineLimits())
    with pytest.raises(ValidationError):
        DEFAULT_LIMITS.max_truncation = 5


def test_env_overrides_truncation_cap(monkeypatch):
    monkeypatch.setenv("LAD_MAX_TRUNCATION", "40")
    assert EngineLimits.from_env().max_truncation == 40
    assert EngineLimits.from_env(max_truncation=7).max_truncation == 7


def test_env_unset(monkeypatch):
    monkeypatch.delenv("LAD_MAX_TRUNCATION", raising=False)
    assert EngineLimits.from_env(workers=3) == EngineLimits(workers=3)


@pytest.mark.parametrize(
    "overrides",
    [{"max_truncation": 0}, {"workers": 0}, {"truncation": "cube"}, {"max_basis_size": -1}],
)
def test_invalid_limits(overrides):
    with pytest.raises(ValidationError):
        EngineLimits(**overrides)


def test_run_config_validation(tmp_path):
    config = RunConfig(fixture=tmp_path / "a.lad", command="entropy", output_format="json")
    assert config.output_format is OutputFormat.JSON
    assert config.n_max == 3
    with pytest.raises(ValidationError):
        RunConfig(fixture=tmp_path / "a.lad", command="entropy", n_max=0)
