import logging

import pytest

from infra.config import DEFAULT_EPS, CheckTolerances, load_settings, parse_eps_list
from monitoring.telemetry_logger import setup_logging


def test_eps_list_is_sorted_descending():
    assert parse_eps_list("0.025, 0.1,0.05") == (0.1, 0.05, 0.025)


@pytest.mark.parametrize("text", ["", "0.1,abc", "0.1,-0.05"])
def test_bad_eps_lists_are_rejected(text):
    with pytest.raises(ValueError):
        parse_eps_list(text)


def test_defaults_without_environment():
    settings = load_settings()
    assert settings.seed == 0
    assert settings.eps == DEFAULT_EPS
    assert settings.log_level == "WARNING"
    assert settings.tolerances.floor == pytest.approx(1e-5)


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("JCOND_SEED", "42")
    monkeypatch.setenv("JCOND_DEFAULT_EPS", "0.2,0.1,0.05,0.025")
    monkeypatch.setenv("JCOND_TEST_RADIUS", "0.3")
    monkeypatch.setenv("JCOND_LOG_LEVEL", "debug")
    settings = load_settings()
    assert settings.seed == 42
    assert settings.eps == (0.2, 0.1, 0.05, 0.025)
    assert settings.test_radius == 0.3
    assert settings.log_level == "DEBUG"


def test_bad_environment_values_fall_back(monkeypatch, caplog):
    monkeypatch.setenv("JCOND_SEED", "seven")
    monkeypatch.setenv("JCOND_DEFAULT_EPS", "wide")
    with caplog.at_level(logging.WARNING):
        settings = load_settings()
    assert settings.seed == 0
    assert settings.eps == DEFAULT_EPS
    assert "JCOND_SEED" in caplog.text
    assert "JCOND_DEFAULT_EPS" in caplog.text


def test_tolerances_floor():
    assert CheckTolerances(quadrature_tol=1e-4, floor_factor=2).floor == pytest.approx(2e-4)


def test_logging_goes_to_the_given_stream(capsys):
    logger = setup_logging("info")
    logger.info("✅ logging ready")
    assert "✅ logging ready" in capsys.readouterr().err
    setup_logging("nonsense")
    assert logging.getLogger().level == logging.WARNING
