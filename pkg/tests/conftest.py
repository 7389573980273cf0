from pathlib import Path

import pytest

from infra.pdemodel import parse_system

SYSTEMS_DIR = Path(__file__).resolve().parent.parent / "systems"


def load(name: str):
    return parse_system((SYSTEMS_DIR / f"{name}.pde").read_text(encoding="utf-8"))


@pytest.fixture
def system_path():
    def _path(name: str) -> str:
        return str(SYSTEMS_DIR / f"{name}.pde")
    return _path


@pytest.fixture
def burgers():
    return load("burgers")


@pytest.fixture
def heat():
    return load("heat")


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("JCOND_SEED", "JCOND_DEFAULT_EPS", "JCOND_TEST_RADIUS", "JCOND_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
