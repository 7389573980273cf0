# /infra/config.py
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_EPS = (0.1, 0.05, 0.025)
DEFAULT_AXIS = (-1.0, 1.0)


def _pick_env(*names: str) -> Optional[str]:
    for n in names:
        v = os.getenv(n)
        if v and str(v).strip():
            return v
    return None


def parse_eps_list(text: str) -> Tuple[float, ...]:
    """`0.1,0.05,0.025` -> descending tuple of positive widths."""
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"invalid width list {text!r}: {exc}") from exc
    if not values or any(v <= 0 for v in values):
        raise ValueError(f"widths must be positive, got {text!r}")
    return tuple(sorted(values, reverse=True))


@dataclass(frozen=True)
class CheckTolerances:
    quadrature_tol: float = 1e-6
    floor_factor: float = 10.0
    shrink_factor: float = 1.5
    condition_tol: float = 1e-8
    max_spacing_ratio: float = 4.0
    spacing_ratio: float = 8.0
    band_factor: float = 3.0
    refine_factor: float = 8.0
    min_points: int = 8

    @property
    def floor(self) -> float:
        return self.floor_factor * self.quadrature_tol


@dataclass(frozen=True)
class JcondSettings:
    seed: int = 0
    log_level: str = "WARNING"
    eps: Tuple[float, ...] = DEFAULT_EPS
    test_radius: float = 0.25
    tolerances: CheckTolerances = field(default_factory=CheckTolerances)


def load_settings() -> JcondSettings:
    load_dotenv()
    seed_raw = _pick_env("JCOND_SEED")
    eps_raw = _pick_env("JCOND_DEFAULT_EPS")
    radius_raw = _pick_env("JCOND_TEST_RADIUS")
    level = (_pick_env("JCOND_LOG_LEVEL") or "WARNING").upper()

    seed = 0
    if seed_raw is not None:
        try:
            seed = int(seed_raw)
        except ValueError:
            logger.warning(f"⚠️ JCOND_SEED={seed_raw!r} is not an integer, using 0")

    eps = DEFAULT_EPS
    if eps_raw is not None:
        try:
            eps = parse_eps_list(eps_raw)
        except ValueError as exc:
            logger.warning(f"⚠️ ignoring JCOND_DEFAULT_EPS: {exc}")

    radius = 0.25
    if radius_raw is not None:
        try:
            radius = float(radius_raw)
        except ValueError:
            logger.warning(f"⚠️ JCOND_TEST_RADIUS={radius_raw!r} is not a number, using 0.25")

    return JcondSettings(seed=seed, log_level=level, eps=eps, test_radius=radius)
