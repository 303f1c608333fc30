"""Shared fixtures: classical parameter set, default integrator, and one
on-attractor state reused by the slower trajectory tests."""

from __future__ import annotations

import numpy as np
import pytest

from lyapdim import SystemParams, advance_state
from lyapdim.integrate import IntegratorConfig


@pytest.fixture(scope="session")
def classical() -> SystemParams:
    return SystemParams(10.0, 28.0, 8.0 / 3.0)


@pytest.fixture(scope="session")
def cfg() -> IntegratorConfig:
    return IntegratorConfig()


@pytest.fixture(scope="session")
def attractor_state(classical, cfg) -> np.ndarray:
    # deterministic point on the chaotic set: 100 time units from (1,1,1)
    return advance_state(classical, np.array([1.0, 1.0, 1.0]), 100.0, cfg)
