# tests/conftest.py

import json
from fractions import Fraction
from pathlib import Path
from typing import Generator

import pytest

from quotatope.domain.mobius import default_sieve, mobius_sieve
from quotatope.domain.quota import ScalarQuotaSystem
from quotatope.utils.config import get_settings


@pytest.fixture(autouse=True)
def fresh_settings() -> Generator:
    """Settings are cached; every test starts from the environment it sets up."""
    get_settings.cache_clear()
    default_sieve.cache_clear()
    yield
    get_settings.cache_clear()
    default_sieve.cache_clear()


@pytest.fixture
def small_block(monkeypatch):
    monkeypatch.setenv("QUOTATOPE_RANDOM__MONTE_CARLO_BLOCK", "100")
    get_settings.cache_clear()


# Fixtures for the worked examples
@pytest.fixture
def two_three_five_seven() -> ScalarQuotaSystem:
    return ScalarQuotaSystem.of([2, 3, 5, 7], 8)


@pytest.fixture
def divisor_six() -> ScalarQuotaSystem:
    return ScalarQuotaSystem.of([1, 2, 3], 6)


@pytest.fixture
def triangle_boundary() -> ScalarQuotaSystem:
    return ScalarQuotaSystem.of([2, 3, 5], 9)


@pytest.fixture
def rational_system() -> ScalarQuotaSystem:
    return ScalarQuotaSystem.of([Fraction(7, 2), "1/2", 2], Fraction(9, 2))


@pytest.fixture(scope="session")
def sieve_100k():
    return mobius_sieve(100_000)


@pytest.fixture
def uniform_spec_file(tmp_path) -> Path:
    path = tmp_path / "uniform.json"
    path.write_text(json.dumps({
        "m": 1.0,
        "densities": [
            {"kind": "uniform", "params": {"a": 1.0, "b": 2.0}},
            {"kind": "triangular", "params": {"a": 1.2, "c": 1.5, "b": 2.4}},
        ],
        "q_grid": [0.5, 1.5, 2.5, 3.5, 4.5],
        "trials": 500,
        "seed": 3,
    }), encoding="utf-8")
    return path
