"""共通フィクスチャと hypothesis プロファイル."""

import os

import pytest
from hypothesis import HealthCheck, settings

from polyhedron import LinearSystem

settings.register_profile(
    "dev",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "acceptance",
    max_examples=500,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: 網羅的で時間のかかるテスト")


# --- 例の系 ---


@pytest.fixture
def system2() -> LinearSystem:
    """x1 + x2 <= 3, x >= 0: resilient で TDI."""
    return LinearSystem.of([[1, 1], [-1, 0], [0, -1]], [3, 0, 0])


@pytest.fixture
def system3() -> LinearSystem:
    """3x1 + x2 <= 6, x2 <= 3, x >= 0: 整数的だが TDI でも near-TDI でもない."""
    return LinearSystem.of([[3, 1], [0, 1], [-1, 0], [0, -1]], [6, 3, 0, 0])


@pytest.fixture
def system4() -> LinearSystem:
    """2x <= 0, 3x <= 0: near-TDI だが TDI ではない."""
    return LinearSystem.of([[2], [3]], [0, 0])


@pytest.fixture
def half_resilient() -> LinearSystem:
    """2x1 + x2 <= 2, x >= 0: half-resilient だが resilient ではない."""
    return LinearSystem.of([[2, 1], [-1, 0], [0, -1]], [2, 0, 0])


@pytest.fixture
def point_system() -> LinearSystem:
    """x <= 0, -x <= 0: 陰的等式だけの系."""
    return LinearSystem.of([[1], [-1]], [0, 0])
