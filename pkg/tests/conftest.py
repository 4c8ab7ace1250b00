"""Shared fixtures: grids and half-order operators reused across test modules."""
import pytest

from fracvar import Grid, build_left_rlfd, build_left_rlfi


@pytest.fixture(scope="session")
def grid64():
    return Grid(0.0, 1.0, 64)


@pytest.fixture(scope="session")
def grid256():
    return Grid(0.0, 1.0, 256)


@pytest.fixture(scope="session")
def grid1k():
    return Grid(0.0, 1.0, 1024)


@pytest.fixture(scope="session")
def rlfi_half_1k(grid1k):
    return build_left_rlfi(grid1k, 0.5)


@pytest.fixture(scope="session")
def rlfd_half_1k(grid1k):
    return build_left_rlfd(grid1k, 0.5)
