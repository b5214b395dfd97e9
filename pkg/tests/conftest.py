from __future__ import annotations

from fractions import Fraction

import pytest

from covergames.space import (
    build_cantor_space,
    build_grid_space,
    build_single_point_space,
)


@pytest.fixture(scope="session")
def interval_8():
    return build_grid_space(1, Fraction(1, 8))


@pytest.fixture(scope="session")
def interval_64():
    return build_grid_space(1, Fraction(1, 64))


@pytest.fixture(scope="session")
def interval_256():
    return build_grid_space(1, Fraction(1, 256))


@pytest.fixture(scope="session")
def square_8():
    return build_grid_space(2, Fraction(1, 8))


@pytest.fixture(scope="session")
def cantor_3():
    return build_cantor_space(3)


@pytest.fixture(scope="session")
def cantor_5():
    return build_cantor_space(5)


@pytest.fixture(scope="session")
def point_space():
    return build_single_point_space()
