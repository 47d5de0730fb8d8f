import pytest

from dualmem import Permutation, build_v_universe, dual_structure, scramble


@pytest.fixture(scope="session")
def v3():
    return build_v_universe(3)


@pytest.fixture(scope="session")
def v4():
    return build_v_universe(4)


@pytest.fixture(scope="session")
def scrambled_v3():
    return scramble(build_v_universe(3), Permutation((0, 2, 1, 3)))


@pytest.fixture(scope="session")
def scrambled_v4():
    return scramble(build_v_universe(4), Permutation.random(16, 7))


@pytest.fixture(scope="session")
def chain3():
    return dual_structure(3, [(0, 1), (1, 2)], [(0, 1), (1, 2)])
