import pytest

from pbdcs.designs import gen_pbd_exact_cover, gen_projective_plane, gen_sts_bose


@pytest.fixture(scope="session")
def fano():
    return gen_projective_plane(2)


@pytest.fixture(scope="session")
def sts9():
    return gen_sts_bose(9)


@pytest.fixture(scope="session")
def sts15():
    return gen_sts_bose(15)


@pytest.fixture(scope="session")
def pg25():
    return gen_projective_plane(5)


@pytest.fixture(scope="session")
def pbd35():
    """PBD(11, {3,5}, 1) with a single block of size 5."""
    return gen_pbd_exact_cover(11, {3, 5}, [(0, 1, 2, 3, 4)])
