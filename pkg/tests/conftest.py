import pytest

from tisim.scenarios import ev_bomb_network, hardy_network, qle_network


@pytest.fixture
def hardy():
    return hardy_network()


@pytest.fixture
def qle():
    return qle_network()


@pytest.fixture
def bomb_present():
    return ev_bomb_network(present=True)


@pytest.fixture
def bomb_absent():
    return ev_bomb_network(present=False)
