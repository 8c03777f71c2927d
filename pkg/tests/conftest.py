from pathlib import Path

import pytest

from carnotineq import euclidean, free_step_two, heisenberg, load_group_spec

DATA_DIR = Path(__file__).parent / "data"
STEP3_FILE = DATA_DIR / "step3_211.json"


@pytest.fixture(scope="session")
def r1():
    return euclidean(1)


@pytest.fixture(scope="session")
def r2():
    return euclidean(2)


@pytest.fixture(scope="session")
def r3():
    return euclidean(3)


@pytest.fixture(scope="session")
def h1():
    return heisenberg(1)


@pytest.fixture(scope="session")
def h2():
    return heisenberg(2)


@pytest.fixture(scope="session")
def free3():
    return free_step_two(3)


@pytest.fixture(scope="session")
def engel():
    return load_group_spec(STEP3_FILE)
