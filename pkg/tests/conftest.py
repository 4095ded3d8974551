import numpy as np
import pytest

from qecft import data_path
from qecft.codes import five_qubit_code, shor_code, steane_code


@pytest.fixture(scope="session")
def five():
    return five_qubit_code()


@pytest.fixture(scope="session")
def steane():
    return steane_code()


@pytest.fixture(scope="session")
def shor():
    return shor_code()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fixtures():
    return {name: str(data_path(name)) for name in ("five_qubit.stab", "steane.stab", "hamming.pcm")}
