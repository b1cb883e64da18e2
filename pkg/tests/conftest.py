import pytest

from fowtctl.config import load_sensitivities, load_structure


@pytest.fixture(scope="session")
def params():
    return load_structure("umaine-iea15")[0]


@pytest.fixture(scope="session")
def sens_t1f():
    return load_sensitivities("table1-false")[0]


@pytest.fixture(scope="session")
def sens_t1t():
    return load_sensitivities("table1-true")[0]


@pytest.fixture(scope="session")
def sens_t2f():
    return load_sensitivities("table2-false")[0]


@pytest.fixture(scope="session")
def sens_t2t():
    return load_sensitivities("table2-true")[0]


@pytest.fixture(scope="session")
def sens_t3():
    return load_sensitivities("table3-both")[0]
