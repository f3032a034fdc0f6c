import pytest

from holoinv import registry_get


@pytest.fixture(scope="session")
def cp1():
    return registry_get("cp1")


@pytest.fixture(scope="session")
def hopf():
    return registry_get("hopf")


@pytest.fixture(scope="session")
def hopf_blowup():
    return registry_get("hopf-blowup")
