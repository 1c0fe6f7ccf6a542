import pytest

from winsumm.minicorpus import build_corpus


@pytest.fixture(scope="session")
def standard_build():
    return build_corpus("standard")


@pytest.fixture(scope="session")
def tail_build():
    return build_corpus("tail")
