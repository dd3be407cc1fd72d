import pytest

from breakopt.embedding import pegasus_graph


@pytest.fixture(scope="session")
def pegasus16():
    return pegasus_graph(16)
