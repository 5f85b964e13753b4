import pytest

from helpers import toy_context


@pytest.fixture
def toy():
    return toy_context()
