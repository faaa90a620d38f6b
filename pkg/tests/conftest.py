import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import RINGS, ring  # noqa: E402


@pytest.fixture(scope="session")
def F5():
    return ring("Rx2").field


@pytest.fixture(scope="session", params=["Rx2", "Rx3", "Rxy", "Rm2"])
def local_name(request):
    return request.param


@pytest.fixture(scope="session")
def rings():
    return {name: ring(name) for name in RINGS}
