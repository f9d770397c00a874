import json
from pathlib import Path

import pytest

from shire.gauss_poly import Polynomial, ProblemInstance

GOLDEN = Path(__file__).parent / "golden"

FIVE_POLES = ["0", "-2", "4+3i", "3-5i", "-3-9i"]


@pytest.fixture(scope="session")
def two_poles_golden():
    return json.loads((GOLDEN / "two_poles.json").read_text())


@pytest.fixture(scope="session")
def two_poles():
    # e^z / (z (z - 1))
    return ProblemInstance.create(["1"], ["0", "-1", "1"], ["0", "1"])


@pytest.fixture(scope="session")
def five_poles():
    Q = Polynomial.from_roots(FIVE_POLES)
    return ProblemInstance.create(["1"], Q.to_strings(), ["1", "1"], precision_bits=512)
