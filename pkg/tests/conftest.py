import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from triquadric.descent import descend, preprocess


@pytest.fixture(scope="session")
def f19_input():
    from triquadric.fixtures import descent_input_f19

    return descent_input_f19()


@pytest.fixture(scope="session")
def f19_pre(f19_input):
    return preprocess(f19_input.system, f19_input.seed, f19_input.budgets)


@pytest.fixture(scope="session")
def f19_run(f19_input):
    """The flagship end-to-end run; shared across the acceptance criteria."""
    start = time.time()
    cert = descend(f19_input)
    return f19_input, cert, time.time() - start
