from pathlib import Path

import numpy as np
import pytest

from phstring.config import preset
from phstring.engine import run_closed_loop
from phstring.models import PatchActuator, StringParams, equilibrium_profile, make_model

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def reference_tip():
    table = np.loadtxt(DATA / "reference_tip.csv", delimiter=",", skiprows=1)
    return {"t": table[:, 0], "w_L": table[:, 1], "what_L": table[:, 2]}


@pytest.fixture(scope="session")
def preset_config():
    return preset("paper-fig1")


@pytest.fixture(scope="session")
def preset_log(preset_config):
    return run_closed_loop(preset_config)


@pytest.fixture
def model():
    return make_model(StringParams(), PatchActuator(0.4, 0.6), 100)


@pytest.fixture
def target(model):
    return equilibrium_profile(0.2, 0.5, model)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_lines():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
