import numpy as np
import pytest

from phstring.config import preset
from phstring.engine import run_closed_loop


@pytest.fixture(scope="module")
def coarse_log():
    return run_closed_loop(preset("paper-fig1-coarse"))


@pytest.mark.parametrize("column", ["w_L", "what_L"])
def test_coarse_replica_matches_reference(coarse_log, reference_tip, column):
    idx = [coarse_log.at(t) for t in reference_tip["t"]]
    np.testing.assert_allclose(coarse_log[column][idx], reference_tip[column], atol=1e-3)

