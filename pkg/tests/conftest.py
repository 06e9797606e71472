import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nlgames.game import GameParams, utility_from_params  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def pklszdk():
    return GameParams(0.5, 1.0)


@pytest.fixture
def table(pklszdk):
    return utility_from_params(pklszdk)
