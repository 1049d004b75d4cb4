import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dvsnoise import PixelParams  # noqa: E402

F3DB = 100.0
TAU_NOISE = 1.0 / (2.0 * math.pi * F3DB)


@pytest.fixture
def pairing_params():
    """Near-instant reset, thresholds at 0.8 sigma."""
    return PixelParams(theta_on=0.8, theta_off=0.8, tau_refr=0.01 * TAU_NOISE, f3db=F3DB, sigma_noise=1.0)


@pytest.fixture
def shot_params():
    """Rare-event operating point: thresholds at 2.5 sigma."""
    return PixelParams(theta_on=2.5, theta_off=2.5, tau_refr=0.01 * TAU_NOISE, f3db=F3DB, sigma_noise=1.0)
