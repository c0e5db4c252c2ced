import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from seisal.synth import SyntheticSpec, generate  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fault_synthetic():
    """The acceptance synthetic: 64^3 layered+fault, dip 75, throw 3, noise 0.05, seed 7."""
    spec = SyntheticSpec((64, 64, 64), "layered+fault", noise_sigma=0.05, seed=7, dip=75, throw=3)
    return generate(spec)
