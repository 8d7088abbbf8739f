import numpy as np
import pytest

from parityflux import DeviceParams, FluxFrequencyMap


@pytest.fixture(scope="session")
def device():
    """Lamp-study cooldown (gap difference 4.844 GHz)."""
    return DeviceParams()


@pytest.fixture(scope="session")
def device_early():
    """Earlier cooldown (gap difference 4.860 GHz)."""
    return DeviceParams(gap_diff=4.860)


@pytest.fixture(scope="session")
def fmap():
    return FluxFrequencyMap()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
