import numpy as np
import pytest

from xduplex.channel import db_to_linear, symmetric_params


@pytest.fixture
def params_30db():
    """Reference setting at 30 dB: unit means, eta = 0.01."""
    return symmetric_params(float(db_to_linear(30.0)))


def rel_err(got, ref):
    got = np.asarray(got, dtype=float)
    ref = np.asarray(ref, dtype=float)
    return np.max(np.abs(got - ref) / np.abs(ref))
