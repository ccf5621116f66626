import numpy as np
import pytest

from tendonhand.hand_model import HAND_JOINTS, JointState, build_default_model


@pytest.fixture(scope="session")
def model():
    return build_default_model()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hand_state(model, rng, coupled=False):
    lo = np.array([model.limits[j].theta_min for j in HAND_JOINTS])
    hi = np.array([model.limits[j].theta_max for j in HAND_JOINTS])
    st = JointState.from_vector(rng.uniform(lo, hi), HAND_JOINTS)
    if coupled:
        from tendonhand.hand_model import CouplingMode, apply_coupling

        st = apply_coupling(model, st, CouplingMode.RIGID)
    return st
