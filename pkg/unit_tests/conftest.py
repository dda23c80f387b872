# SPDX-License-Identifier: MIT-0

import os

import numpy as np
import pytest
from hypothesis import strategies as st

from lib.channels import choi_from_function, make_named_map
from lib.configuration import PROFILE_VARIABLE, QUICK

# Smaller search budgets; tolerances do not depend on the profile.
os.environ.setdefault(PROFILE_VARIABLE, QUICK)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def transpose2():
    return make_named_map('transpose', {'d': 2})


@pytest.fixture
def reduction2():
    return make_named_map('reduction', {'d': 2})


def embedded_transpose_map():
    """Qubit transpose followed by the isometric embedding into a qutrit (d_in=2, d_out=3)."""
    isometry = np.eye(3)[:, :2]
    return choi_from_function(lambda x: isometry @ x.T @ isometry.T, 2, 'embedded_transpose')


@pytest.fixture
def embedded_transpose():
    return embedded_transpose_map()
