import os

import numpy as np
import pytest

from sparseprep.bench import random_permutation, random_spec
from sparseprep.constants import SEED_ENV
from sparseprep.simulator import StateVector, ancilla_residual, fidelity, project_output, run


@pytest.fixture
def seed():
    return int(os.environ.get(SEED_ENV, "0"))


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)


@pytest.fixture
def make_spec(rng):
    """Random d-sparse spec drawn from the shared generator."""
    def _make(n, d):
        return random_spec(n, d, rng)
    return _make


@pytest.fixture
def make_permutation(rng):
    def _make(n, size=None):
        return random_permutation(n, rng, size)
    return _make


@pytest.fixture
def prepared():
    """(fidelity to the target state, weight left on the ancillas) after running a circuit from |0...0>."""
    def _prepared(circuit, spec, expand=False):
        state = run(circuit, expand=expand)
        output = project_output(state, spec.n)
        return fidelity(output, StateVector.from_spec(spec)), ancilla_residual(state, spec.n)
    return _prepared
