import json
from pathlib import Path

import numpy as np
import pytest

from src.lattice import LatticeCombSpec
from src.measure import AtomicMeasure

DATA = Path(__file__).resolve().parent.parent / "data"
CORPUS_NAMES = ["unit_comb", "scaled_comb", "shifted_comb", "modulated_comb", "unit_square"]


def load_spec(name: str) -> LatticeCombSpec:
    return LatticeCombSpec.from_dict(json.loads((DATA / "corpus" / f"{name}.json").read_text()))


@pytest.fixture
def unit_comb():
    return load_spec("unit_comb")


@pytest.fixture
def modulated_comb():
    return load_spec("modulated_comb")


@pytest.fixture
def unit_square():
    return load_spec("unit_square")


@pytest.fixture(params=CORPUS_NAMES)
def corpus_spec(request):
    return load_spec(request.param)


@pytest.fixture
def exponential_measure():
    n = np.arange(-40, 41)
    return AtomicMeasure.from_atoms(1, n.reshape(-1, 1), np.exp(np.abs(n)), 41.0)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def configs():
    return DATA / "configs"
