import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cmcomm import corpus  # noqa: E402
from cmcomm.congruences import Partition, congruence_lattice  # noqa: E402
from cmcomm.dayterms import DayChain  # noqa: E402

GROUPS = ["z2", "z3", "z4", "z2xz2", "s3", "d4"]
MODULAR = ["trivial", "z2", "z3", "z4", "z2xz2", "s3", "z4ring", "d4"]


@pytest.fixture(scope="session")
def algebras():
    return {name: corpus.load(name) for name in corpus.names()}


@pytest.fixture(scope="session")
def chains():
    out = {}
    for name in corpus.names():
        data = corpus.load_chain_data(name)
        if data is not None:
            out[name] = DayChain.from_list(data)
    return out


@pytest.fixture(scope="session")
def lattices(algebras):
    return {name: congruence_lattice(alg) for name, alg in algebras.items()}


@pytest.fixture
def z4ring(algebras):
    return algebras["z4ring"]


def P(text, n=None):
    return Partition.parse(text, n)
