import json
import os
import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from python.biquasile import AlexanderParams, Biquasile, alexander
from python.boltzmann import BoltzmannWeight
from python.corpus import load_corpus
from python.diagram import parse_pd, to_dual_graph

DATA = project_root / "data"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long corpus runs, enabled with BQK_FULL_CORPUS=1")


def pytest_collection_modifyitems(config, items):
    if os.getenv("BQK_FULL_CORPUS") == "1":
        return
    skip = pytest.mark.skip(reason="set BQK_FULL_CORPUS=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def read_data(name):
    with open(DATA / name, encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def z3_alexander():
    return alexander(AlexanderParams(3, 1, 1, 2))


@pytest.fixture
def z3_linear():
    return alexander(AlexanderParams(3, 2, 2, 1))


@pytest.fixture
def order_two():
    return Biquasile.from_json(read_data("biquasile_z2.json"))


@pytest.fixture
def phi():
    return BoltzmannWeight.from_json(read_data("weight_phi_z5.json"))


@pytest.fixture
def phi_z6():
    return {
        label: BoltzmannWeight.from_json(read_data(f"weight_{label}_z6.json"))
        for label in ("phi1", "phi2", "phi3")
    }


@pytest.fixture
def hopf():
    return parse_pd("PD[X[4,1,3,2], X[2,3,1,4]]")


@pytest.fixture
def hopf_dual(hopf):
    return to_dual_graph(hopf)


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture
def l4a1(corpus):
    return to_dual_graph(corpus["L4a1"].diagram)
