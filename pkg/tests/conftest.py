import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from coxeter.root_systems import RANK3_GROUPS, build_root_system  # noqa: E402
from coxeter.versor_groups import generate_pin_group, generate_spin_group  # noqa: E402


@pytest.fixture(scope="session")
def root_systems():
    return {name: build_root_system(name) for name in RANK3_GROUPS}


@pytest.fixture(scope="session")
def spin_groups(root_systems):
    return {name: generate_spin_group(rs) for name, rs in root_systems.items()}


@pytest.fixture(scope="session")
def pin_groups(root_systems):
    return {name: generate_pin_group(rs) for name, rs in root_systems.items()}


@pytest.fixture(scope="session")
def pentagon_groups():
    rs = build_root_system("I2:5")
    return {"roots": rs, "spin": generate_spin_group(rs), "pin": generate_pin_group(rs)}


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
