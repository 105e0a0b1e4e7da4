"""Shared test fixtures for Steinberg Lab"""
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest

from shared.utils.config import DEFAULT_CONFIG
from steinberg_lab.exactfield import field_make
from steinberg_lab.steinberg import build_module


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing"""
    tmp = tempfile.mkdtemp()
    yield Path(tmp)
    shutil.rmtree(tmp)


@pytest.fixture
def sample_config():
    """Configuration with small suite sizes for fast runs"""
    config = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
    config["suites"] = {key: 3 for key in config["suites"]}
    return config


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def f2():
    return field_make(2)


@pytest.fixture
def f3():
    return field_make(3)


@pytest.fixture
def f5():
    return field_make(5)


@pytest.fixture
def f4():
    return field_make(2, 2)


@pytest.fixture
def f8():
    return field_make(2, 3)


@pytest.fixture(scope="session")
def st_2_3_2():
    """St(GL_2(F_3); F_2): dimension 3, reducible"""
    return build_module(2, 3, 2)


@pytest.fixture(scope="session")
def st_2_2_3():
    """St(GL_2(F_2); F_3): dimension 2"""
    return build_module(2, 2, 3)


@pytest.fixture(scope="session")
def st_3_2_2():
    """St(GL_3(F_2); F_2): dimension 8, irreducible"""
    return build_module(3, 2, 2)
