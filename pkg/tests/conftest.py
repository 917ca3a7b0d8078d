import random

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from randgen import random_formula, random_trace

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running end-to-end checks")


@st.composite
def formula_trace(draw, depth: int = 5, max_len: int = 30):
    """A random formula and trace built from a hypothesis-drawn seed."""
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    return random_formula(rng, depth), random_trace(rng, max_len)


@pytest.fixture
def np_rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    lines = getattr(sys.modules.get("test_acceptance"), "VERDICTS", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(lines[num])
