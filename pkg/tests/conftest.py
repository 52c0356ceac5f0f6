import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from seminorm_lab.corpus import builtin, corpus
from seminorm_lab.grid.field import GridSpec
from seminorm_lab.littlewood_paley import build_partition

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GRID_1D = GridSpec(1, 512, 16.0)
GRID_2D = GridSpec(2, 64, 8.0)

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def grid1():
    return GRID_1D


@pytest.fixture(scope="session")
def grid2():
    return GRID_2D


@pytest.fixture(scope="session")
def part1():
    return build_partition(GRID_1D)


@pytest.fixture(scope="session")
def part2():
    return build_partition(GRID_2D)


@pytest.fixture(scope="session")
def corpus1():
    return corpus(GRID_1D)


@pytest.fixture(scope="session")
def corpus2():
    return corpus(GRID_2D)


@pytest.fixture(scope="session")
def fine():
    """Refined samples of builtins, shared so cached samplers are reused."""
    cache = {}

    def get(f):
        key = (f.name, f.spec)
        if key not in cache:
            cache[key] = builtin(f.name, f.spec.refined())
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


INF = math.inf
