import os

import pytest

from dfthreshold.ann import train_mlp
from dfthreshold.dataset import DEFAULT_TEST_SPEC, DEFAULT_TRAIN_SPEC, generate_grid

WORKERS = os.cpu_count() or 1


@pytest.fixture(scope="session")
def train_ds():
    return generate_grid(DEFAULT_TRAIN_SPEC, workers=WORKERS)


@pytest.fixture(scope="session")
def test_ds():
    return generate_grid(DEFAULT_TEST_SPEC, workers=WORKERS)


@pytest.fixture(scope="session")
def mlp_cache(train_ds):
    """Lazily trained MLPs keyed by (n_hidden, seed)."""
    cache = {}

    def get(n_hidden, seed):
        key = (n_hidden, seed)
        if key not in cache:
            cache[key] = train_mlp(train_ds, n_hidden, seed=seed)
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
