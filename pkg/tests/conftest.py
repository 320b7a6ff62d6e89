import os
import zlib

import numpy as np
import pytest


def _base_seed() -> int:
    raw = os.environ.get("PLANESING_SEED", "").strip()
    return int(raw) if raw else 948371


def pytest_report_header(config):
    return f"planesing random seed: {_base_seed()} (override with PLANESING_SEED)"


@pytest.fixture(scope="session")
def base_seed():
    return _base_seed()


@pytest.fixture
def rng(base_seed, request):
    # one stream per test, stable under reordering and -k selection
    tag = zlib.crc32(request.node.nodeid.encode())
    return np.random.default_rng(np.random.SeedSequence([base_seed, tag]))
