import csv
from pathlib import Path

import numpy as np
import pytest

from pdmvote import synth
from pdmvote.preprocess import ScalerParams

DATA = Path(__file__).parent / "data"

# Column extremes of the public AI4I file (air, process, speed, torque, wear).
CANONICAL_MINS = (295.3, 305.7, 1168.0, 3.8, 0.0)
CANONICAL_MAXS = (304.5, 313.8, 2886.0, 76.6, 253.0)


@pytest.fixture(scope="session")
def excerpt_raw_path():
    return DATA / "ai4i_excerpt_raw.csv"


@pytest.fixture(scope="session")
def excerpt_encoded():
    with (DATA / "ai4i_excerpt_encoded.csv").open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    machines = np.array([int(r["machine"]) for r in rows])
    X = np.array([[float(r[f"F{j}"]) for j in range(1, 7)] for r in rows])
    y = np.array([int(r["label"]) for r in rows])
    return machines, X, y


@pytest.fixture(scope="session")
def canonical_params():
    return ScalerParams(np.array(CANONICAL_MINS), np.array(CANONICAL_MAXS))


@pytest.fixture(scope="session")
def replica_small():
    return synth.generate(2000, seed=7)


def blobs(n, seed, gap=3.0, d=2):
    """Two Gaussian clouds separated along every axis."""
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    X = rng.normal(size=(n, d)) * 0.5 + gap * y[:, None]
    return X, y


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
