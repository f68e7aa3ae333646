import os

import pytest

from app.photonic.crystal import UnitCell, find_band_edges

# First gap of the quarter-wave cell: sin^2(omega/2) = 8/9
LOWER_EDGE = 2.4619188346815495
UPPER_EDGE = 3.8212664724980367


@pytest.fixture(autouse=True)
def clean_bandedge_env(monkeypatch):
    """Keep BANDEDGE_* variables of the host shell out of the tests."""
    for key in list(os.environ):
        if key.startswith("BANDEDGE_"):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture(scope="session")
def default_cell():
    return UnitCell.quarter_wave()


@pytest.fixture(scope="session")
def vacuum_cell():
    return UnitCell.homogeneous(1.0, 1.0)


@pytest.fixture(scope="session")
def first_gap_edges(default_cell):
    lower, upper = find_band_edges(default_cell, omega_max=4.0)
    return lower, upper
