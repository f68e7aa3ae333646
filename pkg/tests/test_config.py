#!/usr/bin/env python3
"""
BANDEDGE Configuration Tests
============================

Defaults, key = value files, environment overrides and validation.

Run with: pytest tests/test_config.py -v
"""

from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from app.config import ConfigError, ExperimentConfig, load_config, read_config_file


def write_config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return path


# =============================================================================
# Defaults
# =============================================================================
class TestDefaults:
    """An empty configuration reproduces the reference experiment."""

    def test_default_values(self):
        """Defaults describe the quarter-wave reference run."""
        config = load_config()
        assert config.layers == [(2.0, 0.25), (1.0, 0.5)]
        assert config.gap_index == 1
        assert config.edge_side == "lower"
        assert config.positions == [i / 16 for i in range(8)]
        assert (config.z_min, config.z_max, config.z_steps) == (-8.0, -1.0, 71)
        assert config.slope_tol == 0.02
        assert config.oracle_periods == 4096
        assert config.oracle_loss == 1e-3
        assert len(config.oracle_points) == 10
        assert config.output_dir == Path("results")
        assert config.threads == 1

    def test_z_grid_descending(self):
        """z runs from z_max down to z_min."""
        grid = ExperimentConfig().z_grid()
        assert len(grid) == 71
        assert grid[0] == -1.0
        assert grid[-1] == -8.0
        assert np.all(np.diff(grid) < 0)

    def test_build_cell(self):
        """The default layers build the L = 0.75 cell."""
        cell = ExperimentConfig().build_cell()
        assert cell.L == pytest.approx(0.75)

    def test_empty_file_gives_defaults(self, tmp_path):
        """Comments and blank lines change nothing."""
        path = write_config(tmp_path, "# nothing here\n\n")
        assert load_config(path) == ExperimentConfig()

    def test_display_dict(self):
        """Display values are human-readable strings."""
        display = ExperimentConfig().to_display_dict()
        assert display["Gap"] == "1 (lower edge)"
        assert "2, 0.25" in display["Layers (n, d)"]


# =============================================================================
# Config files
# =============================================================================
class TestConfigFile:
    """key = value parsing."""

    def test_repeated_layers_and_points(self, tmp_path):
        """layer and oracle_point lines accumulate in file order."""
        path = write_config(
            tmp_path,
            "# three-layer cell\n"
            "layer = 1.5, 0.2\n"
            "layer = 2.5, 0.1   # high index\n"
            "layer = 1.0, 0.3\n"
            "oracle_point = 1.0, 0.1\n"
            "oracle_point = 1.2, 0.3\n"
            "positions = 0, 0.25, 0.5\n"
            "edge_side = upper\n"
            "z_min = -6\n",
        )
        config = load_config(path)
        assert config.layers == [(1.5, 0.2), (2.5, 0.1), (1.0, 0.3)]
        assert config.oracle_points == [(1.0, 0.1), (1.2, 0.3)]
        assert config.positions == [0.0, 0.25, 0.5]
        assert config.edge_side == "upper"
        assert config.z_min == -6.0

    def test_single_position_lines(self, tmp_path):
        """Repeated position lines build the positions list."""
        path = write_config(tmp_path, "position = 0.1\nposition = 0.2\n")
        assert read_config_file(path)["positions"] == [0.1, 0.2]

    def test_overrides_beat_file(self, tmp_path):
        """Command-line values win; None leaves the file value."""
        path = write_config(tmp_path, "threads = 2\noutput_dir = from_file\n")
        config = load_config(path, {"threads": 4, "output_dir": None})
        assert config.threads == 4
        assert config.output_dir == Path("from_file")

    def test_environment_fills_missing_keys(self, tmp_path, monkeypatch):
        """BANDEDGE_* variables apply only to keys the file leaves unset."""
        monkeypatch.setenv("BANDEDGE_SLOPE_TOL", "0.05")
        monkeypatch.setenv("BANDEDGE_GRID_SIZE", "128")
        path = write_config(tmp_path, "slope_tol = 0.03\n")
        config = load_config(path)
        assert config.slope_tol == 0.03
        assert config.grid_size == 128

    @patch.dict("os.environ", {"BANDEDGE_POSITIONS": "[0.0, 0.125]"})
    def test_environment_list_as_json(self):
        """List fields are read from the environment as JSON."""
        assert load_config().positions == [0.0, 0.125]


# =============================================================================
# Errors
# =============================================================================
class TestConfigErrors:
    """Every problem surfaces as ConfigError."""

    @pytest.mark.parametrize(
        "text",
        [
            "colour = blue\n",
            "layer = 2.0\n",
            "layer = two, 0.25\n",
            "layer = 0.5, 0.25\n",
            "z_min = -1\nz_max = -2\n",
            "z_max = 0.5\n",
            "oracle_loss = 0.5\n",
            "grid_size = 16\n",
            "edge_side = middle\n",
            "gap_index = 0\n",
            "threads = 0\n",
            "oracle_point = -1.0, 0.2\n",
            "slope_tol = 0.02\nslope_tol = 0.03\n",
            "just_a_key\n",
        ],
    )
    def test_invalid_file(self, tmp_path, text):
        """Malformed, unknown, duplicate and out-of-range entries."""
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, text))

    def test_missing_file(self, tmp_path):
        """An unreadable path is reported as ConfigError."""
        with pytest.raises(ConfigError, match="Cannot read"):
            load_config(tmp_path / "absent.cfg")
