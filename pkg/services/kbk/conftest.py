"""Pytest configuration and shared fixtures for the KBK simulation tests.

Adds the repo root to sys.path so tests can import services.kbk when run from
the repo root, and provides small grids and scenario overrides that keep the
fast suite fast.
"""

import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from services.kbk.core.spectral_grid import build_grid  # noqa: E402

# Resolved soliton-test run that finishes in well under a second.
QUICK_SOLITON = {"L": 15.0, "N": 1024, "T": 0.02, "Nt": 20, "snapshot_count": 2}


@pytest.fixture
def unit_grid():
    """16 nodes on [-pi, pi); trigonometric data is exact on it."""
    return build_grid(1.0, 16)


@pytest.fixture
def quick_soliton(tmp_path):
    """Overrides for a short soliton-test run writing under tmp_path."""
    return {**QUICK_SOLITON, "output_dir": str(tmp_path)}
