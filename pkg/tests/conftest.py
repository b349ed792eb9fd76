"""Shared pytest fixtures."""
import numpy as np
import pytest

import config
from utils.mobius import MobiusMap


@pytest.fixture(autouse=True)
def restore_tolerance():
    saved = config.EPSILON
    yield
    config.EPSILON = saved


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_map(rng):
    """Factory for random maps with complex Gaussian entries."""
    def make(scale: float = 1.0) -> MobiusMap:
        while True:
            entries = scale * (rng.normal(size=4) + 1j * rng.normal(size=4))
            det = entries[0] * entries[3] - entries[1] * entries[2]
            if abs(det) > 0.1:
                return MobiusMap.of(*entries)
    return make


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Point config.OUTPUT_FOLDER at a temporary directory."""
    folder = tmp_path / "output"
    monkeypatch.setattr(config, "OUTPUT_FOLDER", str(folder))
    return folder
