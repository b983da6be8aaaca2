"""
sbamix.storage.datasets
~~~~~~~~~~~~~~~~~~~~~~~
Bundled datasets.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .formats import read_data


def galaxy_path():
    """Path-like handle to the bundled galaxy velocities (km/s)."""
    return resources.files("sbamix") / "data" / "galaxy.csv"


def load_galaxy(scale: float = 1000.0) -> np.ndarray:
    """The 82 galaxy velocities, divided by ``scale`` (default: units of 1000 km/s)."""
    with resources.as_file(galaxy_path()) as path:
        return read_data(path) / scale
