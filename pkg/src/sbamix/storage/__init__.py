"""
sbamix.storage
~~~~~~~~~~~~~~
Text formats, run directory layout and bundled data.

Usage::

    from sbamix.storage import load_galaxy, resolve_run, write_array

    y = load_galaxy()                      # 82 velocities in 1000 km/s
    layout = resolve_run(Path("runs/g"))
    layout.create_dirs()
"""

from .datasets import galaxy_path, load_galaxy
from .formats import (
    iter_mixing,
    read_array,
    read_band,
    read_data,
    read_density,
    read_discrete,
    read_matrix,
    write_array,
    write_band,
    write_density,
    write_discrete,
    write_json,
    write_matrix,
    write_mixing,
)
from .layout import RunLayout, comparison_path, resolve_run

__all__ = [
    "RunLayout",
    "comparison_path",
    "galaxy_path",
    "iter_mixing",
    "load_galaxy",
    "read_array",
    "read_band",
    "read_data",
    "read_density",
    "read_discrete",
    "read_matrix",
    "resolve_run",
    "write_array",
    "write_band",
    "write_density",
    "write_discrete",
    "write_json",
    "write_matrix",
    "write_mixing",
]
