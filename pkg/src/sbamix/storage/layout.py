"""
sbamix.storage.layout
~~~~~~~~~~~~~~~~~~~~~
Run directory layout: maps an output directory to the files a fit writes::

  <out>/loglik.csv      draws x observations log-likelihood matrix
  <out>/density.csv     draws x grid density values (first row: grid)
  <out>/band.csv        x,mean,lo,hi posterior density band
  <out>/mixing.jsonl    one mixing-measure snapshot per retained draw
  <out>/report.json     WAIC / LPML summary
  <out>/manifest.json   config echo, seeds, sampler diagnostics

A multi-depth fit writes one such layout per depth under ``<out>/n<k>/``
plus ``<out>/comparison.json``.

Usage::

    from sbamix.storage.layout import resolve_run

    layout = resolve_run(Path("runs/galaxy"))
    layout = resolve_run(Path("runs/galaxy"), depth=5)   # runs/galaxy/n5/
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

COMPARISON_FILENAME = "comparison.json"


@dataclass(frozen=True)
class RunLayout:
    """All paths belonging to a single fit."""
    root:          Path
    loglik_path:   Path
    density_path:  Path
    band_path:     Path
    mixing_path:   Path
    report_path:   Path
    manifest_path: Path

    def create_dirs(self) -> None:
        """Ensure the run directory exists."""
        self.root.mkdir(parents=True, exist_ok=True)

    @property
    def exists(self) -> bool:
        """True once a manifest has been written."""
        return self.manifest_path.exists()


def resolve_run(out: Path, depth: int | None = None) -> RunLayout:
    """Layout for ``out`` itself, or for its ``n<depth>`` subdirectory."""
    root = Path(out) if depth is None else Path(out) / f"n{depth}"
    return RunLayout(
        root=root,
        loglik_path=root / "loglik.csv",
        density_path=root / "density.csv",
        band_path=root / "band.csv",
        mixing_path=root / "mixing.jsonl",
        report_path=root / "report.json",
        manifest_path=root / "manifest.json",
    )


def comparison_path(out: Path) -> Path:
    return Path(out) / COMPARISON_FILENAME


__all__ = ["COMPARISON_FILENAME", "RunLayout", "comparison_path", "resolve_run"]
