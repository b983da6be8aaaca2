"""
sbamix.cli
~~~~~~~~~~
Command-line interface for sbamix.

Entry point registered in pyproject.toml::

    [project.scripts]
    sbamix = "sbamix.cli:main"

Usage examples
--------------
    sbamix --version

    # Sequential barycenter array of a measure, and its level-n approximation
    sbamix sba-build --config configs/uniform.toml --n 2 --out uniform.sba
    sbamix sba-approx --config configs/uniform.toml --n 4 --out uniform_n4.csv

    # Draws from the prior
    sbamix prior-sample --config configs/galaxy_parsimonious.toml --draws 100 --seed 1 --out prior.jsonl

    # Posterior fit, then recompute criteria from the stored matrix
    sbamix fit galaxy.csv --config configs/galaxy_parsimonious.toml --out runs/galaxy --chains 4
    sbamix metrics runs/galaxy/loglik.csv

    # Published config schema
    sbamix schema

Exit codes: 0 ok, 2 config parse error, 3 model construction error,
4 data/domain error, 5 numerical abort.
"""

from __future__ import annotations

import json
import logging
import sys
from importlib.metadata import version
from pathlib import Path
from typing import Optional

import numpy as np
import typer
from rich import print as rprint
from rich.console import Console
from typing_extensions import Annotated

from sbamix.config import RunConfig, settings
from sbamix.exceptions import ConfigParseError, DomainError, SBAMixError, TooFewSamples
from sbamix.gibbs import FitConfig, Trace, chain_seeds, run_chains
from sbamix.kernels import check_observations
from sbamix.metrics import density_band, lpml_cpo, waic, wasserstein_p
from sbamix.random_measures import sample_dsbasg, sample_dsbasp
from sbamix.sba import approximate, build_sba, is_regular, validate_sba
from sbamix.storage import (
    RunLayout,
    comparison_path,
    read_data,
    read_matrix,
    resolve_run,
    write_array,
    write_band,
    write_density,
    write_discrete,
    write_json,
    write_matrix,
    write_mixing,
)

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

EXACT_TOLERANCE = 1e-10

_err_console = Console(stderr=True)


def _package_version() -> str:
    try:
        return version("sbamix")
    except Exception:
        return "unknown"


# ---------------------------------------------------------------------------
# CLI class
# ---------------------------------------------------------------------------

class SBAMixCLI:

    # ------------------------------------------------------------------
    # Utility
    # ------------------------------------------------------------------

    def print_version(self) -> None:
        print(f"sbamix version: {_package_version()}")

    @staticmethod
    def _fail(exc: SBAMixError) -> int:
        print(f"[error] {exc}", file=sys.stderr)
        return exc.exit_code

    @staticmethod
    def _require_seed(config: RunConfig, seed: int | None) -> int:
        seed = config.fit.seed if seed is None else seed
        if seed is None:
            raise ConfigParseError("A seed is required: pass --seed or set [fit].seed.")
        return seed

    @staticmethod
    def _progress_printer(chain: int, msg: str) -> None:
        _err_console.print(f"[dim]chain {chain}: {msg}[/dim]")

    # ------------------------------------------------------------------
    # sba-build / sba-approx
    # ------------------------------------------------------------------

    def build_array(self, config_path: Path, n: int | None, out: Path) -> int:
        """Write the array of the configured measure. Returns exit code."""
        try:
            spec = RunConfig.from_toml(config_path).require_measure()
            depth = n or spec.depth
            array = build_sba(spec.to_measure(), depth)
            violations = validate_sba(array)
        except SBAMixError as exc:
            return self._fail(exc)

        Path(out).parent.mkdir(parents=True, exist_ok=True)
        write_array(out, array)
        regular = [j for j in range(1, depth + 2) if is_regular(array, j)]
        print(f"rows: {depth + 1}")
        print(f"violations: {len(violations)}")
        print(f"regular rows: {regular}")
        print(f"Array saved to {out}")
        return 0

    def approximate_measure(self, config_path: Path, n: int | None, out: Path) -> int:
        """Write the level-n approximation and a mean/W1 report. Returns exit code."""
        try:
            spec = RunConfig.from_toml(config_path).require_measure()
            depth = n or spec.depth
            measure = spec.to_measure()
            approx = approximate(measure, depth)
            w1 = wasserstein_p(measure, approx, 1.0)
        except SBAMixError as exc:
            return self._fail(exc)

        report = {
            "n": depth,
            "atoms": len(approx),
            "mean": approx.mean,
            "analytic_mean": measure.mean,
            "w1": w1,
            "exact": bool(w1 < EXACT_TOLERANCE),
        }
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_discrete(out, approx)
        write_json(out.with_suffix(".json"), report)
        print(json.dumps(report, indent=2))
        return 0

    # ------------------------------------------------------------------
    # prior-sample
    # ------------------------------------------------------------------

    def prior_sample(
        self,
        config_path: Path,
        draws: int,
        out: Path,
        seed: int | None = None,
        n: int | None = None,
    ) -> int:
        """Write ``draws`` mixing measures from the prior as JSON lines. Returns exit code."""
        try:
            config = RunConfig.from_toml(config_path)
            prior = config.require_prior()
            seed = self._require_seed(config, seed)
            depth = n or prior.depth_list()[0]
            family = config.family(depth)
            scale = prior.scale.to_law()
            rng = np.random.default_rng(seed)
            if prior.variant == "general":
                m2, alpha = prior.resolved_m2(depth), prior.resolved_alpha(depth)
                samples = [
                    sample_dsbasg(depth, family, scale, m2, alpha, rng) for _ in range(draws)
                ]
            else:
                samples = [sample_dsbasp(depth, family, scale, rng) for _ in range(draws)]
        except SBAMixError as exc:
            return self._fail(exc)

        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_mixing(out, samples)
        means = np.array([s.mean for s in samples])
        print(f"draws: {draws}")
        if draws:
            print(f"mean of means: {means.mean():.17g}")
            print(f"sd of means: {means.std(ddof=1) if draws > 1 else 0.0:.17g}")
        print(f"Draws saved to {out}")
        return 0

    # ------------------------------------------------------------------
    # fit
    # ------------------------------------------------------------------

    def fit(
        self,
        data_path: Path,
        config_path: Path,
        out: Path,
        seed: int | None = None,
        chains: int | None = None,
    ) -> int:
        """Run the sampler at every configured depth and write its artefacts. Returns exit code."""
        try:
            config = RunConfig.from_toml(config_path)
            seed = self._require_seed(config, seed)
            chains = chains or config.fit.chains or settings.default_chains
            try:
                y = read_data(data_path)
            except OSError as exc:
                raise DomainError(f"Cannot read data file {data_path}.", cause=exc) from exc
            if y.size == 0:
                raise DomainError(f"{data_path} holds no observations.")
            check_observations(config.kernel, y)

            depths = config.require_prior().depth_list()
            comparison = {}
            for n in depths:
                fit_config = config.fit_config(n, seed=seed, data=y)
                trace = run_chains(
                    fit_config, y, chains,
                    callback=self._progress_printer, debug=settings.debug_sweeps,
                )
                layout = resolve_run(out, depth=n if len(depths) > 1 else None)
                comparison[n] = self._write_fit(layout, config, fit_config, trace, chains)
        except SBAMixError as exc:
            return self._fail(exc)

        if len(depths) > 1:
            write_json(comparison_path(out), {f"n{n}": r for n, r in comparison.items()})
        for n, report in comparison.items():
            print(
                f"n={n}: draws={report['draws']} waic={report['waic']} "
                f"lpml={report['lpml']}"
            )
        print(f"Results saved to {out}")
        return 0

    @staticmethod
    def _write_fit(
        layout: RunLayout,
        config: RunConfig,
        fit_config: FitConfig,
        trace: Trace,
        chains: int,
    ) -> dict:
        layout.create_dirs()
        ll = trace.loglik_matrix()
        write_matrix(layout.loglik_path, ll)
        write_density(layout.density_path, trace.grid, trace.density_matrix())
        band = density_band(trace, config.output.band_prob)
        write_band(layout.band_path, band)
        if fit_config.keep_mixing:
            write_mixing(layout.mixing_path, trace.mixing, trace.means)

        report: dict = {"n": fit_config.n, "draws": len(trace), "waic": None, "lpml": None}
        try:
            report.update(waic(ll).to_dict())
            report["lpml"] = lpml_cpo(ll).lpml
        except TooFewSamples as exc:
            logger.warning("Skipping WAIC/LPML: %s", exc)
        report["density_modes"] = band.local_maxima()
        write_json(layout.report_path, report)

        write_json(layout.manifest_path, {
            "sbamix_version": _package_version(),
            "seeds": chain_seeds(fit_config.seed, chains),
            "chains": chains,
            "fit": fit_config.to_dict(),
            "run_config": config.model_dump(mode="json"),
            "diagnostics": trace.diagnostics.to_dict(),
        })
        return report

    # ------------------------------------------------------------------
    # metrics
    # ------------------------------------------------------------------

    def metrics(self, loglik_path: Path, out: Path | None = None) -> int:
        """Recompute WAIC and LPML from a stored log-likelihood matrix. Returns exit code."""
        try:
            try:
                ll = read_matrix(loglik_path)
            except (OSError, ValueError) as exc:
                raise DomainError(f"Cannot read matrix {loglik_path}.", cause=exc) from exc
            report = waic(ll).to_dict()
            report["lpml"] = lpml_cpo(ll).lpml
            report["draws"], report["observations"] = int(ll.shape[0]), int(ll.shape[1])
        except SBAMixError as exc:
            return self._fail(exc)

        if out:
            write_json(Path(out), report)
        print(json.dumps(report, indent=2))
        return 0


# ---------------------------------------------------------------------------
# Typer app
# ---------------------------------------------------------------------------

app = typer.Typer(
    name="sbamix",
    help="sbamix: sequential barycenter arrays and mean-constrained mixture models.",
    rich_markup_mode="rich",
    add_completion=False,
)

ConfigOpt  = typer.Option("--config", "-c", help="TOML run configuration.")
DepthOpt   = typer.Option("--n", help="Depth n (overrides the config).", show_default=False)
SeedOpt    = typer.Option("--seed", help="Base RNG seed (overrides [fit].seed).", show_default=False)
VerboseOpt = typer.Option("--verbose", "-v", help="Enable verbose output.")


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level)
    logging.basicConfig(level=level, format="%(levelname)-8s %(name)s %(message)s")


def _exit(rc: int) -> None:
    if rc != 0:
        raise typer.Exit(code=rc)


def _version_callback(value: bool) -> None:
    if value:
        rprint(f"sbamix version [bold green]{_package_version()}[/bold green]")
        raise typer.Exit()


@app.callback(invoke_without_command=True)
def callback(
    ctx: typer.Context,
    version: Annotated[
        bool,
        typer.Option(
            "--version",
            callback=_version_callback,
            is_eager=True,
            help="Show package version and exit.",
        ),
    ] = False,
) -> None:
    """sbamix: sequential barycenter arrays and mean-constrained mixture models."""
    if ctx.invoked_subcommand is None:
        rprint(ctx.get_help())
        raise typer.Exit()


@app.command("sba-build")
def cmd_sba_build(
    config: Annotated[Path, ConfigOpt],
    out: Annotated[Path, typer.Option("--out", "-o", help="Array file to write.")],
    n: Annotated[Optional[int], DepthOpt] = None,
    verbose: Annotated[bool, VerboseOpt] = False,
) -> None:
    """Build the sequential barycenter array of the [measure] section."""
    _configure_logging(verbose)
    _exit(SBAMixCLI().build_array(config, n, out))


@app.command("sba-approx")
def cmd_sba_approx(
    config: Annotated[Path, ConfigOpt],
    out: Annotated[Path, typer.Option("--out", "-o", help="Atom/weight CSV to write.")],
    n: Annotated[Optional[int], DepthOpt] = None,
    verbose: Annotated[bool, VerboseOpt] = False,
) -> None:
    """Level-n approximation of the [measure] section with a mean and W1 report."""
    _configure_logging(verbose)
    _exit(SBAMixCLI().approximate_measure(config, n, out))


@app.command("prior-sample")
def cmd_prior_sample(
    config: Annotated[Path, ConfigOpt],
    out: Annotated[Path, typer.Option("--out", "-o", help="JSON-lines file to write.")],
    draws: Annotated[int, typer.Option("--draws", min=0, help="Number of prior draws.")] = 100,
    seed: Annotated[Optional[int], SeedOpt] = None,
    n: Annotated[Optional[int], DepthOpt] = None,
    verbose: Annotated[bool, VerboseOpt] = False,
) -> None:
    """Draw mixing measures from the [prior] section."""
    _configure_logging(verbose)
    _exit(SBAMixCLI().prior_sample(config, draws, out, seed=seed, n=n))


@app.command("fit")
def cmd_fit(
    data: Annotated[Path, typer.Argument(help="Single-column CSV of observations.")],
    config: Annotated[Path, ConfigOpt],
    out: Annotated[Path, typer.Option("--out", "-o", help="Output directory.")],
    seed: Annotated[Optional[int], SeedOpt] = None,
    chains: Annotated[Optional[int], typer.Option("--chains", min=1, help="Concurrent chains.")] = None,
    verbose: Annotated[bool, VerboseOpt] = False,
) -> None:
    """Fit the mixture model and write traces, density band and WAIC/LPML report."""
    _configure_logging(verbose)
    _exit(SBAMixCLI().fit(data, config, out, seed=seed, chains=chains))


@app.command("metrics")
def cmd_metrics(
    loglik: Annotated[Path, typer.Argument(help="Draws x observations log-likelihood CSV.")],
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Write the report as JSON.")] = None,
    verbose: Annotated[bool, VerboseOpt] = False,
) -> None:
    """Recompute WAIC and LPML from a log-likelihood matrix."""
    _configure_logging(verbose)
    _exit(SBAMixCLI().metrics(loglik, out))


@app.command("schema")
def cmd_schema() -> None:
    """Print the JSON schema of the run configuration file."""
    print(json.dumps(RunConfig.model_json_schema(), indent=2))


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def main() -> None:
    app()


if __name__ == "__main__":
    main()
