"""
The heislab CLI builds Laakso graphs, embeds them in the Heisenberg group, and measures and
checks the result. Every command writes a JSON report (to ``--out`` or to stdout) wrapped in the
same envelope: tool version, full config, seed and wall-clock duration.

You can see the list of all available commands by running:

.. code-block::

    $ heislab --help

For example,

.. code-block::

    $ heislab laakso stats --level 3
    $ heislab distortion --levels 1,2,3,4 --out sweep.json
    $ heislab plot sweep.json --out sweep.svg

``heislab check ...`` exits with status 1 when a check fails.
"""
import dataclasses
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import click
import yaml
from click_help_colors import HelpColorsCommand, HelpColorsGroup

from .common.aliases import PathOrStr
from .common.exceptions import ConfigurationError, HeislabError
from .common.logging import click_logger, file_handler, initialize_logging, teardown_logging
from .common.util import resolve_seed
from .format import CsvFormat, JsonFormat, envelope
from .version import VERSION

_GROUP = dict(
    cls=HelpColorsGroup,
    help_options_color="green",
    help_headers_color="yellow",
    context_settings={"max_content_width": 115},
)

_COMMAND = dict(
    cls=HelpColorsCommand,
    help_options_color="green",
    help_headers_color="yellow",
    context_settings={"max_content_width": 115},
)


@dataclass
class HeislabSettings:
    """
    Defines global settings for heislab.
    """

    log_level: str = "warning"
    """
    The log level to use. Options are "debug", "info", "warning", and "error".
    """

    file_friendly_logging: bool = False
    """
    If ``True``, progress bars print on separate lines and refresh slowly.
    """

    threads: int = 1
    """
    Worker threads for chunked computations. Results do not depend on it.
    """

    seed: int = 1
    """
    Seed for every random stream. ``HEISLAB_SEED`` overrides it.
    """

    M: float = 17.0
    """
    The parameter of the angle schedule.
    """

    p: float = 4.0

    samples: int = 100_000

    exact_pair_cap: int = 10**8
    """
    The largest number of pairs an exact distortion computation may visit.
    """

    level_cap: int = 6

    record_timing: bool = True
    """
    Whether reports carry a wall-clock duration. Without it, reports are byte-identical
    across runs.
    """

    motif: str = "laakso"

    _path: Optional[Path] = None

    @classmethod
    def default(cls) -> "HeislabSettings":
        """
        Initialize the settings from files by checking the default locations
        in order, or just return the default if none of the files can be found.
        """
        for directory in (Path("."), Path.home() / ".config"):
            for extension in ("yml", "yaml"):
                path = directory / f"heislab.{extension}"
                if path.is_file():
                    return cls.from_file(path)
        return cls()

    @classmethod
    def find_or_default(cls, path: Optional[PathOrStr]) -> "HeislabSettings":
        """
        Initialize the settings from a given file, or fall back to the defaults
        if no file is given.
        """
        if path is not None:
            path = Path(path)
            if not path.is_file():
                raise FileNotFoundError(path)
            return cls.from_file(path)
        else:
            return cls.default()

    @property
    def path(self) -> Optional[Path]:
        """
        The path to the file the settings were read from.
        """
        return self._path

    @classmethod
    def from_file(cls, path: PathOrStr) -> "HeislabSettings":
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path} must hold a mapping of settings")
        known = {f.name for f in dataclasses.fields(cls) if not f.name.startswith("_")}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(
                f"unknown settings in {path}: {', '.join(unknown)}; known are {sorted(known)}"
            )
        return cls(**data, _path=Path(path))


def _ints(ctx, param, value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got '{value}'")


def _floats(ctx, param, value: Optional[str]) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated numbers, got '{value}'")


@contextmanager
def _usage_errors():
    """Reports refused or invalid configurations as usage errors."""
    try:
        yield
    except HeislabError as e:
        raise click.UsageError(str(e))


def _emit(
    settings: HeislabSettings,
    command: str,
    config: Dict[str, Any],
    result: Any,
    started: float,
    out: Optional[str] = None,
):
    duration = time.perf_counter() - started if settings.record_timing else None
    report = envelope(command, config, settings.seed, result, duration_s=duration)
    if out is None:
        click.echo(JsonFormat.dumps(report), nl=False)
    else:
        JsonFormat().write(report, out)
        click_logger.info(f"Wrote {command} report to {out}")


_out_option = click.option(
    "-o", "--out", type=click.Path(dir_okay=False), help="Write the JSON report here."
)

_M_option = click.option("--M", "M", type=float, help="The angle schedule parameter M.")

_seed_option = click.option(
    "--seed",
    "command_seed",
    type=int,
    help="Seed for this command, in place of the global --seed. HEISLAB_SEED overrides it.",
)


def _command_seed(settings: HeislabSettings, seed: Optional[int]):
    if seed is not None:
        settings.seed = resolve_seed(seed)


@click.group(**_GROUP)  # type: ignore[call-overload]
@click.version_option(version=VERSION)
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False, resolve_path=True),
    help="Path to a heislab.yml settings file.",
)
@click.option(
    "--log-level",
    help="Set the global log level.",
    type=click.Choice(["debug", "info", "warning", "error"], case_sensitive=False),
    show_choices=True,
)
@click.option(
    "--file-friendly-logging",
    is_flag=True,
    default=None,
    help="Outputs progress bar status on separate lines and slows refresh rate.",
)
@click.option("--log-file", type=click.Path(dir_okay=False), help="Also write logs to this file.")
@click.option("--threads", type=int, help="Worker threads. Results do not depend on it.")
@click.option("--seed", type=int, help="Seed for all random streams. HEISLAB_SEED overrides it.")
@click.option("--no-timing", is_flag=True, help="Leave the duration out of reports.")
@click.pass_context
def main(
    ctx,
    config: Optional[str] = None,
    log_level: Optional[str] = None,
    file_friendly_logging: Optional[bool] = None,
    log_file: Optional[str] = None,
    threads: Optional[int] = None,
    seed: Optional[int] = None,
    no_timing: bool = False,
):
    with _usage_errors():
        settings = HeislabSettings.find_or_default(config)
        if log_level is not None:
            settings.log_level = log_level
        elif os.environ.get("HEISLAB_LOG_LEVEL"):
            settings.log_level = os.environ["HEISLAB_LOG_LEVEL"]
        if file_friendly_logging is not None:
            settings.file_friendly_logging = file_friendly_logging
        if threads is not None:
            settings.threads = threads
        if no_timing:
            settings.record_timing = False
        settings.seed = resolve_seed(seed if seed is not None else settings.seed)
        if settings.threads < 1:
            raise ConfigurationError(f"--threads must be at least 1, got {settings.threads}")
        initialize_logging(
            log_level=settings.log_level,
            file_friendly_logging=settings.file_friendly_logging,
            enable_click_logs=True,
        )
    if log_file is not None:
        ctx.with_resource(file_handler(log_file))

    ctx.obj = settings


@main.result_callback()
def cleanup(*args, **kwargs):
    teardown_logging()


@main.group(**_GROUP)  # type: ignore[call-overload]
def laakso():
    """
    Build Laakso graphs and export them
    """


@laakso.command(name="stats", **_COMMAND)  # type: ignore[call-overload]
@click.option("--level", type=int, required=True, help="The level n of G_n.")
@click.option("--motif", type=str, help="The registered motif to build with.")
@click.option("--geodesics", is_flag=True, help="Also count source-sink geodesics.")
@_out_option
@click.pass_obj
def laakso_stats(
    settings: HeislabSettings,
    level: int,
    motif: Optional[str],
    geodesics: bool,
    out: Optional[str],
):
    """
    Vertex, edge and diameter counts of G_n
    """
    from .laakso import build_graph, count_geodesics, stats

    started = time.perf_counter()
    motif = motif or settings.motif
    with _usage_errors():
        g = build_graph(level, motif=motif, level_cap=settings.level_cap)
        result: Dict[str, Any] = dict(stats(g))
        if geodesics:
            result["geodesics"] = count_geodesics(g)
    _emit(settings, "laakso stats", {"level": level, "motif": motif}, result, started, out)


@laakso.command(name="export", **_COMMAND)  # type: ignore[call-overload]
@click.option("--level", type=int, required=True, help="The level n of G_n.")
@click.option("--motif", type=str, help="The registered motif to build with.")
@click.option(
    "--edges", type=click.Path(dir_okay=False), required=True, help="CSV file for the edges."
)
@click.option("--vertices", type=click.Path(dir_okay=False), help="CSV file for vertex addresses.")
@_out_option
@click.pass_obj
def laakso_export(
    settings: HeislabSettings,
    level: int,
    motif: Optional[str],
    edges: str,
    vertices: Optional[str],
    out: Optional[str],
):
    """
    Write the edge list (and vertex addresses) of G_n as CSV
    """
    from .laakso import build_graph, edge_table, stats, vertex_table

    started = time.perf_counter()
    motif = motif or settings.motif
    with _usage_errors():
        g = build_graph(level, motif=motif, level_cap=settings.level_cap)
    csv = CsvFormat()
    csv.write(edge_table(g), edges)
    files = {"edges": edges}
    if vertices is not None:
        csv.write(vertex_table(g), vertices)
        files["vertices"] = vertices
    result = {"stats": stats(g), "files": files}
    _emit(settings, "laakso export", {"level": level, "motif": motif}, result, started, out)


@main.command(**_COMMAND)  # type: ignore[call-overload]
@click.option("--level", type=int, required=True, help="The level n of G_n.")
@_M_option
@click.option(
    "-o", "--out", type=click.Path(dir_okay=False), help="CSV file for the vertex images."
)
@click.option("--report", type=click.Path(dir_okay=False), help="Write the JSON report here.")
@click.pass_obj
def embed(
    settings: HeislabSettings,
    level: int,
    M: Optional[float],
    out: Optional[str],
    report: Optional[str],
):
    """
    Embed G_n in the Heisenberg group with the double-diamond map

    The vertex images go to --out as CSV; the report still goes to stdout unless --report is
    given.
    """
    from .embedder import angle_schedule, embed as embed_graph, scale_constant, vertex_table
    from .laakso import build_graph

    started = time.perf_counter()
    M = settings.M if M is None else M
    with _usage_errors():
        g = build_graph(level, motif=settings.motif, level_cap=settings.level_cap)
        schedule = angle_schedule(M, level)
        f = embed_graph(g, schedule)
        constant = scale_constant(schedule, 1, level) if level >= 1 else None
    if out is not None:
        CsvFormat().write(vertex_table(f), out)
    result = {
        "level": level,
        "vertices": g.n_vertices,
        "thetas": list(schedule.thetas),
        "radius": f.radius,
        "scale_constant": constant,
        "files": {"vertices": out},
    }
    _emit(settings, "embed", {"level": level, "M": M}, result, started, report)


@main.command(**_COMMAND)  # type: ignore[call-overload]
@click.option("--level", type=int, help="Measure G_n at this level.")
@click.option("--levels", callback=_ints, help="Sweep these comma separated levels.")
@_M_option
@click.option(
    "--exact/--sampled",
    default=None,
    help="Visit every pair, or sample pairs for a lower bound. Giving --samples selects "
    "sampling; otherwise exact when the pair count fits under the cap.",
)
@click.option("--samples", type=int, help="Pairs to sample.")
@_seed_option
@_out_option
@click.pass_obj
def distortion(
    settings: HeislabSettings,
    level: Optional[int],
    levels: Optional[List[int]],
    M: Optional[float],
    exact: Optional[bool],
    samples: Optional[int],
    command_seed: Optional[int],
    out: Optional[str],
):
    """
    Bi-Lipschitz distortion of the double-diamond embedding
    """
    from .distortion import measure_embedding, sweep
    from .embedder import angle_schedule, embed as embed_graph
    from .laakso import build_graph

    if (level is None) == (levels is None):
        raise click.UsageError("give exactly one of --level and --levels")
    started = time.perf_counter()
    M = settings.M if M is None else M
    if exact is None and samples is not None:
        exact = False
    samples = settings.samples if samples is None else samples
    config: Dict[str, Any] = {"M": M, "samples": samples, "exact": exact}
    result: Any
    with _usage_errors():
        _command_seed(settings, command_seed)
        if levels is not None:
            pair_cap = settings.exact_pair_cap
            if exact is False:
                pair_cap = 0
            config["levels"] = levels
            rows = sweep(
                levels,
                M=M,
                samples=samples,
                seed=settings.seed,
                threads=settings.threads,
                pair_cap=pair_cap,
                level_cap=settings.level_cap,
                motif=settings.motif,
            )
            result = {"rows": rows}
        else:
            assert level is not None
            config["level"] = level
            g = build_graph(level, motif=settings.motif, level_cap=settings.level_cap)
            f = embed_graph(g, angle_schedule(M, level))
            total = g.n_vertices * (g.n_vertices - 1) // 2
            if exact is None:
                exact = total <= settings.exact_pair_cap
            result = measure_embedding(
                f,
                mode="exact" if exact else "sampled",
                samples=samples,
                seed=settings.seed,
                threads=settings.threads,
                pair_cap=settings.exact_pair_cap,
            )
    _emit(settings, "distortion", config, result, started, out)


@main.command(**_COMMAND)  # type: ignore[call-overload]
@click.option("--level", type=int, help="Estimate on G_m at this level.")
@click.option("--levels", callback=_ints, help="Sweep these comma separated levels.")
@click.option("--p", "ps", callback=_floats, help="Comma separated exponents p.")
@_M_option
@click.option(
    "--target",
    type=click.Choice(["heisenberg", "graph"]),
    default="heisenberg",
    show_default=True,
    help="Map the chain by the embedding or keep the graph metric.",
)
@click.option(
    "--exact/--montecarlo",
    default=None,
    help="Sum over every trajectory, or average sampled trajectory pairs. Giving --samples "
    "selects Monte Carlo; otherwise exact.",
)
@click.option("--samples", type=int, help="Monte Carlo trajectory pairs.")
@_seed_option
@_out_option
@click.pass_obj
def markov(
    settings: HeislabSettings,
    level: Optional[int],
    levels: Optional[List[int]],
    ps: Optional[List[float]],
    M: Optional[float],
    target: str,
    exact: Optional[bool],
    samples: Optional[int],
    command_seed: Optional[int],
    out: Optional[str],
):
    """
    Markov p-convexity functional of the Laakso chain
    """
    from .markov import chain_metric, functional, laakso_chain, sweep
    from .laakso import build_graph

    if (level is None) == (levels is None):
        raise click.UsageError("give exactly one of --level and --levels")
    started = time.perf_counter()
    M = settings.M if M is None else M
    ps = ps or [settings.p]
    if exact is None:
        exact = samples is None
    mode = "exact" if exact else "montecarlo"
    samples = settings.samples if samples is None else samples
    config: Dict[str, Any] = {"M": M, "p": ps, "target": target, "mode": mode}
    if mode == "montecarlo":
        config["samples"] = samples
    result: Any
    with _usage_errors():
        _command_seed(settings, command_seed)
        if levels is not None:
            config["levels"] = levels
            rows = sweep(
                levels,
                ps,
                M=M,
                target=target,
                mode=mode,
                samples=samples,
                seed=settings.seed,
                threads=settings.threads,
                level_cap=settings.level_cap,
                motif=settings.motif,
            )
            result = {"rows": rows}
        else:
            assert level is not None
            config["level"] = level
            g = build_graph(level, motif=settings.motif, level_cap=settings.level_cap)
            spec = laakso_chain(g)
            metric = chain_metric(g, target, M)
            result = {
                "estimates": [
                    functional(
                        spec,
                        metric,
                        p,
                        mode=mode,
                        samples=samples,
                        seed=settings.seed,
                        threads=settings.threads,
                    )
                    for p in ps
                ]
            }
    _emit(settings, "markov", config, result, started, out)


@main.group(**_GROUP)  # type: ignore[call-overload]
def check():
    """
    Run numerical checks; the exit status is 1 when one fails
    """


@check.command(name="inequalities", **_COMMAND)  # type: ignore[call-overload]
@click.option(
    "--checker",
    "checkers",
    multiple=True,
    help="A registered checker to run. Can be given more than once; all run by default.",
)
@click.option("--count", type=int, default=100_000, show_default=True, help="Samples per case.")
@click.option(
    "--dims", callback=_ints, default="1,2,8", show_default=True, help="Dimensions to sample."
)
@_seed_option
@_out_option
@click.pass_obj
@click.pass_context
def check_inequalities(
    ctx,
    settings: HeislabSettings,
    checkers: Sequence[str],
    count: int,
    dims: List[int],
    command_seed: Optional[int],
    out: Optional[str],
):
    """
    Randomized suites for the pointwise inequalities
    """
    from .inequalities import InequalityCheck, run_suite

    started = time.perf_counter()
    names = list(checkers) or InequalityCheck.list_available()
    with _usage_errors():
        _command_seed(settings, command_seed)
        reports = [
            run_suite(name, count=count, dims=dims, seed=settings.seed, threads=settings.threads)
            for name in names
        ]
    passed = all(report.passed for report in reports)
    result = {
        "passed": passed,
        "suites": [
            {**dataclasses.asdict(r), "violations": r.violations, "passed": r.passed}
            for r in reports
        ],
    }
    config = {"checkers": names, "count": count, "dims": dims}
    _emit(settings, "check inequalities", config, result, started, out)
    if not passed:
        ctx.exit(1)


@check.command(name="forks", **_COMMAND)  # type: ignore[call-overload]
@click.option("--count", type=int, default=10_000, show_default=True, help="Forks per dimension.")
@click.option(
    "--dims", callback=_ints, default="1,2,8", show_default=True, help="Dimensions to sample."
)
@_seed_option
@_out_option
@click.pass_obj
@click.pass_context
def check_forks(
    ctx,
    settings: HeislabSettings,
    count: int,
    dims: List[int],
    command_seed: Optional[int],
    out: Optional[str],
):
    """
    Collapse and small-angle bounds on synthetic nearly geodesic forks
    """
    from .inequalities import fork_suite

    started = time.perf_counter()
    with _usage_errors():
        _command_seed(settings, command_seed)
        report = fork_suite(count=count, seed=settings.seed, dims=dims)
    result = {**dataclasses.asdict(report), "passed": report.passed}
    _emit(settings, "check forks", {"count": count, "dims": dims}, result, started, out)
    if not report.passed:
        ctx.exit(1)


@check.command(name="embedding", **_COMMAND)  # type: ignore[call-overload]
@click.option("--level", type=int, required=True, help="The level n of G_n.")
@_M_option
@click.option("--samples", type=int, default=1000, show_default=True, help="Sampled geodesics.")
@_seed_option
@_out_option
@click.pass_obj
@click.pass_context
def check_embedding(
    ctx,
    settings: HeislabSettings,
    level: int,
    M: Optional[float],
    samples: int,
    command_seed: Optional[int],
    out: Optional[str],
):
    """
    Structural checks of the double-diamond embedding
    """
    from .embedder import angle_schedule, embed as embed_graph, run_checks
    from .laakso import build_graph

    started = time.perf_counter()
    M = settings.M if M is None else M
    with _usage_errors():
        _command_seed(settings, command_seed)
        g = build_graph(level, motif=settings.motif, level_cap=settings.level_cap)
        f = embed_graph(g, angle_schedule(M, level))
        checks = run_checks(f, samples=samples, seed=settings.seed)
    passed = all(c.passed for c in checks)
    result = {"passed": passed, "checks": checks}
    config = {"level": level, "M": M, "samples": samples}
    _emit(settings, "check embedding", config, result, started, out)
    if not passed:
        ctx.exit(1)


@main.command(name="collapse-search", **_COMMAND)  # type: ignore[call-overload]
@click.option(
    "--input",
    "input_path",
    type=click.Path(exists=True, dir_okay=False),
    required=True,
    help="CSV of vectors, real and imaginary parts interleaved.",
)
@click.option("--ell", type=float, required=True, help="The size parameter ell.")
@_out_option
@click.pass_obj
def collapse_search(settings: HeislabSettings, input_path: str, ell: float, out: Optional[str]):
    """
    Find two vectors with a small symplectic product
    """
    from .inequalities import symplectic_collapse_search, vectors_from_csv

    started = time.perf_counter()
    with _usage_errors():
        vectors = vectors_from_csv(input_path)
        result = symplectic_collapse_search(vectors, ell)
    config = {"input": Path(input_path).name, "ell": ell, "vectors": len(vectors)}
    _emit(settings, "collapse-search", config, result, started, out)


@main.command(**_COMMAND)  # type: ignore[call-overload]
@click.argument("inputs", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "-o", "--out", type=click.Path(dir_okay=False), required=True, help="The SVG file to write."
)
@click.option("--title", default="", help="Figure title.")
@click.option("--log-x", is_flag=True, help="Logarithmic x axis.")
@click.option("--log-y", is_flag=True, help="Logarithmic y axis.")
@click.pass_obj
def plot(
    settings: HeislabSettings,
    inputs: Sequence[str],
    out: str,
    title: str,
    log_x: bool,
    log_y: bool,
):
    """
    Plot sweep reports or label,x,y CSV files as SVG

    INPUTS are distortion or markov sweep reports (.json) or CSV files.
    """
    from .plot import load_series, plot as plot_series

    if not inputs:
        raise click.UsageError("give at least one input file")
    series = []
    labels: Dict[str, str] = {}
    with _usage_errors():
        for path in inputs:
            loaded, axis_labels = load_series(path)
            series.extend(loaded)
            labels = labels or axis_labels
        plot_series(series, out, title=title, log_x=log_x, log_y=log_y, **labels)
    click_logger.info(f"Wrote {len(series)} series to {out}")


@main.command(**_COMMAND)  # type: ignore[call-overload]
@click.pass_obj
def info(settings: HeislabSettings):
    """
    Get info about the current heislab installation
    """
    import platform

    from .format import Format
    from .heis_core import PointSampler
    from .inequalities import InequalityCheck
    from .laakso import Motif
    from .plot import SvgFormat  # noqa: F401

    click_logger.info(f"heislab version {VERSION} (python {platform.python_version()})")

    if settings.path is not None:
        click_logger.info("\nSettings:")
        click_logger.info(
            click.style(f" \N{check mark} Loaded from {str(settings.path)}", fg="green")
        )

    registries: Dict[str, Callable[[], List[str]]] = {
        "Motifs": Motif.list_available,
        "Formats": Format.list_available,
        "Point samplers": PointSampler.list_available,
        "Inequality checkers": InequalityCheck.list_available,
    }
    for title, available in registries.items():
        click_logger.info(f"\n{title}:")
        for name in available():
            click_logger.info(click.style(f" \N{check mark} {name}", fg="green"))


if __name__ == "__main__":
    main()
