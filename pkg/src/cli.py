"""
`lad`: command-line surface for local entropy computations on `.lad` fixtures.

Exit codes:
- 0: success, every check verified
- 1: a verification ran and an equality or inequality failed
- 2: input or validation error (fixture syntax/semantics, failed preconditions, bad options)
- 3: a resource cap was exceeded (basis size, degree, truncation)

Reports go to standard output or --output; diagnostics go to standard error.
"""

import csv
import functools
import io
import logging
import sys
from pathlib import Path
from time import perf_counter
from typing import Any, Callable, List, Optional, Sequence, TypeVar

import typer
from pydantic import BaseModel, ValidationError

from src.config import TRUNCATION_ENV_VAR, EngineLimits, OutputFormat, RunConfig
from src.dsl import FixtureFile, parse_file, parse_ideal
from src.dynamics import (
    DynamicalSystem,
    Endomorphism,
    MorphismSetup,
    check_morphism,
    check_well_defined,
    flatness_advisory,
)
from src.entropy import entropy_report
from src.exceptions import (
    LadError,
    NotFiniteColength,
    ResourceExceeded,
    UndefinedDimension,
    ValidationFailed,
)
from src.harness import verify_additivity, verify_inequality
from src.ideals import LocalRingPresentation, local_colength
from src.logging_config import setup_logging
from src.models import (
    AdditivityCheck,
    CheckItem,
    CheckReport,
    CheckStatus,
    DimensionReport,
    EntropyReport,
    InequalityReport,
    LengthReport,
)
from src.oracle import oracle_colength

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3

app = typer.Typer(
    name="lad",
    help="Local entropy of endomorphisms of local rings over prime fields.",
    no_args_is_help=True,
    add_completion=False,
)
verify_app = typer.Typer(help="Check length additivity and the length inequality for a map.")
app.add_typer(verify_app, name="verify")

F = TypeVar("F", bound=Callable[..., Any])


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ResourceExceeded, NotFiniteColength)):
        return EXIT_RESOURCE
    return EXIT_INPUT


def _guarded(func: F) -> F:
    """Map engine errors onto exit codes, logging each failure."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        start_time = perf_counter()
        try:
            return func(*args, **kwargs)
        except (LadError, ValidationError, OSError) as exc:
            code = exit_code_for(exc)
            logger.error(
                "%s failed: %s",
                func.__name__,
                exc,
                extra={
                    "status": code,
                    "error_code": type(exc).__name__,
                    "latency": perf_counter() - start_time,
                },
            )
            typer.echo(f"error: {exc}", err=True)
            raise typer.Exit(code)

    return wrapper  # type: ignore[return-value]


# ----------------------------------------------------------------------
# shared options
# ----------------------------------------------------------------------
FIXTURE = typer.Argument(..., exists=True, dir_okay=False, readable=True, help="Fixture file (.lad)")
FORMAT = typer.Option(OutputFormat.HUMAN, "--format", case_sensitive=False, help="human, json or csv")
OUTPUT = typer.Option(None, "--output", "-o", help="Write the report here instead of stdout")
MAX_ITER = typer.Option(3, "--max-iter", help="Largest iterate n")
MAX_TRUNCATION = typer.Option(
    None,
    "--max-truncation",
    envvar=TRUNCATION_ENV_VAR,
    help="How far the truncation N may climb above its starting value (default 128)",
)
MAX_BASIS = typer.Option(10_000, "--max-basis-size", help="Largest intermediate Gröbner basis")
MAX_DEGREE = typer.Option(4_096, "--max-degree", help="Largest leading degree in a basis")
TRUNCATION = typer.Option("bracket", "--truncation", help="bracket (x_i^N) or power (m^N)")
WORKERS = typer.Option(1, "--workers", help="Threads for independent per-n colengths")


def _config(
    fixture: Path,
    command: str,
    output_format: OutputFormat,
    output: Optional[Path],
    n_max: int = 3,
    max_truncation: Optional[int] = None,
    max_basis_size: int = 10_000,
    max_degree: int = 4_096,
    truncation: str = "bracket",
    workers: int = 1,
) -> RunConfig:
    overrides: dict = dict(
        max_basis_size=max_basis_size,
        max_degree=max_degree,
        truncation=truncation,
        workers=workers,
    )
    if max_truncation is not None:
        overrides["max_truncation"] = max_truncation
    return RunConfig(
        fixture=fixture,
        command=command,
        n_max=n_max,
        limits=EngineLimits.from_env(**overrides),
        output_format=output_format,
        output=output,
    )


def _load(config: RunConfig) -> FixtureFile:
    return parse_file(config.fixture, max_degree=config.limits.max_degree)


def _emit(config: RunConfig, report: BaseModel, human: str, rows: Optional[List[List[Any]]] = None) -> None:
    if config.output_format == OutputFormat.JSON:
        text = report.model_dump_json(indent=2) + "\n"
    elif config.output_format == OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if rows is None:
            flat = report.model_dump(mode="json")
            rows = [list(flat.keys()), list(flat.values())]
        writer.writerows(rows)
        text = buffer.getvalue()
    else:
        text = human if human.endswith("\n") else human + "\n"
    if config.output is None:
        typer.echo(text, nl=False)
    else:
        config.output.write_text(text, encoding="utf-8")
        logger.info("Report written to %s", config.output, extra={"status": "ok"})


def _pick_endo(fixture: FixtureFile, ring: LocalRingPresentation, name: Optional[str], flag: str) -> Endomorphism:
    if name is not None:
        endo = fixture.endo(name)
        if endo.ring != ring:
            raise ValidationFailed(f"{name} is an endomorphism of {endo.ring.name}, not of {ring.name}")
        return endo
    candidates = fixture.endos_on(ring)
    if len(candidates) != 1:
        raise ValidationFailed(
            f"{ring.name} carries {len(candidates)} endomorphisms; choose one with {flag}"
        )
    return candidates[0]


def _setup(
    fixture: FixtureFile,
    map_name: str,
    source_endo: Optional[str],
    target_endo: Optional[str],
    limits: EngineLimits,
) -> MorphismSetup:
    f = fixture.ring_map(map_name)
    phi = _pick_endo(fixture, f.source, source_endo, "--source-endo")
    psi = _pick_endo(fixture, f.target, target_endo, "--target-endo")
    source = DynamicalSystem.validate(phi, limits)
    target = DynamicalSystem.validate(psi, limits)
    return MorphismSetup.build(source, target, f, limits)


# ----------------------------------------------------------------------
# human-readable rendering
# ----------------------------------------------------------------------
def _format_entropy(report: EntropyReport, title: str = "") -> str:
    lines = [title] if title else []
    lines.append(f"q = {report.ideal}")
    if report.base_length is not None:
        lines.append(f"  n=0  length={report.base_length}")
    for index, n in enumerate(report.n):
        ratio = f"  ratio={report.ratio[index - 1]:.6f}" if index > 0 else ""
        lines.append(
            f"  n={n}  length={report.length[index]}  naive={report.naive[index]:.6f}"
            f"  fekete={report.fekete[index]:.6f}{ratio}"
        )
    headline = f"headline = {report.headline:.10f}"
    if report.exact_form is not None:
        headline += f"  ({report.exact_form}, exact ratios observed)"
    lines.append(headline)
    return "\n".join(lines)


def _entropy_rows(report: EntropyReport) -> List[List[Any]]:
    rows: List[List[Any]] = [["n", "length", "naive", "fekete", "ratio"]]
    for index, n in enumerate(report.n):
        ratio = report.ratio[index - 1] if index > 0 else ""
        rows.append([n, report.length[index], report.naive[index], report.fekete[index], ratio])
    return rows


def _format_additivity(check: AdditivityCheck) -> str:
    lines = [f"additivity for {check.map}: Q = {check.big_q}"]
    for row in check.rows:
        mark = "ok" if row.passed else "FAIL"
        lines.append(
            f"  n={row.n}  lhs={row.lhs}  rhs={row.rhs_factor_r} * {row.rhs_factor_fiber}"
            f" = {row.rhs_factor_r * row.rhs_factor_fiber}  {mark}"
        )
    flat = check.flatness
    lines.append(
        f"flatness advisory: dimension {flat.dimension_check.value} "
        f"({flat.d} + {flat.d_prime} vs {flat.target_dim}), pattern {flat.pattern_check.value}"
    )
    d = check.decomposition
    lines.append(f"h(target) = {d.target:.10f}  h(source) + h(fiber) = {d.source:.10f} + {d.fiber:.10f}")
    lines.append("verified" if check.passed else "NOT verified")
    return "\n".join(lines)


def _format_inequality(report: InequalityReport) -> str:
    lines = [f"inequality for {report.map}"]
    for row in report.rows:
        mark = "ok" if row.passed else "FAIL"
        lines.append(
            f"  n={row.n}  lhs={row.lhs}  <=  {row.source_length} * {row.fiber_factor} = {row.bound}  {mark}"
        )
    d = report.decomposition
    lines.append(f"h(target) = {d.target:.10f}  bound h(source) + h(fiber) = {d.total:.10f}")
    lines.append("verified" if report.passed else "NOT verified")
    return "\n".join(lines)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------
@app.callback()
def main_callback() -> None:
    setup_logging()


@app.command()
@_guarded
def check(
    fixture: Path = FIXTURE,
    output_format: OutputFormat = FORMAT,
    output: Optional[Path] = OUTPUT,
    max_truncation: Optional[int] = MAX_TRUNCATION,
) -> None:
    """Validate every declaration: rings, endomorphisms, maps and flatness advisories."""
    config = _config(fixture, "check", output_format, output, max_truncation=max_truncation)
    limits = config.limits
    fx = _load(config)
    report = CheckReport(fixture=str(fixture))

    for ring in fx.rings:
        try:
            report.items.append(
                CheckItem(kind="ring", name=ring.name, status=CheckStatus.PASS, detail=f"dim {ring.dimension(limits)}")
            )
        except UndefinedDimension as exc:
            report.items.append(CheckItem(kind="ring", name=ring.name, status=CheckStatus.FAIL, detail=str(exc)))

    systems = {}
    for endo in fx.endos:
        try:
            system = DynamicalSystem.validate(endo, limits)
        except ValidationFailed as exc:
            report.items.append(CheckItem(kind="endo", name=endo.name, status=CheckStatus.FAIL, detail=str(exc)))
            continue
        systems[endo.name] = system
        status = CheckStatus.PASS if system.validated_finite_length else CheckStatus.INCONCLUSIVE
        report.items.append(CheckItem(kind="endo", name=endo.name, status=status, detail="finite length"))

    for f in fx.maps:
        try:
            check_well_defined(f, limits)
        except ValidationFailed as exc:
            report.items.append(CheckItem(kind="map", name=f.name, status=CheckStatus.FAIL, detail=str(exc)))
            continue
        report.items.append(CheckItem(kind="map", name=f.name, status=CheckStatus.PASS, detail="well defined"))
        for phi in fx.endos_on(f.source):
            for psi in fx.endos_on(f.target):
                if phi.name not in systems or psi.name not in systems:
                    continue
                setup = MorphismSetup.build(systems[phi.name], systems[psi.name], f, limits)
                commutes = check_morphism(setup, limits)
                report.items.append(
                    CheckItem(
                        kind="morphism",
                        name=f"{f.name}: ({f.source.name}, {phi.name}) -> ({f.target.name}, {psi.name})",
                        status=CheckStatus.PASS if commutes else CheckStatus.FAIL,
                        detail="commutes" if commutes else "does not commute",
                    )
                )
                if commutes:
                    report.flatness.append(flatness_advisory(setup, cm=f.target.name in fx.cm, limits=limits))

    human = [
        f"{item.kind} {item.name}: {item.status.value}" + (f" ({item.detail})" if item.detail else "")
        for item in report.items
    ]
    human.extend(
        f"flatness {flat.map}: dimension {flat.dimension_check.value}, pattern {flat.pattern_check.value}"
        for flat in report.flatness
    )
    if not human:
        human = ["nothing declared"]
    rows = [["kind", "name", "status", "detail"]] + [
        [item.kind, item.name, item.status.value, item.detail or ""] for item in report.items
    ]
    _emit(config, report, "\n".join(human), rows)
    if not report.passed:
        raise typer.Exit(EXIT_INPUT)


@app.command()
@_guarded
def length(
    fixture: Path = FIXTURE,
    ring: str = typer.Option(..., "--ring", help="Ring name"),
    ideal: str = typer.Option(..., "--ideal", help='Generators, e.g. "(w, y)"'),
    output_format: OutputFormat = FORMAT,
    output: Optional[Path] = OUTPUT,
    max_truncation: Optional[int] = MAX_TRUNCATION,
    max_basis_size: int = MAX_BASIS,
    max_degree: int = MAX_DEGREE,
    truncation: str = TRUNCATION,
) -> None:
    """Length of the local quotient by an ideal."""
    config = _config(
        fixture,
        "length",
        output_format,
        output,
        max_truncation=max_truncation,
        max_basis_size=max_basis_size,
        max_degree=max_degree,
        truncation=truncation,
    )
    fx = _load(config)
    presentation = fx.ring(ring)
    J = parse_ideal(ideal, presentation, config.limits.max_degree)
    report = LengthReport(ring=ring, ideal=str(J), length=local_colength(J, config.limits))
    _emit(config, report, f"length {presentation.name}/{J} = {report.length}")


@app.command("oracle-length", hidden=True)
@_guarded
def oracle_length(
    fixture: Path = FIXTURE,
    ring: str = typer.Option(..., "--ring"),
    ideal: str = typer.Option(..., "--ideal"),
    output_format: OutputFormat = FORMAT,
    output: Optional[Path] = OUTPUT,
    max_truncation: Optional[int] = MAX_TRUNCATION,
) -> None:
    """Brute-force length by dense linear algebra, for debugging."""
    config = _config(fixture, "oracle-length", output_format, output, max_truncation=max_truncation)
    fx = _load(config)
    presentation = fx.ring(ring)
    J = parse_ideal(ideal, presentation, config.limits.max_degree)
    value = oracle_colength(J, cap=config.limits.max_truncation)
    report = LengthReport(ring=ring, ideal=str(J), length=value, method="oracle")
    _emit(config, report, f"oracle length {presentation.name}/{J} = {value}")


@app.command()
@_guarded
def dim(
    fixture: Path = FIXTURE,
    ring: str = typer.Option(..., "--ring", help="Ring name"),
    output_format: OutputFormat = FORMAT,
    output: Optional[Path] = OUTPUT,
) -> None:
    """Krull dimension of a presented ring (leading-ideal proxy)."""
    config = _config(fixture, "dim", output_format, output)
    fx = _load(config)
    presentation = fx.ring(ring)
    report = DimensionReport(ring=ring, dimension=presentation.dimension(config.limits))
    _emit(config, report, f"dim {presentation} = {report.dimension}")


@app.command()
@_guarded
def entropy(
    fixture: Path = FIXTURE,
    endo: str = typer.Option(..., "--endo", help="Endomorphism name"),
    ideal: Optional[str] = typer.Option(None, "--ideal", help="Primary ideal q (default: the maximal ideal)"),
    max_iter: int = MAX_ITER,
    output_format: OutputFormat = FORMAT,
    output: Optional[Path] = OUTPUT,
    max_truncation: Optional[int] = MAX_TRUNCATION,
    max_basis_size: int = MAX_BASIS,
    max_degree: int = MAX_DEGREE,
    truncation: str = TRUNCATION,
    workers: int = WORKERS,
) -> None:
    """Length sequence and local entropy estimates of an endomorphism."""
    config = _config(
        fixture,
        "entropy",
        output_format,
        output,
        n_max=max_iter,
        max_truncation=max_truncation,
        max_basis_size=max_basis_size,
        max_degree=max_degree,
        truncation=truncation,
        workers=workers,
    )
    fx = _load(config)
    phi = fx.endo(endo)
    system = DynamicalSystem.validate(phi, config.limits)
    q = parse_ideal(ideal, phi.ring, config.limits.max_degree) if ideal else phi.ring.maximal_ideal()
    report = entropy_report(system, q, config.n_max, config.limits)
    _emit(config, report, _format_entropy(report, f"entropy of {phi.label} on {phi.ring}"), _entropy_rows(report))


@verify_app.command("additivity")
@_guarded
def verify_additivity_command(
    fixture: Path = FIXTURE,
    map_name: str = typer.Option(..., "--map", help="Map name"),
    q: str = typer.Option(..., "--q", help="Primary ideal q of the source"),
    qprime: str = typer.Option(..., "--qprime", help="Fiber parameters q' in the target"),
    max_iter: int = MAX_ITER,
    source_endo: Optional[str] = typer.Option(None, "--source-endo"),
    target_endo: Optional[str] = typer.Option(None, "--target-endo"),
    output_format: OutputFormat = FORMAT,
    output: Optional[Path] = OUTPUT,
    max_truncation: Optional[int] = MAX_TRUNCATION,
    max_basis_size: int = MAX_BASIS,
    max_degree: int = MAX_DEGREE,
    truncation: str = TRUNCATION,
    workers: int = WORKERS,
) -> None:
    """Per-n product identity for a flat map into a Cohen-Macaulay ring."""
    config = _config(
        fixture,
        "verify additivity",
        output_format,
        output,
        n_max=max_iter,
        max_truncation=max_truncation,
        max_basis_size=max_basis_size,
        max_degree=max_degree,
        truncation=truncation,
        workers=workers,
    )
    limits = config.limits
    fx = _load(config)
    setup = _setup(fx, map_name, source_endo, target_endo, limits)
    q_ideal = parse_ideal(q, setup.source.ring, limits.max_degree)
    q_prime = parse_ideal(qprime, setup.target.ring, limits.max_degree)
    result = verify_additivity(
        setup,
        q_ideal,
        q_prime,
        config.n_max,
        flat=map_name in fx.flat,
        cm=setup.target.ring.name in fx.cm,
        limits=limits,
    )
    rows = [["n", "lhs", "rhs_factor_r", "rhs_factor_fiber", "passed"]] + [
        [row.n, row.lhs, row.rhs_factor_r, row.rhs_factor_fiber, row.passed] for row in result.rows
    ]
    _emit(config, result, _format_additivity(result), rows)
    if not result.passed:
        raise typer.Exit(EXIT_FAILED)


@verify_app.command("inequality")
@_guarded
def verify_inequality_command(
    fixture: Path = FIXTURE,
    map_name: str = typer.Option(..., "--map", help="Map name"),
    max_iter: int = MAX_ITER,
    source_endo: Optional[str] = typer.Option(None, "--source-endo"),
    target_endo: Optional[str] = typer.Option(None, "--target-endo"),
    output_format: OutputFormat = FORMAT,
    output: Optional[Path] = OUTPUT,
    max_truncation: Optional[int] = MAX_TRUNCATION,
    max_basis_size: int = MAX_BASIS,
    max_degree: int = MAX_DEGREE,
    truncation: str = TRUNCATION,
    workers: int = WORKERS,
) -> None:
    """Per-n length inequality for any commuting map."""
    config = _config(
        fixture,
        "verify inequality",
        output_format,
        output,
        n_max=max_iter,
        max_truncation=max_truncation,
        max_basis_size=max_basis_size,
        max_degree=max_degree,
        truncation=truncation,
        workers=workers,
    )
    fx = _load(config)
    setup = _setup(fx, map_name, source_endo, target_endo, config.limits)
    result = verify_inequality(setup, config.n_max, config.limits)
    rows = [["n", "lhs", "source_length", "fiber_factor", "bound", "passed"]] + [
        [row.n, row.lhs, row.source_length, row.fiber_factor, row.bound, row.passed] for row in result.rows
    ]
    _emit(config, result, _format_inequality(result), rows)
    if not result.passed:
        raise typer.Exit(EXIT_FAILED)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Invoke the CLI and return its exit code instead of exiting.

    Usage errors are matched by shape (``exit_code`` plus ``show``) because
    typer may raise them from its own bundled copy of click.
    """
    try:
        result = app(args=list(argv) if argv is not None else None, standalone_mode=False)
    except typer.Abort:
        typer.echo("Aborted!", err=True)
        return EXIT_FAILED
    except Exception as exc:
        show = getattr(exc, "show", None)
        code = getattr(exc, "exit_code", None)
        if not callable(show) or not isinstance(code, int):
            raise
        show()
        return code
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(run())
