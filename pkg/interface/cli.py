# interface/cli.py

import sys
from typing import List, Optional

import click

from config.settings import settings
from core.homotopy.homotopy_engine import run
from core.problem.generator import generate_random
from core.problem.matrix_market import load_problem, write_problem, write_vector
from core.utils.exceptions import InnerSolverError, LpHomotopyError, MaxPhasesExceededError
from core.utils.logger import set_level, setup_logger
from core.utils.validators import SOLVER_KINDS, Validators

logger = setup_logger('cli')

SOLVER_CHOICES = [kind.replace('_', '-') for kind in SOLVER_KINDS]


def _check_p(ctx, param, value):
    if value is not None and not Validators.validate_exponent(value):
        raise click.BadParameter(f"p must be greater than 1 (got {value})")
    return value


def _float_list(ctx, param, value) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        return [float(item) for item in str(value).split(',') if item.strip()]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of numbers, got {value!r}")


def _int_list(ctx, param, value) -> Optional[List[int]]:
    values = _float_list(ctx, param, value)
    if values is None:
        return None
    if any(v != int(v) or v < 1 for v in values):
        raise click.BadParameter(f"expected positive integers, got {value!r}")
    return [int(v) for v in values]


@click.group()
@click.option('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR')
def cli(log_level):
    """Homotopy solver for min c.x + ||Ax - b||_p^p"""
    set_level(log_level or settings.log_level)


@cli.command()
@click.option('--matrix', 'matrix_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Matrix Market file for A')
@click.option('--b', 'b_path', required=True, type=click.Path(exists=True, dir_okay=False), help='Vector b, one value per line')
@click.option('--c', 'c_path', required=True, type=click.Path(exists=True, dir_okay=False), help='Vector c, one value per line')
@click.option('--p', required=True, type=float, callback=_check_p, help='Exponent p > 1')
@click.option('--eps', type=float, default=None, help='Target additive objective error')
@click.option('--solver', type=click.Choice(SOLVER_CHOICES + SOLVER_KINDS), default=None, help='Inner solver')
@click.option('--seed', type=int, default=None, help='Random seed')
@click.option('--out', required=True, type=click.Path(dir_okay=False), help='JSON report path')
@click.option('--x-out', type=click.Path(dir_okay=False), default=None, help='Solution vector path')
def solve(matrix_path, b_path, c_path, p, eps, solver, seed, out, x_out):
    """Solve an instance and write the JSON report"""
    try:
        config = settings.get_solver_config(epsilon=eps, solver_kind=solver, seed=seed)
        problem = load_problem(matrix_path, b_path, c_path, p)
    except LpHomotopyError as e:
        raise click.UsageError(str(e))

    try:
        report = run(problem, config)
    except (InnerSolverError, MaxPhasesExceededError) as e:
        if e.report is not None:
            e.report.save(out)
            click.echo(f"Partial report written to {out}", err=True)
        raise click.ClickException(str(e))
    except LpHomotopyError as e:
        raise click.ClickException(str(e))

    if x_out:
        write_vector(x_out, report.final_x)
    report.save(out, x_path=x_out)
    click.echo(f"{len(report.phases)} phases, objective {report.final_objective:.12g}, "
               f"{report.total_wall_ms:.0f} ms; report written to {out}")


@cli.command()
@click.option('--seed', type=int, default=0, help='Random seed')
@click.option('--suite', type=click.Choice(['quick', 'full']), default='quick', help='Suite size')
def validate(seed, suite):
    """Run the certification suites and print a pass/fail table"""
    from core.validation.suites import results_table, run_suite

    results = run_suite(suite, seed)
    table = results_table(results)
    click.echo(table.to_string(index=False))
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise click.ClickException(f"{len(failed)} check(s) failed: {', '.join(failed)}")


@cli.command()
@click.option('--p-list', default='1.5,3,4,8', callback=_float_list, help='Comma-separated exponents')
@click.option('--n', 'n_list', required=True, callback=_int_list, help='Row count, or comma-separated list')
@click.option('--d', type=click.IntRange(min=1), required=True, help='Column count')
@click.option('--trials', type=click.IntRange(min=1), default=1, help='Trials per (p, n)')
@click.option('--seed', type=int, default=0, help='Base seed; trial i uses seed + i')
@click.option('--eps', type=float, default=1e-6, help='Target additive objective error')
@click.option('--solver', type=click.Choice(SOLVER_CHOICES + SOLVER_KINDS), default='agd-dense')
@click.option('--workers', type=click.IntRange(min=1), default=None, help='Parallel trials, capped by LP_HOMOTOPY_THREADS')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='CSV path (default stdout)')
def bench(p_list, n_list, d, trials, seed, eps, solver, workers, out):
    """Per-phase inner iteration counts as CSV"""
    from scripts.bench import BenchmarkEngine

    if any(not Validators.validate_exponent(p) for p in p_list):
        raise click.BadParameter("every p must be greater than 1", param_hint='--p-list')
    if any(n < d for n in n_list):
        raise click.BadParameter(f"every n must be at least d={d}", param_hint='--n')

    engine = BenchmarkEngine(p_list, n_list, d, trials, seed, eps, Validators.normalize_solver_kind(solver),
                             settings.workers(workers))
    try:
        frame = engine.run()
    except LpHomotopyError as e:
        raise click.ClickException(str(e))
    text = engine.save(frame, out)
    if out:
        click.echo(f"Wrote {len(frame)} rows to {out}")
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option('--n', type=int, required=True, help='Rows')
@click.option('--d', type=int, required=True, help='Columns')
@click.option('--p', type=float, required=True, callback=_check_p, help='Exponent p > 1')
@click.option('--density', type=float, default=1.0, help='Fraction of nonzero entries in (0, 1]')
@click.option('--seed', type=int, default=0, help='Random seed')
@click.option('--out-prefix', default='./', help='Directory (trailing /) or file-name prefix')
def gen(n, d, p, density, seed, out_prefix):
    """Write a random instance as A.mtx, b.txt, c.txt"""
    errors = Validators.validate_generator_params(n, d, p, density)
    if errors:
        raise click.UsageError('; '.join(errors))
    problem = generate_random(n, d, p, density=density, seed=seed)
    paths = write_problem(problem, out_prefix)
    for key in ('A', 'b', 'c'):
        click.echo(str(paths[key]))


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code: 0 success, 1 failure, 2 usage error"""
    try:
        cli.main(args=argv, prog_name='lp-homotopy', standalone_mode=False)
        return 0
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        click.echo('Aborted!', err=True)
        return 1
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
