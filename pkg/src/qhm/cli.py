"""Command-line front end.

One verb per capability: classify, mconstant, invariant, glue, fixtures,
converge, glue-diverge, equal-glue-demo. Global flags --tol / --seed / --out /
--format apply before the verb, e.g.

    qhm --tol 1e-9 classify --fixture nw-thm2.9
    qhm --out rows.csv converge --family interval --sizes 2,3,5,9

Spaces are read from the JSON space format (keys name/labels/matrix) or taken
from the fixture catalogue. Exit codes: 0 success, 1 usage error, 2 validation
error, 3 solver inconsistency. QHM_DEFAULT_TOL overrides the tolerance
default.
"""

import json
import os
import sys

import click

from . import experiments
from .classify import DEFAULT_TOL, classify as classify_space
from .classify import kernel_flat_values
from .energy import energy, measure, parse_weights, potential
from .errors import QhmError, SolverError, ValidationError
from .fixtures import fixture, fixture_keys
from .msolver import ascent_oracle, invariant_measure, m_constant
from .spaces import GlueSpec, glue as glue_spaces, load_space, save_space, space_to_json

CSV_HELP = {
    "converge": "columns: " + ",".join(experiments.CONVERGE_COLUMNS),
    "glue-diverge": "columns: " + ",".join(experiments.GLUE_DIVERGE_COLUMNS),
    "equal-glue-demo": "columns: " + ",".join(experiments.EQUAL_GLUE_COLUMNS),
}


def _default_tol() -> float:
    raw = os.environ.get("QHM_DEFAULT_TOL", "").strip()
    if raw:
        try:
            return float(raw)
        except ValueError:
            raise click.UsageError(f"QHM_DEFAULT_TOL={raw!r} is not a number")
    return DEFAULT_TOL


@click.group()
@click.option("--tol", type=float, default=None,
              help="Relative tolerance (default 1e-9, or QHM_DEFAULT_TOL).")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for every randomized step.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output file (JSON or CSV depending on the verb).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default=None, help="Row format for experiment verbs.")
@click.pass_context
def cli(ctx, tol, seed, out, fmt):
    """Energy-maximization analysis of finite metric spaces."""
    ctx.obj = {"tol": tol if tol is not None else _default_tol(),
               "seed": seed, "out": out, "fmt": fmt}


def _load(space_path, fixture_key, tol_triangle=None):
    if (space_path is None) == (fixture_key is None):
        raise click.UsageError("give exactly one of SPACE_FILE or --fixture KEY")
    if fixture_key is not None:
        return fixture(fixture_key).space
    return load_space(space_path, tol_triangle=tol_triangle)


def _emit_text(ctx, text: str) -> None:
    out = ctx.obj["out"]
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _emit_json(ctx, obj) -> None:
    _emit_text(ctx, json.dumps(obj, indent=2))


def _measure_dict(mu) -> dict:
    return {"space": mu.space.name, "weights": [float(w) for w in mu.weights]}


@cli.command("classify")
@click.argument("space_file", required=False, type=click.Path(exists=True))
@click.option("--fixture", "fixture_key", default=None,
              help="Catalogue key instead of a file.")
@click.pass_context
def classify_cmd(ctx, space_file, fixture_key):
    """Three-way negative-type verdict with spectral evidence."""
    space = _load(space_file, fixture_key)
    cls = classify_space(space, ctx.obj["tol"])
    payload = {
        "verdict": cls.verdict.value,
        "eigenvalues": [float(v) for v in cls.eigenvalues],
        "margin": cls.margin,
        "tol_used": cls.tol_used,
    }
    if cls.witness is not None:
        payload["witness"] = _measure_dict(cls.witness)
    if cls.kernel_basis:
        payload["kernel_basis"] = [_measure_dict(f) for f in cls.kernel_basis]
        flats = kernel_flat_values(space, cls)
        payload["flat_values"] = [
            {"value": f.value, "deviation": f.deviation} for f in flats]
    _emit_json(ctx, payload)


@cli.command("mconstant")
@click.argument("space_file", required=False, type=click.Path(exists=True))
@click.option("--fixture", "fixture_key", default=None,
              help="Catalogue key instead of a file.")
@click.option("--check-measure", "check", default=None, metavar="W1,W2,...",
              help="Inline weights: also report that measure's energy and "
                   "potential spread.")
@click.option("--oracle-iters", type=int, default=None, metavar="N",
              help="Cross-check with the projected-ascent oracle for N "
                   "iterations.")
@click.pass_context
def mconstant_cmd(ctx, space_file, fixture_key, check, oracle_iters):
    """Decide finiteness of the energy supremum constant and solve it."""
    space = _load(space_file, fixture_key)
    dec = m_constant(space, ctx.obj["tol"])
    payload = {"status": dec.status, "diagnostics": dec.diagnostics}
    if dec.finite:
        payload["value"] = dec.value
        payload["measure"] = _measure_dict(dec.maximal_measure)
    else:
        payload["reason"] = dec.reason
        payload["witness"] = _measure_dict(dec.witness)
    if check is not None:
        mu = measure(space, parse_weights(check))
        pot = potential(space, mu)
        mean = float(pot.mean())
        payload["check_measure"] = {
            "mass": mu.mass,
            "energy": energy(space, mu),
            "potential_mean": mean,
            "potential_spread": float(pot.max() - pot.min()),
            "flatness_about_mean": float(abs(pot - mean).max()),
        }
    if oracle_iters is not None:
        trace = ascent_oracle(space, iterations=oracle_iters,
                              seed=ctx.obj["seed"])
        payload["oracle"] = {
            "best_value": trace.best_value,
            "status": trace.status,
            "iterations_run": trace.iterations_run,
        }
    _emit_json(ctx, payload)


@cli.command("invariant")
@click.argument("space_file", required=False, type=click.Path(exists=True))
@click.option("--fixture", "fixture_key", default=None,
              help="Catalogue key instead of a file.")
@click.pass_context
def invariant_cmd(ctx, space_file, fixture_key):
    """Solve for a constant-potential mass-1 measure."""
    space = _load(space_file, fixture_key)
    solve = invariant_measure(space, ctx.obj["tol"])
    if solve is None:
        _emit_json(ctx, {"found": False})
        return
    _emit_json(ctx, {
        "found": True,
        "value": solve.value,
        "residual": solve.residual,
        "unique": solve.unique,
        "measure": _measure_dict(solve.measure),
    })


@cli.command("glue")
@click.argument("x_file", type=click.Path(exists=True))
@click.argument("y_file", type=click.Path(exists=True))
@click.argument("c", type=float)
@click.pass_context
def glue_cmd(ctx, x_file, y_file, c):
    """Join two spaces with cross-distance C; emits the glued space JSON."""
    x = load_space(x_file)
    y = load_space(y_file)
    z = glue_spaces(GlueSpec(x, y, c))
    _emit_text(ctx, space_to_json(z))


@cli.command("fixtures")
@click.argument("key", required=False)
@click.pass_context
def fixtures_cmd(ctx, key):
    """List catalogue keys, or emit one fixture's space JSON (--out) and
    expected results."""
    if key is None:
        _emit_json(ctx, {"keys": fixture_keys()})
        return
    fx = fixture(key)
    payload = {"key": fx.key, "n": fx.space.n, "name": fx.space.name}
    if fx.expected is not None:
        exp = fx.expected
        payload["expected"] = {
            "verdict": exp.verdict.value,
            "m_status": exp.m_status,
            "m_value": exp.m_value,
            "reason": exp.reason,
            "measure": list(exp.measure) if exp.measure else None,
            "measure_value": exp.measure_value,
            "note": exp.note,
        }
    out = ctx.obj["out"]
    if out is not None:
        save_space(fx.space, out)
        payload["written"] = out
    click.echo(json.dumps(payload, indent=2))


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(p) for p in text.replace(",", " ").split()]
    except ValueError:
        raise click.UsageError(f"bad sizes list {text!r}")
    if not sizes:
        raise click.UsageError("empty sizes list")
    return sizes


def _emit_experiment(ctx, result) -> None:
    if ctx.obj["fmt"] == "json":
        payload = {"metadata": result.metadata, "rows": result.rows}
        _emit_json(ctx, payload)
        return
    out = ctx.obj["out"]
    if out is not None:
        result.write_csv(out)
        click.echo(json.dumps({"metadata": result.metadata, "rows_csv": out}))
    else:
        click.echo(result.to_csv_text(), nl=False)


@cli.command("converge")
@click.option("--family", required=True,
              type=click.Choice(["interval", "circle", "ball3"]))
@click.option("--sizes", required=True, metavar="N1,N2,...",
              help="Strictly ascending sizes.")
@click.pass_context
def converge_cmd(ctx, family, sizes):
    """Refinement sweep of one family; CSV rows."""
    result = experiments.run_converge(family, _parse_sizes(sizes),
                                      seed=ctx.obj["seed"], tol=ctx.obj["tol"])
    _emit_experiment(ctx, result)


@cli.command("glue-diverge")
@click.option("--sizes", required=True, metavar="N1,N2,...",
              help="Strictly ascending ball-chain sizes.")
@click.pass_context
def glue_diverge_cmd(ctx, sizes):
    """Ball chain glued to a distance-2 pair at c = 3/2; CSV rows."""
    result = experiments.run_glue_diverge(_parse_sizes(sizes),
                                          seed=ctx.obj["seed"],
                                          tol=ctx.obj["tol"])
    _emit_experiment(ctx, result)


@cli.command("equal-glue-demo")
@click.option("--n", "n_polygon", required=True, type=int,
              help="Polygon vertex count (>= 3).")
@click.pass_context
def equal_glue_demo_cmd(ctx, n_polygon):
    """Equal-constant boundary gluing of two polygon copies; CSV rows."""
    result = experiments.run_equal_glue_demo(n_polygon, tol=ctx.obj["tol"])
    _emit_experiment(ctx, result)


# document each experiment's CSV schema in --help
converge_cmd.help += "\n\n\b\n" + CSV_HELP["converge"]
glue_diverge_cmd.help += "\n\n\b\n" + CSV_HELP["glue-diverge"]
equal_glue_demo_cmd.help += "\n\n\b\n" + CSV_HELP["equal-glue-demo"]


def main(argv=None) -> int:
    """Run the CLI, mapping exceptions to the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.Abort:
        return 1
    except click.ClickException as exc:  # covers UsageError
        exc.show(file=sys.stderr)
        return 1
    except ValidationError as exc:
        click.echo(f"validation error: {exc}", err=True)
        return 2
    except SolverError as exc:
        click.echo(f"solver error: {exc}", err=True)
        return 3
    except QhmError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


def entry() -> None:
    sys.exit(main())
