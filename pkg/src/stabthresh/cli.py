"""Command-line interface.

Usage::

    stabthresh threshold --space "cp(2)"
    stabthresh threshold --P "2t" --Q "1+t^2" --allow-general
    stabthresh curve --space S4 --format csv
    stabthresh verify --P "2t" --Q "1+t^2" --allow-general --q 1
    stabthresh bracket --space S3 --tol 1e-7
    stabthresh mhp --space "cp(1)"
    stabthresh check --odd 3 --betti 1,0,0,1
    stabthresh lambert --branch -1 --z -0.2
    stabthresh catalog

Exit codes: 0 success, 1 the inequality fails or a witness was found,
2 bad input or a domain error.  Every float is written with 17
significant digits, so reports re-parse to the same values.
"""

from __future__ import annotations

import functools
import io
import json
import math
import sys
from typing import Any

import click

from . import catalog as cat
from .curve import CurveConfig, curve_critical_points, curve_domain, curve_limit, curve_samples, write_samples_csv
from .errors import StabError
from .lambert import WBranch, lambert_w
from .mhodge import (
    CubeRegion,
    MHViolation,
    default_reduction,
    mh_integer_threshold,
    mh_nonexistence_witness,
    mh_verify,
)
from .oracle import GridSpec, Violation, threshold_bracket, verify_inequality
from .polycore import format_poly, parse_poly, parse_uni
from .threshold import lemma_shape, real_threshold

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


# ------------------------------------------------------------------- output


def _num(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if float(x).is_integer() and abs(x) < 2 ** 53:
        return f"{x:.1f}"
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, two-space indent, floats at 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f"{inner}{json.dumps(str(k))}: {dumps(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [inner + dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    return json.dumps(str(obj))


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out.extend(_flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
        return out
    if isinstance(obj, (list, tuple)):
        out = []
        for i, v in enumerate(obj):
            out.extend(_flatten(v, f"{prefix}[{i}]"))
        return out
    if isinstance(obj, float):
        return [(prefix, _num(obj))]
    return [(prefix, "null" if obj is None else str(obj).lower() if isinstance(obj, bool) else str(obj))]


def emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        click.echo(dumps(report))
    elif fmt == "csv":
        buf = io.StringIO()
        buf.write("key,value\n")
        for k, v in _flatten(report):
            buf.write(f"{k},{v}\n")
        click.echo(buf.getvalue(), nl=False)
    else:
        for k, v in _flatten(report):
            click.echo(f"{k}: {v}")


def _guard(fn):
    """Map library and input errors to exit code 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (StabError, ValueError, ZeroDivisionError) as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


# ------------------------------------------------------------------- inputs


def _epsilon(ctx, param, value):
    if not value > 0:
        raise click.BadParameter("epsilon must be positive")
    return value


def _tol(ctx, param, value):
    if not value >= 1e-8:
        raise click.BadParameter("tolerance must be at least 1e-8")
    return value


def pair_options(fn):
    opts = [
        click.option("--space", "space", default=None, help="Space expression, e.g. cp(2), S4, toric(1,2)."),
        click.option("--P", "p_text", default=None, help="Numerator polynomial in t."),
        click.option("--Q", "q_text", default=None, help="Base polynomial in t."),
        click.option("--allow-general", is_flag=True, help="Accept pairs outside the standard shape."),
        click.option("--epsilon", default=1.0, show_default=True, type=float, callback=_epsilon),
        click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json", show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def resolve_pair(space, p_text, q_text, allow_general):
    """``(P, Q, label)`` from either a space or explicit polynomials."""
    if space is not None:
        if p_text is not None or q_text is not None:
            raise click.UsageError("give either --space or --P/--Q, not both")
        x = cat.parse_space(space)
        return cat.homotopy_poincare(x), cat.cohomology_poincare(x), cat.format_space(x)
    if p_text is None or q_text is None:
        raise click.UsageError("need --space or both --P and --Q")
    P, Q = parse_uni(p_text), parse_uni(q_text)
    shape = lemma_shape(P, Q)
    if not shape:
        if not allow_general:
            click.echo(f"error: pair outside the standard shape ({shape.reason}); pass --allow-general to compute anyway", err=True)
            sys.exit(EXIT_INPUT)
        click.echo(f"warning: pair outside the standard shape ({shape.reason}); a threshold may not exist", err=True)
    return P, Q, None


def _pair_json(P, Q, label) -> dict:
    out = {"P": format_poly(P), "Q": format_poly(Q)}
    if label is not None:
        out["space"] = label
    return out


def _grid(points: int | None) -> GridSpec:
    return GridSpec() if points is None else GridSpec(points=points)


# ----------------------------------------------------------------- commands


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Stabilization thresholds of polynomial pairs and rationally elliptic spaces."""


@main.command()
@pair_options
@click.option("--tol", default=1e-6, show_default=True, type=float, callback=_tol)
@click.option("--grid", default=None, type=int, help="Oracle grid points.")
@click.option("--no-bracket", is_flag=True, help="Skip the brute-force oracle.")
@_guard
def threshold(space, p_text, q_text, allow_general, epsilon, fmt, tol, grid, no_bracket):
    """Real and integer thresholds with an oracle bracket."""
    P, Q, label = resolve_pair(space, p_text, q_text, allow_general)
    res = real_threshold(P, Q, epsilon, certify=False)
    report = {"input": _pair_json(P, Q, label), **res.to_json()}
    if not no_bracket:
        b = threshold_bracket(P, Q, epsilon, tol, _grid(grid))
        report["bracket"] = [b.lo, b.hi]
        report["agrees"] = b.lo - 1e-9 <= res.value <= b.hi + 1e-9
        report["bracket_witness"] = None if b.witness is None else b.witness.to_json()
    emit(report, fmt)


@main.command()
@pair_options
@click.option("--count", default=64, show_default=True, type=int, help="Samples per domain interval.")
@click.option("--horizon", default=1e6, show_default=True, type=float)
@click.option("--sidecar", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write domain, critical points and limit as JSON here (csv format).")
@_guard
def curve(space, p_text, q_text, allow_general, epsilon, fmt, count, horizon, sidecar):
    """Samples of the implicit curve r(s) plus its domain and critical points."""
    P, Q, label = resolve_pair(space, p_text, q_text, allow_general)
    config = CurveConfig(horizon=horizon)
    dom = curve_domain(P, Q, epsilon, config)
    crit = curve_critical_points(P, Q, dom, config) if not dom.is_empty else []
    samples = curve_samples(P, Q, dom, count, horizon) if not dom.is_empty else []
    meta = {
        "input": _pair_json(P, Q, label),
        "domain": dom.to_json(),
        "critical_points": [c.to_json() for c in crit],
        "limit": None,
    }
    if Q.degree >= 1:
        lim = curve_limit(P, Q)
        meta["limit"] = {"value": float(lim.value), "exact": str(lim.value)}
    if fmt == "csv":
        buf = io.StringIO()
        write_samples_csv(samples, buf)
        click.echo(buf.getvalue(), nl=False)
        if sidecar:
            with open(sidecar, "w", encoding="utf-8") as fh:
                fh.write(dumps(meta) + "\n")
        return
    meta["samples"] = [[s, r] for s, r in samples]
    emit(meta, fmt)


@main.command()
@pair_options
@click.option("--q", "q", required=True, type=float, help="Exponent to test.")
@click.option("--grid", default=None, type=int, help="Oracle grid points.")
@_guard
def verify(space, p_text, q_text, allow_general, epsilon, fmt, q, grid):
    """Decide q P(t) < Q(t)^q for all t >= epsilon; exit 1 with a witness if it fails."""
    P, Q, label = resolve_pair(space, p_text, q_text, allow_general)
    res = verify_inequality(P, Q, q, epsilon, _grid(grid))
    report = {"input": _pair_json(P, Q, label), "q": q, "epsilon": epsilon}
    if isinstance(res, Violation):
        report.update(holds=False, violation=res.to_json())
        emit(report, fmt)
        sys.exit(EXIT_FAIL)
    report.update(holds=True, tail_log_t=res.tail_log_t, points=res.points)
    emit(report, fmt)


@main.command()
@pair_options
@click.option("--tol", default=1e-6, show_default=True, type=float, callback=_tol)
@click.option("--grid", default=None, type=int, help="Oracle grid points.")
@_guard
def bracket(space, p_text, q_text, allow_general, epsilon, fmt, tol, grid):
    """Brute-force bracket of the real threshold."""
    P, Q, label = resolve_pair(space, p_text, q_text, allow_general)
    b = threshold_bracket(P, Q, epsilon, tol, _grid(grid))
    emit({
        "input": _pair_json(P, Q, label),
        "epsilon": epsilon,
        "lo": b.lo,
        "hi": b.hi,
        "width": b.width,
        "witness": None if b.witness is None else b.witness.to_json(),
    }, fmt)


@main.command()
@click.option("--space", default=None, help="Space with mixed Hodge data.")
@click.option("--Pm", "pm_text", default=None, help="Trivariate numerator in t, u, v.")
@click.option("--Qm", "qm_text", default=None, help="Trivariate base in t, u, v.")
@click.option("--q", "q", default=None, type=float, help="Test this exponent instead of computing the integer verdict.")
@click.option("--lo", default=1.0, show_default=True, type=float, help="Lower corner of the cube.")
@click.option("--hi", default=10.0, show_default=True, type=float, help="Upper corner for sampling.")
@click.option("--grid", default=64, show_default=True, type=int, help="Grid points per axis.")
@click.option("--search", is_flag=True, help="With --q, search [lo, inf)^3 for a witness.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json", show_default=True)
@_guard
def mhp(space, pm_text, qm_text, q, lo, hi, grid, search, fmt):
    """Mixed Hodge thresholds on cubes [lo, inf)^3."""
    red = None
    if space is not None:
        x = cat.parse_space(space)
        Pm, Qm = cat.mh_pi_poly(x), cat.mh_poly(x)
        label = cat.format_space(x)
    elif pm_text is not None and qm_text is not None:
        Pm, Qm, label = parse_poly(pm_text), parse_poly(qm_text), None
    else:
        raise click.UsageError("need --space or both --Pm and --Qm")
    report: dict = {"input": {"Pm": format_poly(Pm), "Qm": format_poly(Qm)}}
    if label:
        report["input"]["space"] = label
    if q is not None:
        if search:
            w = mh_nonexistence_witness(Pm, Qm, q, lo)
            report.update(q=q, lo=lo, witness=None if w is None else w.to_json(), conclusive=w is not None)
            emit(report, fmt)
            sys.exit(EXIT_FAIL if w is not None else EXIT_OK)
        res = mh_verify(Pm, Qm, q, CubeRegion(lo, hi), grid)
        if isinstance(res, MHViolation):
            report.update(q=q, holds=False, violation=res.to_json())
            emit(report, fmt)
            sys.exit(EXIT_FAIL)
        report.update(res.to_json())
        emit(report, fmt)
        return
    if space is None:
        raise click.UsageError("the integer verdict needs --space (to pick a reduction)")
    red = default_reduction(x, lo)
    verdict = mh_integer_threshold(Pm, Qm, red, lo)
    report.update(verdict.to_json())
    emit(report, fmt)


@main.command()
@click.option("--space", default=None)
@click.option("--odd", default="", help="Comma-separated odd generator degrees.")
@click.option("--even", default="", help="Comma-separated even generator degrees.")
@click.option("--betti", default=None, help="Comma-separated Betti numbers b_0, b_1, ...")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json", show_default=True)
@_guard
def check(space, odd, even, betti, fmt):
    """Friedlander-Halperin consistency and the Hilali inequality."""

    def ints(text):
        return [int(x) for x in text.replace(" ", "").split(",") if x]

    if space is not None:
        x = cat.parse_space(space)
        rep = cat.fh_check_space(x)
        hil = cat.hilali_check(x)
        report = {"space": cat.format_space(x), "fh": rep.to_json(), "hilali": hil.to_json()}
        ok = rep.passed and hil.passed
    else:
        if betti is None:
            raise click.UsageError("need --space or --betti (with --odd/--even)")
        rep = cat.fh_check(ints(odd), ints(even), ints(betti))
        report = {"fh": rep.to_json()}
        ok = rep.passed
    report["passed"] = ok
    emit(report, fmt)
    if not ok:
        sys.exit(EXIT_FAIL)


@main.command()
@click.option("--branch", type=click.Choice(["0", "-1"]), required=True)
@click.option("--z", "z", type=float, required=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json", show_default=True)
@_guard
def lambert(branch, z, fmt):
    """Evaluate a real branch of the Lambert W function."""
    b = WBranch.PRINCIPAL if branch == "0" else WBranch.MINUS_ONE
    w = lambert_w(b, z)
    emit({"branch": int(branch), "z": z, "w": w, "residual": w * math.exp(w) - z}, fmt)


@main.command(name="catalog")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json", show_default=True)
@_guard
def catalog_cmd(fmt):
    """List built-in spaces with their Poincare polynomials."""
    rows = []
    for x in cat.catalog_entries():
        rows.append({
            "space": cat.format_space(x),
            "homotopy": format_poly(cat.homotopy_poincare(x)),
            "cohomology": format_poly(cat.cohomology_poincare(x)),
            "mixed_hodge": cat.has_mixed_hodge(x),
        })
    if fmt == "csv":
        click.echo("space,homotopy,cohomology,mixed_hodge")
        for r in rows:
            click.echo(f"\"{r['space']}\",{r['homotopy']},{r['cohomology']},{str(r['mixed_hodge']).lower()}")
        return
    emit({"entries": rows}, fmt)


if __name__ == "__main__":
    main()
