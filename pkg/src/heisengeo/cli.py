"""Command-line front end.

Exit codes: 0 when the verdict holds (or is undetermined), 1 on a validated
counterexample or violation, 2 on usage errors and malformed input. Reports
are deterministic for identical flags and seed; wall time goes to stderr only.
"""
from __future__ import annotations

import functools
import json
import math
import sys
import time

import click
import numpy as np

from . import acceptance, convexity, curves, homs, isoperimetrix, report
from .errors import HeisenbergError
from .group import HeisPoint, distance
from .norms import (
    Lpa,
    check_horiz_dominance,
    eval_norm,
    is_valid_lpa,
    lpa_violation_witness,
    parse_norm,
    parse_planar,
    probe_norm_axioms,
    triangle_defect,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageFailure(click.ClickException):
    exit_code = EXIT_USAGE


def _guard(fn):
    """Turn library input errors into exit code 2 with the library's message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (HeisenbergError, ValueError, KeyError, OSError) as exc:
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
            raise UsageFailure(str(msg)) from None

    return wrapper


seed_option = click.option(
    "--seed",
    type=int,
    envvar="HEISENGEO_SEED",
    default=0,
    show_default=True,
    show_envvar=True,
    help="Random seed (falls back to HEISENGEO_SEED).",
)
out_option = click.option("--out", default="-", show_default=True, help="Report path; '-' writes to stdout.")


def _emit(data, out) -> None:
    report.write_text(out, report.dumps(data))


def _coords(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageFailure(f"not a comma-separated list of numbers: {text!r}") from None
    if len(vals) < 3 or len(vals) % 2 == 0:
        raise UsageFailure(f"a point of H^n has 2n+1 coordinates, got {len(vals)}")
    return np.array(vals)


def _range(text: str):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageFailure(f"--range expects lo,hi, got {text!r}") from None
    if not lo < hi:
        raise UsageFailure("--range needs lo < hi")
    return lo, hi


def _pairs(values, cast) -> dict:
    out = {}
    for item in values:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageFailure(f"expected key=value, got {item!r}")
        try:
            out[key.strip()] = cast(val)
        except ValueError:
            raise UsageFailure(f"bad value in {item!r}") from None
    return out


@click.group(context_settings={"help_option_names": ["-h", "--help"], "show_default": True})
@click.version_option(package_name="heisengeo")
def main():
    """Heisenberg groups with homogeneous distances."""


@main.command("dist")
@click.option("--norm", "norm_text", required=True, help="Norm, e.g. koranyi or lpa:p=2,a=1.")
@click.option("--p", "p_text", required=True, help="First point x_1..x_n,y_1..y_n,t.")
@click.option("--q", "q_text", required=True, help="Second point, same layout.")
@seed_option
@out_option
@_guard
def cmd_dist(norm_text, p_text, q_text, seed, out):
    """Distance d_N(p, q) = N(p^-1 * q)."""
    norm = parse_norm(norm_text)
    p = HeisPoint.from_coords(_coords(p_text))
    q = HeisPoint.from_coords(_coords(q_text))
    if p.n != q.n:
        raise UsageFailure("p and q live in different dimensions")
    _emit({"norm": norm, "p": p, "q": q, "distance": distance(norm, p, q)}, out)


@main.command("norm")
@click.option("--norm", "norm_text", required=True)
@click.option("--n", type=int, default=1)
@click.option("--check-validity", is_flag=True, help="Check that the descriptor is a norm on H^n.")
@click.option("--probe", is_flag=True, help="Probe triangle, symmetry, homogeneity and dominance on samples.")
@click.option("--point", "point_text", default=None, help="Evaluate N at this point.")
@click.option("--samples", type=int, default=10_000)
@seed_option
@out_option
@_guard
def cmd_norm(norm_text, n, check_validity, probe, point_text, samples, seed, out):
    """Validity, axiom probes and evaluation for one norm."""
    norm = parse_norm(norm_text)
    rep = {"norm": norm, "n": n}
    code = EXIT_OK
    if check_validity or not (probe or point_text):
        if isinstance(norm, Lpa):
            v = is_valid_lpa(n, norm.p, norm.a)
            rep["validity"] = {"valid": v.valid, "threshold": v.bound, "regime": v.regime}
            if not v.valid:
                g, h = lpa_violation_witness(n, norm.p, norm.a)
                rep["validity"]["witness"] = {"g": g, "h": h, "triangle_defect": triangle_defect(norm, g, h)}
                code = EXIT_VIOLATION
        else:
            rep["validity"] = {"valid": True}
    if probe and code == EXIT_OK:
        pr = probe_norm_axioms(norm, n, samples, seed)
        dom = check_horiz_dominance(norm, n, samples, seed)
        rep["probe"] = pr.to_dict()
        rep["probe"]["worst_dominance_defect"] = dom
        if not pr.holds or dom > pr.tolerance:
            code = EXIT_VIOLATION
    if point_text:
        p = HeisPoint.from_coords(_coords(point_text))
        rep["point"] = p
        rep["value"] = eval_norm(norm, p)
    _emit(rep, out)
    sys.exit(code)


@main.command("lift")
@click.option("--in", "in_path", required=True, type=click.Path(dir_okay=False), help="Curve CSV (s, z_1..z_2n[, t]).")
@click.option("--norm", "norm_text", default="koranyi")
@click.option("--t0", type=float, default=None, help="Start height; defaults to the first t value or 0.")
@click.option("--out", default="-", help="Lifted curve CSV; '-' writes to stdout.")
@click.option("--report", "report_path", default=None, help="Optional JSON summary path.")
@_guard
def cmd_lift(in_path, norm_text, t0, out, report_path):
    """Horizontal lift of a planar curve."""
    norm = parse_norm(norm_text)
    with open(in_path) as fh:
        s, z, t = curves.read_curve_csv(fh.read())
    if t0 is None:
        t0 = float(t[0]) if t is not None else 0.0
    curve = curves.lift(z, s, t0)
    report.write_text(out, curves.curve_to_csv(curve))
    if report_path:
        summary = {
            "samples": len(curve),
            "n": curve.n,
            "norm": norm,
            "length": curves.length(curve, norm),
            "end": curve.end,
        }
        report.write_text(report_path, report.dumps(summary))


@main.command("geodesic-verify")
@click.option("--builtin", type=click.Choice(["p1", "pinf"]), default=None)
@click.option("--in", "in_path", default=None, type=click.Path(dir_okay=False), help="Curve CSV instead of a builtin.")
@click.option("--norm", "norm_text", default=None, help="Norm for --in curves.")
@click.option("--a", type=float, default=0.5)
@click.option("--n", type=int, default=1)
@click.option("--range", "range_text", default="-10,10")
@click.option("--samples", type=int, default=2001)
@click.option("--pair-budget", type=int, default=1024)
@click.option("--tol", type=float, default=1e-9)
@seed_option
@out_option
@_guard
def cmd_geodesic_verify(builtin, in_path, norm_text, a, n, range_text, samples, pair_budget, tol, seed, out):
    """Check that a sampled curve is a geodesic."""
    if (builtin is None) == (in_path is None):
        raise UsageFailure("give exactly one of --builtin or --in")
    if builtin:
        lo, hi = _range(range_text)
        if builtin == "p1":
            curve, norm = curves.catalog_p1_geodesic(n, a), Lpa(1.0, a)
        else:
            curve, norm = curves.catalog_pinf_geodesic(n, a), Lpa(math.inf, a)
        sampled = curve.sample_range(lo, hi, samples)
        source = {"builtin": builtin, "n": n, "a": a, "range": [lo, hi], "samples": samples}
    else:
        if norm_text is None:
            raise UsageFailure("--in needs --norm")
        norm = parse_norm(norm_text)
        with open(in_path) as fh:
            s, z, t = curves.read_curve_csv(fh.read())
        if t is None:
            raise UsageFailure("curve CSV field 't' is missing")
        sampled = curves.HorizontalCurve(s, z, t)
        source = {"file": in_path}
    rep = curves.verify_geodesic(sampled, norm, pair_budget=pair_budget, tol=tol)
    _emit({"source": source, "norm": norm, "report": rep, "linearity_defect": curves.linearity_defect(sampled)}, out)
    sys.exit(EXIT_OK if rep.is_geodesic else EXIT_VIOLATION)


@main.command("embed-verify")
@click.option("--builtin", type=click.Choice(list(homs.BUILTIN_MAPS)), required=True)
@click.option("--n", type=int, default=2)
@click.option("--a", type=float, default=0.5)
@click.option("--samples", type=int, default=10_000)
@click.option("--radius", type=float, default=10.0)
@click.option("--tol", type=float, default=1e-10)
@seed_option
@out_option
@_guard
def cmd_embed_verify(builtin, n, a, samples, radius, tol, seed, out):
    """Probe a builtin map for isometry."""
    f, src, tgt = homs.builtin_map(builtin, n, a)
    rep = homs.isometry_probe(f, src, tgt, samples, seed, radius)
    ok = rep.worst_defect <= tol
    _emit({"map": builtin, "n": n, "a": a, "tolerance": tol, "isometric": ok, "report": rep}, out)
    sys.exit(EXIT_OK if ok else EXIT_VIOLATION)


def _load_spec(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageFailure(f"{path}: not valid JSON ({exc.msg})") from None
    spec = homs.HomSpec.from_dict(data)
    translation = HeisPoint.from_dict(data["translation"]) if "translation" in data else None
    if spec.source != homs.HEISENBERG:
        raise UsageFailure("fit-affine needs a Heisenberg source")
    return homs.affine_map(spec, translation), spec


@main.command("fit-affine")
@click.option("--map", "map_text", required=True, help="builtin:NAME or a HomSpec JSON path (optional 'translation').")
@click.option("--n", type=int, default=2)
@click.option("--a", type=float, default=0.5)
@click.option("--norm", "norm_text", default="koranyi", help="Norm on source and target for HomSpec maps.")
@click.option("--samples", type=int, default=256)
@click.option("--tol", type=float, default=1e-9)
@seed_option
@out_option
@_guard
def cmd_fit_affine(map_text, n, a, norm_text, samples, tol, seed, out):
    """Fit a left translation composed with a homogeneous homomorphism."""
    if map_text.startswith("builtin:"):
        name = map_text.split(":", 1)[1]
        f, src, tgt = homs.builtin_map(name, n, a)
        meta = {"map": map_text, "n": n, "a": a}
    else:
        f, spec = _load_spec(map_text)
        norm = parse_norm(norm_text)
        src, tgt = homs.heisenberg(norm, spec.m), homs.heisenberg(norm, spec.n)
        meta = {"map": map_text, "norm": norm}
    rep = homs.fit_affine(f, src, tgt, samples=samples, seed=seed, tol=tol)
    _emit({**meta, "report": rep}, out)
    sys.exit(EXIT_OK if rep.is_affine else EXIT_VIOLATION)


PROPERTIES = {
    "hsc": convexity.HSC,
    "midpoint": convexity.MIDPOINT,
    "glp": convexity.GLP,
    "planar": convexity.PLANAR,
}


@main.command("convexity")
@click.option("--norm", "norm_text", required=True)
@click.option("--n", type=int, default=1)
@click.option("--property", "prop", type=click.Choice(list(PROPERTIES)), required=True)
@click.option("--samples", type=int, default=1000)
@click.option("--band", type=float, default=1e-6)
@seed_option
@out_option
@_guard
def cmd_convexity(norm_text, n, prop, samples, band, seed, out):
    """Verdict on one convexity property."""
    norm = parse_norm(norm_text)
    if prop == "hsc":
        rep = convexity.probe_horizontal_strict_convexity(norm, n, samples, seed, band)
    elif prop == "midpoint":
        rep = convexity.probe_midpoint(norm, n, samples, seed, band)
    elif prop == "glp":
        if isinstance(norm, Lpa):
            rep = convexity.classify_glp_lpa(norm.p, n, norm.a)
        else:
            rep = convexity.glp_necessary_condition(norm, n)
    else:
        rep = convexity.ConvexityReport(
            convexity.PLANAR,
            convexity.THEOREM,
            convexity.projected_strictly_convex(norm),
            "strict convexity of the projected norm",
        )
    _emit({"norm": norm, "n": n, "report": rep}, out)
    sys.exit(EXIT_VIOLATION if rep.holds is False else EXIT_OK)


@main.command("isoperimetrix")
@click.option("--planar", "planar_text", default="lp:p=2", help="lp:p=P or poly:x y;x y;...")
@click.option("--resolution", type=int, default=2048)
@click.option("--out", default=None, help="Vertex CSV path (x, y).")
@click.option("--report", "report_path", default="-", help="JSON summary; '-' writes to stdout.")
@_guard
def cmd_isoperimetrix(planar_text, resolution, out, report_path):
    """Build the isoperimetrix polygon of a planar norm."""
    planar = parse_planar(planar_text)
    model = isoperimetrix.build_isoperimetrix(planar, resolution)
    if out:
        report.write_text(out, isoperimetrix.model_to_csv(model))
    summary = model.to_dict()
    summary.pop("vertices", None)
    summary["strictly_convex"] = convexity.planar_strict_convexity(planar)
    summary["vertices_written_to"] = out
    report.write_text(report_path, report.dumps(summary))


@main.command("vdist")
@click.option("--planar", "planar_text", default="lp:p=2")
@click.option("--t", type=float, required=True)
@click.option("--resolution", type=int, default=4096)
@seed_option
@out_option
@_guard
def cmd_vdist(planar_text, t, resolution, seed, out):
    """Sub-Finsler distance from (0, t) to the origin in H^1."""
    planar = parse_planar(planar_text)
    _emit({"planar": planar, "t": t, "resolution": resolution, "distance": isoperimetrix.vertical_distance(planar, t, resolution)}, out)


@main.command("reproduce")
@seed_option
@click.option("--tolerance", "tol_items", multiple=True, help=f"Override, e.g. triangle=1e-15. Keys: {', '.join(acceptance.DEFAULT_TOLERANCES)}.")
@click.option("--samples", "sample_items", multiple=True, help=f"Override, e.g. triangle=1000. Keys: {', '.join(acceptance.DEFAULT_SAMPLES)}.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@out_option
@click.option("--quiet", is_flag=True, help="Do not print per-check lines to stderr.")
@_guard
def cmd_reproduce(seed, tol_items, sample_items, fmt, out, quiet):
    """Run every acceptance check and write a summary."""
    tols = _pairs(tol_items, float)
    smp = _pairs(sample_items, int)
    for key in tols:
        if key not in acceptance.DEFAULT_TOLERANCES:
            raise UsageFailure(f"unknown tolerance key {key!r}")
    for key in smp:
        if key not in acceptance.DEFAULT_SAMPLES:
            raise UsageFailure(f"unknown sample key {key!r}")

    def log(line, seconds):
        if not quiet:
            click.echo(f"{line}  [{seconds:.2f}s]", err=True)

    start = time.perf_counter()
    results = acceptance.run_all(seed, tols, smp, log)
    if not quiet:
        click.echo(f"wall time {time.perf_counter() - start:.2f}s", err=True)
    if fmt == "json":
        text = report.dumps(acceptance.summary(results, seed, tols, smp))
    else:
        text = report.rows_to_csv(
            ["criterion", "name", "passed", "tolerance_induced"],
            [[r.criterion, r.name, r.passed, r.tolerance_induced] for r in results],
        )
    report.write_text(out, text)
    sys.exit(EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION)


if __name__ == "__main__":
    main()
