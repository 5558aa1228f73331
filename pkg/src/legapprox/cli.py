"""Command line front end: demos, CSV ingestion, exporters, self-checks.

Artifacts per run: ``curve.csv`` (t, a, b, c), ``reference.csv``
(t, x, y, z), ``report.json`` (parameters, bounds, measured errors, check
booleans), ``front.svg`` (a, c projection) and ``lagrangian.svg`` (a, b
projection).  Identical configuration (including seed) produces
byte-identical outputs.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import figures
from .contact import ContactModel, car_from_standard, legendrian_residual
from .convex_integration import (LoopFamily, approximate_closed, approximate_open,
                                 loop_barycenter_check)
from .curves import (ParamCurve, SampledCurve, c0_norm, circle_target,
                     curve_from_components, helix_target, mollify,
                     parking_target, TAU)
from .estimators import default_bandwidth
from .gluing import GlueProblem, affine_reparam, glue, radius_R
from .oracles import c0_distance, fd_derivative, membership_scan, quad_oracle


@dataclass
class RunConfig:
    """One CLI invocation: command, tolerances, overrides, IO paths."""

    command: str
    eps: float | None = None
    r: float | None = None
    n: int | None = None
    grid: int = 20001
    bandwidth: float | None = None
    periodic: bool = False
    input: str | None = None
    out: str | None = None
    seed: int = 0


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(float(col[i])) for col in columns) + "\n")


def read_curve_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip()
    if header.replace(" ", "") != "t,x,y,z":
        raise click.ClickException(f"expected CSV header 't,x,y,z', got '{header}'")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 4:
        raise click.ClickException("expected 4 CSV columns: t,x,y,z")
    return data[:, 0], data[:, 1:]


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def write_report(path: Path, report: dict) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonify(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def export_run(outdir: Path, curve, reference: ParamCurve, grid: int,
               report: dict) -> dict:
    """Write the sample CSVs, both projections and the JSON report."""
    outdir.mkdir(parents=True, exist_ok=True)
    t = np.linspace(curve.domain[0], curve.domain[1], grid)
    vals = curve.eval(t)
    ref = reference(t)
    write_csv(outdir / "curve.csv", ["t", "a", "b", "c"],
              [t, vals[:, 0], vals[:, 1], vals[:, 2]])
    write_csv(outdir / "reference.csv", ["t", "x", "y", "z"],
              [t, ref[:, 0], ref[:, 1], ref[:, 2]])
    front = figures.projection_svg(vals[:, 0], vals[:, 2], title="front projection",
                                   xlabel="a", ylabel="c")
    lagr = figures.projection_svg(vals[:, 0], vals[:, 1],
                                  title="Lagrangian projection",
                                  xlabel="a", ylabel="b")
    (outdir / "front.svg").write_text(front)
    (outdir / "lagrangian.svg").write_text(lagr)

    report = dict(report)
    report["artifacts"] = {"curve_csv": "curve.csv", "reference_csv": "reference.csv",
                           "front_svg": "front.svg", "lagrangian_svg": "lagrangian.svg",
                           "report_json": "report.json"}
    report["figure"] = {
        "zigzag_alternations": figures.count_direction_alternations(vals[:, 0]),
        "loop_areas_detected": len(figures.find_signed_loops(vals[:, 0], vals[:, 1])),
    }
    write_report(outdir / "report.json", report)
    return report


def _measured_block(curve, reference, grid=10_001):
    ac = c0_distance(lambda t: curve.eval(t)[:, [0, 2]],
                     lambda t: reference(t)[:, [0, 2]], grid, domain=curve.domain)
    b_err = c0_distance(curve.b, lambda t: reference(t)[:, 1], grid,
                        domain=curve.domain)
    res = legendrian_residual(curve.as_param_curve(), ContactModel.STANDARD3, grid)
    return {"ac_sup_error": ac, "b_sup_error": b_err, "residual_max": res.max_abs}


def _params_block(cfg: RunConfig, curve) -> dict:
    return {"eps": curve.params.eps, "r": curve.params.r, "n": curve.params.n,
            "grid": cfg.grid, "seed": cfg.seed, "kind": curve.kind}


def run_helix(cfg: RunConfig) -> int:
    r = cfg.r if cfg.r is not None else 30.0
    n = cfg.n if cfg.n is not None else 200
    eps = cfg.eps if cfg.eps is not None else 0.28
    target = helix_target()
    curve = approximate_open(target, eps, r=r, n=n)

    t = np.linspace(0.0, TAU, 1000)
    a_ref = t + (3.0 / 20.0) * np.sin(200 * t)
    b_ref = (455.0 / 451.0) * np.cos(5 * t) \
        + (120.0 / 451.0) * np.cos(5 * t) * np.cos(200 * t)
    c_ref = (np.sin(5 * t) + (459.0 / 5863.0) * np.sin(195 * t)
             + (1377.0 / 18491.0) * np.sin(205 * t)
             + (180.0 / 35629.0) * np.sin(395 * t)
             + (20.0 / 4059.0) * np.sin(405 * t))
    coeff_ok = {
        "a": float(np.max(np.abs(curve.a(t) - a_ref))),
        "b": float(np.max(np.abs(curve.b(t) - b_ref))),
        "c": float(np.max(np.abs(curve.c(t) - c_ref))),
    }
    report = {
        "command": "helix",
        "params": _params_block(cfg, curve),
        "bounds": {"gamma_c1": curve.meta["gamma_c1"],
                   "ac_bound": curve.meta["ac_bound"], "b_bound": eps},
        "measured": _measured_block(curve, target),
        "checks": {"coefficient_defects": coeff_ok,
                   "coefficients_match_1e-8": bool(max(coeff_ok.values()) <= 1e-8)},
    }
    report = export_run(Path(cfg.out), curve, target, cfg.grid, report)
    ok = report["checks"]["coefficients_match_1e-8"] \
        and report["measured"]["ac_sup_error"] <= report["bounds"]["ac_bound"]
    click.echo(f"helix demo: coefficient defects {coeff_ok} -> {'ok' if ok else 'FAIL'}")
    return 0 if ok else 1


def run_park(cfg: RunConfig) -> int:
    r = cfg.r if cfg.r is not None else 30.0
    n = cfg.n if cfg.n is not None else 200
    eps = cfg.eps if cfg.eps is not None else 0.1
    target = parking_target()
    # the parking loop uses amplitude 2r: gamma = (2 r cos s, 2 cos^2 s)
    curve = approximate_open(target, eps, r=2.0 * r, n=n)
    car = car_from_standard(curve)

    t = np.linspace(0.0, TAU, 1000)
    nt = n * t

    def sinc(x):
        out = np.ones_like(x)
        nz = x != 0
        out[nz] = np.sin(x[nz]) / x[nz]
        return out

    a_ref = 2.0 * r * t * sinc(nt)
    c_ref = t + t * sinc(2.0 * nt)
    phi_ref = np.arctan(np.cos(nt) / r)  # arccot(r sec(nt)), odd branch
    defects = {
        "a": float(np.max(np.abs(curve.a(t) - a_ref))),
        "c": float(np.max(np.abs(curve.c(t) - c_ref))),
        "phi": float(np.max(np.abs(car(t)[:, 0] - phi_ref))),
    }
    car_res = legendrian_residual(car, ContactModel.CAR, 10_001)
    report = {
        "command": "park",
        "params": _params_block(cfg, curve),
        "bounds": {"gamma_c1": curve.meta["gamma_c1"],
                   "ac_bound": curve.meta["ac_bound"], "b_bound": eps},
        "measured": dict(_measured_block(curve, target),
                         car_residual_max=car_res.max_abs),
        "checks": {"closed_form_defects": defects,
                   "closed_forms_match_1e-9": bool(max(defects.values()) <= 1e-9)},
    }
    report = export_run(Path(cfg.out), curve, target, cfg.grid, report)
    ok = report["checks"]["closed_forms_match_1e-9"]
    click.echo(f"parking demo: closed-form defects {defects} -> {'ok' if ok else 'FAIL'}")
    return 0 if ok else 1


def _ingest(cfg: RunConfig) -> ParamCurve:
    if not cfg.input:
        raise click.ClickException("this command needs --input <csv>")
    t, pts = read_curve_csv(cfg.input)
    raw = SampledCurve(t, pts, periodic=cfg.periodic)
    bw = cfg.bandwidth if cfg.bandwidth is not None else default_bandwidth(t)
    return mollify(raw, bw)


def run_approx_open(cfg: RunConfig) -> int:
    eps = cfg.eps if cfg.eps is not None else 0.1
    target = _ingest(cfg)
    curve = approximate_open(target, eps, r=cfg.r, n=cfg.n)
    report = {
        "command": "approx-open",
        "params": _params_block(cfg, curve),
        "bounds": {"gamma_c1": curve.meta["gamma_c1"],
                   "ac_bound": curve.meta["ac_bound"], "b_bound": eps},
        "measured": _measured_block(curve, target),
    }
    export_run(Path(cfg.out), curve, target, cfg.grid, report)
    click.echo(f"approx-open: r={curve.params.r:.6g} n={curve.params.n}")
    return 0


def run_approx_closed(cfg: RunConfig) -> int:
    eps = cfg.eps if cfg.eps is not None else 0.1
    if not cfg.periodic:
        raise click.ClickException("approx-closed needs --periodic input samples")
    target = _ingest(cfg)
    curve = approximate_closed(target, eps, r=cfg.r, n=cfg.n)
    ends = np.array([curve.domain[0], curve.domain[1]])
    jets = {
        "value_defect": float(np.max(np.abs(curve.eval(ends)[0] - curve.eval(ends)[1]))),
        "deriv_defect": float(np.max(np.abs(curve.deriv(ends)[0] - curve.deriv(ends)[1]))),
    }
    report = {
        "command": "approx-closed",
        "params": _params_block(cfg, curve),
        "bounds": {"gamma_c1": curve.meta["gamma_c1"],
                   "ac_bound": curve.meta["ac_bound"],
                   "I2_bound": curve.meta["I2_bound"], "b_bound": eps},
        "measured": dict(_measured_block(curve, target),
                         I2=curve.meta["I2"], endpoint_jets=jets),
    }
    export_run(Path(cfg.out), curve, target, cfg.grid, report)
    click.echo(f"approx-closed: r={curve.params.r:.6g} n={curve.params.n}")
    return 0


def make_glue_demo_problem(eps: float, seed: int):
    """Reference (t, 0, sin t) near 0 with two independently built arcs."""
    rng = np.random.default_rng(seed)
    half = 0.55
    ref = curve_from_components(
        lambda t: t, lambda t: np.zeros_like(t), lambda t: np.sin(t),
        lambda t: np.ones_like(t), lambda t: np.zeros_like(t), lambda t: np.cos(t),
        domain=(-half, half))

    eps_arc = eps ** 2 / 5.0
    arcs = []
    for jitter in rng.uniform(0.85, 1.0, size=2):
        scale = 2.0 * half / TAU

        def pos(u, s=scale, h=half):
            t = -h + s * u
            return np.stack([t, np.zeros_like(t), np.sin(t)], axis=-1)

        def vel(u, s=scale, h=half):
            t = -h + s * u
            return np.stack([s * np.ones_like(t), np.zeros_like(t), s * np.cos(t)],
                            axis=-1)

        arc_target = ParamCurve(pos, vel)
        built = approximate_open(arc_target, eps_arc * jitter)
        arcs.append(affine_reparam(built, shift=TAU / 2.0, scale=TAU / (2.0 * half),
                                   new_domain=(-half, half)))
    sigma, tau = arcs
    return GlueProblem(sigma=sigma, tau=tau, reference=ref, eps=eps)


def run_glue_demo(cfg: RunConfig) -> int:
    eps = cfg.eps if cfg.eps is not None else 0.45
    problem = make_glue_demo_problem(eps, cfg.seed)
    curve = glue(problem)
    meta = curve.meta
    d = meta["connector"].delta
    measured = _measured_block(curve, problem.reference)
    end_defect = float(np.max(np.abs(curve.eval(np.array([d]))[0][[0, 2]] - meta["p2"])))
    checks = {
        "endpoint_defect": end_defect,
        "b_within_2eps": bool(measured["b_sup_error"] < meta["b_bound"]),
        "ac_within_uniform_bound": bool(measured["ac_sup_error"] <= meta["ac_bound"]),
        "ramp_masses_ok": bool(max(meta["ramp_masses"]) < meta["ramp_mass_bound"]),
    }
    report = {
        "command": "glue-demo",
        "params": {"eps": eps, "seed": cfg.seed, "grid": cfg.grid,
                   "delta": meta["connector"].delta, "rho": meta["connector"].rho,
                   "ramp_exponents": list(meta["connector"].k),
                   "loop_r": meta["connector"].loop_r},
        "bounds": {"b_bound": meta["b_bound"], "ac_bound": meta["ac_bound"],
                   "ramp_mass_bound": meta["ramp_mass_bound"], "R_cap": meta["R_cap"]},
        "measured": measured,
        "checks": checks,
    }
    export_run(Path(cfg.out), curve, problem.reference, cfg.grid, report)
    ok = all(v for k, v in checks.items() if isinstance(v, bool))
    click.echo(f"glue demo: delta={d:.5g} checks={'ok' if ok else 'FAIL'}")
    return 0 if ok else 1


def run_verify(cfg: RunConfig) -> int:
    """Fast oracle-backed invariant battery; exit 0 iff everything passes."""
    results: list[tuple[str, bool, str]] = []

    def check(name, ok, detail=""):
        results.append((name, bool(ok), detail))

    v = quad_oracle(np.cos, 0.0, TAU, tol=1e-12).value
    check("quad cos over full period ~ 0", abs(float(v)) <= 1e-12, f"{float(v):.2e}")
    v = quad_oracle(lambda s: np.cos(s) ** 2, 0.0, TAU, tol=1e-12).value
    check("quad cos^2 ~ pi", abs(float(v) - math.pi) <= 1e-11, f"{float(v):.15g}")
    v = quad_oracle(lambda u: (30 * np.cos(200 * u) + 1.0) ** 2, 0.0, TAU, tol=1e-9).value
    check("quad helix loop mass ~ 902 pi", abs(float(v) - 902 * math.pi) <= 1e-7,
          f"{float(v):.12g}")

    check("fd sin'(0) ~ 1",
          abs(float(fd_derivative(np.sin, 0.0, 1e-5)) - 1.0) <= 1e-9)
    check("fd (t^2)'(1) ~ 2",
          abs(float(fd_derivative(lambda t: t ** 2, 1.0, 1e-5)) - 2.0) <= 1e-9)

    helix = helix_target()
    fam = LoopFamily(helix, 30.0)
    mean, defect = loop_barycenter_check(fam, 0.0)
    check("helix loop barycenter = (1, 5)", defect <= 1e-10,
          f"mean={mean}, defect={defect:.2e}")
    tg = np.linspace(0.0, TAU, 200)
    sg = np.linspace(0.0, TAU, 200)
    check("helix membership margin at eps=0.28",
          membership_scan(fam, 0.28, tg, sg) >= -1e-12)
    check("helix membership fails at eps=0.14",
          membership_scan(fam, 0.14, tg, sg) < 0)

    check("R formula at y0=0, eps=1/2, r=1 ~ sqrt(5)",
          abs(radius_R(1.0, 0.0, 0.5) - math.sqrt(5.0)) <= 1e-12)

    curve = approximate_open(parking_target(), 0.1, r=60.0, n=200)
    res = legendrian_residual(curve.as_param_curve(), ContactModel.STANDARD3, 2001)
    check("parking curve residual <= 1e-10", res.max_abs <= 1e-10,
          f"{res.max_abs:.2e}")
    tt = np.linspace(0.0, TAU, 500)
    check("parking b = cos(200 t)/30",
          float(np.max(np.abs(curve.b(tt) - np.cos(200 * tt) / 30.0))) <= 1e-12)

    circ = approximate_closed(circle_target(), 0.4, r=10.0, n=250)
    ends = np.array([0.0, TAU])
    vals = circ.eval(ends)
    check("closed circle endpoint values match",
          float(np.max(np.abs(vals[0] - vals[1]))) <= 1e-9)
    check("c0_norm constant (3,4,0) = 5",
          abs(c0_norm(curve_from_components(
              lambda t: 3.0, lambda t: 4.0, lambda t: 0.0,
              lambda t: 0.0, lambda t: 0.0, lambda t: 0.0), 101) - 5.0) <= 1e-12)

    failures = [r for r in results if not r[1]]
    for name, ok, detail in results:
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
    click.echo(f"verify: {len(results) - len(failures)}/{len(results)} checks passed")
    return 0 if not failures else 1


_RUNNERS = {
    "helix": run_helix,
    "park": run_park,
    "approx-open": run_approx_open,
    "approx-closed": run_approx_closed,
    "glue-demo": run_glue_demo,
    "verify": run_verify,
}


def run(config: RunConfig) -> int:
    """Execute one configured command; returns the process exit status."""
    runner = _RUNNERS.get(config.command)
    if runner is None:
        raise click.ClickException(f"unknown command {config.command}")
    if config.command != "verify" and not config.out:
        raise click.ClickException("this command needs --out <dir>")
    return runner(config)


def _common_options(fn):
    fn = click.option("--eps", type=float, default=None, help="slope play epsilon")(fn)
    fn = click.option("--r", type=float, default=None, help="pin the loop amplitude")(fn)
    fn = click.option("--n", type=int, default=None, help="pin the oscillation count")(fn)
    fn = click.option("--grid", type=int, default=20001, help="export sample count")(fn)
    fn = click.option("--seed", type=int, default=0, help="seed for randomized demos")(fn)
    fn = click.option("--out", type=click.Path(), default=None, help="output directory")(fn)
    return fn


@click.group()
def main():
    """Legendrian approximation of curves in standard contact R^3."""


def _dispatch(command, **kw):
    cfg = RunConfig(command=command, **kw)
    sys.exit(run(cfg))


@main.command("helix")
@_common_options
def _helix_cmd(eps, r, n, grid, seed, out):
    """Demo: Legendrian approximation of the helix (t, cos 5t, sin 5t)."""
    _dispatch("helix", eps=eps, r=r, n=n, grid=grid, seed=seed, out=out)


@main.command("park")
@_common_options
def _park_cmd(eps, r, n, grid, seed, out):
    """Demo: explicit parallel-parking motion (sideways translation)."""
    _dispatch("park", eps=eps, r=r, n=n, grid=grid, seed=seed, out=out)


@main.command("approx-open")
@_common_options
@click.option("--input", "input_", type=click.Path(exists=True), required=True,
              help="input CSV with header t,x,y,z")
@click.option("--bandwidth", type=float, default=None, help="mollifier bandwidth")
@click.option("--periodic", is_flag=True, help="treat the samples as wrapping")
def _open_cmd(eps, r, n, grid, seed, out, input_, bandwidth, periodic):
    """Approximate an open sampled curve by a Legendrian curve."""
    _dispatch("approx-open", eps=eps, r=r, n=n, grid=grid, seed=seed, out=out,
              input=input_, bandwidth=bandwidth, periodic=periodic)


@main.command("approx-closed")
@_common_options
@click.option("--input", "input_", type=click.Path(exists=True), required=True,
              help="input CSV with header t,x,y,z")
@click.option("--bandwidth", type=float, default=None, help="mollifier bandwidth")
@click.option("--periodic", is_flag=True, help="treat the samples as wrapping")
def _closed_cmd(eps, r, n, grid, seed, out, input_, bandwidth, periodic):
    """Approximate a closed sampled curve by a closed Legendrian curve."""
    _dispatch("approx-closed", eps=eps, r=r, n=n, grid=grid, seed=seed, out=out,
              input=input_, bandwidth=bandwidth, periodic=periodic)


@main.command("glue-demo")
@_common_options
def _glue_cmd(eps, r, n, grid, seed, out):
    """Demo: splice two local approximations across a chart overlap."""
    _dispatch("glue-demo", eps=eps, r=r, n=n, grid=grid, seed=seed, out=out)


@main.command("verify")
@_common_options
def _verify_cmd(eps, r, n, grid, seed, out):
    """Run the oracle-backed invariant battery."""
    _dispatch("verify", eps=eps, r=r, n=n, grid=grid, seed=seed, out=out)


if __name__ == "__main__":
    main()
