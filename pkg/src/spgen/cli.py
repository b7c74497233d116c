"""Command-line front end: one subcommand per generator, seeded reproducible
output, raster/CSV artifacts, and the statistical validation suite runner.

Every run writes a JSON metadata sidecar ``<out>.json`` recording the
subcommand, all parameters, the seed, and the artifact version; the artifact
files are a pure function of that sidecar.  Grid-valued outputs go to the
package's binary grid format and/or 8-bit PGM rasters, point patterns and
paths to CSV.

PGM normalization is per file (min to 0, max to 255, constant fields to 128),
so gray levels are not comparable across files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import circulant, dense, fractional, gmrf, levy, mcmc, pointproc, validate
from .errors import SpgenError
from .grid import (
    Field,
    Grid2D,
    MaskedField,
    TorusExp,
    Wavy,
    write_grid_binary,
    write_masked_grid_binary,
)
from .rng import RngStream

ARTIFACT_VERSION = 1
FORMATS = ("grid-binary", "pgm", "csv", "json-meta")


# --- artifact writers ---------------------------------------------------------------

def write_pgm(field, path) -> None:
    """Binary PGM ("P5", maxval 255) with per-file linear normalization.

    The minimum maps to 0 and the maximum to 255; a constant field maps to
    128.  Cells outside a :class:`MaskedField` mask render as 0.
    """
    if isinstance(field, MaskedField):
        values = field.field.values
        valid = field.mask.astype(bool)
    else:
        values = field.values
        valid = np.ones(values.shape, dtype=bool)
    data = np.zeros(values.shape, dtype=np.uint8)
    if valid.any():
        lo = float(values[valid].min())
        hi = float(values[valid].max())
        if hi == lo:
            data[valid] = 128
        else:
            scaled = np.clip(np.rint(255.0 * (values - lo) / (hi - lo)), 0, 255)
            data[valid] = scaled.astype(np.uint8)[valid]
    ny, nx = values.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def _write_series_csv(times, values, path) -> None:
    with open(path, "w") as fh:
        fh.write("t,x\n")
        for t, x in zip(times, values):
            fh.write(f"{t:.17g},{x:.17g}\n")


def _write_sidecar(args) -> None:
    skip = {"func", "seed", "subcommand"}
    params = {k: v for k, v in vars(args).items() if k not in skip}
    doc = {
        "subcommand": args.subcommand,
        "params": params,
        "seed": args.seed,
        "version": ARTIFACT_VERSION,
    }
    with open(args.out + ".json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _wants(args, fmt: str) -> bool:
    return args.formats is None or fmt in args.formats


def _emit_field(field, stem: str, args) -> None:
    if _wants(args, "grid-binary"):
        if isinstance(field, MaskedField):
            write_masked_grid_binary(field, stem + ".grid")
        else:
            write_grid_binary(field, stem + ".grid")
    if _wants(args, "pgm"):
        write_pgm(field, stem + ".pgm")


def _emit_points(pattern, stem: str, args) -> None:
    if _wants(args, "csv"):
        pointproc.write_points_csv(pattern, stem + ".csv")


def _emit_series(times, values, stem: str, args) -> None:
    if _wants(args, "csv"):
        _write_series_csv(times, values, stem + ".csv")


def _each_realization(args):
    """(output stem, stream) pairs: realization i always uses child stream i."""
    root = RngStream(args.seed)
    k = args.realizations
    for i in range(k):
        suffix = "" if k == 1 else f"_{i:03d}"
        yield args.out + suffix, root.child(i)


# --- subcommand handlers ------------------------------------------------------------

def _cmd_gaussian_ma(args) -> int:
    grid = Grid2D(nx=args.n, ny=args.n)
    for stem, stream in _each_realization(args):
        noise = Field(grid, stream.std_normals((args.n, args.n)))
        _emit_field(dense.moving_average_field(noise, args.r), stem, args)
    _write_sidecar(args)
    return 0


def _cmd_torus(args) -> int:
    plan = circulant.plan_torus(args.n, TorusExp(c=args.c, alpha=args.alpha))
    for stem, stream in _each_realization(args):
        _emit_field(circulant.sample_torus(plan, stream), stem, args)
    _write_sidecar(args)
    return 0


def _cmd_embed(args) -> int:
    grid = Grid2D(nx=args.n, ny=args.m, dx=args.dx, dy=args.dy)
    if args.model == "wavy":
        model = Wavy()
        rho = lambda hx, hy: model.cov_lag((hx, hy))  # noqa: E731
    else:
        rho = circulant.separable_exponential(args.c)
    plan = circulant.plan_embedding(grid, rho, pad_factor=args.pad)
    for stem, stream in _each_realization(args):
        f1, f2 = circulant.sample_embedded(plan, stream)
        _emit_field(f1, stem + "_a", args)
        _emit_field(f2, stem + "_b", args)
    _write_sidecar(args)
    return 0


def _cmd_gmrf(args) -> int:
    spec = gmrf.LatticeGmrfSpec(m=args.m, diag_value=args.diag,
                                neighbor_value=args.neighbor)
    for stem, stream in _each_realization(args):
        _emit_field(gmrf.sample_gmrf(spec, 0.0, stream), stem, args)
    _write_sidecar(args)
    return 0


def _intensity_from_args(args):
    if args.intensity == "quadratic":
        return pointproc.quadratic_intensity(args.scale)
    return pointproc.HomogeneousIntensity(args.lam)


def _cmd_poisson(args) -> int:
    intensity = _intensity_from_args(args)
    sampler = (pointproc.sample_poisson_inversion if args.mode == "invert"
               else pointproc.sample_poisson_thinning)
    for stem, stream in _each_realization(args):
        _emit_points(sampler(intensity, pointproc.UNIT_SQUARE, stream), stem, args)
    _write_sidecar(args)
    return 0


def _cmd_marked(args) -> int:
    intensity = pointproc.HomogeneousIntensity(args.lam)
    marks = pointproc.uniform_marks(args.mark_low, args.mark_high)
    for stem, stream in _each_realization(args):
        pattern = pointproc.sample_marked_poisson(
            intensity, pointproc.UNIT_SQUARE, marks, stream
        )
        _emit_points(pattern, stem, args)
    _write_sidecar(args)
    return 0


def _cmd_hawkes(args) -> int:
    for stem, stream in _each_realization(args):
        pattern = pointproc.sample_hawkes(
            args.lam, args.alpha, args.sigma, pointproc.UNIT_SQUARE, stream
        )
        _emit_points(pattern, stem, args)
    _write_sidecar(args)
    return 0


def _cmd_matern(args) -> int:
    kernel = pointproc.MaternBall(args.r)
    for stem, stream in _each_realization(args):
        pattern = pointproc.sample_neyman_scott(
            args.kappa, args.alpha, kernel, pointproc.UNIT_SQUARE, stream
        )
        _emit_points(pattern, stem, args)
    _write_sidecar(args)
    return 0


def _cmd_thomas(args) -> int:
    kernel = pointproc.ThomasGauss(args.sigma)
    for stem, stream in _each_realization(args):
        pattern = pointproc.sample_neyman_scott(
            args.kappa, args.alpha, kernel, pointproc.UNIT_SQUARE, stream
        )
        _emit_points(pattern, stem, args)
    _write_sidecar(args)
    return 0


def _cmd_cox(args) -> int:
    def random_intensity(stream: RngStream):
        return pointproc.HomogeneousIntensity(stream.gamma(args.shape, args.rate))

    for stem, stream in _each_realization(args):
        pattern = pointproc.sample_cox(random_intensity, pointproc.UNIT_SQUARE, stream)
        _emit_points(pattern, stem, args)
    _write_sidecar(args)
    return 0


def _cmd_snox(args) -> int:
    center = pointproc.shot_noise_g_center_intensity(args.alpha, args.beta, args.lam)
    marks = pointproc.gamma_marks(args.alpha, args.lam)
    kernel = pointproc.MaternBall(args.r)
    for stem, stream in _each_realization(args):
        pattern = pointproc.sample_shot_noise_cox(
            center, marks, kernel, pointproc.UNIT_SQUARE, stream
        )
        _emit_points(pattern, stem, args)
    _write_sidecar(args)
    return 0


def _cmd_strauss_cond(args) -> int:
    params = mcmc.StraussParams(beta=1.0, gamma=args.gamma, r=args.r)
    for stem, stream in _each_realization(args):
        summary = mcmc.run_conditional_strauss(
            args.n, params, args.steps, stream, proposal_sigma=args.sigma
        )
        if _wants(args, "csv"):
            mcmc.write_trace_csv(summary, stem + "_trace.csv")
        _emit_points(summary.final_pattern(), stem + "_points", args)
    _write_sidecar(args)
    return 0


def _cmd_strauss_rj(args) -> int:
    params = mcmc.StraussParams(beta=args.beta, gamma=args.gamma, r=args.r)
    for stem, stream in _each_realization(args):
        summary = mcmc.run_rj_strauss(params, args.steps, stream)
        if _wants(args, "csv"):
            mcmc.write_trace_csv(summary, stem + "_trace.csv")
        _emit_points(summary.final_pattern(), stem + "_points", args)
    _write_sidecar(args)
    return 0


def _cmd_wiener(args) -> int:
    times = np.arange(1, args.n + 1) / args.n
    for stem, stream in _each_realization(args):
        values = fractional.sample_wiener_path(times, stream)
        _emit_series(np.concatenate([[0.0], times]),
                     np.concatenate([[0.0], values]), stem, args)
    _write_sidecar(args)
    return 0


def _cmd_fbm(args) -> int:
    plan = fractional.plan_fgn(args.n, args.H)
    for stem, stream in _each_realization(args):
        times, values = fractional.sample_fbm(args.n, args.H, stream, plan=plan)
        _emit_series(times, values, stem, args)
    _write_sidecar(args)
    return 0


def _cmd_sheet(args) -> int:
    plan = fractional.plan_fgn_sheet(args.n, args.H)
    for stem, stream in _each_realization(args):
        field = fractional.sample_fractional_wiener_sheet(
            args.n, args.H, stream, plan=plan
        )
        _emit_field(field, stem, args)
    _write_sidecar(args)
    return 0


def _cmd_fbf(args) -> int:
    plan = fractional.plan_fbf(args.m, args.n, args.H)
    for stem, stream in _each_realization(args):
        f1, f2 = fractional.sample_fbf(args.m, args.n, args.H, stream, plan=plan)
        _emit_field(f1, stem + "_a", args)
        _emit_field(f2, stem + "_b", args)
    _write_sidecar(args)
    return 0


def _cmd_levy_path(args) -> int:
    eps_levels = list(args.eps)
    if any(b >= a for a, b in zip(eps_levels, eps_levels[1:])):
        raise SpgenError("eps levels must be strictly decreasing")
    spec = levy.gamma_path_spec(args.alpha, eps_levels[0])
    times = np.arange(1, args.n + 1) / args.n
    for stem, stream in _each_realization(args):
        path = levy.sample_levy_path(spec, times, stream)
        _emit_series(path.times, path.values, stem + "_lvl0", args)
        for lvl, eps in enumerate(eps_levels[1:], start=1):
            path = levy.refine_path(path, spec, eps, stream)
            _emit_series(path.times, path.values, f"{stem}_lvl{lvl}", args)
    _write_sidecar(args)
    return 0


def _cmd_levy_sheet(args) -> int:
    spec = levy.gamma_sheet_spec(args.n, args.r, args.alpha, args.beta)
    for stem, stream in _each_realization(args):
        _emit_field(levy.sample_gamma_sheet(spec, args.m, stream), stem, args)
    _write_sidecar(args)
    return 0


# --- validation suites --------------------------------------------------------------

def _suite_gmrf(stream: RngStream):
    spec = gmrf.LatticeGmrfSpec(m=3, diag_value=2.0, neighbor_value=-0.5)
    k = 4000
    x = gmrf.sample_gmrf_vectors(spec, 0.0, stream, k)
    prec = gmrf.build_lattice_precision(spec).to_dense_symmetric()
    target = float(np.linalg.inv(prec)[4, 4])
    v = x[:, 4] ** 2
    return [validate.make_report(
        "gmrf center variance", float(v.mean()),
        float(v.std(ddof=1) / math.sqrt(k)), target,
    )]


def _suite_poisson(stream: RngStream):
    intensity = pointproc.quadratic_intensity(300.0)
    k = 1500
    counts = np.array([
        len(pointproc.sample_poisson_inversion(
            intensity, pointproc.UNIT_SQUARE, stream.child(i)))
        for i in range(k)
    ], dtype=float)
    mean_rep = validate.make_report(
        "poisson mean count", float(counts.mean()),
        float(counts.std(ddof=1) / math.sqrt(k)), 200.0,
    )
    return [mean_rep, validate.dispersion_test(counts, name="poisson dispersion")]


def _suite_fbm(stream: RngStream):
    n, H, k = 256, 0.7, 2000
    plan = fractional.plan_fgn(n, H)
    w1 = np.empty(k)
    for i in range(k):
        _, w = fractional.sample_fbm(n, H, stream.child(i), plan=plan)
        w1[i] = w[-1]
    v = w1**2
    return [validate.make_report(
        "fbm terminal variance", float(v.mean()),
        float(v.std(ddof=1) / math.sqrt(k)), 1.0,
    )]


_SUITES = {"gmrf": _suite_gmrf, "poisson": _suite_poisson, "fbm": _suite_fbm}


def _cmd_validate(args) -> int:
    names = list(_SUITES) if args.suite == "quick" else [args.suite]
    reports = []
    root = RngStream(args.seed)
    for idx, name in enumerate(names):
        reports.extend(_SUITES[name](root.child(idx)))
    print(validate.report_lines(reports))
    with open(args.out + "_report.json", "w") as fh:
        json.dump(validate.reports_to_json(reports), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_sidecar(args)
    return 0 if all(r.passed for r in reports) else 1


def _cmd_bench(args) -> int:
    report = circulant.benchmark_scaling(
        args.sizes, include_dense=args.dense, repeats=args.repeats,
        stream=RngStream(args.seed),
    )
    print(report.table())

    def clean(values):
        return [v if math.isfinite(v) else None for v in values]

    doc = {
        "sizes": list(report.sizes),
        "n_points": list(report.n_points),
        "seconds_circulant": clean(report.seconds_circulant),
        "seconds_dense": clean(report.seconds_dense),
        "slope_circulant": report.slope_circulant,
        "slope_dense": (report.slope_dense
                        if math.isfinite(report.slope_dense) else None),
    }
    with open(args.out + "_report.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_sidecar(args)
    return 0


# --- parser -------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spgen",
        description="Seeded generators for Gaussian fields, point processes, "
                    "fractional motions, and jump processes.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base RNG seed")
    common.add_argument("--out", required=True,
                        help="output path stem; extensions are appended")
    common.add_argument("--formats", nargs="+", choices=FORMATS, default=None,
                        help="restrict artifact formats (default: all applicable)")
    common.add_argument("--realizations", type=int, default=1,
                        help="independent draws, each on its own child stream")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gaussian-ma", parents=[common],
                       help="disc moving average of white noise")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--r", type=float, default=6.0)
    p.set_defaults(func=_cmd_gaussian_ma)

    p = sub.add_parser("torus", parents=[common],
                       help="stationary field on the unit torus via FFT")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--c", type=float, default=8.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.set_defaults(func=_cmd_torus)

    p = sub.add_parser("embed", parents=[common],
                       help="stationary field via circulant embedding")
    p.add_argument("--model", choices=("wavy", "expsep"), default="expsep")
    p.add_argument("--m", type=int, default=64, help="rows")
    p.add_argument("--n", type=int, default=64, help="columns")
    p.add_argument("--dx", type=float, default=1.0)
    p.add_argument("--dy", type=float, default=1.0)
    p.add_argument("--c", type=float, default=0.05,
                   help="expsep decay rate (ignored for wavy)")
    p.add_argument("--pad", type=float, default=1.0,
                   help="embedding enlargement factor (>= 1)")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("gmrf", parents=[common],
                       help="lattice Markov field via band Cholesky")
    p.add_argument("--m", type=int, default=64, help="lattice side")
    p.add_argument("--diag", type=float, default=2.0)
    p.add_argument("--neighbor", type=float, default=-0.5)
    p.set_defaults(func=_cmd_gmrf)

    p = sub.add_parser("poisson", parents=[common],
                       help="Poisson process on the unit square")
    p.add_argument("--mode", choices=("invert", "thin"), default="invert")
    p.add_argument("--intensity", choices=("const", "quadratic"),
                   default="quadratic")
    p.add_argument("--lam", type=float, default=100.0,
                   help="constant intensity (const mode)")
    p.add_argument("--scale", type=float, default=300.0,
                   help="scale of scale*(x1^2+x2^2) (quadratic mode)")
    p.set_defaults(func=_cmd_poisson)

    p = sub.add_parser("marked", parents=[common],
                       help="Poisson points with iid uniform marks")
    p.add_argument("--lam", type=float, default=100.0)
    p.add_argument("--mark-low", type=float, default=0.0)
    p.add_argument("--mark-high", type=float, default=1.0)
    p.set_defaults(func=_cmd_marked)

    p = sub.add_parser("hawkes", parents=[common],
                       help="self-exciting cluster cascade")
    p.add_argument("--lam", type=float, default=30.0,
                   help="immigrant intensity")
    p.add_argument("--alpha", type=float, default=0.9,
                   help="mean offspring per point (< 1)")
    p.add_argument("--sigma", type=float, default=0.02,
                   help="offspring displacement scale")
    p.set_defaults(func=_cmd_hawkes)

    p = sub.add_parser("matern", parents=[common],
                       help="cluster process, uniform-in-ball offspring")
    p.add_argument("--kappa", type=float, default=20.0, help="center intensity")
    p.add_argument("--alpha", type=float, default=5.0,
                   help="mean offspring per center")
    p.add_argument("--r", type=float, default=0.05, help="cluster radius")
    p.set_defaults(func=_cmd_matern)

    p = sub.add_parser("thomas", parents=[common],
                       help="cluster process, Gaussian offspring")
    p.add_argument("--kappa", type=float, default=20.0, help="center intensity")
    p.add_argument("--alpha", type=float, default=5.0,
                   help="mean offspring per center")
    p.add_argument("--sigma", type=float, default=0.03,
                   help="offspring standard deviation")
    p.set_defaults(func=_cmd_thomas)

    p = sub.add_parser("cox", parents=[common],
                       help="Poisson process with gamma-random constant intensity")
    p.add_argument("--shape", type=float, default=4.0)
    p.add_argument("--rate", type=float, default=0.04)
    p.set_defaults(func=_cmd_cox)

    p = sub.add_parser("snox", parents=[common],
                       help="shot-noise Cox process (gamma marks)")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=800.0)
    p.add_argument("--lam", type=float, default=2.0)
    p.add_argument("--r", type=float, default=0.05, help="cluster radius")
    p.set_defaults(func=_cmd_snox)

    p = sub.add_parser("strauss-cond", parents=[common],
                       help="fixed-n pairwise interaction chain")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--r", type=float, default=0.05)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--sigma", type=float, default=0.1,
                   help="move proposal scale")
    p.set_defaults(func=_cmd_strauss_cond)

    p = sub.add_parser("strauss-rj", parents=[common],
                       help="variable-n birth/death chain")
    p.add_argument("--beta", type=float, default=40.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--r", type=float, default=0.05)
    p.add_argument("--steps", type=int, default=2000)
    p.set_defaults(func=_cmd_strauss_rj)

    p = sub.add_parser("wiener", parents=[common],
                       help="standard Brownian path on [0, 1]")
    p.add_argument("--n", type=int, default=1000, help="time steps")
    p.set_defaults(func=_cmd_wiener)

    p = sub.add_parser("fbm", parents=[common],
                       help="fractional Brownian path, exact spectral method")
    p.add_argument("--n", type=int, default=1024, help="time steps")
    p.add_argument("--H", type=float, default=0.7)
    p.set_defaults(func=_cmd_fbm)

    p = sub.add_parser("sheet", parents=[common],
                       help="fractional Brownian sheet on the unit square")
    p.add_argument("--n", type=int, default=128, help="steps per axis")
    p.add_argument("--H", type=float, default=0.7)
    p.set_defaults(func=_cmd_sheet)

    p = sub.add_parser("fbf", parents=[common],
                       help="isotropic fractional field on the quarter disk")
    p.add_argument("--m", type=int, default=64, help="rows")
    p.add_argument("--n", type=int, default=64, help="columns")
    p.add_argument("--H", type=float, default=0.8)
    p.set_defaults(func=_cmd_fbf)

    p = sub.add_parser("levy-path", parents=[common],
                       help="gamma subordinator via truncated jumps")
    p.add_argument("--alpha", type=float, default=10.0)
    p.add_argument("--eps", type=float, nargs="+", default=[0.01],
                   help="strictly decreasing truncation levels; "
                        "later levels refine the first")
    p.add_argument("--n", type=int, default=1000, help="time steps")
    p.set_defaults(func=_cmd_levy_path)

    p = sub.add_parser("levy-sheet", parents=[common],
                       help="gamma-measure kernel sheet on the unit square")
    p.add_argument("--n", type=int, default=100, help="lattice cells per axis")
    p.add_argument("--m", type=int, default=100, help="evaluation grid side")
    p.add_argument("--r", type=float, default=0.05, help="kernel radius")
    p.add_argument("--alpha", type=float, default=100.0)
    p.add_argument("--beta", type=float, default=100.0)
    p.set_defaults(func=_cmd_levy_sheet)

    p = sub.add_parser("validate", parents=[common],
                       help="run a statistical validation suite")
    p.add_argument("--suite", choices=("quick",) + tuple(_SUITES),
                   default="quick")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bench", parents=[common],
                       help="circulant vs dense scaling benchmark")
    p.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64])
    p.add_argument("--dense", action=argparse.BooleanOptionalAction,
                   default=True, help="include dense Cholesky timings")
    p.add_argument("--repeats", type=int, default=2)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return int(args.func(args))
    except SpgenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
