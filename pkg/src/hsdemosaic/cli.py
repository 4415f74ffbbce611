"""Command-line interface.

Every command accepts ``--config FILE`` with ``key = value`` lines.  A
setting given as a flag wins over the config file, which wins over the
built-in default.
"""

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .energy import RegWeights
from .io import load_config, load_cube, load_mosaic, save_cube, save_mosaic
from .metrics import evaluate
from .msfa import MsfaPattern, bilinear_demosaic, load_pattern, mosaic_apply
from .phantom import KINDS, PhantomSpec, gen_phantom
from .ranking import fit_bradley_terry, load_vote_table
from .render import default_projection, write_rgb
from .solver import SolverConfig, solve
from .spectral import distance_matrix, gaussian_responses, load_responses, weight_matrix

logger = logging.getLogger("hsdemosaic")

DEFAULTS = {
    "lambda_tik": 1.0,
    "lambda_tv": 1e-3,
    "lambda_corr": 1.0,
    "tau": 0.1,
    "eps_tv": 1e-6,
    "eps_var": 1e-12,
    "step_size": 1e-3,
    "beta1": 0.5,
    "beta2": 0.99,
    "max_iters": 2000,
    "stop_tol": 1e-6,
    "log_every": 10,
    "peak": 1.0,
    "seed": 0,
}
INT_KEYS = {"max_iters", "log_every", "seed"}


class CliError(Exception):
    pass


def resolve(args, key):
    """Flag, then config file, then default."""
    value = getattr(args, key, None)
    if value is None:
        value = args.config_values.get(key, DEFAULTS[key])
    try:
        return int(value) if key in INT_KEYS else float(value)
    except ValueError:
        raise CliError(f"invalid value for {key}: {value!r}") from None


def _pattern_for(args, n_bands):
    if args.pattern:
        return load_pattern(args.pattern)
    n = math.isqrt(n_bands)
    if n * n != n_bands:
        raise CliError(f"no default pattern for {n_bands} bands; pass --pattern")
    return MsfaPattern.default(n)


def _responses_for(args, n_bands):
    if getattr(args, "responses", None):
        responses = load_responses(args.responses)
        if responses.n_bands != n_bands:
            raise CliError(f"{args.responses} has {responses.n_bands} curves, need {n_bands}")
        return responses
    return gaussian_responses(np.linspace(460.0, 630.0, n_bands))


def _reg_weights(args):
    return RegWeights(**{k: resolve(args, k) for k in
                         ("lambda_tik", "lambda_tv", "lambda_corr", "tau", "eps_var", "eps_tv")})


def _solver_config(args):
    return SolverConfig(**{k: resolve(args, k) for k in
                           ("max_iters", "step_size", "beta1", "beta2", "stop_tol", "log_every")})


def _pattern_for_snapshot(args):
    # a snapshot does not record its band count; without a file assume 4x4
    return load_pattern(args.pattern) if args.pattern else MsfaPattern.default(4)


# -- commands -------------------------------------------------------------

def cmd_phantom(args):
    spec = PhantomSpec(width=args.width, height=args.height, bands=args.bands, kind=args.kind,
                       seed=resolve(args, "seed"), blur_sigma=args.blur, noise_sigma=args.noise)
    save_cube(gen_phantom(spec), args.output)


def cmd_mosaic(args):
    cube, value_range = load_cube(args.cube, return_range=True)
    pattern = _pattern_for(args, cube.shape[2])
    save_mosaic(mosaic_apply(cube, pattern), args.output, value_range)


def cmd_demosaic(args):
    snapshot, value_range = load_cube(args.snapshot, return_range=True)
    if snapshot.shape[2] != 1:
        raise CliError(f"{args.snapshot} is not a single-band snapshot")
    snapshot = snapshot[:, :, 0]
    pattern = _pattern_for_snapshot(args)
    if args.method == "linear":
        cube = bilinear_demosaic(snapshot, pattern)
    else:
        rw = _reg_weights(args)
        weights = weight_matrix(_responses_for(args, pattern.n_bands), rw.tau)
        cube, trace = solve(snapshot, pattern, weights, rw, _solver_config(args))
        logger.info("solver stopped after %d iterations (%s)", trace.n_iter, trace.stop_reason)
        if args.trace:
            trace.to_csv(args.trace)
    save_cube(cube, args.output, value_range)


def cmd_trace_export(args):
    snapshot = load_mosaic(args.snapshot)
    pattern = _pattern_for_snapshot(args)
    rw = _reg_weights(args)
    weights = weight_matrix(_responses_for(args, pattern.n_bands), rw.tau)
    _, trace = solve(snapshot, pattern, weights, rw, _solver_config(args))
    trace.to_csv(args.output)


def cmd_weights(args):
    responses = _responses_for(args, args.bands)
    tau = resolve(args, "tau")
    matrix = distance_matrix(responses) if args.distances else weight_matrix(responses, tau)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["band"] + [f"b{c}" for c in range(matrix.shape[0])])
        for c, row in enumerate(matrix):
            writer.writerow([f"b{c}"] + [repr(float(v)) for v in row])
    finally:
        if args.output:
            out.close()


def _eval_pairs(test, ref):
    test, ref = Path(test), Path(ref)
    if test.is_dir():
        pairs = []
        for path in sorted(test.glob("*.hsc")):
            if not (ref / path.name).exists():
                raise CliError(f"no reference {ref / path.name} for {path}")
            pairs.append((path.stem, path, ref / path.name))
        if not pairs:
            raise CliError(f"no .hsc files in {test}")
        return pairs
    return [(test.stem, test, ref)]


def cmd_eval(args):
    peak = resolve(args, "peak")
    rows = []
    for name, test, ref in _eval_pairs(args.test, args.ref):
        report = evaluate(load_cube(test).astype(float), load_cube(ref).astype(float), peak)
        rows.append([name, repr(report.ssim), repr(report.psnr), repr(report.sam)])
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["image", "ssim", "psnr_db", "sam_rad"])
        writer.writerows(rows)
    finally:
        if args.output:
            out.close()


def cmd_rank(args):
    result = fit_bradley_terry(load_vote_table(args.votes), max_iters=args.max_rank_iters,
                               tol=args.tol)
    names = args.names.split(",") if args.names else [f"m{i}" for i in range(len(result.pi))]
    if len(names) != len(result.pi):
        raise CliError(f"{len(names)} names for {len(result.pi)} methods")
    writer = csv.writer(sys.stdout)
    writer.writerow(["method", "pi"])
    for name, p in zip(names, result.pi):
        writer.writerow([name, f"{p:.6f}"])
    if not result.converged:
        logger.warning("Bradley-Terry did not converge in %d sweeps", result.n_iter)


def cmd_rgb(args):
    cube = load_cube(args.cube).astype(float)
    proj = default_projection(np.linspace(460.0, 630.0, cube.shape[2]))
    write_rgb(cube, proj, args.output)


# -- parser ---------------------------------------------------------------

def _add_energy_flags(p):
    for key in ("lambda_tik", "lambda_tv", "lambda_corr", "tau", "eps_tv", "eps_var",
                "step_size", "beta1", "beta2", "stop_tol"):
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=float, default=None)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    p.add_argument("--log-every", dest="log_every", type=int, default=None)
    p.add_argument("--pattern", help="pattern file: 'n C' then n rows of band indices")
    p.add_argument("--responses", help="response CSV: wavelength_nm,b0,...")


def build_parser():
    parser = argparse.ArgumentParser(prog="hsdemosaic", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file overriding defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", parents=[common], help="render a synthetic ground-truth cube")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--kind", choices=KINDS, default="edges")
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--bands", type=int, default=16)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--blur", type=float, default=1.0, help="optical blur sigma in pixels")
    p.add_argument("--noise", type=float, default=0.0)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("mosaic", parents=[common], help="simulate the snapshot of a cube")
    p.add_argument("cube")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--pattern")
    p.set_defaults(func=cmd_mosaic)

    p = sub.add_parser("demosaic", parents=[common], help="reconstruct a cube from a snapshot")
    p.add_argument("snapshot")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--method", choices=("linear", "var"), default="var")
    p.add_argument("--trace", help="write the solver trace CSV here (var only)")
    _add_energy_flags(p)
    p.set_defaults(func=cmd_demosaic)

    p = sub.add_parser("trace-export", parents=[common],
                       help="run the variational solver and write its energy trace CSV")
    p.add_argument("snapshot")
    p.add_argument("-o", "--output", required=True)
    _add_energy_flags(p)
    p.set_defaults(func=cmd_trace_export)

    p = sub.add_parser("weights", parents=[common], help="band-pair weight matrix as CSV")
    p.add_argument("-o", "--output")
    p.add_argument("--bands", type=int, default=16)
    p.add_argument("--responses")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--distances", action="store_true",
                   help="emit the raw transport distances in nm instead of weights")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("eval", parents=[common], help="SSIM, PSNR and SAM against a reference")
    p.add_argument("test", help="cube file, or directory of .hsc files")
    p.add_argument("ref", help="reference cube file, or directory with matching names")
    p.add_argument("-o", "--output")
    p.add_argument("--peak", type=float, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rank", parents=[common], help="fit Bradley-Terry to a vote table")
    p.add_argument("votes")
    p.add_argument("--names", help="comma-separated method names")
    p.add_argument("--max-rank-iters", type=int, default=10000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("rgb", parents=[common], help="pseudo-sRGB preview (PNG or PPM)")
    p.add_argument("cube")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_rgb)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.config_values = load_config(args.config) if args.config else {}
        unknown = set(args.config_values) - set(DEFAULTS)
        if unknown:
            raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
        args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"hsdemosaic {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
