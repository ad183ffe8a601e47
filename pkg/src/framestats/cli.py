"""Command-line surface: synth, test, frame, order and fit.

Every command prints a deterministic JSON run report (stable key
order, floats at 12 significant digits) that validates against the
``report_schema.json`` shipped with the package.  Exit codes: 0 on
success (a failed uniformity rejection is data, not failure), 1 for
usage errors, 2 for data/schema errors, 3 for numeric-domain errors.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__, dataio, frames, order, uniformity, watson
from .core import DiscreteMeasure, SampleSet, as_unit_vector
from .exceptions import ConvergenceError, DataFormatError, DomainError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DOMAIN = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _round_floats(obj):
    """Recursively round floats to 12 significant digits for stable JSON."""
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        return float(f"{v:.12g}")
    if isinstance(obj, np.ndarray):
        return [_round_floats(v) for v in obj.tolist()]
    return obj


def render_report(command, inputs, results, seed=None):
    """Serialize a run report deterministically."""
    report = {
        "command": command,
        "inputs": _round_floats(inputs),
        "results": _round_floats(results),
        "seed": None if seed is None else int(seed),
        "tool_version": __version__,
    }
    return json.dumps(report, indent=2, sort_keys=True)


def _angle_scale(args):
    return math.pi / 180.0 if getattr(args, "degrees", False) else 1.0


def _parse_float_list(text, flag):
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise DomainError(f"{flag} expects a comma-separated list of numbers")
    if not values:
        raise DomainError(f"{flag} received an empty list")
    return values


# ---------------------------------------------------------------------------
# synth


def _synth_mixture(args, scale):
    if args.model == "fntf-mixture":
        if args.components is None:
            raise DomainError("--components is required for model 'fntf-mixture'")
        directors = frames.harmonic_fntf_r2(args.components)
        return watson.WatsonMixture(directors, args.kappa)
    if args.director_angles is None:
        raise DomainError("--director-angles is required for model 'mixture'")
    angles = [a * scale for a in _parse_float_list(args.director_angles, "--director-angles")]
    directors = np.column_stack([np.cos(angles), np.sin(angles)])
    weights = None
    if args.weights is not None:
        w = np.asarray(_parse_float_list(args.weights, "--weights"))
        weights = w / np.sum(w)
    if args.kappas is not None:
        kappas = _parse_float_list(args.kappas, "--kappas")
    else:
        kappas = args.kappa
    return watson.WatsonMixture(directors, kappas, weights)


def cmd_synth(args):
    scale = _angle_scale(args)
    if args.n < 1:
        raise DomainError("--n must be at least 1")
    if args.model == "uniform":
        sample = uniformity.sample_uniform(args.n, args.dim, args.seed, threads=args.threads)
        model_desc = {"model": "uniform", "dim": args.dim}
    elif args.model == "watson":
        if args.kappa is None:
            raise DomainError("--kappa is required for model 'watson'")
        if args.director is not None:
            axis = as_unit_vector(_parse_float_list(args.director, "--director"))
        else:
            ang = args.director_angle * scale
            axis = np.array([math.cos(ang), math.sin(ang)])
        params = watson.WatsonParams(axis, args.kappa)
        sample = watson.sample_watson(params, args.n, args.seed, threads=args.threads)
        model_desc = {
            "model": "watson",
            "kappa": args.kappa,
            "director": axis,
            "dim": int(axis.size),
        }
    else:
        if args.kappa is None and args.kappas is None:
            raise DomainError(f"--kappa is required for model '{args.model}'")
        mix = _synth_mixture(args, scale)
        sample = watson.sample_mixture(mix, args.n, args.seed, threads=args.threads)
        model_desc = {
            "model": args.model,
            "components": int(mix.n_components),
            "kappa": mix.concentrations,
            "weights": mix.weights,
            "director_angles": np.mod(
                np.arctan2(mix.directors[:, 1], mix.directors[:, 0]), math.pi
            ),
            "dim": int(mix.dim),
        }
    dataio.write_sample_csv(args.out, sample.points)
    inputs = dict(model_desc)
    inputs.update({"n": args.n, "out": args.out, "threads": args.threads})
    results = {"path": args.out, "rows": int(sample.n), "dim": int(sample.dim)}
    return render_report("synth", inputs, results, seed=args.seed)


# ---------------------------------------------------------------------------
# test


def cmd_test(args):
    if not 0.0 < args.level < 1.0:
        raise DomainError("--level must lie in (0, 1)")
    sample = dataio.read_sample_csv(args.infile)
    methods = list(uniformity.METHODS) if args.method == "all" else [args.method]
    tests = {}
    for method in methods:
        res = uniformity.run_test(sample, method)
        tests[method] = {
            "statistic": res.statistic,
            "df": res.df,
            "p_value": res.p_value,
            "reject": bool(res.reject(args.level)),
        }
    inputs = {"in": args.infile, "method": args.method, "level": args.level}
    results = {
        "n": int(sample.n),
        "dim": int(sample.dim),
        "level": args.level,
        "tests": tests,
    }
    return render_report("test", inputs, results)


# ---------------------------------------------------------------------------
# frame


def cmd_frame(args):
    action = args.action
    inputs = {"action": action}
    if action == "harmonic":
        vectors = frames.harmonic_fntf_r2(args.n)
        angles = np.arange(args.n) * (math.pi / args.n)
        if args.out:
            dataio.write_sample_csv(args.out, vectors)
        results = {
            "angles": angles,
            "defect": frames.fntf_defect_r2(angles),
            "out": args.out,
        }
        inputs["n"] = args.n
        return render_report("frame", inputs, results)

    sample = dataio.read_sample_csv(args.infile)
    inputs["in"] = args.infile
    if action == "bounds":
        fb = frames.frame_bounds(sample.points)
        results = {
            "lower": fb.lower,
            "upper": fb.upper,
            "is_frame": fb.is_frame,
            "is_tight": fb.is_tight,
        }
    elif action == "check":
        inputs["tol"] = args.tol
        mu = DiscreteMeasure.counting(sample.points)
        results = {
            "is_fntf": frames.is_fntf(sample.points, args.tol),
            "moment_deviation": frames.moment_deviation(mu),
        }
    elif action == "potential":
        report = frames.potential_report(DiscreteMeasure.counting(sample.points))
        results = {
            "frame_potential": report.frame_potential,
            "riesz_potential": report.riesz_potential,
            "fractional": report.fractional,
            "moment_deviation": report.moment_deviation,
        }
    else:  # tighten
        inputs.update(
            {"max_steps": args.max_steps, "step_size": args.step_size, "tol": args.tol}
        )
        res = frames.gradient_tighten(
            sample.points,
            max_steps=args.max_steps,
            step_size=args.step_size,
            tol=args.tol,
        )
        if args.out:
            dataio.write_sample_csv(args.out, res.points)
        results = {
            "final_potential": res.final_potential,
            "target": 1.0 / sample.dim,
            "converged": res.converged,
            "accepted_steps": int(res.trace.shape[0] - 1),
            "trace": res.trace,
            "out": args.out,
        }
    return render_report("frame", inputs, results)


# ---------------------------------------------------------------------------
# order


def cmd_order(args):
    rods = dataio.read_rods_csv(args.infile)
    axes = np.column_stack(
        [np.cos([r.theta for r in rods]), np.sin([r.theta for r in rods])]
    )
    global_res = order.order_parameter(SampleSet(axes))
    field = order.local_order_field(
        rods, radius=args.radius, cell_size=args.cell_size, min_count=args.min_count
    )
    if args.field_out:
        dataio.write_field_csv(args.field_out, field)
    populated = int(np.sum(~np.isnan(field.order_parameter)))
    inputs = {
        "in": args.infile,
        "radius": args.radius,
        "cell_size": args.cell_size,
        "min_count": args.min_count,
    }
    results = {
        "n_rods": len(rods),
        "order_parameter": global_res.order_parameter,
        "director_angle": global_res.director_angle,
        "field": {
            "cells": int(field.count.size),
            "populated": populated,
            "out": args.field_out,
        },
    }
    return render_report("order", inputs, results)


# ---------------------------------------------------------------------------
# fit


def cmd_fit(args):
    sample = dataio.read_sample_csv(args.infile)
    fit = watson.fit_watson_mixture_em(
        sample,
        args.components,
        shared_kappa=args.shared_kappa,
        equal_weights=args.equal_weights,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed,
    )
    mix = fit.mixture
    widths = [w for _, w in watson.mode_widths(mix)]
    angles = np.mod(np.arctan2(mix.directors[:, 1], mix.directors[:, 0]), math.pi)
    inputs = {
        "in": args.infile,
        "components": args.components,
        "shared_kappa": args.shared_kappa,
        "equal_weights": args.equal_weights,
        "max_iters": args.max_iters,
        "tol": args.tol,
    }
    results = {
        "director_angles": angles,
        "kappa": mix.concentrations,
        "weights": mix.weights,
        "widths": widths,
        "log_likelihood": fit.log_likelihood,
        "iterations": int(fit.n_iter),
        "converged": bool(fit.converged),
        "degenerate": list(fit.degenerate),
        "capped": list(fit.capped),
    }
    return render_report("fit", inputs, results, seed=args.seed)


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = _Parser(
        prog="framestats",
        description="Directional uniformity tests, tight-frame potentials and "
        "Watson mixture modelling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="synthesize a sample CSV")
    p.add_argument(
        "--model",
        required=True,
        choices=["uniform", "watson", "mixture", "fntf-mixture"],
    )
    p.add_argument("--n", type=int, required=True, help="number of rows")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--dim", type=int, default=2, help="ambient dimension (uniform)")
    p.add_argument("--kappa", type=float, default=None, help="shared concentration")
    p.add_argument("--kappas", default=None, help="per-component concentrations")
    p.add_argument("--components", type=int, default=None, help="FNTF director count")
    p.add_argument("--director-angle", type=float, default=0.0, help="watson axis angle")
    p.add_argument("--director", default=None, help="watson axis coordinates (comma list)")
    p.add_argument("--director-angles", default=None, help="mixture axis angles (comma list)")
    p.add_argument("--weights", default=None, help="mixture weights (comma list)")
    p.add_argument("--degrees", action="store_true", help="angles are degrees")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("test", help="run uniformity tests on a sample CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument(
        "--method",
        default="all",
        choices=list(uniformity.METHODS) + ["all"],
    )
    p.add_argument("--level", type=float, default=0.05)
    p.set_defaults(handler=cmd_test)

    p = sub.add_parser("frame", help="frame bounds, FNTF checks and potentials")
    p.add_argument(
        "action", choices=["bounds", "check", "harmonic", "tighten", "potential"]
    )
    p.add_argument("--in", dest="infile", help="input vector CSV")
    p.add_argument("--n", type=int, default=3, help="harmonic direction count")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--step-size", type=float, default=0.5)
    p.add_argument("--out", default=None, help="output CSV for vectors")
    p.set_defaults(handler=cmd_frame)

    p = sub.add_parser("order", help="global and local nematic order of rods")
    p.add_argument("--in", dest="infile", required=True, help="rod CSV (x,y,theta)")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--cell-size", type=float, required=True)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--field-out", default=None, help="per-cell field CSV")
    p.set_defaults(handler=cmd_order)

    p = sub.add_parser("fit", help="fit a planar Watson mixture by EM")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--components", type=int, required=True)
    p.add_argument(
        "--per-component-kappa",
        dest="shared_kappa",
        action="store_false",
        help="fit one concentration per component instead of a shared one",
    )
    p.add_argument("--equal-weights", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(handler=cmd_fit)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "frame" and args.action != "harmonic" and not args.infile:
        print("framestats frame: --in is required for this action", file=sys.stderr)
        return EXIT_USAGE

    try:
        report = args.handler(args)
    except DataFormatError as exc:
        print(f"framestats: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"framestats: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DomainError, ConvergenceError) as exc:
        print(f"framestats: numeric domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(report)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
