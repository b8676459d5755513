"""Command-line entry point: ``relu-preimage <subcommand> ...``.

Layer indices are 1-based. Exit codes: 0 ok, 1 usage / invalid input,
2 inconsistent output, 3 solver stalled, 4 I/O or file-format error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiments
from .errors import (InconsistentOutput, ModelFormatError, NotAReluOutput,
                     ProbeInfeasible, ReluPreimageError, SolverStalled)
from .linalg import RANK_TOL
from .lp import FEAS_TOL
from .model_io import (fmt, load_matrix, load_model, load_vector, load_vectors,
                       report_to_csv, sweep_to_csv)
from .omni import (is_omnidirectional, is_omnidirectional_cone,
                   is_omnidirectional_hull, is_omnidirectional_stiemke)
from .preimage import (ACT_TOL, classify_preimage, invariance_probe,
                       singleton_exhaustive)
from .stability import correlation_sweep, layer_chain, layerwise_report

EXIT_OK, EXIT_USAGE, EXIT_INCONSISTENT, EXIT_STALLED, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:num`` (inclusive linspace) or a comma list."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return np.linspace(float(a), float(b), int(n))
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")


def _tolerances(p):
    p.add_argument("--act-tol", type=positive_float, default=ACT_TOL,
                   help=f"activation threshold for y_i > 0 (default {ACT_TOL:g})")
    p.add_argument("--rank-tol", type=positive_float, default=RANK_TOL,
                   help=f"relative numerical-rank tolerance (default {RANK_TOL:g})")
    p.add_argument("--feas-tol", type=positive_float, default=FEAS_TOL,
                   help=f"LP feasibility tolerance (default {FEAS_TOL:g})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relu-preimage", description="Preimage classification and stability tools for ReLU networks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="classify the preimage of a layer output")
    p.add_argument("--model", required=True)
    p.add_argument("--layer", type=int, default=1, help="1-based layer index (default 1)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="network input vector file; propagated to the layer")
    src.add_argument("--activation", help="layer output vector y to classify directly")
    p.add_argument("--exhaustive", action="store_true",
                   help="also run the vertex search for singletons cut out by inequalities")
    _tolerances(p)

    p = sub.add_parser("omni", help="omnidirectionality verdict for a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--method", choices=("combined", "hull", "cone", "stiemke"), default="combined")
    _tolerances(p)

    p = sub.add_parser("probe", help="invariance LP inside a layer preimage")
    p.add_argument("--model", required=True)
    p.add_argument("--layer", type=int, default=1)
    p.add_argument("--x-star", required=True, help="input to the chosen layer")
    p.add_argument("--c", required=True, help="objective direction vector file")
    p.add_argument("--lower", type=float, default=0.0)
    p.add_argument("--upper", type=float, default=1.0)
    _tolerances(p)

    p = sub.add_parser("spectrum", help="per-layer singular-value report (CSV)")
    p.add_argument("--model", required=True)
    p.add_argument("--inputs", required=True, help="CSV batch of network inputs")
    p.add_argument("--out", help="write CSV here instead of stdout")
    _tolerances(p)

    p = sub.add_parser("corr-sweep", help="weak-correlation count curve for one input (CSV)")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--layer", type=int, default=1)
    p.add_argument("--grid", type=parse_grid, default=parse_grid("0:10:101"),
                   help="start:stop:num or comma list (default 0:10:101)")
    p.add_argument("--out")
    _tolerances(p)

    p = sub.add_parser("trend", help="preimage-kind fractions of random Gaussian layers (CSV)")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, nargs="+", help="row counts (default n+1 .. 4n)")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--regime", choices=experiments.REGIMES, default="gaussian-input")
    _tolerances(p)

    p = sub.add_parser("crosscheck", help="hull-LP vs cone-test agreement on random matrices (JSON)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _tolerances(p)
    return parser


def _layer(model, index: int):
    if not 1 <= index <= len(model.layers):
        raise UsageError(f"layer index {index} outside 1..{len(model.layers)}")
    return model.layers[index - 1]


def _emit(text: str, out_path=None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def cmd_classify(args):
    model = load_model(args.model)
    layer = _layer(model, args.layer)
    if args.input:
        h = model.forward(load_vector(args.input), upto=args.layer - 1)
        y = layer.forward(h)
    else:
        y = load_vector(args.activation)
    result = classify_preimage(layer, y, act_tol=args.act_tol, rank_tol=args.rank_tol,
                               feas_tol=args.feas_tol)
    out = result.to_dict()
    if args.exhaustive:
        out["singleton_exhaustive"] = singleton_exhaustive(layer, y, act_tol=args.act_tol,
                                                           rank_tol=args.rank_tol)
    _emit(_dumps(out))


def cmd_omni(args):
    A = load_matrix(args.matrix)
    fn = {"combined": is_omnidirectional, "hull": is_omnidirectional_hull,
          "cone": is_omnidirectional_cone, "stiemke": is_omnidirectional_stiemke}[args.method]
    _emit(_dumps(fn(A, feas_tol=args.feas_tol).to_dict()))


def cmd_probe(args):
    model = load_model(args.model)
    layer = _layer(model, args.layer)
    x_star = load_vector(args.x_star)
    c = load_vector(args.c)
    x = invariance_probe(layer, x_star, c, args.lower, args.upper, act_tol=args.act_tol,
                         feas_tol=args.feas_tol)
    residual = float(np.max(np.abs(layer.forward(x) - layer.forward(x_star)), initial=0.0))
    _emit(_dumps({"x": x.tolist(), "objective": float(c @ x),
                  "objective_x_star": float(c @ x_star), "membership_residual": residual}))


def cmd_spectrum(args):
    model = load_model(args.model)
    inputs = load_vectors(args.inputs)
    report = layerwise_report(model, inputs, act_tol=args.act_tol)
    _emit(report_to_csv(report), args.out)


def cmd_corr_sweep(args):
    model = load_model(args.model)
    _layer(model, args.layer)
    x = load_vector(args.input)
    A, removed = layer_chain(model, x, args.layer, act_tol=args.act_tol)
    sweep = correlation_sweep(A, removed, args.grid)
    _emit(sweep_to_csv(sweep), args.out)


def cmd_trend(args):
    ms = args.m or list(range(args.n + 1, 4 * args.n + 1))
    rows = experiments.finite_preimage_trend(args.n, ms, args.trials, args.seed, regime=args.regime,
                                             act_tol=args.act_tol, feas_tol=args.feas_tol)
    lines = ["m,n,trials,singleton,finite_volume,infinite_volume,finite\n"]
    for r in rows:
        lines.append(f"{r['m']},{r['n']},{r['trials']},{r['singleton']:.6g},{r['finite_volume']:.6g},"
                     f"{r['infinite_volume']:.6g},{r['finite']:.6g}\n")
    _emit("".join(lines))


def cmd_crosscheck(args):
    summary = experiments.omni_crosscheck(args.trials, args.seed, feas_tol=args.feas_tol)
    summary.pop("records", None)
    _emit(_dumps(summary))


COMMANDS = {"classify": cmd_classify, "omni": cmd_omni, "probe": cmd_probe,
            "spectrum": cmd_spectrum, "corr-sweep": cmd_corr_sweep, "trend": cmd_trend,
            "crosscheck": cmd_crosscheck}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (InconsistentOutput, NotAReluOutput) as e:
        print(f"inconsistent output: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (SolverStalled, ProbeInfeasible) as e:
        print(f"solver: {e}", file=sys.stderr)
        return EXIT_STALLED
    except (OSError, ModelFormatError) as e:
        print(f"i/o: {e}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ReluPreimageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
