"""Command-line interface: gen-matrix, gen-signal, decode, sweep, plot."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import experiment, graph, signals
from .decoders import EPS_EQ_DEFAULT, MAX_ITER_DEFAULT, decode
from .experiment import SweepConfig, emit_results, parse_results, sweep, write_plot


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _resolve_matrix(args) -> graph.SensingMatrix:
    if getattr(args, "matrix", None):
        return graph.load_alist(args.matrix)
    if args.type == "regular":
        if args.n is None or args.m is None or args.dv is None:
            raise ValueError("regular matrices need --n, --m and --dv")
        return graph.generate_regular(args.n, args.m, args.dv,
                                      seed=args.gen_seed,
                                      avoid_4cycles=args.avoid_4cycles)
    if args.type == "qc":
        if not args.base_file:
            raise ValueError("qc matrices need --base-file")
        base, z_file = graph.load_base_matrix(args.base_file)
        return graph.expand_qc(base, args.z if args.z is not None else z_file)
    raise ValueError("specify --matrix or a generator --type")


def _support_size(n_vars: int, k: float) -> int:
    if k < 0:
        raise ValueError("--k must be nonnegative")
    if k < 1.0:
        return int(round(k * n_vars))
    if k != int(k):
        raise ValueError("--k above 1 must be an integer support size")
    return int(k)


def _parse_k_values(args, n_vars=None) -> tuple[float, ...]:
    if args.k_list:
        return tuple(float(tok) for tok in args.k_list.split(",") if tok.strip())
    if args.k_min is None or args.k_max is None:
        raise ValueError("provide --k-list or --k-min/--k-max/--k-step")
    step = args.k_step
    values = []
    k = args.k_min
    while k <= args.k_max + 1e-12:
        values.append(round(k, 12))
        k += step
    return tuple(values)


def cmd_gen_matrix(args) -> int:
    matrix = _resolve_matrix(args)
    graph.save_alist(matrix, args.out)
    print(f"wrote {matrix.n_checks}x{matrix.n_vars} matrix "
          f"({matrix.n_edges} edges, {graph.count_4cycles(matrix)} length-4 cycles) "
          f"to {args.out}")
    return 0


def cmd_gen_signal(args) -> int:
    support_size = _support_size(args.n, args.k)
    signal = signals.generate_signal(args.n, support_size, args.seed)
    signals.save_signal(signal, args.out)
    print(f"wrote signal N={signal.length} K={signal.support_size} to {args.out}")
    return 0


def _load_measurements(path) -> np.ndarray:
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ValueError(f"{path} line {i}: not a number") from None
    return np.asarray(values, dtype=np.float64)


def cmd_decode(args) -> int:
    matrix = graph.load_alist(args.matrix)
    truth = None
    if args.signal:
        truth = signals.load_signal(args.signal)
        y = graph.measure(matrix, truth)
    elif args.y_file:
        y = _load_measurements(args.y_file)
    else:
        raise ValueError("provide --signal or --y-file")
    result = decode(args.algo, matrix, y, max_iter=args.max_iter,
                    eps=args.tol, seed=args.seed)
    recovered = int(result.verified_history[-1].sum()) if result.iterations else 0
    print(f"algorithm={args.algo} converged={result.converged} "
          f"iterations={result.iterations} recovered={recovered}/{matrix.n_vars}")
    if truth is not None:
        ok = signals.reconstruction_success(truth, result.estimate)
        print(f"reconstruction_success={ok}")
    if args.trace:
        with open(args.trace, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(result.trace_lines()) + "\n")
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            for v in result.estimate:
                fh.write(f"{v:.17g}\n")
    return 0


def cmd_sweep(args) -> int:
    matrix = _resolve_matrix(args)
    config = SweepConfig(
        matrix=matrix,
        k_values=_parse_k_values(args),
        algorithms=tuple(tok for tok in args.algos.split(",") if tok.strip()),
        max_iter=args.max_iter,
        min_failures=args.min_failures,
        max_trials=args.max_trials,
        seed=args.seed,
        success_tol=args.success_tol,
        eps=args.tol,
    )
    points = sweep(config)
    emit_results(points, args.out, plot_path=args.plot)
    print(f"wrote {len(points)} sweep points to {args.out}")
    return 0


def cmd_plot(args) -> int:
    with open(args.infile, "r", encoding="ascii") as fh:
        points = parse_results(fh.read())
    write_plot(points, args.out)
    print(f"wrote plot of {len(points)} points to {args.out}")
    return 0


def _add_generator_flags(sub) -> None:
    sub.add_argument("--type", choices=("regular", "qc"),
                     help="generate the matrix instead of reading --matrix")
    sub.add_argument("--n", type=_positive_int, help="number of variables (columns)")
    sub.add_argument("--m", type=_positive_int, help="number of checks (rows)")
    sub.add_argument("--dv", type=_positive_int, help="variable degree")
    sub.add_argument("--base-file", help="base matrix file for --type qc")
    sub.add_argument("--z", type=_positive_int,
                     help="lift size override for --type qc (defaults to the file's)")
    sub.add_argument("--avoid-4cycles", action="store_true",
                     help="regenerate until the matrix has no length-4 cycles")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipvb",
        description="Message-passing reconstruction of nonnegative sparse "
                    "signals over binary LDPC sensing matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-matrix", help="generate a sensing matrix (alist output)")
    _add_generator_flags(p)
    p.add_argument("--seed", dest="gen_seed", type=int, default=0,
                   help="generator seed")
    p.add_argument("--out", required=True, help="output alist path")
    p.set_defaults(func=cmd_gen_matrix, matrix=None)

    p = sub.add_parser("gen-signal", help="generate a random sparse signal")
    p.add_argument("--n", type=_positive_int, required=True, help="signal length")
    p.add_argument("--k", type=float, required=True,
                   help="support size: a fraction below 1 or an integer count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output signal path")
    p.set_defaults(func=cmd_gen_signal)

    p = sub.add_parser("decode", help="decode one instance")
    p.add_argument("--matrix", required=True, help="alist matrix path")
    p.add_argument("--signal", help="signal file (measurements are computed)")
    p.add_argument("--y-file", help="measurement file, one value per line")
    p.add_argument("--algo", choices=("ip", "vb", "vbip"), required=True)
    p.add_argument("--max-iter", type=_positive_int, default=MAX_ITER_DEFAULT)
    p.add_argument("--tol", type=float, default=EPS_EQ_DEFAULT,
                   help="equality threshold relative to max(1, |y|_inf)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", help="write the per-iteration trace to this path")
    p.add_argument("--out", help="write the estimate, one value per line")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="Monte Carlo success-probability sweep")
    p.add_argument("--matrix", help="alist matrix path")
    _add_generator_flags(p)
    p.add_argument("--gen-seed", type=int, default=0,
                   help="seed for generated matrices")
    p.add_argument("--k-list", help="comma-separated sparsity levels")
    p.add_argument("--k-min", type=float)
    p.add_argument("--k-max", type=float)
    p.add_argument("--k-step", type=float, default=0.05)
    p.add_argument("--algos", default="ip,vb,vbip")
    p.add_argument("--max-iter", type=_positive_int, default=MAX_ITER_DEFAULT)
    p.add_argument("--min-failures", type=_positive_int, default=100)
    p.add_argument("--max-trials", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--success-tol", type=float, default=1e-6)
    p.add_argument("--tol", type=float, default=EPS_EQ_DEFAULT)
    p.add_argument("--out", required=True, help="results table path")
    p.add_argument("--plot", help="also write an SVG plot here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="plot a results table")
    p.add_argument("--in", dest="infile", required=True, help="results table path")
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
