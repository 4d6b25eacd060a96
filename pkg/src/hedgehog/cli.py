"""
Command line front end.

Exit codes: 0 success, 1 usage error, 2 singular Gram matrix or failed repair,
3 I/O or file-format error. Data goes to files (or stdout where noted),
messages to stderr.
"""

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import constellation as cons
from . import tomography as tomo
from .flow import RepairFailed, integrate_flow, repair
from .gram import SingularGram, diagnostics, gram
from .spin import SpinLabel, unit_vector
from .sweep import COLUMNS, sweep

log = logging.getLogger("hedgehog")

EXIT_OK, EXIT_USAGE, EXIT_SINGULAR, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _spin(text):
    try:
        return SpinLabel.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _spin_list(text):
    return [_spin(part) for part in text.split(",") if part.strip()]


def _positive(kind):
    def convert(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value

    return convert


def _vector(text):
    try:
        parts = [float(x) for x in text.split(",")]
        return unit_vector(parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None


def build_parser():
    parser = _Parser(prog="hedgehog", description=__doc__.strip().splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tau_opt(p):
        p.add_argument("--tau", type=_positive(float), default=None,
                       help="basis threshold on the smallest Gram eigenvalue "
                            "(default: N_s * eps * lambda_max)")

    p = sub.add_parser("gen", help="write a constellation JSON")
    p.add_argument("--spin", type=_spin, required=True)
    p.add_argument("--kind", choices=["regular", "random", "fibonacci"], default="regular")
    p.add_argument("--seed", type=int, help="required for --kind random")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--csv", help="also write x,y,z rows here")
    p.add_argument("--plot", help="render the constellation to this image file")

    p = sub.add_parser("analyze", help="Gram diagnostics of a constellation")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", help="diagnostics JSON")
    p.add_argument("--plot", help="eigenvalue spectrum figure")
    tau_opt(p)
    p.add_argument("--tau-mode", choices=["absolute", "relative"], default="absolute",
                   help="relative means tau * lambda_max")

    p = sub.add_parser("reconstruct", help="rebuild an operator from Q-symbol samples")
    p.add_argument("-i", "--input", required=True,
                   help="sample CSV (n,x,y,z,p) or constellation JSON")
    p.add_argument("-o", "--output", required=True, help="operator JSON")
    p.add_argument("--spin", type=_spin, help="check the spin of a sample CSV")
    p.add_argument("--operator", help="operator JSON to sample (constellation input)")
    p.add_argument("--seed", type=int, help="random Hermitian operator (constellation input)")
    p.add_argument("--samples", help="write the sampled Q-symbol CSV here")
    tau_opt(p)

    p = sub.add_parser("repair", help="move spikes until the Gram matrix is invertible")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--epsilon", type=_positive(float), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--strategy", choices=["random", "gradient"], default="random")
    p.add_argument("--report", help="RepairReport JSON")
    tau_opt(p)

    p = sub.add_parser("flow", help="integrate the det G precession flow of one spike")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True, help="trajectory CSV (t,x,y,z,H)")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--start", type=_vector, help="x,y,z start (default: the spike itself)")
    p.add_argument("--dt", type=_positive(float), default=1e-3)
    p.add_argument("--steps", type=_positive(int), default=1000)
    p.add_argument("--plot", help="energy error and path figure")

    p = sub.add_parser("sweep", help="Monte-Carlo basis test over random constellations")
    p.add_argument("--spin", type=_spin_list, required=True, help="comma list, e.g. 1/2,1,3/2")
    p.add_argument("--trials", type=_positive(int), default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tau", type=_positive(float), default=1e-12,
                   help="relative threshold: pass if lambda_min > tau * lambda_max")
    p.add_argument("-o", "--output", help="summary CSV (default stdout)")
    p.add_argument("--plot", help="summary figure")
    return parser


def _print(**fields):
    for key, value in fields.items():
        print(f"{key} = {value}")


def cmd_gen(args):
    if args.kind == "regular":
        m = cons.regular_hedgehog(args.spin)
    elif args.kind == "fibonacci":
        m = cons.fibonacci_constellation(args.spin)
    else:
        if args.seed is None:
            raise UsageError("gen --kind random requires --seed")
        m = cons.random_constellation(args.spin, args.seed)
    cons.save_json(m, args.output)
    if args.csv:
        cons.save_csv(m, args.csv)
    if args.plot:
        from .plotting import plot_constellation

        plot_constellation(m, args.plot)
    log.info("wrote %d vectors to %s", len(m), args.output)
    return EXIT_OK


def cmd_analyze(args):
    m = cons.load_json(args.input)
    d = diagnostics(gram(m), args.tau, args.tau_mode == "relative")
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(d.to_dict(), fh, indent=1)
            fh.write("\n")
    if args.plot:
        from .plotting import plot_spectrum

        plot_spectrum(d, args.plot)
    _print(
        spin=m.s,
        n_points=len(m),
        det=repr(d.det),
        log_abs_det=repr(d.log_abs_det),
        min_eigenvalue=repr(d.min_eigenvalue),
        max_eigenvalue=repr(d.max_eigenvalue),
        condition_number=repr(d.condition_number),
        tau=repr(d.tau) + (" (default)" if d.tau_is_default else ""),
        singular=str(d.singular).lower(),
        is_basis=str(d.is_basis).lower(),
    )
    if not d.is_basis:
        print(f"hedgehog analyze: constellation does not give a basis "
              f"(min eigenvalue {d.min_eigenvalue:.3e} <= tau {d.tau:.3e})", file=sys.stderr)
        return EXIT_SINGULAR
    return EXIT_OK


def cmd_reconstruct(args):
    truth = None
    if args.input.lower().endswith(".csv"):
        if args.operator or args.seed is not None:
            raise UsageError("--operator/--seed apply only to a constellation JSON input")
        sample = tomo.load_samples_csv(args.input, args.spin)
        m = sample.constellation
    else:
        m = cons.load_json(args.input)
        if args.operator:
            truth, s = tomo.load_operator_json(args.operator)
            if s != m.s:
                raise cons.FormatError(f"operator spin {s} does not match constellation spin {m.s}")
        elif args.seed is not None:
            truth = tomo.random_hermitian(m.s, args.seed)
        else:
            raise UsageError("constellation input needs --operator or --seed")
        sample = tomo.sample_q(truth, m)
        if args.samples:
            tomo.save_samples_csv(sample, args.samples)
    a = tomo.reconstruct(sample, m, args.tau)
    tomo.save_operator_json(a, m.s, args.output)
    fields = {"spin": m.s, "trace": repr(float(np.trace(a).real))}
    if truth is not None:
        err = np.linalg.norm(a - truth) / max(np.linalg.norm(truth), 1.0)
        fields["round_trip_error"] = repr(float(err))
    negative = tomo.negative_eigenvalues(a)
    fields["negative_eigenvalues"] = len(negative)
    _print(**fields)
    return EXIT_OK


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def cmd_repair(args):
    m = cons.load_json(args.input)
    try:
        fixed, report = repair(m, args.epsilon, args.tau, args.seed, args.strategy)
    except RepairFailed as exc:
        if args.report:
            _write_json(exc.report.to_dict(), args.report)
        raise
    cons.save_json(fixed, args.output)
    if args.report:
        _write_json(report.to_dict(), args.report)
    _print(
        moved=" ".join(map(str, report.moved_indices)) or "-",
        total_displacement=repr(report.total_displacement),
        max_spike_displacement=repr(report.max_spike_displacement),
        final_min_eigenvalue=repr(report.final_min_eigenvalue),
        attempts=report.attempts,
    )
    return EXIT_OK


def cmd_flow(args):
    m = cons.load_json(args.input)
    if not 0 <= args.index < len(m):
        raise UsageError(f"--index must be in [0, {len(m)})")
    v0 = m.vectors[args.index] if args.start is None else args.start
    states = integrate_flow(m, args.index, v0, args.dt, args.steps)
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "y", "z", "H"])
        for st in states:
            writer.writerow([repr(st.t)] + [repr(float(c)) for c in st.v] + [repr(st.energy)])
    if args.plot:
        from .plotting import plot_trajectory

        plot_trajectory(states, args.plot)
    energy = np.array([st.energy for st in states])
    _print(
        steps=args.steps,
        energy_drift=repr(float(np.max(np.abs(energy - energy[0])))),
        max_norm_drift=repr(max(st.norm_drift for st in states)),
    )
    return EXIT_OK


def cmd_sweep(args):
    rows = sweep(args.spin, args.trials, args.seed, args.tau)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    finally:
        if out is not sys.stdout:
            out.close()
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(rows, args.plot)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "analyze": cmd_analyze,
    "reconstruct": cmd_reconstruct,
    "repair": cmd_repair,
    "flow": cmd_flow,
    "sweep": cmd_sweep,
}


def run(argv=None):
    """Parse ``argv``, run one command, return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code or EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"hedgehog {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularGram, RepairFailed) as exc:
        print(f"hedgehog {args.command}: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (OSError, cons.FormatError) as exc:
        print(f"hedgehog {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"hedgehog {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
