"""Command-line harness.

Subcommands: ``gs`` (Ising ground state to a network container), ``quench``
(local quench profile), ``fidelity`` (one fidelity between two saved
networks), ``compare`` (window fidelities vs window size for two fields),
``converge-chi`` and ``converge-ttn`` (convergence diagnostics), and
``selftest`` (the oracle property suites).  Exit codes: 0 success, 1
validation error, 2 numeric failure.  Thread count for independent probes
comes from the ``TNFID_THREADS`` environment variable.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import NumericError, ValidationError
from .fidelity import disjoint_window_fidelity, half_system_fidelity, window_fidelity
from .ising import IsingSpec, ising_terms
from .mps import EvolutionConfig, MatrixProductState, chain_energy
from .tensor import TruncationSpec
from .ttn import Branch, TreeTensorNetwork, branch_fidelity
from .experiments import (
    PAULI_BY_NAME,
    ExperimentRecord,
    QuenchConfig,
    ising_ground_state_mps,
    run_convergence_chi,
    run_convergence_ttn,
    run_quench,
    run_scale_compare,
    selftest_suites,
)
from .serialization import load_network, save_network


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="tnfid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gs", help="Ising ground state as an MPS container")
    p.add_argument("--h-field", type=float, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--chi", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-offset", action="store_true", help="drop the constant energy offset")

    p = sub.add_parser("quench", help="local quench fidelity profiles")
    p.add_argument("--ground-state", required=True)
    p.add_argument("--op", default="Z", choices=sorted(PAULI_BY_NAME))
    p.add_argument("--site", type=int, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--t-samples", default=None, help="comma list of sample times (default: integers up to t-max)")
    p.add_argument("--probes", default="two-site,left-half,right-half")
    p.add_argument("--chi", type=int, default=50)
    p.add_argument("--h-field", type=float, default=1.0)
    p.add_argument("--no-offset", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("fidelity", help="one subsystem fidelity between two saved networks")
    p.add_argument("--state-a", required=True)
    p.add_argument("--state-b", required=True)
    p.add_argument("--kind", required=True, choices=["half", "window", "disjoint"])
    p.add_argument("--cut", type=int, default=None)
    p.add_argument("--window", default=None, help="X0,X1 site bounds")
    p.add_argument("--side", default="left", choices=["left", "right"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("compare", help="window fidelities between two fields' ground states")
    p.add_argument("--h1", type=float, required=True)
    p.add_argument("--h2", type=float, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--chi", type=int, required=True)
    p.add_argument("--max-window", type=int, required=True)
    p.add_argument("--anchor", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("converge-chi", help="window-fidelity deficit between bond dimensions")
    p.add_argument("--h-field", type=float, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--chi-a", type=int, required=True)
    p.add_argument("--chi-b", type=int, required=True)
    p.add_argument("--max-window", type=int, required=True)
    p.add_argument("--anchor", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("converge-ttn", help="per-site branch fidelities along a TTN optimization")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--chi", type=int, required=True)
    p.add_argument("--sweeps", type=int, required=True)
    p.add_argument("--lag", type=int, default=10)
    p.add_argument("--h-field", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("selftest", help="run the oracle property suites")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_gs(args) -> int:
    state = ising_ground_state_mps(
        args.h_field, args.length, args.chi, include_offset=not args.no_offset
    )
    save_network(args.out, state)
    terms = ising_terms(IsingSpec(args.h_field, args.length, include_offset=not args.no_offset))
    energy = chain_energy(state, terms)
    print(f"ground state saved to {args.out}")
    print(f"energy={energy:.12g} per_site={energy / args.length:.12g} max_bond={state.max_bond}")
    return 0


def _cmd_quench(args) -> int:
    ground = load_network(args.ground_state)
    if not isinstance(ground, MatrixProductState):
        raise ValidationError("quench requires an MPS ground state")
    if args.t_samples:
        times = tuple(float(t) for t in args.t_samples.split(","))
    else:
        times = tuple(float(t) for t in range(1, int(args.t_max) + 1))
    terms = ising_terms(
        IsingSpec(args.h_field, ground.length, include_offset=not args.no_offset)
    )
    config = QuenchConfig(
        site=args.site,
        times=times,
        evolution=EvolutionConfig(
            dt=-1j * args.dt,
            steps=1,
            trotter_order=2,
            truncation=TruncationSpec(max_rank=args.chi, weight_cutoff=1e-14),
        ),
        operator=PAULI_BY_NAME[args.op],
        probes=tuple(args.probes.split(",")),
    )
    record = run_quench(ground, terms, config)
    record.to_csv(args.out)
    print(f"quench record written to {args.out} ({len(record.rows)} rows)")
    return 0


def _cmd_fidelity(args) -> int:
    a = load_network(args.state_a)
    b = load_network(args.state_b)
    window = None
    if args.window is not None:
        parts = args.window.split(",")
        if len(parts) != 2:
            raise ValidationError("--window expects X0,X1")
        window = (int(parts[0]), int(parts[1]))

    if isinstance(a, MatrixProductState) and isinstance(b, MatrixProductState):
        if args.kind == "half":
            if args.cut is None:
                raise ValidationError("--kind half requires --cut")
            report = half_system_fidelity(a, b, args.cut, args.side)
        elif args.kind == "window":
            if window is None:
                raise ValidationError("--kind window requires --window")
            report = window_fidelity(a, b, window)
        else:
            if window is None:
                raise ValidationError("--kind disjoint requires --window")
            report = disjoint_window_fidelity(a, b, window, seed=args.seed)
    elif isinstance(a, TreeTensorNetwork) and isinstance(b, TreeTensorNetwork):
        if args.kind != "window" or window is None:
            raise ValidationError("TTN states support --kind window on branch windows")
        size = window[1] - window[0]
        if size < 2 or size & (size - 1) or window[0] % size:
            raise ValidationError(f"window {window} is not a single-cut branch")
        report = branch_fidelity(a, b, Branch(size.bit_length() - 1, window[0] // size))
    else:
        raise ValidationError("states must both be MPS or both TTN")

    print(f"fidelity={report.value:.12g} method={report.method} converged={report.converged}")
    if args.out:
        record = ExperimentRecord(
            experiment="fidelity",
            parameters={
                "state_a": args.state_a,
                "state_b": args.state_b,
                "kind": args.kind,
                "cut": args.cut,
                "window": list(window) if window else None,
                "side": args.side,
            },
            columns=["method", "value", "iterations", "converged"],
            rows=[(report.method, report.value, report.iterations, report.converged)],
        )
        record.to_csv(args.out)
    return 0


def _cmd_compare(args) -> int:
    record = run_scale_compare(
        args.h1,
        args.h2,
        range(1, args.max_window + 1),
        length=args.length,
        chi=args.chi,
        anchor=args.anchor,
        seed=args.seed,
    )
    record.to_csv(args.out)
    print(f"scale comparison written to {args.out} ({len(record.rows)} rows)")
    return 0


def _cmd_converge_chi(args) -> int:
    record = run_convergence_chi(
        args.h_field,
        [(args.chi_a, args.chi_b)],
        range(1, args.max_window + 1),
        length=args.length,
        anchor=args.anchor,
        seed=args.seed,
    )
    record.to_csv(args.out)
    print(f"convergence record written to {args.out} ({len(record.rows)} rows)")
    return 0


def _cmd_converge_ttn(args) -> int:
    record = run_convergence_ttn(
        args.depth,
        args.chi,
        args.sweeps,
        lag=args.lag,
        h=args.h_field,
        seed=args.seed,
    )
    record.to_csv(args.out)
    print(f"TTN convergence record written to {args.out} ({len(record.rows)} rows)")
    return 0


def _cmd_selftest(args) -> int:
    results = selftest_suites(trials=args.trials, seed=args.seed)
    all_ok = True
    for name, passed, worst in results:
        print(f"{'PASS' if passed else 'FAIL'} {name}: worst residual {worst:.3e}")
        all_ok = all_ok and passed
    if not all_ok:
        raise NumericError("selftest suite failed")
    return 0


_COMMANDS = {
    "gs": _cmd_gs,
    "quench": _cmd_quench,
    "fidelity": _cmd_fidelity,
    "compare": _cmd_compare,
    "converge-chi": _cmd_converge_chi,
    "converge-ttn": _cmd_converge_ttn,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
