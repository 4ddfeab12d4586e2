"""Command-line entry point.

Subcommands:
  simulate       integrate the single-neuron flow, emit trajectory CSV + result JSON
  closed-form    evaluate the closed-form family trajectory, emit CSV + limit JSON
  sweep-epsilon  hidden-neuron eps sweep, emit sweep CSV
  witness        emit the witness JSON records
  verify         run the acceptance suite, one verdict line per criterion

Exit codes: 0 success, 1 input error, 2 non-convergence / failed criteria.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOCONV = 2


class InputError(Exception):
    pass


def _load_config(args, parser_keys: set) -> None:
    """Overlay a JSON config file onto argparse defaults; unknown keys and
    malformed JSON are input errors with a position diagnostic."""
    if not args.config:
        return
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read config: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(
            f"malformed JSON in {args.config}: {e.msg} at line {e.lineno} column {e.colno}"
        ) from e
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    unknown = sorted(set(cfg) - parser_keys)
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(unknown)}")
    for key, val in cfg.items():
        setattr(args, key, val)


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _dataset(args):
    from .model_core import Dataset, benchmark_dataset

    if getattr(args, "dataset", None):
        try:
            with open(args.dataset) as fh:
                return Dataset.from_json(fh.read())
        except OSError as e:
            raise InputError(f"cannot read dataset: {e}") from e
        except (json.JSONDecodeError, KeyError, ValueError) as e:
            raise InputError(f"bad dataset file: {e}") from e
    if args.gamma < 0 or args.alpha <= 0:
        raise InputError("require gamma >= 0 and alpha > 0")
    return benchmark_dataset(args.gamma, args.alpha)


def cmd_simulate(args) -> int:
    from .flow_engine import DivergenceError, FlowConfig, integrate_flow
    from .model_core import Activation

    ds = _dataset(args)
    try:
        act = Activation.parse(args.activation)
        cfg = FlowConfig(
            step=args.step,
            t_max=args.t_max,
            grad_tol=args.grad_tol,
            loss_tol=args.loss_tol,
        )
    except ValueError as e:
        raise InputError(str(e)) from e
    try:
        traj, res = integrate_flow(ds, act, np.zeros(ds.d), cfg)
    except DivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOCONV
    out = _outdir(args)
    tag = args.tag or f"gamma{args.gamma:g}_alpha{args.alpha:g}"
    traj.write_csv(os.path.join(out, f"trajectory_{tag}.csv"))
    with open(os.path.join(out, f"result_{tag}.json"), "w") as fh:
        fh.write(res.to_json())
    print(f"w_inf = {res.w_inf.tolist()}  converged={res.converged}")
    return EXIT_OK if res.converged else EXIT_NOCONV


def cmd_closed_form(args) -> int:
    from .closed_form import BenchmarkInstance

    if args.gamma < 0 or args.alpha <= 0:
        raise InputError("require gamma >= 0 and alpha > 0")
    inst = BenchmarkInstance(args.gamma, args.alpha)
    ts = np.linspace(0.0, args.t_max, args.samples)
    out = _outdir(args)
    tag = args.tag or f"gamma{args.gamma:g}_alpha{args.alpha:g}"
    inst.write_csv(os.path.join(out, f"closed_form_{tag}.csv"), ts)
    payload = {
        "gamma": args.gamma,
        "alpha": args.alpha,
        "t1": None if args.gamma == 0 else inst.t1,
        "w_t1": None if args.gamma == 0 else inst.w_t1.tolist(),
        "limit": inst.limit.tolist(),
    }
    with open(os.path.join(out, f"closed_form_{tag}.json"), "w") as fh:
        json.dump(payload, fh, indent=2)
    print(json.dumps(payload))
    return EXIT_OK


def cmd_sweep_epsilon(args) -> int:
    from .hidden_neuron_lab import DEFAULT_EPSILONS, epsilon_sweep

    ds = _dataset(args)
    eps = args.epsilon_grid or list(DEFAULT_EPSILONS)
    if any(e <= 0 for e in eps):
        raise InputError("epsilon grid values must be positive")
    if args.lr <= 0:
        raise InputError("lr must be positive")
    sweep = epsilon_sweep(ds, eps, lr=args.lr, loss_tol=args.loss_tol)
    out = _outdir(args)
    tag = args.tag or f"gamma{args.gamma:g}"
    sweep.write_csv(os.path.join(out, f"sweep_{tag}.csv"))
    converged = bool(np.all(sweep.final_losses < args.loss_tol))
    print(f"final u rows:\n{sweep.U}")
    return EXIT_OK if converged else EXIT_NOCONV


def cmd_witness(args) -> int:
    from .bias_witness import hidden_neuron_witness, single_neuron_witness

    out = _outdir(args)
    rec = single_neuron_witness(alpha=args.alpha)
    with open(os.path.join(out, "witness_single.json"), "w") as fh:
        fh.write(rec.to_json())
    hrec = hidden_neuron_witness(lr=args.lr)
    with open(os.path.join(out, "witness_hidden.json"), "w") as fh:
        fh.write(hrec.to_json())
    ok = rec.valid and hrec.valid
    print(f"single-neuron valid={rec.valid}  hidden valid={hrec.valid}")
    return EXIT_OK if ok else EXIT_NOCONV


def cmd_verify(args) -> int:
    from . import acceptance

    names = [args.filter] if args.filter else None
    try:
        results = acceptance.run_all(fast=args.fast, names=names)
    except KeyError as e:
        raise InputError(str(e)) from e
    out = _outdir(args)
    if args.artifacts:
        _emit_artifacts(out, fast=args.fast)
    with open(os.path.join(out, "verify.json"), "w") as fh:
        json.dump(results, fh, indent=2)
    for r in results:
        print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}: {r['details']}")
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_NOCONV


def _emit_artifacts(out: str, fast: bool) -> None:
    """Write the figure-input artifact set: closed-form and hidden-neuron
    trajectories per gamma, the eps sweep, and the witness records."""
    from .closed_form import BenchmarkInstance
    from .flow_engine import integrate_hidden_flow
    from .hidden_neuron_lab import epsilon_sweep
    from .model_core import HiddenParams, benchmark_dataset
    import csv as _csv

    ts = np.linspace(0.0, 3.0, 301)
    for g in (0.0, 1.0, 2.0, 5.0):
        BenchmarkInstance(g).write_csv(os.path.join(out, f"closed_form_gamma{g:g}.csv"), ts)
        ds = benchmark_dataset(g)
        trace, _ = integrate_hidden_flow(
            ds, HiddenParams(w=np.zeros(3), v=1e-2), step=1e-3, t_max=20.0, stride=10
        )
        with open(os.path.join(out, f"hidden_u_gamma{g:g}.csv"), "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["t", "u1", "u2", "u3", "v", "loss"])
            for k in range(len(trace)):
                u = trace.V[k] * trace.W[k]
                writer.writerow(
                    [f"{trace.iters[k] * 1e-3:.17g}"]
                    + [f"{x:.17g}" for x in u]
                    + [f"{trace.V[k]:.17g}", f"{trace.losses[k]:.17g}"]
                )
    lr = 1e-4 if fast else 1e-5
    for g in (0.0, 5.0):
        sweep = epsilon_sweep(benchmark_dataset(g), lr=lr)
        sweep.write_csv(os.path.join(out, f"sweep_gamma{g:g}.csv"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reluflow", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--gamma", type=float, default=5.0)
        sp.add_argument("--alpha", type=float, default=1.0)
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--config", help="JSON config file overlaying the flags")
        sp.add_argument("--tag", help="artifact filename tag")

    sp = sub.add_parser("simulate", help="integrate the single-neuron flow")
    common(sp)
    sp.add_argument("--dataset", help="dataset JSON file instead of the family")
    sp.add_argument("--activation", default="relu", help="relu | identity | leaky:SLOPE")
    sp.add_argument("--step", type=float, default=1e-4)
    sp.add_argument("--t-max", type=float, default=50.0)
    sp.add_argument("--grad-tol", type=float, default=1e-10)
    sp.add_argument("--loss-tol", type=float, default=1e-14)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("closed-form", help="evaluate the closed-form trajectory")
    common(sp)
    sp.add_argument("--t-max", type=float, default=3.0)
    sp.add_argument("--samples", type=int, default=301)
    sp.set_defaults(func=cmd_closed_form)

    sp = sub.add_parser("sweep-epsilon", help="hidden-neuron epsilon sweep")
    common(sp)
    sp.add_argument("--dataset", help="dataset JSON file instead of the family")
    sp.add_argument("--epsilon-grid", type=float, nargs="+")
    sp.add_argument("--lr", type=float, default=1e-5)
    sp.add_argument("--loss-tol", type=float, default=1e-15)
    sp.set_defaults(func=cmd_sweep_epsilon)

    sp = sub.add_parser("witness", help="emit witness JSON records")
    common(sp)
    sp.add_argument("--lr", type=float, default=1e-5)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("verify", help="run the acceptance suite")
    common(sp)
    sp.add_argument("--filter", help="run a single named criterion")
    sp.add_argument("--fast", action="store_true", help="use lr 1e-4 in slow criteria")
    sp.add_argument(
        "--artifacts", action="store_true", help="also emit the figure input files"
    )
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    keys = {
        a.dest
        for a in parser._subparsers._group_actions[0].choices[args.command]._actions
        if a.dest not in ("help", "config", "func")
    }
    try:
        _load_config(args, keys)
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
