"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 solver error, 3 divergence.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io
from .errors import AlphaNonpositive, Diverged, InvalidSpec, LQGameError
from .evaluation import evaluate
from .game import JointPolicy, ensure_valid
from .nash import solve_nash
from .npg import DIVERGED, check_assumptions, run_npg
from .presets import PRESETS, SolverSettings, init_ball, make_preset
from .zeroth_order import ZoConfig, run_npg_free

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_DIVERGED = 0, 1, 2, 3


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="game spec JSON")
    src.add_argument("--preset", choices=PRESETS)
    common.add_argument("--policy", type=Path, help="initial policy JSON")
    common.add_argument("--radius", type=float, help="initialize uniformly in a ball around K*")
    common.add_argument("--seed", type=int, default=None)
    step = common.add_mutually_exclusive_group()
    step.add_argument("--eta", type=float)
    step.add_argument("--eta-per-player", type=_floats, metavar="F,F,...")
    common.add_argument("--iters", type=int)
    common.add_argument("--rollouts", type=int)
    common.add_argument("--smoothing", type=_floats, metavar="R[,R,...]")
    common.add_argument("--sigma2", type=float, help="override W = sigma2 * I")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--epsilon", type=float, default=1e-6, help="target gap for `check`")
    common.add_argument("--strict", action="store_true", help="`check` fails if alpha_hat <= 0")
    common.add_argument("--out", default=None, help="output path ('-' or omitted: stdout)")
    common.add_argument("--snapshot-every", type=int, default=0)

    p = argparse.ArgumentParser(prog="lqgame", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("nash", "solve the coupled Riccati recursion"),
        ("eval", "evaluate a joint policy exactly"),
        ("npg", "model-based natural policy gradient, CSV trace"),
        ("npg-free", "sample-based natural policy gradient, CSV trace"),
        ("check", "theory constants and the system-noise condition"),
        ("preset", "dump a preset's game (and explicit policy) as JSON"),
    ):
        sub.add_parser(name, parents=[common], help=help_)
    return p


def _resolve(args):
    """Return (spec, settings, preset-or-None)."""
    if args.preset:
        over = {} if args.sigma2 is None else {"sigma2": args.sigma2}
        preset = make_preset(args.preset, **over)
        return preset.spec, preset.settings, preset
    spec = io.load_spec(args.config)
    if args.sigma2 is not None:
        spec = spec.with_noise(args.sigma2 * np.eye(spec.state_dim))
    n = spec.num_players
    return spec, SolverSettings(eta=(0.01,) * n, iters=1000, smoothing=(0.1,) * n), None


def _initial_policy(args, spec, nash, preset) -> JointPolicy:
    if args.policy is not None:
        return io.load_policy(args.policy)
    seed = 0 if args.seed is None else args.seed
    if args.radius is not None:
        return init_ball(nash, args.radius, seed)
    if preset is not None:
        return preset.initial_policy(nash, seed=args.seed)
    return JointPolicy.zeros(spec)


def _eta(args, settings):
    if args.eta_per_player is not None:
        return args.eta_per_player
    if args.eta is not None:
        return args.eta
    return settings.eta


def _write_snapshots(trace, out):
    if not trace.snapshots or out in (None, "-"):
        return
    path = Path(str(out) + ".snapshots.json")
    io.write_json({str(m): io.policy_to_dict(p) for m, p in trace.snapshots.items()}, path)


def _emit_trace(trace, out):
    if out in (None, "-"):
        io.write_trace_csv(trace, sys.stdout)
    else:
        io.write_trace_csv(trace, out)
        _write_snapshots(trace, out)


def _summary(trace) -> str:
    line = f"status={trace.status} iterations={trace.iterations}"
    if trace.normalized_errors is not None and len(trace.normalized_errors):
        errs = ",".join(f"{e:.6g}" for e in trace.normalized_errors[-1])
        line += f" final_normalized_error={errs}"
    return line


def _run(args) -> int:
    if args.config is None and args.preset is None:
        print("error: one of --config or --preset is required", file=sys.stderr)
        return EXIT_INVALID
    spec, settings, preset = _resolve(args)
    rep = ensure_valid(spec)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)

    cmd = args.command
    if cmd == "preset":
        data = {"spec": io.spec_to_dict(spec)}
        if preset is not None and preset.init_policy is not None:
            data["policy"] = io.policy_to_dict(preset.init_policy)
        if preset is not None and preset.radius is not None:
            data["radius"] = preset.radius
        io.write_json(data, args.out)
        return EXIT_OK

    nash = solve_nash(spec)
    if cmd == "nash":
        io.write_json(io.nash_to_dict(nash), args.out)
        return EXIT_OK

    policy = _initial_policy(args, spec, nash, preset)
    if cmd == "eval":
        ev = evaluate(spec, policy)
        data = io.evaluation_to_dict(ev)
        cs = np.asarray(nash.eq_costs)
        data["normalized_error"] = ((np.asarray(ev.costs) - cs) / cs).tolist()
        io.write_json(data, args.out)
        return EXIT_OK

    if cmd == "check":
        try:
            report = check_assumptions(spec, policy, nash, args.epsilon, strict=args.strict)
            code = EXIT_OK
        except AlphaNonpositive as exc:
            report, code = exc.report, EXIT_SOLVER
        print(f"satisfied={str(report.satisfied).lower()}")
        for k, v in report.as_dict().items():
            if k != "satisfied":
                print(f"{k}={v!r}")
        return code

    eta = _eta(args, settings)
    iters = args.iters if args.iters is not None else settings.iters
    if cmd == "npg":
        tol = 1e-8 if args.tol is None else args.tol
        trace = run_npg(spec, policy, eta, iters, nash=nash, tol=tol,
                        snapshot_every=args.snapshot_every)
    else:
        cfg = ZoConfig(
            num_traj=args.rollouts if args.rollouts is not None else settings.rollouts,
            radius=args.smoothing if args.smoothing is not None else settings.smoothing,
            seed=0 if args.seed is None else args.seed,
        )
        trace = run_npg_free(spec, policy, eta, iters, cfg, nash=nash, tol=args.tol,
                             snapshot_every=args.snapshot_every)
    _emit_trace(trace, args.out)
    print(_summary(trace), file=sys.stderr)
    return EXIT_DIVERGED if trace.status == DIVERGED else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _run(args)
    except InvalidSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Diverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except LQGameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
