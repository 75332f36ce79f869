"""Command-line driver: solve | train | rollout | hybrid | compare.

Every artifact is a CSV file with a provenance comment line; reruns
with identical flags reproduce files byte for byte.  Exit codes:
0 success, 2 usage, 3 numerical failure (CFL violation, divergence),
4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from .errors import (
    CflViolationError,
    ConfigurationError,
    DimensionError,
    DivergenceError,
)
from .hybrid import hybrid_rollout, make_hybrid, make_residual_dataset
from .neuralnet import init_weights, load_model, save_model
from .problems import (
    HeatConfig,
    IvpProblem,
    analytic_decay_forced,
    decay_sde,
    heat_mol,
    linear_decay_forced,
)
from .solvers import StepConfig, Trajectory, integrate, integrate_paths
from .training import (
    EsConfig,
    SgdConfig,
    make_dataset,
    rollout,
    train_es,
    train_sgd,
    validate,
)

_METHOD_FLAGS = {
    "euler": "euler",
    "exp-split": "exp_split",
    "strang": "strang",
    "em": "euler_maruyama",
}


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def build_problem(args) -> IvpProblem:
    if args.problem == "decay":
        return linear_decay_forced()
    if args.problem == "heat":
        cfg = HeatConfig(
            diffusivity=args.diffusivity,
            x_lo=args.x_lo,
            x_hi=args.x_hi,
            dx=args.dx,
            horizon=args.horizon,
        )
        return heat_mol(cfg)
    raise ConfigurationError(f"unknown problem {args.problem!r}")


def analytic_trajectory(p: IvpProblem, dt: float) -> Trajectory:
    """Reference trajectory from the closed-form / expm solution."""
    k = round(p.horizon / dt)
    if k < 1 or abs(k * dt - p.horizon) > 1e-9 * p.horizon:
        raise ConfigurationError(f"dt={dt:g} does not divide the horizon {p.horizon:g}")
    times = dt * np.arange(k + 1)
    if p.name == "decay":
        states = np.array([[analytic_decay_forced(t)] for t in times])
    else:
        from .linalg import expm, matvec

        e_a_dt = expm(p.linear * dt, tol=1e-12)
        states = np.empty((k + 1, p.dim))
        states[0] = p.y0
        for i in range(k):
            states[i + 1] = matvec(e_a_dt, states[i])
    return Trajectory(times=times, states=states)


def _write_trajectory(path: str, traj: Trajectory, provenance: str) -> None:
    with open(path, "w") as fh:
        fh.write(provenance + "\n")
        cols = ",".join(f"y_{i + 1}" for i in range(traj.dim))
        fh.write(f"t,{cols}\n")
        for t, y in zip(traj.times, traj.states):
            fh.write(",".join([_fmt(t)] + [_fmt(v) for v in y]) + "\n")


def _provenance(args, method: str) -> str:
    seed = getattr(args, "seed", 0)
    dt = getattr(args, "dt", 0.0)
    return f"# seed={seed}, dt={_fmt(dt)}, method={method}, version={__version__}"


def cmd_solve(args) -> int:
    method = _METHOD_FLAGS[args.method]
    if method == "euler_maruyama":
        if args.problem != "decay":
            raise ConfigurationError("euler_maruyama is wired for the decay problem")
        sde = decay_sde(sigma=args.sigma)
        cfg = StepConfig(dt=args.dt, method=method, cfl_check=args.cfl_check, seed=args.seed)
        if args.paths > 1:
            states = integrate_paths(sde, cfg, args.paths).mean(axis=0)
            k = states.shape[0] - 1
            traj = Trajectory(times=args.dt * np.arange(k + 1), states=states)
        else:
            traj = integrate(sde, cfg)
    else:
        p = build_problem(args)
        cfg = StepConfig(dt=args.dt, method=method, cfl_check=args.cfl_check, seed=args.seed)
        traj = integrate(p, cfg)
    _write_trajectory(args.out, traj, _provenance(args, args.method))
    return 0


def _training_data(args, p: IvpProblem):
    if args.train_source == "euler":
        traj = integrate(p, StepConfig(dt=args.dt, method="euler", seed=args.seed))
    else:
        traj = analytic_trajectory(p, args.dt)
    if args.target == "residual":
        return make_residual_dataset(p, traj)
    return make_dataset(traj, inputs=p.input, source=args.train_source)


def cmd_train(args) -> int:
    p = build_problem(args)
    ds = _training_data(args, p)
    shape = (ds.inputs.shape[1], args.hidden, ds.targets.shape[1])
    if args.trainer == "es":
        cfg = EsConfig(
            population=args.population,
            iterations=args.iters,
            noise_scale=args.noise,
            seed=args.seed,
        )
        net, history = train_es(ds, shape, cfg)
        label = "iteration"
    else:
        cfg = SgdConfig(learning_rate=args.lr, epochs=args.epochs, seed=args.seed)
        net, history = train_sgd(ds, init_weights(shape, args.seed), cfg)
        label = "epoch"
    save_model(net, args.model_out)
    if args.history_out:
        with open(args.history_out, "w") as fh:
            fh.write(_provenance(args, args.trainer) + "\n")
            fh.write(f"{label},best_mse\n")
            for i, v in enumerate(history):
                fh.write(f"{i},{_fmt(v)}\n")
    return 0


def cmd_rollout(args) -> int:
    p = build_problem(args)
    net = load_model(args.model)
    _check_model_dims(net, p)
    traj = rollout(net, p.y0, p.input, args.dt, p.horizon)
    _write_trajectory(args.out, traj, _provenance(args, "rollout"))
    return 0


def cmd_hybrid(args) -> int:
    p = build_problem(args)
    net = load_model(args.model)
    _check_model_dims(net, p)
    stepper = make_hybrid(p, net, args.dt)
    traj = hybrid_rollout(stepper, p.y0, p.input, p.horizon)
    _write_trajectory(args.out, traj, _provenance(args, "hybrid"))
    return 0


def _check_model_dims(net, p: IvpProblem) -> None:
    d_in = p.dim + p.input_at(0.0).shape[0]
    if net.input_dim != d_in or net.output_dim != p.dim:
        raise DimensionError(
            f"model maps {net.input_dim} -> {net.output_dim}, "
            f"problem needs {d_in} -> {p.dim}"
        )


def cmd_compare(args) -> int:
    p = build_problem(args)
    net = load_model(args.model)
    _check_model_dims(net, p)
    if args.reference == "euler":
        ref = integrate(p, StepConfig(dt=args.dt, method="euler", seed=args.seed))
    else:
        ref = analytic_trajectory(p, args.dt)

    start = time.perf_counter()
    if args.hybrid:
        stepper = make_hybrid(p, net, args.dt)
        pred = hybrid_rollout(stepper, ref.states[0], p.input, float(ref.times[-1]))
        diff = pred.states - ref.states
        abs_errors = np.max(np.abs(diff), axis=1)
        report_mse = float(np.mean(np.sum(diff[1:] ** 2, axis=1)))
        max_error = float(np.max(abs_errors))
        pred_states = pred.states
    else:
        report = validate(net, ref, inputs=p.input)
        abs_errors = report.abs_errors
        report_mse = report.mse
        max_error = report.max_error
        pred_states = report.predicted
    runtime_ms = 1000.0 * (time.perf_counter() - start)

    with open(args.out, "w") as fh:
        fh.write(_provenance(args, "hybrid" if args.hybrid else "rollout") + "\n")
        ref_cols = ",".join(f"ref_{i + 1}" for i in range(p.dim))
        pred_cols = ",".join(f"pred_{i + 1}" for i in range(p.dim))
        fh.write(f"t,{ref_cols},{pred_cols},abs_error\n")
        for t, r, q, e in zip(ref.times, ref.states, pred_states, abs_errors):
            row = [_fmt(t)] + [_fmt(v) for v in r] + [_fmt(v) for v in q] + [_fmt(e)]
            fh.write(",".join(row) + "\n")
        fh.write(f"# summary: mse={_fmt(report_mse)}, max_error={_fmt(max_error)}\n")
    # runtime varies run to run, so it goes to stdout, not into the artifact
    print(f"mse={_fmt(report_mse)} max_error={_fmt(max_error)} runtime_ms={runtime_ms:.3f}")
    return 0


def _add_problem_flags(sp) -> None:
    sp.add_argument("--problem", choices=["decay", "heat"], default="decay")
    sp.add_argument("--dt", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--diffusivity", type=float, default=0.1)
    sp.add_argument("--dx", type=float, default=0.1)
    sp.add_argument("--x-lo", dest="x_lo", type=float, default=0.0)
    sp.add_argument("--x-hi", dest="x_hi", type=float, default=10.0)
    sp.add_argument("--horizon", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridode",
        description="Hybrid classical/neural ODE and PDE solver benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="integrate a problem with a classical method")
    _add_problem_flags(sp)
    sp.add_argument("--method", choices=sorted(_METHOD_FLAGS), default="euler")
    sp.add_argument("--no-cfl-check", dest="cfl_check", action="store_false")
    sp.add_argument("--sigma", type=float, default=0.1, help="diffusion for em")
    sp.add_argument("--paths", type=int, default=1, help="ensemble size for em")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("train", help="train a surrogate on solver or analytic data")
    _add_problem_flags(sp)
    sp.add_argument("--trainer", choices=["es", "sgd"], default="es")
    sp.add_argument("--population", type=int, default=250)
    sp.add_argument("--iters", type=int, default=100)
    sp.add_argument("--noise", type=float, default=0.05)
    sp.add_argument("--lr", type=float, default=0.1)
    sp.add_argument("--epochs", type=int, default=200)
    sp.add_argument("--hidden", type=int, default=10)
    sp.add_argument("--train-source", choices=["euler", "analytic"], default="euler")
    sp.add_argument("--target", choices=["next-state", "residual"], default="next-state")
    sp.add_argument("--model-out", required=True)
    sp.add_argument("--history-out", default=None)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("rollout", help="free-run a trained surrogate")
    _add_problem_flags(sp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_rollout)

    sp = sub.add_parser("hybrid", help="exponential step + learned correction")
    _add_problem_flags(sp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_hybrid)

    sp = sub.add_parser("compare", help="score a surrogate against a reference")
    _add_problem_flags(sp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--reference", choices=["euler", "analytic"], default="analytic")
    sp.add_argument("--hybrid", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CflViolationError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
