"""Command-line front end.

Exit codes: 0 success, 1 selfcheck failure, 2 usage/parse error,
3 semantic/data error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as kio
from . import kernels as K
from .embeddings import gram
from .errors import KernmetricError, ShapeError
from .io import ParseError
from .profiles import Gaussian
from .selfcheck import run_selfcheck
from .spaces import DiscreteMeasure, Euclidean, FuncLp, FunctionSample, trapezoid_grid
from .stats import kernel_score, mmd, permutation_test

EXIT_OK = 0
EXIT_SELFCHECK = 1
EXIT_USAGE = 2
EXIT_DATA = 3


class UsageError(KernmetricError):
    pass


def _require(args, *names):
    for name in names:
        if not getattr(args, name, None):
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kernmetric",
        description="Characteristic kernels, MMD, kernel scores, and two-sample tests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file providing any of the flags")
        p.add_argument("--kernel", help="kernel spec JSON file")
        p.add_argument("--grid", help="quadrature grid CSV (for function-valued data)")
        p.add_argument("--out", help="output path")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gram", help="write the Gram matrix of a kernel on points")
    common(p)
    p.add_argument("--points", help="points CSV (Euclidean) or function data CSV")

    p = sub.add_parser("mmd", help="MMD between two discrete measures")
    common(p)
    p.add_argument("--x", help="first measure CSV")
    p.add_argument("--y", help="second measure CSV")

    p = sub.add_parser("test2", help="two-sample permutation test")
    common(p)
    p.add_argument("--x", help="first sample CSV")
    p.add_argument("--y", help="second sample CSV")
    p.add_argument("--perms", type=int, default=999)
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("score", help="kernel scores of a forecast at observations")
    common(p)
    p.add_argument("--forecast", help="forecast measure CSV")
    p.add_argument("--obs", help="observations CSV")

    p = sub.add_parser("power", help="empirical power curve over a shift scenario")
    common(p)
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--perms", type=int, default=99)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=200)

    p = sub.add_parser("selfcheck", help="run the built-in invariant suite")
    common(p)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    return parser


def _apply_config(args: argparse.Namespace):
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{args.config}: {exc}") from exc
    for key, val in cfg.items():
        key = key.replace("-", "_")
        if key == "command":
            continue
        if not hasattr(args, key):
            raise ParseError(f"{args.config}: unknown option {key!r}")
        setattr(args, key, val)


def _load_kernel(args, space_hint=None, grid=None):
    if getattr(args, "kernel", None):
        try:
            with open(args.kernel) as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"{args.kernel}: {exc}") from exc
        return kio.kernel_from_json(spec, grid=grid)
    if space_hint is None:
        raise ParseError("--kernel is required for this input")
    return kio.default_kernel(space_hint)


def _load_grid(args):
    if getattr(args, "grid", None):
        return kio.read_grid_csv(args.grid)
    return None


def _load_sample_list(path: str, grid):
    """Rows of a sample file as Euclidean points or function samples."""
    if grid is not None:
        return kio.read_function_csv(path, grid), FuncLp(grid, 2.0)
    arr = kio.read_points_csv(path)
    return [arr[i] for i in range(arr.shape[0])], Euclidean(arr.shape[1])


def cmd_gram(args) -> int:
    _require(args, "points", "out")
    grid = _load_grid(args)
    points, space = _load_sample_list(args.points, grid)
    k = _load_kernel(args, space_hint=space, grid=grid)
    try:
        g = gram(k, points)
    except ShapeError:
        raise
    kio.write_gram_csv(args.out, g.entries)
    return EXIT_OK


def cmd_mmd(args) -> int:
    _require(args, "x", "y")
    grid = _load_grid(args)
    p = kio.read_measure_csv(args.x)
    q = kio.read_measure_csv(args.y)
    k = _load_kernel(args, space_hint=p.space, grid=grid)
    value = mmd(k, p, q)
    out = json.dumps({"mmd": value, "squared_mmd": value * value})
    if args.out:
        kio.write_atomic(args.out, out + "\n")
    print(out)
    return EXIT_OK


def cmd_test2(args) -> int:
    _require(args, "x", "y")
    if args.perms < 1:
        raise UsageError("--perms must be a positive integer")
    if not (0.0 < args.alpha < 1.0):
        raise UsageError("--alpha must lie in (0, 1)")
    grid = _load_grid(args)
    xs, space = _load_sample_list(args.x, grid)
    ys, _ = _load_sample_list(args.y, grid)
    if len(xs) < 2 or len(ys) < 2:
        raise ShapeError("both sample files need at least 2 rows")
    k = _load_kernel(args, space_hint=space, grid=grid)
    result = permutation_test(k, xs, ys, n_perm=args.perms, seed=args.seed)
    verdict = "REJECT" if result.p_value <= args.alpha else "FAIL-TO-REJECT"
    payload = json.dumps(result.to_json())
    if args.out:
        kio.write_atomic(args.out, payload + "\n")
    print(payload)
    print(verdict)
    return EXIT_OK


def cmd_score(args) -> int:
    _require(args, "forecast", "obs", "out")
    grid = _load_grid(args)
    forecast = kio.read_measure_csv(args.forecast)
    if not forecast.is_probability:
        raise ShapeError(f"{args.forecast}: forecast is not a probability measure")
    obs = kio.read_points_csv(args.obs)
    if obs.shape[1] != forecast.space.dim:
        raise ShapeError("observation dimension does not match the forecast")
    k = _load_kernel(args, space_hint=forecast.space, grid=grid)
    scores = [kernel_score(k, forecast, obs[i]) for i in range(obs.shape[0])]
    lines = ["score"]
    lines += [kio.fmt(s) for s in scores]
    lines.append("mean," + kio.fmt(float(np.mean(scores))))
    kio.write_atomic(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _scenario_samples(scenario: dict, shift: float, rng):
    kind = scenario.get("kind")
    n = int(scenario.get("n", 20))
    m = int(scenario.get("m", 20))
    if kind == "euclidean_mean_shift":
        d = int(scenario.get("dim", 1))
        xs = [rng.normal(size=d) for _ in range(n)]
        ys = [rng.normal(size=d) + shift for _ in range(m)]
        return xs, ys, Euclidean(d)
    if kind == "function_mean_shift":
        grid = trapezoid_grid(int(scenario.get("grid_m", 8)))
        sd = float(scenario.get("noise", 1.0))
        xs = [FunctionSample(grid, rng.normal(scale=sd, size=len(grid))) for _ in range(n)]
        ys = [FunctionSample(grid, shift + rng.normal(scale=sd, size=len(grid))) for _ in range(m)]
        return xs, ys, FuncLp(grid, 2.0)
    raise UsageError(f"unknown scenario kind {scenario.get('kind')!r}")


def cmd_power(args) -> int:
    _require(args, "out")
    if args.trials < 1:
        raise UsageError("--trials must be a positive integer")
    if args.perms < 1:
        raise UsageError("--perms must be a positive integer")
    if not args.scenario:
        raise UsageError("--scenario is required")
    try:
        with open(args.scenario) as fh:
            scenario = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{args.scenario}: {exc}") from exc
    shifts = scenario.get("shifts", [0.0, 0.5, 1.0])
    grid = _load_grid(args)
    lines = ["shift,rejection_rate,trials,mc_stderr"]
    for shift_index, shift in enumerate(shifts):
        rejections = 0
        for trial in range(args.trials):
            # counter-based stream: independent of loop scheduling
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=(args.seed, shift_index, trial))
            )
            xs, ys, space = _scenario_samples(scenario, float(shift), rng)
            k = _load_kernel(args, space_hint=space, grid=grid)
            res = permutation_test(
                k, xs, ys, n_perm=args.perms, seed=int(rng.integers(2**32))
            )
            if res.p_value <= args.alpha:
                rejections += 1
        rate = rejections / args.trials
        stderr = float(np.sqrt(rate * (1.0 - rate) / args.trials))
        lines.append(
            f"{kio.fmt(float(shift))},{kio.fmt(rate)},{args.trials},{kio.fmt(stderr)}"
        )
    kio.write_atomic(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    ok = run_selfcheck(inject_fault=args.inject_fault)
    return EXIT_OK if ok else EXIT_SELFCHECK


_COMMANDS = {
    "gram": cmd_gram,
    "mmd": cmd_mmd,
    "test2": cmd_test2,
    "score": cmd_score,
    "power": cmd_power,
    "selfcheck": cmd_selfcheck,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return _COMMANDS[args.command](args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KernmetricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
