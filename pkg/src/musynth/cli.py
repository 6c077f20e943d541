"""Command-line front end: analyze, find, sweep, gaussian, minimize.

Exit codes: 0 success, 2 validation or usage error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConvergenceError, MusError
from .linalg import check_dims
from .mus import check_mus, find_mus_at_lambda, gaussian_packet, sweep_lambda, verify_gaussian, write_family_csv
from .observables import Grid1D, load_observable, load_state, state_to_dict
from .variational import MinimizeOptions, minimize_from_random_starts

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("musynth")


class UsageError(Exception):
    pass


def _emit(payload: Any, out: Path | None) -> None:
    text = json.dumps(payload, indent=2)
    if out is None:
        print(text)
    else:
        out.write_text(text + "\n", encoding="utf-8")


def _load_pair(args):
    obs_a = load_observable(args.observable_a)
    obs_b = load_observable(args.observable_b)
    check_dims(obs_a.matrix, obs_b.matrix)
    return obs_a, obs_b


def parse_lambda_grid(text: str) -> np.ndarray:
    """``start:stop:n`` -> n evenly spaced values from start to stop inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--lambda-grid must look like START:STOP:N, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--lambda-grid: {exc}") from exc
    if steps < 1:
        raise UsageError("--lambda-grid: N must be >= 1")
    grid = np.linspace(start, stop, steps)
    if np.any(grid == 0.0):
        raise UsageError("lambda must be nonzero")
    return grid


def run_analyze(args) -> int:
    obs_a, obs_b = _load_pair(args)
    psi = load_state(args.state)
    check_dims(obs_a.matrix, psi)
    verdict = check_mus(psi, obs_a, obs_b, args.tol)
    _emit(verdict.to_dict(), args.out)
    return EXIT_OK


def run_find(args) -> int:
    obs_a, obs_b = _load_pair(args)
    cands = find_mus_at_lambda(obs_a, obs_b, args.lam, args.tol)
    _emit({"lambda": args.lam, "candidates": [c.to_dict() for c in cands]}, args.out)
    return EXIT_OK


def run_sweep(args) -> int:
    grid = parse_lambda_grid(args.lambda_grid)
    obs_a, obs_b = _load_pair(args)
    family = sweep_lambda(obs_a, obs_b, grid, args.tol)
    write_family_csv(family, args.csv)
    failed = [(lam, note) for lam, note in zip(family.lambdas, family.notes) if note]
    for lam, note in failed:
        print(f"lambda={lam:.17g}: {note}", file=sys.stderr)
    return EXIT_NUMERICAL if failed else EXIT_OK


def run_gaussian(args) -> int:
    try:
        grid = Grid1D(args.n, args.xmin, args.xmax)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.report:
        result = verify_gaussian(grid, args.x0, args.k, args.sigma, args.boundary)
        if args.out is not None:
            _emit(state_to_dict(result.state), args.out)
        _emit(result.to_dict(), None)
    else:
        _emit(state_to_dict(gaussian_packet(grid, args.x0, args.k, args.sigma)), args.out)
    return EXIT_OK


def run_minimize(args) -> int:
    obs_a, obs_b = _load_pair(args)
    opts = MinimizeOptions(max_iters=args.max_iters, step=args.step, seed=args.seed)
    results = minimize_from_random_starts(obs_a, obs_b, args.starts, opts, args.tol)
    _emit({"seed": args.seed, "results": [r.to_dict() for r in results]}, args.out)
    return EXIT_OK if any(r.converged for r in results) else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="musynth", description="Minimum uncertainty state toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def pair(p):
        p.add_argument("--observable-a", type=Path, required=True)
        p.add_argument("--observable-b", type=Path, required=True)

    p = sub.add_parser("analyze", help="uncertainty report and MUS verdict for a state")
    pair(p)
    p.add_argument("--state", type=Path, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=run_analyze)

    p = sub.add_parser("find", help="MUS among eigenvectors of A - i*lambda*B")
    pair(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=run_find)

    p = sub.add_parser("sweep", help="MUS families over a lambda grid, written as CSV")
    pair(p)
    p.add_argument("--lambda-grid", required=True, metavar="START:STOP:N")
    p.add_argument("--csv", type=Path, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=run_sweep)

    p = sub.add_parser("gaussian", help="Gaussian wave packet on a grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xmin", type=float, required=True)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--boundary", choices=["dirichlet", "periodic"], required=True)
    p.add_argument("--report", action="store_true", help="print the MUS verification report")
    p.add_argument("--out", type=Path, help="where to write the state JSON")
    p.set_defaults(func=run_gaussian)

    p = sub.add_parser("minimize", help="variational search for MUS from random starts")
    pair(p)
    p.add_argument("--starts", type=int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=run_minimize)
    return parser


def _glue_grid(argv: list[str]) -> list[str]:
    # "-2:2:8" would otherwise be taken for an option flag
    out = []
    it = iter(argv)
    for token in it:
        if token == "--lambda-grid":
            out.append(f"--lambda-grid={next(it, '')}")
        else:
            out.append(token)
    return out


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_grid(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, MusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
