"""Command-line front end.

Exit codes: 0 ok, 2 usage or malformed input, 3 constraint violation,
4 a reproduced claim failed (scan found a feasible point, curve crossed 11/16).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from nlgames import analysis, io
from nlgames.boxes import (
    Box,
    canonical_from_box,
    chsh,
    chsh_all_symmetries,
    is_local,
    k_statistic,
    ns_vertices,
    payoffs_closed_form,
)
from nlgames.game import (
    PURE_STRATEGIES,
    GameParams,
    average_payoffs,
    find_pure_nash,
    pure_payoff_table,
)
from nlgames.quantum import box_from_strategy, example_strategy
from nlgames.search import SearchConfig

EXIT_OK, EXIT_USAGE, EXIT_CONSTRAINT, EXIT_REGRESSION = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(x) -> float:
    return float(f"{float(x):.9g}")


def rounded(obj):
    """Round every float in a JSON-able structure to 9 significant digits."""
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [rounded(v) for v in obj]
    return obj


def emit(obj, out=None):
    text = json.dumps(rounded(obj), indent=2, sort_keys=True)
    print(text, file=out or sys.stdout)


def _pair(p) -> dict:
    return {"F_A": p.alice, "F_B": p.bob}


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NLGAMES_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise CliError(f"NLGAMES_SEED must be an integer, got {env!r}", EXIT_USAGE)


def _game(args):
    if getattr(args, "game", None):
        return _load(io.game_from_json, args.game)
    try:
        return GameParams(args.kappa, args.tau)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE)


def _load(parser, path):
    try:
        return parser(io.read_json(path))
    except io.FormatError as exc:
        raise CliError(f"{path}: {exc}", EXIT_USAGE)
    except (io.ConstraintError, ValueError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_CONSTRAINT)


def _search_config(args) -> SearchConfig:
    return SearchConfig(restarts=args.restarts, seed=_seed(args))


# --- subcommands ---


def cmd_game_table(args) -> int:
    game = _game(args)
    grid = pure_payoff_table(game)
    report = find_pure_nash(game, args.tol)
    labels = [g.label for g in PURE_STRATEGIES]
    if args.json:
        emit({
            "game": io.game_to_json(game),
            "payoffs": {
                f"{labels[i]}_A,{labels[j]}_B": _pair(grid[i][j])
                for i in range(4) for j in range(4)
            },
            "equilibria": [
                {"alice": e.alice.label, "bob": e.bob.label, **_pair(e.payoffs),
                 "fairness": e.fairness.value}
                for e in report
            ],
        })
        return EXIT_OK
    width = 24
    print(" " * 6 + "".join(f"{lab + '_B':>{width}}" for lab in labels))
    for i, lab in enumerate(labels):
        cells = "".join(
            f"{'(' + format(grid[i][j].alice, '.9g') + ', ' + format(grid[i][j].bob, '.9g') + ')':>{width}}"
            for j in range(4)
        )
        print(f"{lab + '_A':<6}{cells}")
    print("\nPure Nash equilibria:")
    for e in report:
        print(f"  {e.label}: ({e.payoffs.alice:.9g}, {e.payoffs.bob:.9g})  {e.fairness.value}")
    return EXIT_OK


def box_summary(b: Box, game) -> dict:
    table = io.as_table(game)
    pay = average_payoffs(table, b)
    local, weights = is_local(b)
    variants = chsh_all_symmetries(b)
    out = {
        "payoffs": _pair(pay),
        "chsh": chsh(b),
        "chsh_variants": variants.tolist(),
        "max_abs_chsh": float(np.abs(variants).max()),
        "k": k_statistic(b),
        "local": local,
        "canonical": io.box_to_json(b, canonical=True),
    }
    if isinstance(game, GameParams):
        out["payoffs_closed_form"] = _pair(payoffs_closed_form(game, canonical_from_box(b)))
    verdict = analysis.advantage_over_equilibria(pay, game)
    out["advantage"] = {
        "beats_fair": verdict.beats_fair,
        "beats_unfair_to_B": verdict.beats_unfair_to_B,
        "beats_unfair_to_A": verdict.beats_unfair_to_A,
        "margins": {k: list(v) for k, v in verdict.margins.items()},
    }
    if isinstance(game, GameParams) and game == analysis.PKLSZDK:
        fa = analysis.fair_advantage(b)
        out["fair_advantage"] = {"advantageous": fa.advantageous, "fair_payoff": fa.payoff}
    return out


def cmd_payoff(args) -> int:
    b = _load(io.box_from_json, args.box)
    game = _game(args)
    emit(box_summary(b, game))
    return EXIT_OK


def cmd_is_local(args) -> int:
    b = _load(io.box_from_json, args.box)
    local, weights = is_local(b, args.tol)
    variants = chsh_all_symmetries(b)
    emit({
        "local": local,
        "weights": None if weights is None else weights.tolist(),
        "chsh_variants": variants.tolist(),
        "chsh_criterion_local": bool(np.abs(variants).max() <= 2.0 + args.tol),
    })
    return EXIT_OK


def cmd_vertices(args) -> int:
    verts = ns_vertices()
    rows = []
    for k, v in enumerate(verts):
        rows.append({
            "index": k,
            "kind": "deterministic" if k < 16 else "PR",
            "p": v.flat(),
            "max_abs_chsh": float(np.abs(chsh_all_symmetries(v)).max()),
        })
    if args.json:
        emit({"count": len(rows), "vertices": rows})
    else:
        for r in rows:
            print(f"{r['index']:2d} {r['kind']:<13} max|CHSH| = {r['max_abs_chsh']:.9g}")
    return EXIT_OK


def cmd_quantum(args) -> int:
    if args.strategy:
        strategy = _load(io.strategy_from_json, args.strategy)
    else:
        try:
            strategy = example_strategy(args.example_a)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_USAGE)
    game = _game(args)
    b = box_from_strategy(strategy)
    out = box_summary(b, game)
    out["strategy"] = io.strategy_to_json(strategy)
    config = _search_config(args)
    if args.best_response:
        r = analysis.best_response(strategy, game, args.best_response, config)
        out["best_response"] = {
            "player": args.best_response,
            "value": r.best_value,
            "angles": r.best_params.tolist(),
            "payoffs": _pair(r.payoffs),
            "evaluations": r.evaluations,
            "converged": r.converged,
        }
    if args.social_optimum:
        r = analysis.social_optimum(strategy.state, game, config, povm=strategy.povm)
        out["social_optimum"] = {
            "sum": r.best_value,
            "angles": r.best_params.tolist(),
            "payoffs": _pair(r.payoffs),
            "reference": _pair(r.reference),
            "beats_reference": r.beats_reference,
            "evaluations": r.evaluations,
            "converged": r.converged,
        }
    if args.check_equilibrium:
        gaps = analysis.quantum_equilibrium_gaps(strategy, game, config)
        out["equilibrium"] = {
            "gaps": gaps,
            "tol": args.tol,
            "is_equilibrium": max(gaps.values()) <= args.tol,
        }
    emit(out)
    return EXIT_OK


def cmd_scan_povm(args) -> int:
    try:
        res = analysis.povm_singlet_scan(
            alpha_step=args.grid_alpha_step,
            mu_step=args.grid_mu_step,
            bs_step=args.grid_bs_step,
            alpha_max=args.grid_alpha_max,
            admissible=not args.no_admissibility,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    payload = res.to_json()
    if args.out:
        Path(args.out).write_text(json.dumps(rounded(payload), indent=2, sort_keys=True) + "\n")
    if args.json or not args.out:
        emit(payload)
    if res.feasible_points:
        print(f"scan-povm: {res.grid['n_feasible']} feasible points found", file=sys.stderr)
        return EXIT_REGRESSION
    return EXIT_OK


def cmd_gisin_curve(args) -> int:
    if args.grid_points < 1:
        raise CliError("--grid-points must be positive", EXIT_USAGE)
    curve = analysis.gisin_curve(analysis.default_a_grid(args.grid_points))
    text = analysis.curve_csv(curve)
    if args.csv:
        Path(args.csv).write_text(text)
    max_fa = max(p.alice for _, p in curve)
    summary = {"points": len(curve), "max_F_A": max_fa, "threshold": 11 / 16,
               "below_threshold": max_fa < 11 / 16}
    if args.json:
        emit(summary)
    elif not args.csv:
        sys.stdout.write(text)
    return EXIT_OK if max_fa < 11 / 16 else EXIT_REGRESSION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlgames",
        description="Bayesian games G(kappa, tau) with classical, no-signaling and quantum advice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def game_flags(p):
        p.add_argument("--kappa", type=float, default=0.5, help="kappa (default 0.5)")
        p.add_argument("--tau", type=float, default=1.0, help="tau (default 1.0)")
        p.add_argument("--game", help="game JSON file; overrides --kappa/--tau")

    def search_flags(p):
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed for multistart searches (default $NLGAMES_SEED or 0)")
        p.add_argument("--restarts", type=int, default=64, help="random restarts (default 64)")

    p = sub.add_parser("game-table", help="pure-strategy payoff table and Nash equilibria")
    game_flags(p)
    p.add_argument("--tol", type=float, default=1e-9, help="best-response tolerance (default 1e-9)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_game_table)

    p = sub.add_parser("payoff", help="payoffs, CHSH, locality and advantage of a box file")
    game_flags(p)
    p.add_argument("--box", required=True, help="box JSON file")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is JSON")
    p.set_defaults(func=cmd_payoff)

    p = sub.add_parser("quantum", help="evaluate a quantum strategy")
    game_flags(p)
    search_flags(p)
    p.add_argument("--strategy", help="strategy JSON file")
    p.add_argument("--example-a", type=float, default=0.9,
                   help="without --strategy, use the built-in example strategy with this a (default 0.9)")
    p.add_argument("--best-response", choices=["A", "B"])
    p.add_argument("--social-optimum", action="store_true")
    p.add_argument("--check-equilibrium", action="store_true")
    p.add_argument("--tol", type=float, default=1e-4, help="equilibrium tolerance (default 1e-4)")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is JSON")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("scan-povm", help="singlet + POVM feasibility scan")
    p.add_argument("--grid-alpha-step", type=float, default=1e-3)
    p.add_argument("--grid-mu-step", type=float, default=1e-3)
    p.add_argument("--grid-bs-step", type=float, default=1e-2)
    p.add_argument("--grid-alpha-max", type=float, default=2.0)
    p.add_argument("--no-admissibility", action="store_true",
                   help="drop the mu <= min(alpha, 2 - alpha) constraint")
    p.add_argument("--out", help="write ScanResult JSON here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_scan_povm)

    p = sub.add_parser("gisin-curve", help="payoff curve for the Gisin settings")
    p.add_argument("--grid-points", type=int, default=999)
    p.add_argument("--csv", help="write the a,F_A,F_B curve here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gisin_curve)

    p = sub.add_parser("vertices", help="list the 24 no-signaling vertices")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("is-local", help="LP locality test for a box file")
    p.add_argument("--box", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is JSON")
    p.set_defaults(func=cmd_is_local)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"nlgames: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
