"""Recompute the headline numbers for the a = 0.9 example strategy and the singlet.

Usage: python scripts/reproduce_examples.py [--seed N] [--restarts N]
"""

import argparse
import math

from nlgames.analysis import (
    best_response,
    deviation_strategy,
    is_quantum_equilibrium,
    reported_social_strategy,
    social_optimum,
    strategy_payoffs,
    unfair_advantage,
)
from nlgames.quantum import box_from_strategy, chsh_max_pure, example_strategy, pure_state, singlet_chsh_strategy
from nlgames.search import SearchConfig


def line(label, value):
    print(f"{label:<44}{value}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=64)
    ap.add_argument("--a", type=float, default=0.9)
    args = ap.parse_args()
    cfg = SearchConfig(restarts=args.restarts, seed=args.seed)
    a = args.a

    s = example_strategy(a)
    pay = strategy_payoffs(s)
    line("example strategy (F_A, F_B)", f"({pay.alice:.6f}, {pay.bob:.6f})")
    v = unfair_advantage(box_from_strategy(s))
    line("beats (11/16, 7/16)", v.beats_unfair_to_B)

    br = best_response(s, player="B", config=cfg)
    line("Bob best response F_B", f"{br.best_value:.6f}")
    line("  Alice's payoff after deviation", f"{br.payoffs.alice:.6f}")
    dev = strategy_payoffs(deviation_strategy(a))
    line("reported deviation angles (F_A, F_B)", f"({dev.alice:.6f}, {dev.bob:.6f})")
    line("example is a quantum equilibrium", is_quantum_equilibrium(s, config=cfg))

    so = social_optimum(pure_state(a), config=cfg)
    line("social optimum sum", f"{so.best_value:.8f}")
    line("  analytic (3/4)(1 + B_max/4)", f"{0.75 * (1 + chsh_max_pure(a) / 4):.8f}")
    line("  chosen split", f"({so.payoffs.alice:.6f}, {so.payoffs.bob:.6f})")
    rep = strategy_payoffs(reported_social_strategy(a))
    line("  reported angles split", f"({rep.alice:.6f}, {rep.bob:.6f})")

    sg = singlet_chsh_strategy()
    pay = strategy_payoffs(sg)
    line("singlet (F_A, F_B)", f"({pay.alice:.8f}, {pay.bob:.8f})")
    line("  (3/8)(1 + sqrt(2)/2)", f"{3 / 8 * (1 + math.sqrt(2) / 2):.8f}")
    line("singlet is a quantum equilibrium", is_quantum_equilibrium(sg, config=cfg))


if __name__ == "__main__":
    main()
