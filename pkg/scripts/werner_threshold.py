"""Locate the Werner weight above which CHSH-optimal settings beat the 9/16 fair equilibrium."""

import argparse
import math

from nlgames.analysis import werner_fair_advantage, werner_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()

    p = werner_threshold(args.tol)
    print(f"threshold p* = {p:.9f}  (1/sqrt(2) = {1 / math.sqrt(2):.9f})")
    for q in (0.6, 0.7, 0.71, 0.8, 1.0):
        v = werner_fair_advantage(q)
        print(f"p = {q:<5} B = {v.chsh:.6f}  fair payoff = {v.payoff:.6f}  advantage = {v.advantageous}")


if __name__ == "__main__":
    main()
