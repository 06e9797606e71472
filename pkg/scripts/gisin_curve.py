"""Payoff curve of the Gisin settings on a 999-point grid, written as CSV."""

import argparse
from pathlib import Path

from nlgames.analysis import curve_csv, default_a_grid, gisin_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=999)
    ap.add_argument("--out", default="results/gisin_curve.csv")
    args = ap.parse_args()

    curve = gisin_curve(default_a_grid(args.points))
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(curve_csv(curve))
    a_best, p_best = max(curve, key=lambda ap_: ap_[1].alice)
    print(f"wrote {len(curve)} points to {path}")
    print(f"max F_A = {p_best.alice:.9f} at a = {a_best:.3f} (11/16 = {11 / 16})")


if __name__ == "__main__":
    main()
