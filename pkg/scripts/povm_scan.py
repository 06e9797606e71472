"""Singlet + two-outcome POVM scan: can any admissible (alpha, mu, B_S) beat (11/16, 7/16)?

Runs the scan at the requested resolution and at double resolution and
writes both ScanResult JSON files.
"""

import argparse
import json
from pathlib import Path

from nlgames.analysis import povm_singlet_scan


def run(step_am, step_bs, admissible, alpha_max):
    r = povm_singlet_scan(step_am, step_am, step_bs, alpha_max=alpha_max, admissible=admissible)
    g = r.grid
    print(f"step {step_am:g}/{step_bs:g}: {g['n_feasible']} feasible of {g['n_points']}, "
          f"max min-margin {r.max_min_margin:.6f} at {r.argmax}")
    return r


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--step", type=float, default=1e-3, help="alpha and mu step")
    ap.add_argument("--bs-step", type=float, default=1e-2)
    ap.add_argument("--alpha-max", type=float, default=2.0)
    ap.add_argument("--no-admissibility", action="store_true")
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for scale in (1, 2):
        r = run(args.step / scale, args.bs_step / scale, not args.no_admissibility, args.alpha_max)
        (out / f"povm_scan_x{scale}.json").write_text(json.dumps(r.to_json(), indent=1) + "\n")


if __name__ == "__main__":
    main()
