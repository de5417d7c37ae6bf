"""Noise-free runs from a wide initialization, and the two repairs (larger eta_2, smaller ball)."""
import argparse

import numpy as np

from lqgame import make_preset, run_npg, solve_nash

CONFIGS = {
    "wide": (0.42, (0.001, 0.001)),
    "eta2": (0.42, (0.001, 0.01)),
    "narrow": (0.16, (0.001, 0.001)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--iters", type=int, default=10000)
    args = ap.parse_args()
    preset = make_preset("mazumdar", sigma2=0.0)
    nash = solve_nash(preset.spec)
    for name, (r, eta) in CONFIGS.items():
        for seed in args.seeds:
            tr = run_npg(preset.spec, preset.initial_policy(nash, seed=seed, radius=r), eta,
                         args.iters, nash=nash)
            peak = np.abs(tr.normalized_errors).max(axis=0)
            print(f"{name:<7} seed={seed} status={tr.status:<9} "
                  f"init={np.abs(tr.normalized_errors[0]).round(4).tolist()} "
                  f"peak={peak.round(4).tolist()} final={np.abs(tr.normalized_errors[-1]).round(5).tolist()}")


if __name__ == "__main__":
    main()
