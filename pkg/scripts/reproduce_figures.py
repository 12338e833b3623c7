#!/usr/bin/env python3
"""Run every shipped preset and render the companion SVGs into out/figures/.

Usage: python scripts/reproduce_figures.py [--out DIR]
"""

import argparse
from pathlib import Path

from stratopt.presets import PRESET_NAMES, preset
from stratopt.runner import run_experiment
from stratopt.svgplot import plot


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/figures", type=Path)
    args = ap.parse_args()

    results = {}
    for name in PRESET_NAMES:
        print(f"running {name} ...")
        results[name] = run_experiment(preset(name), out_dir=args.out / name)

    # fig 1: tangential gradient field on the cusp and its deformations
    plot([str(results["fig1-cusp"].quiver_path)], "quiver",
         args.out / "fig1-cusp.svg")

    # fig 5a: trajectories (top view) and the matching loss curves
    r5a = results["fig5a"]
    traj_csvs = [str(p) for p in r5a.trajectory_paths.values()]
    plot(traj_csvs + [str(r5a.targets_path)], "topview_trajectories",
         args.out / "fig5a-topview.svg")
    plot(traj_csvs, "loss_curves", args.out / "fig5a-loss.svg")

    # fig 5b: aggregate mean/median loss for the GD and NGD sweeps
    for name in ("fig5b-gd", "fig5b-ngd"):
        plot([str(p) for p in results[name].aggregate_paths.values()],
             "loss_curves", args.out / f"{name}-loss.svg")

    # fig 6: the apex capture on the cone vs the crossing on the hyperboloid
    pair = [str(results["fig6-cone"].trajectory_paths[("cone", 0)]),
            str(results["fig6-hyp"].trajectory_paths[("hyperboloid", 0)])]
    plot(pair, "loss_curves", args.out / "fig6-loss.svg")
    plot(pair + [str(results["fig6-cone"].targets_path)],
         "topview_trajectories", args.out / "fig6-topview.svg")
    print(f"figures written under {args.out}")


if __name__ == "__main__":
    main()
