#!/usr/bin/env python3
"""Plot the loss and weight-difference trajectories from a metrics.csv."""

import argparse
import csv
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("metrics", help="metrics.csv written by `quatnn train`")
    parser.add_argument("--out", default=None,
                        help="output image path (default: <metrics>.png)")
    parser.add_argument("--wdiff-epochs", type=int, default=15,
                        help="epochs to show in the weight-difference panel")
    args = parser.parse_args()

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = []
    with open(args.metrics, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append({k: float(v) for k, v in row.items()})
    if not rows:
        print("no rows in", args.metrics, file=sys.stderr)
        return 1

    epochs = [r["epoch"] for r in rows]
    fig, (ax_loss, ax_w) = plt.subplots(1, 2, figsize=(11, 4))

    ax_loss.semilogy(epochs, [r["train_loss"] for r in rows], label="train")
    ax_loss.semilogy(epochs, [r["val_loss"] for r in rows], label="validation")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("mean per-sample loss")
    ax_loss.legend()
    ax_loss.set_title("loss")

    head = [r for r in rows if r["epoch"] <= args.wdiff_epochs]
    ax_w.plot([r["epoch"] for r in head], [r["wdiff_mean"] for r in head],
              linewidth=2, label="mean")
    ax_w.fill_between([r["epoch"] for r in head],
                      [r["wdiff_min"] for r in head],
                      [r["wdiff_max"] for r in head],
                      alpha=0.3, label="min..max")
    ax_w.set_xlabel("epoch")
    ax_w.set_ylabel("distance to reference weights")
    ax_w.legend()
    ax_w.set_title("weight difference")

    out = args.out or args.metrics + ".png"
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print("wrote", out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
