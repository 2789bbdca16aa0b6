"""Full capacity-versus-hotspot-density sweep (10,000 trials per N, 11 densities).

    python scripts/capacity_curve.py --workers 8 --output results/capacity.csv [--plot fig.png]

Extra arguments are passed to the CLI, e.g. ``--trials 2000``.
"""

import argparse
import io
import sys
from pathlib import Path

from twotier.cli import main as cli_main
from twotier.cli import read_csv


def plot(csv_path, png_path):
    import matplotlib.pyplot as plt

    rows = read_csv(io.StringIO(Path(csv_path).read_text()))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    styles = {"exact_soft": "o-", "hard": "s--", "approx1": "^:", "approx2": "v-."}
    for method, style in styles.items():
        pts = sorted((r["p_h"], r["capacity_n"]) for r in rows if r["method"] == method)
        if pts:
            ax.plot(*zip(*pts), style, label=method, markersize=4)
    ax.set_xlabel("hotspot density $P_h$")
    ax.set_ylabel("user capacity $N^*$")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--plot")
    parser.add_argument("--output", default="capacity.csv")
    args, rest = parser.parse_known_args()
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    status = cli_main(["--output", args.output, *rest])
    if status == 0 and args.plot:
        plot(args.output, args.plot)
    sys.exit(status)
