#!/usr/bin/env python3
"""Plot the CSVs written by `molsync figure`.

usage: plot_figures.py DIR [--out DIR]
"""
import argparse
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def trace(ax, path, zones=None):
    df = pd.read_csv(path)
    t = df["t_n"] * 1e3
    ax.plot(t, df["r_B"], lw=0.8, label="r_B")
    ax.plot(t, df["rbar_B"], lw=0.8, label="expected r_B")
    ax.plot(t, df["r_A"], lw=0.6, alpha=0.6, label="r_A")
    if zones is not None:
        for _, z in pd.read_csv(zones).iterrows():
            ax.axvspan(z["start_ms"], z["end_ms"], color="grey", alpha=0.2)
    ax.set_xlabel("t [ms]")
    ax.set_ylabel("count")
    ax.legend(fontsize=7)


def histograms(ax, directory, panel):
    for path in sorted(glob.glob(os.path.join(directory, f"{panel}_hist_*.csv"))):
        label = os.path.basename(path)[len(panel) + 6 : -4]
        # TT is swept over xi_B; only the thresholds named in the caption are drawn
        if label.startswith("tt_") and label not in ("tt_xib13", "tt_xib15", "tt_xib17"):
            continue
        df = pd.read_csv(path)
        ax.step(df["bin_center"], df["density"], where="mid", label=label)
    ax.set_xlim(-1, 1)
    ax.set_xlabel("normalized error")
    ax.set_ylabel("density")
    ax.legend(fontsize=7)


def ber_vs(ax, path, column, scheme=None):
    df = pd.read_csv(path)
    if scheme:
        df = df[df["scheme"] == scheme]
    for (s, det), g in df.groupby(["scheme", "detector"]):
        best = g.groupby(column)["ber"].min()
        ax.semilogy(best.index, best.values.clip(min=1e-6), marker=".", label=f"{s}/{det}")
    ax.set_xlabel(column)
    ax.set_ylabel("BER")
    ax.legend(fontsize=7)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("dir")
    p.add_argument("--out", default=None)
    a = p.parse_args()
    out = a.out or a.dir
    os.makedirs(out, exist_ok=True)
    d = a.dir
    jobs = []
    if os.path.exists(os.path.join(d, "fig3_trace.csv")):
        jobs.append(("fig3", lambda ax: trace(ax, os.path.join(d, "fig3_trace.csv"))))
    if os.path.exists(os.path.join(d, "fig5_trace.csv")):
        jobs.append(("fig5", lambda ax: trace(ax, os.path.join(d, "fig5_trace.csv"),
                                              os.path.join(d, "fig5_zones.csv"))))
    for panel in ("fig6a", "fig6b", "fig6c"):
        if glob.glob(os.path.join(d, f"{panel}_hist_*.csv")):
            jobs.append((panel, lambda ax, panel=panel: histograms(ax, d, panel)))
    if os.path.exists(os.path.join(d, "fig7_ber.csv")):
        jobs.append(("fig7", lambda ax: ber_vs(ax, os.path.join(d, "fig7_ber.csv"), "xi_b", "tt")))
    if os.path.exists(os.path.join(d, "fig8_ber.csv")):
        jobs.append(("fig8", lambda ax: ber_vs(ax, os.path.join(d, "fig8_ber.csv"), "xi_a")))
    if os.path.exists(os.path.join(d, "fig9_best.csv")):
        def fig9(ax):
            df = pd.read_csv(os.path.join(d, "fig9_best.csv"))
            for s, g in df.groupby("scheme"):
                ax.semilogy(g["case"], g["ber"].clip(lower=1e-6), marker="o", label=s)
            ax.set_xlabel("mean symbol duration [ms]")
            ax.set_ylabel("BER")
            ax.legend(fontsize=7)
        jobs.append(("fig9", fig9))

    for name, draw in jobs:
        fig, ax = plt.subplots(figsize=(6, 3.5))
        draw(ax)
        ax.set_title(name)
        fig.tight_layout()
        fig.savefig(os.path.join(out, f"{name}.png"), dpi=120)
        plt.close(fig)
        print(os.path.join(out, f"{name}.png"))


if __name__ == "__main__":
    main()
