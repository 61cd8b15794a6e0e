"""Figures written next to the CSV reports."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "svg.hashsalt": "tlda",
}


def _save(fig, path):
    # Fixed metadata keeps repeated runs byte-identical.
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def plot_condition_report(pre, post, threshold, path, title=None):
    """log10 condition number per frontal slice, before and after repair."""
    pre = np.asarray(pre, dtype=float)
    post = np.asarray(post, dtype=float)
    x = np.arange(1, len(pre) + 1)
    cap = np.log10(np.finfo(float).max)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.0))
        ax.plot(x, np.minimum(np.log10(pre), cap), "o-", ms=3, lw=1, label="W")
        if not np.array_equal(pre, post):
            ax.plot(x, np.minimum(np.log10(post), cap), "s-", ms=3, lw=1, label="re-estimated W")
        ax.axhline(np.log10(threshold), color="k", ls="--", lw=0.8, label="threshold")
        ax.set_xlabel("frontal slice")
        ax.set_ylabel(r"$\log_{10}\kappa$")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        _save(fig, path)


def plot_fold_accuracies(report, path):
    """Bar chart of per-fold accuracy with the mean as a dashed line."""
    acc = np.asarray(report.accuracies)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        ax.bar(np.arange(1, len(acc) + 1), acc, color="0.6", width=0.6)
        ax.axhline(report.mean, color="k", ls="--", lw=0.8)
        ax.set_ylim(0, 1.05)
        ax.set_xlabel("fold")
        ax.set_ylabel("accuracy")
        ax.set_title(f"{report.method}-{report.transform}: {report.mean:.4f} ± {report.std:.4f}")
        _save(fig, path)
