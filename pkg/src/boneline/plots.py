"""SVG rendering of evaluation and analysis outputs (matplotlib, Agg backend)."""

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def plot_accuracy_cases(results, path, title="Accuracy per case"):
    plt = _plt()
    cases = [r.case_id for r in results]
    avg = [100 * r.avg for r in results]
    lo = [100 * (r.avg - r.min) for r in results]
    hi = [100 * (r.max - r.avg) for r in results]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.errorbar(cases, avg, yerr=[lo, hi], fmt="o-", capsize=3)
    ax.set_xlabel("case")
    ax.set_ylabel("accuracy (%)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_roc(curve, path, fit=None, title="ROC"):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 5))
    pts = np.asarray(curve.points)
    ax.step(pts[:, 0], pts[:, 1], where="post", label=f"measured (AUC={curve.auc:.4f})")
    if fit is not None:
        fit = np.asarray(fit)
        ax.plot(fit[:, 0], fit[:, 1], "--", label="monotone fit")
    ax.plot([0, 1], [0, 1], ":", color="gray", label="reference")
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_correlation(corr, names, path):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 6))
    im = ax.imshow(np.asarray(corr), vmin=-1, vmax=1, cmap="viridis")
    ax.set_xticks(range(len(names)), names, rotation=90)
    ax.set_yticks(range(len(names)), names)
    fig.colorbar(im, ax=ax)
    ax.set_title("feature correlation")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_contributions(report, names, path):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(names)), 100 * np.asarray(report.contributions))
    ax.set_xticks(range(len(names)), names, rotation=90)
    ax.set_ylabel("contribution (%)")
    ax.set_title("feature contributions")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_profile(profile, bounds, path):
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(np.asarray(profile))
    if bounds is not None:
        for x in bounds:
            ax.axvline(x, color="red", linestyle="--")
    ax.set_xlabel("x")
    ax.set_ylabel("windowed endpoint frequency")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
