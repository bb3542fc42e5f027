"""Matplotlib figure rendering for the CLI report paths.

All figures are written to files; no interactive backend is assumed.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_selection_curve(curve, path):
    """AIC/BIC versus candidate component count."""
    ms = [row[0] for row in curve]
    aics = [row[1] for row in curve]
    bics = [row[2] for row in curve]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ms, aics, "o-", label="AIC")
    ax.plot(ms, bics, "s-", label="BIC")
    ax.set_xlabel("n_components")
    ax.set_ylabel("criterion value")
    ax.set_title("AIC/BIC vs. mixture components")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_feature_heatmap(feature_matrix, path, title="MFCC features"):
    """Feature matrix as a time-by-coefficient heatmap."""
    fig, ax = plt.subplots(figsize=(8, 4))
    im = ax.imshow(
        feature_matrix.vectors.T, aspect="auto", origin="lower",
        extent=[feature_matrix.frame_times_s[0],
                feature_matrix.frame_times_s[-1],
                0, feature_matrix.dim],
        cmap="viridis",
    )
    ax.set_xlabel("time (s)")
    ax.set_ylabel("coefficient")
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_vad_plot(energies, decision, hop_s, path):
    """Frame energy with the threshold and detected speech regions."""
    t = np.arange(len(energies)) * hop_s
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(t, energies, lw=0.8, label="frame RMS")
    ax.axhline(decision.threshold_used, color="r", ls="--", label="threshold")
    ax.axhline(decision.noise_floor, color="g", ls=":", label="noise floor")
    for start, end in decision.speech_regions:
        ax.axvspan(start * hop_s, end * hop_s, color="orange", alpha=0.2)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("energy")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_timeline_plot(diarization, path):
    """Speaker turns as colored horizontal bars."""
    labels = sorted({label for _, _, label in diarization.turns})
    ypos = {label: i for i, label in enumerate(labels)}
    cmap = plt.get_cmap("tab10")
    fig, ax = plt.subplots(figsize=(8, 1 + 0.5 * max(1, len(labels))))
    for onset, dur, label in diarization.turns:
        ax.barh(ypos[label], dur, left=onset, height=0.6,
                color=cmap(ypos[label] % 10))
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels)
    ax.set_xlabel("time (s)")
    ax.set_title(diarization.file_id or "diarization")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_dendrogram_plot(dendrogram, path):
    """Merge distances in merge order; the stopping gap is visible."""
    dists = [m[2] for m in dendrogram.merges]
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.plot(range(1, len(dists) + 1), dists, "o-")
    ax.set_xlabel("merge step")
    ax.set_ylabel("merge distance")
    ax.set_title("agglomeration merge distances")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
