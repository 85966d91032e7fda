"""Static vector-graphics summaries of matrix runs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

GAIN_TRACES = (
    ("rcac_pitch_kp_1_s", "pitch kp"),
    ("rcac_pitch_ki_1_s2", "pitch ki"),
    ("rcac_roll_kp_1_s", "roll kp"),
    ("rcac_roll_ki_1_s2", "roll ki"),
    ("rcac_p_kp_1_s", "roll-rate kp"),
    ("rcac_p_ki_1_s2", "roll-rate ki"),
    ("rcac_q_kp_1_s", "pitch-rate kp"),
    ("rcac_q_ki_1_s2", "pitch-rate ki"),
    ("rcac_r_kp_1_s", "yaw-rate kp"),
    ("rcac_r_ki_1_s2", "yaw-rate ki"),
)


def plot_trajectories(matrix, path: str | Path) -> None:
    """Top-down ground tracks of every run in the matrix."""
    fig, ax = plt.subplots(figsize=(7, 7))
    first = next(iter(matrix.results.values()))
    # mission polyline is identical across runs; draw it once from any log
    for name, res in matrix.results.items():
        ax.plot(res.log.column("east_m"), res.log.column("north_m"), label=name, lw=1.0)
    ax.set_xlabel("east [m]")
    ax.set_ylabel("north [m]")
    ax.set_aspect("equal")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title(f"ground tracks (benchmark: {matrix.benchmark})")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def plot_gain_traces(matrix, path: str | Path) -> None:
    """Adaptive gain histories, one subplot per gain entry."""
    fig, axes = plt.subplots(5, 2, figsize=(10, 12), sharex=True)
    for (column, label), ax in zip(GAIN_TRACES, axes.ravel()):
        for name, res in matrix.results.items():
            ax.plot(res.log.column("time_s"), res.log.column(column), label=name, lw=0.9)
        ax.set_ylabel(label, fontsize=8)
        ax.grid(True, alpha=0.3)
    axes[-1, 0].set_xlabel("time [s]")
    axes[-1, 1].set_xlabel("time [s]")
    axes[0, 0].legend(fontsize=7)
    fig.suptitle("adaptive gains")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def plot_metric_bars(matrix, path: str | Path) -> None:
    """Benchmark-normalized error metrics per run."""
    names = list(matrix.results)
    metrics = [
        ("norm_phi", "bank"),
        ("norm_theta", "elevation"),
        ("norm_traj", "trajectory"),
    ]
    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    for (attr, label), ax in zip(metrics, axes):
        values = [getattr(matrix.results[n].metrics, attr) for n in names]
        ax.bar(range(len(names)), values)
        ax.axhline(1.0, color="k", lw=0.8, ls="--")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=30, ha="right", fontsize=7)
        ax.set_title(f"{label} error / benchmark")
        ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
