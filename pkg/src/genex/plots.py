"""Figure rendering for score reports and pipeline traces.

Renders to files only (Agg backend), so it works in headless runs; the
CLI writes these next to its JSON and JSONL outputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be set first

_METRIC_LABELS = ("P", "R", "F1")


def save_metrics_figure(report: dict, path) -> str:
    """Bar chart of precision/recall/F1 per task from a score report."""
    path = str(path)
    tasks = ("trigger", "argument")
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.35
    for offset, task in enumerate(tasks):
        block = report[task]
        values = [block["p"], block["r"], block["f1"]]
        positions = [i + offset * width for i in range(len(values))]
        ax.bar(positions, values, width, label=task)
    ax.set_xticks([i + width / 2 for i in range(len(_METRIC_LABELS))])
    ax.set_xticklabels(_METRIC_LABELS)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("exact-match extraction scores")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def save_trace_figure(results, path) -> str:
    """Bar chart of per-sentence decode counts (types, triggers, arguments)."""
    path = str(path)
    ids, xs, ys, zs = [], [], [], []
    for result in results:
        if result.failed:
            continue
        ids.append(result.id)
        trace = result.trace
        xs.append(trace.x)
        ys.append(sum(trace.y_per_type.values()))
        zs.append(sum(trace.z_per_type_role.values()))
    fig, ax = plt.subplots(figsize=(max(6, 0.5 * len(ids)), 4))
    width = 0.28
    positions = list(range(len(ids)))
    ax.bar([p - width for p in positions], xs, width, label="event types (x)")
    ax.bar(positions, ys, width, label="triggers (y)")
    ax.bar([p + width for p in positions], zs, width, label="arguments (z)")
    ax.set_xticks(positions)
    ax.set_xticklabels(ids, rotation=90, fontsize=7)
    ax.set_ylabel("count")
    ax.set_title("pipeline decode counts per sentence")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
