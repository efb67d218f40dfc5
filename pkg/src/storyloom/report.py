"""Plots for evolution telemetry.

Renders the per-generation CSV written by the evolver into PNG figures:
novelty curves, population diversity, and archive growth.  Headless by
design so the CLI can run anywhere.
"""

from __future__ import annotations

import math
import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evolve import TelemetryRow


def plot_novelty(rows: Sequence[TelemetryRow], path: str) -> None:
    gens = [r.generation for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(gens, [r.best_novelty for r in rows], label="best", color="#2a6f97")
    ax.plot(gens, [r.mean_novelty for r in rows], label="mean", color="#e76f51")
    ax.set_xlabel("generation")
    ax.set_ylabel("novelty")
    ax.set_ylim(0, 1)
    ax.legend()
    ax.set_title("Novelty per generation")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_diversity(rows: Sequence[TelemetryRow], path: str) -> None:
    pts = [(r.generation, r.diversity) for r in rows
           if not math.isnan(r.diversity)]
    fig, ax = plt.subplots(figsize=(6, 4))
    if pts:
        ax.plot([g for g, _ in pts], [d for _, d in pts], color="#52796f")
    ax.set_xlabel("generation")
    ax.set_ylabel("mean pairwise similarity")
    ax.set_ylim(0, 1)
    ax.set_title("Population similarity per generation")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_archive_growth(rows: Sequence[TelemetryRow], path: str) -> None:
    gens = [r.generation for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(gens, [r.archive_size for r in rows], where="post", color="#6d597a")
    ax.set_xlabel("generation")
    ax.set_ylabel("archive size")
    ax.set_title("Archive growth")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report(rows: Sequence[TelemetryRow], out_dir: str) -> list[str]:
    """Write all three figures into ``out_dir``; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    targets = [
        (plot_novelty, os.path.join(out_dir, "novelty.png")),
        (plot_diversity, os.path.join(out_dir, "diversity.png")),
        (plot_archive_growth, os.path.join(out_dir, "archive_growth.png")),
    ]
    for fn, path in targets:
        fn(rows, path)
    return [path for _, path in targets]
