"""Diagnostic figure rendering for the batch report path."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def save_diagnostic_figure(view, mask, skeleton, metrics, warnings, out_path: Path,
                           title: str = "") -> None:
    """Write a 2x2 panel: input, mask overlay, skeleton, and the numbers."""
    from .pipeline import OVERLAY_TINT, render_overlay

    fig, axes = plt.subplots(2, 2, figsize=(10, 8))

    axes[0, 0].imshow(view.pixels)
    axes[0, 0].set_title("input")

    axes[0, 1].imshow(render_overlay(view, mask, OVERLAY_TINT).pixels)
    axes[0, 1].set_title("leaf mask overlay")

    axes[1, 0].imshow(skeleton.bits, cmap="gray", interpolation="nearest")
    axes[1, 0].set_title("skeleton")

    lines = [
        f"area: {metrics.area_mm2:.2f} mm$^2$  ({metrics.area_px} px)",
        f"length: {metrics.length_mm:.2f} mm  ({metrics.length_px} px)",
        f"mean width: {metrics.width_mm:.2f} mm",
        f"components: {metrics.component_count}",
        f"branch points: {metrics.skeleton_branch_points}",
    ]
    lines.extend(f"! {w}" for w in warnings)
    y = 0.9
    for line in lines:
        axes[1, 1].text(0.05, y, line, transform=axes[1, 1].transAxes, fontsize=11)
        y -= 0.1
    axes[1, 1].set_title("measurements")

    for ax in axes.flat:
        ax.axis("off")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=100)
    plt.close(fig)
