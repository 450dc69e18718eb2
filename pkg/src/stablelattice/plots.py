"""Hasse-diagram figures rendered with matplotlib.

Used by the CLI's report paths to drop a PNG next to the text output.
Layout is layered: each node sits at the height of its longest chain
from a minimal element, spread evenly within its layer.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def _layers(n: int, edges: Sequence[tuple[int, int]]) -> list[int]:
    depth = [0] * n
    changed = True
    while changed:
        changed = False
        for i, j in edges:
            if depth[j] < depth[i] + 1:
                depth[j] = depth[i] + 1
                changed = True
    return depth


def hasse_figure(
    labels: Sequence[str],
    edges: Sequence[tuple[int, int]],
    path: str,
    title: str = "",
) -> None:
    """Draw the covering relation bottom-up and save it to ``path``."""
    n = len(labels)
    fig, ax = plt.subplots(figsize=(max(4.0, n * 0.9), max(3.0, n * 0.55)))
    if n == 0:
        ax.text(0.5, 0.5, "(empty)", ha="center", va="center")
    else:
        depth = _layers(n, edges)
        by_layer: dict[int, list[int]] = {}
        for i, d in enumerate(depth):
            by_layer.setdefault(d, []).append(i)
        pos = {}
        for d, nodes in by_layer.items():
            for k, i in enumerate(nodes):
                pos[i] = (k - (len(nodes) - 1) / 2.0, d)
        for i, j in edges:
            (x0, y0), (x1, y1) = pos[i], pos[j]
            ax.annotate(
                "",
                xy=(x1, y1),
                xytext=(x0, y0),
                arrowprops=dict(arrowstyle="-|>", color="0.45", lw=1.1,
                                shrinkA=14, shrinkB=14),
            )
        for i, (x, y) in pos.items():
            ax.plot([x], [y], "o", ms=26, mfc="#dce9f7", mec="#35567a", zorder=3)
            ax.text(x, y, labels[i], ha="center", va="center", fontsize=8, zorder=4)
    if title:
        ax.set_title(title)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
