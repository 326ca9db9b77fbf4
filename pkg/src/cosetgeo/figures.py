"""Matplotlib rendering of incidence geometries and subgroup counts.

Figures are written straight to files (Agg backend); recognized
geometries get a tailored layout, anything else falls back to a circle.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .geometry import GeometryName, IncidenceGeometry


def _circular_layout(n: int) -> list[tuple[float, float]]:
    return [
        (math.cos(2 * math.pi * k / n + math.pi / 2), math.sin(2 * math.pi * k / n + math.pi / 2))
        for k in range(n)
    ]


def _fano_layout(bijection) -> list[tuple[float, float]]:
    # classic triangle + incenter picture for the 7 reference points
    corners = [(0.0, 1.0), (-math.sqrt(3) / 2, -0.5), (math.sqrt(3) / 2, -0.5)]
    mids = [
        ((corners[1][0] + corners[2][0]) / 2, (corners[1][1] + corners[2][1]) / 2),
        ((corners[0][0] + corners[2][0]) / 2, (corners[0][1] + corners[2][1]) / 2),
        ((corners[0][0] + corners[1][0]) / 2, (corners[0][1] + corners[1][1]) / 2),
    ]
    # reference PG(2,2) points are the non-zero F_2^3 vectors 1..7
    ref = {1: corners[0], 2: corners[1], 4: corners[2], 6: mids[0], 5: mids[1], 3: mids[2], 7: (0.0, 0.0)}
    coords = [None] * 7
    for p in range(7):
        coords[p] = ref[bijection[p] + 1]
    return coords


def _pentagram_layout(bijection) -> list[tuple[float, float]]:
    # reference points are 2-subsets {i,j} of 5; place them on the star's
    # intersection ring: point {i,j} sits between outer spikes i and j
    from itertools import combinations

    pairs = list(combinations(range(5), 2))
    coords = [None] * 10
    for p in range(10):
        i, j = pairs[bijection[p]]
        ang_i = 2 * math.pi * i / 5 + math.pi / 2
        ang_j = 2 * math.pi * j / 5 + math.pi / 2
        # adjacent spikes meet close to the rim, skew pairs near the center
        r = 0.95 if (j - i) in (1, 4) else 0.5
        ang = math.atan2(
            (math.sin(ang_i) + math.sin(ang_j)) / 2, (math.cos(ang_i) + math.cos(ang_j)) / 2
        )
        coords[p] = (r * math.cos(ang), r * math.sin(ang))
    return coords


def render_geometry(geom: IncidenceGeometry, name: GeometryName, path: str) -> None:
    """Draw points and lines; size->=3 lines as colored polylines."""
    n = geom.point_count
    if name.kind == "fano" and name.bijection is not None:
        coords = _fano_layout(name.bijection)
    elif name.kind == "pentagram" and name.bijection is not None:
        coords = _pentagram_layout(name.bijection)
    else:
        coords = _circular_layout(n)
    fig, ax = plt.subplots(figsize=(5, 5))
    core = [l for l in geom.lines if len(l) >= 3]
    drawn = core if core else geom.lines
    cmap = plt.get_cmap("tab10")
    for k, line in enumerate(drawn):
        pts = [coords[p] for p in line]
        if len(line) >= 3:
            pts = sorted(pts, key=lambda q: math.atan2(q[1] - coords[line[0]][1] + 1e-9, q[0] - coords[line[0]][0] + 1e-9))
        xs = [q[0] for q in pts]
        ys = [q[1] for q in pts]
        ax.plot(xs, ys, "-", color=cmap(k % 10), linewidth=1.2, alpha=0.85, zorder=1)
    ax.scatter([c[0] for c in coords], [c[1] for c in coords], s=120, c="black", zorder=2)
    for p, (x, y) in enumerate(coords):
        ax.annotate(str(p + 1), (x, y), color="white", ha="center", va="center", fontsize=7, zorder=3)
    ax.set_title(str(name))
    ax.set_aspect("equal")
    ax.axis("off")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_eta(eta, path: str) -> None:
    """Histogram of subgroup-class counts by index."""
    fig, ax = plt.subplots(figsize=(6, 3))
    xs = np.arange(1, len(eta) + 1)
    ax.bar(xs, eta, color="#336699")
    ax.set_xlabel("index")
    ax.set_ylabel("conjugacy classes")
    ax.set_xticks(xs)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
