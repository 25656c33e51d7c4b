"""Divide-and-color step: i.i.d. red/blue coloring of FK clusters.

Color draws consume randomness in ascending canonical cluster-id order
(ids are ordered by minimal contained vertex), so a coloring is an exact
reproducible function of (clusters, seed).  Colors are materialized
per-vertex for cache-friendly arm detection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fk, geometry

IID = "iid"
WIRED_RED = "wired_red"

RED = "R"
BLUE = "B"


@dataclass
class Coloring:
    """Per-vertex color field; red[i] is True iff vertex i is red."""

    region: geometry.Region
    red: np.ndarray
    clusters: fk.ClusterSet | None = None

    def __post_init__(self):
        self.red = np.ascontiguousarray(self.red, dtype=np.bool_)
        if self.red.shape != (self.region.n_vertices,):
            raise ValueError("color array must cover all vertices")

    def color_of(self, v):
        return RED if self.red[self.region.vertex_index[tuple(v)]] else BLUE

    def dump(self):
        """`colors <n>` header plus an R/B string in sorted-vertex order."""
        body = "".join(RED if r else BLUE for r in self.red)
        return f"colors {self.region.n_vertices}\n{body}\n"


def load_colors(region, text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n = int(lines[0].split()[1])
    if n != region.n_vertices:
        raise ValueError("snapshot does not match the region")
    red = np.array([ch == RED for ch in lines[1]], dtype=bool)
    return Coloring(region, red)


def color_clusters(clusters, r, mode=IID, rng=None):
    """Color every cluster red with probability r, blue otherwise.

    ``wired_red`` additionally forces the merged boundary cluster red and
    requires wired clusters.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("coloring parameter r must lie in (0, 1)")
    if rng is None:
        rng = np.random.default_rng()
    if mode not in (IID, WIRED_RED):
        raise ValueError(f"unknown coloring mode {mode!r}")
    cluster_red = rng.random(clusters.n_clusters) < r
    if mode == WIRED_RED:
        if clusters.bc != fk.WIRED or clusters.ghost_label < 0:
            raise ValueError("wired_red coloring requires wired clusters")
        cluster_red[clusters.ghost_label] = True
    return Coloring(clusters.region, cluster_red[clusters.labels], clusters)


def color_swap(coloring):
    """Swap red and blue everywhere (an involution)."""
    return Coloring(coloring.region, ~coloring.red, coloring.clusters)


def swap_word(tau):
    """Swap the letters of a color sequence."""
    return "".join(RED if ch == BLUE else BLUE for ch in tau)
