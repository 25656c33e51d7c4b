"""Lattice regions on Z^2: boxes, annuli, halfplane semi-annuli, and duals.

A region is the subgraph of the square lattice induced by a finite vertex
set, optionally restricted to the upper halfplane.  All combinatorics is
done on integer coordinates; the mesh ``eps`` is carried as metadata and
only enters the loop-encoding module.  Regions are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

PLANE = "plane"
HALFPLANE = "halfplane"

STRONG = "strong"  # 4 axis neighbors
WEAK = "weak"      # 8 neighbors, diagonals allowed

_AXIS_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))
_DIAG_STEPS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class Region:
    """Induced subgraph of Z^2 (or Z x Z+) with canonical vertex/edge order.

    Vertices are sorted lexicographically by (x, y); edges are stored as
    index pairs sorted lexicographically by their endpoint coordinates.
    These canonical orders are the reference for every serialization and
    for cluster-id canonicalization downstream.
    """

    def __init__(self, vertices, ambient=PLANE, eps=Fraction(1), inner_radius=None,
                 outer_radius=None):
        if ambient not in (PLANE, HALFPLANE):
            raise ValueError(f"unknown ambient {ambient!r}")
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        pts = sorted(set(map(tuple, vertices)))
        if not pts:
            raise ValueError("a region needs at least one vertex")
        if ambient == HALFPLANE and any(y < 0 for _, y in pts):
            raise ValueError("halfplane region contains vertices with y < 0")
        self.ambient = ambient
        self.eps = eps
        self.inner_radius = inner_radius
        self.outer_radius = outer_radius
        self.vertices = np.array(pts, dtype=np.int64)
        self.vertex_index = {p: i for i, p in enumerate(pts)}
        self.n_vertices = len(pts)

        edges = []
        for i, (x, y) in enumerate(pts):
            for w in ((x + 1, y), (x, y + 1)):
                j = self.vertex_index.get(w)
                if j is not None:
                    edges.append((i, j))
        edges.sort(key=lambda e: (pts[e[0]], pts[e[1]]))
        self.edge_u = np.array([e[0] for e in edges], dtype=np.int32)
        self.edge_v = np.array([e[1] for e in edges], dtype=np.int32)
        self.n_edges = len(edges)
        self.edge_index = {
            (pts[edges[k][0]], pts[edges[k][1]]): k for k in range(self.n_edges)
        }
        self._diag = None
        self._boundaries = None
        self._adj = None

    # -- derived structure ------------------------------------------------

    @property
    def diag_pairs(self):
        """Index pairs of vertices at diagonal (d_inf = 1, d_1 = 2) distance."""
        if self._diag is None:
            du, dv = [], []
            for i, (x, y) in enumerate(map(tuple, self.vertices)):
                for dx, dy in ((1, 1), (1, -1)):
                    j = self.vertex_index.get((x + dx, y + dy))
                    if j is not None:
                        du.append(i)
                        dv.append(j)
            self._diag = (np.array(du, dtype=np.int32), np.array(dv, dtype=np.int32))
        return self._diag

    def degree_arrays(self):
        deg = np.zeros(self.n_vertices, dtype=np.int32)
        np.add.at(deg, self.edge_u, 1)
        np.add.at(deg, self.edge_v, 1)
        return deg

    def edge_endpoints(self, k):
        return tuple(self.vertices[self.edge_u[k]]), tuple(self.vertices[self.edge_v[k]])

    def contains(self, v):
        return tuple(v) in self.vertex_index

    def ring_indices(self, s):
        """Indices of region vertices with sup-norm exactly s."""
        norm = np.max(np.abs(self.vertices), axis=1)
        return np.nonzero(norm == s)[0]

    def inner_ring(self):
        if self.inner_radius is None:
            return np.array([], dtype=np.int64)
        return self.ring_indices(self.inner_radius)

    def outer_ring(self):
        if self.outer_radius is None:
            return np.array([], dtype=np.int64)
        return self.ring_indices(self.outer_radius)


class BoundarySets:
    """Vertex boundaries of a region w.r.t. Z^2 and, if relevant, Z x Z+."""

    def __init__(self, full_boundary, half_boundary):
        self.full_boundary = frozenset(full_boundary)
        self.half_boundary = frozenset(half_boundary)


class DualRegion:
    """Dual edges (on (1/2,1/2) + Z^2) crossing the primal edges of a region.

    ``dual_edges[k]`` crosses ``region.edges[k]``; the crossing map is the
    index identity in both directions.  Dual vertices are half-integer
    points, stored as exact float pairs.
    """

    def __init__(self, region):
        self.region = region
        verts = region.vertices
        pts = {}
        du, dv = [], []
        dual_edges = []
        for k in range(region.n_edges):
            (x1, y1) = verts[region.edge_u[k]]
            (x2, y2) = verts[region.edge_v[k]]
            if y1 == y2:  # horizontal primal edge -> vertical dual edge
                a = (x1 + 0.5, y1 - 0.5)
                b = (x1 + 0.5, y1 + 0.5)
            else:  # vertical primal edge -> horizontal dual edge
                a = (x1 - 0.5, y1 + 0.5)
                b = (x1 + 0.5, y1 + 0.5)
            for p in (a, b):
                if p not in pts:
                    pts[p] = len(pts)
            du.append(pts[a])
            dv.append(pts[b])
            dual_edges.append((a, b))
        self.dual_vertices = list(pts)
        self.dual_vertex_index = pts
        self.dual_edge_u = np.array(du, dtype=np.int32)
        self.dual_edge_v = np.array(dv, dtype=np.int32)
        self.dual_edges = dual_edges
        self.n_dual_vertices = len(pts)

    def crossing_map(self):
        """dual edge -> primal edge, as a dict on coordinate pairs."""
        out = {}
        for k, de in enumerate(self.dual_edges):
            out[de] = self.region.edge_endpoints(k)
        return out

    def ring_indices(self, s):
        """Indices of dual vertices with sup-norm exactly s (s half-integer)."""
        out = []
        for i, (x, y) in enumerate(self.dual_vertices):
            if max(abs(x), abs(y)) == s:
                out.append(i)
        return np.array(out, dtype=np.int64)


# -- constructors ---------------------------------------------------------

def build_box(n, eps=Fraction(1)):
    """Box of radius n: all lattice points with sup-norm <= n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = [(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)]
    return Region(pts, PLANE, eps, outer_radius=n)


def build_annulus(m, n, eps=Fraction(1)):
    """Closed annulus from m to n: sup-norm in [m, n]."""
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    pts = [(x, y) for x in range(-n, n + 1) for y in range(-n, n + 1)
           if max(abs(x), abs(y)) >= m]
    return Region(pts, PLANE, eps, inner_radius=m, outer_radius=n)


def build_half_annulus(m, n, eps=Fraction(1)):
    """Annulus from m to n intersected with the closed upper halfplane."""
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    pts = [(x, y) for x in range(-n, n + 1) for y in range(0, n + 1)
           if max(abs(x), abs(y)) >= m]
    return Region(pts, HALFPLANE, eps, inner_radius=m, outer_radius=n)


def build_half_box(n, eps=Fraction(1)):
    """Upper-half box [-n, n] x [0, n] used as halfplane sampling window."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = [(x, y) for x in range(-n, n + 1) for y in range(0, n + 1)]
    return Region(pts, HALFPLANE, eps, outer_radius=n)


def from_vertices(vertices, ambient=PLANE, eps=Fraction(1)):
    """Region induced by an explicit vertex set."""
    return Region(vertices, ambient, eps)


# -- operations -----------------------------------------------------------

def boundaries(region):
    """Vertex boundaries by degree deficiency.

    ``full_boundary`` collects vertices whose degree in the region is
    smaller than their degree in Z^2 (always 4); for halfplane regions,
    ``half_boundary`` uses the ambient Z x Z+ degree instead (3 on the
    axis, 4 above it).
    """
    if region._boundaries is not None:
        return region._boundaries
    deg = region.degree_arrays()
    pts = list(map(tuple, region.vertices))
    full = {p for p, d in zip(pts, deg) if d < 4}
    half = set()
    if region.ambient == HALFPLANE:
        for p, d in zip(pts, deg):
            expected = 3 if p[1] == 0 else 4
            if d < expected:
                half.add(p)
    region._boundaries = BoundarySets(full, half)
    return region._boundaries


def boundary_indices(region):
    """(full, half) boundary vertex index arrays, in canonical vertex order."""
    bs = boundaries(region)
    full = np.array(sorted(region.vertex_index[p] for p in bs.full_boundary),
                    dtype=np.int64)
    half = np.array(sorted(region.vertex_index[p] for p in bs.half_boundary),
                    dtype=np.int64)
    return full, half


def dual_of(region):
    return DualRegion(region)


def neighbors(v, mode, region=None):
    """Axis neighbors (strong) or axis+diagonal neighbors (weak) of v.

    When a region is supplied, the result is clipped to its vertex set.
    """
    x, y = v
    steps = _AXIS_STEPS if mode == STRONG else _AXIS_STEPS + _DIAG_STEPS
    if mode not in (STRONG, WEAK):
        raise ValueError(f"unknown adjacency mode {mode!r}")
    out = [(x + dx, y + dy) for dx, dy in steps]
    if region is not None:
        out = [w for w in out if region.contains(w)]
    return out


# -- ring walks -----------------------------------------------------------

def ring_coordinate(p, s):
    """Perimeter coordinate in [0, 8s) of a point with sup-norm s.

    The walk starts at the corner (s, s) and proceeds counterclockwise:
    top edge (x decreasing), left edge (y decreasing), bottom edge
    (x increasing), right edge (y increasing).  Works for half-integer s.
    """
    x, y = p
    if y == s:
        return s - x
    if x == -s:
        return 2 * s + (s - y)
    if y == -s:
        return 4 * s + (x + s)
    if x == s:
        t = 6 * s + (y + s)
        return t if t < 8 * s else 0
    raise ValueError(f"{p} is not on the ring of radius {s}")


def ring_walk(region, s, halfplane=None):
    """Region vertices of sup-norm s ordered counterclockwise.

    Plane regions: cyclic order starting at the corner (s, s).  Halfplane
    regions: linear order starting at the rightmost point (s, 0), i.e. up
    the right side, across the top, and down to (-s, 0).
    """
    if halfplane is None:
        halfplane = region.ambient == HALFPLANE
    idx = region.ring_indices(s)
    pts = [tuple(region.vertices[i]) for i in idx]
    if halfplane:
        start = 7 * s  # coordinate of (s, 0)
        key = [(ring_coordinate(p, s) - start) % (8 * s) for p in pts]
    else:
        key = [ring_coordinate(p, s) for p in pts]
    order = np.argsort(np.array(key, dtype=float), kind="stable")
    return idx[order]


# -- serialization --------------------------------------------------------

def dump_region(region):
    """Line-oriented text format: header, then `v x y` and `e ...` lines."""
    lines = [f"region ambient={region.ambient} eps={region.eps}"]
    for x, y in region.vertices:
        lines.append(f"v {x} {y}")
    for k in range(region.n_edges):
        (x1, y1), (x2, y2) = region.edge_endpoints(k)
        lines.append(f"e {x1} {y1} {x2} {y2}")
    return "\n".join(lines) + "\n"


def load_region(text):
    header, *rest = [ln for ln in text.splitlines() if ln.strip()]
    fields = dict(kv.split("=", 1) for kv in header.split()[1:])
    pts = []
    for ln in rest:
        parts = ln.split()
        if parts[0] == "v":
            pts.append((int(parts[1]), int(parts[2])))
    return Region(pts, fields["ambient"], Fraction(fields["eps"]))
