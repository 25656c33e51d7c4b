"""Loop encodings of bond/site configurations and loop-space metrics.

All tile geometry lives on a quarter-mesh integer grid (units of eps/4):
edge rectangles, vertex squares, and the corner-decorated color tiles are
then exact unions of unit cells and contour extraction is exact integer
arithmetic.  Cluster encodings draw, per cluster, a rectangle of width
eps/2 and length 3*eps/2 around each open edge plus an eps/2 square around
each vertex; color encodings draw a corner-augmented (plus sign) or
corner-notched (minus sign) square over each blue vertex, clipped to the
domain.  The two signs realize the weak-blue/strong-red and strong-blue/
weak-red conventions respectively.

Distances: discrete Frechet between closed curves (minimized over cyclic
shifts and orientation) and between open curves (increasing
reparametrizations), and a threshold-matching distance between loop
collections.  All are documented upper bounds of the corresponding
continuum infima; with dense vertices the Frechet bound is tight to one
quarter-mesh step, and uniform subsampling of very long loops widens the
slack proportionally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numba as nb
import numpy as np

from . import geometry
from ._labeling import label_masked

OUTER_BOND = "outer_bond"
INNER_BOND = "inner_bond"
COLOR_PLUS = "color_plus"
COLOR_MINUS = "color_minus"

_LEFT_CELL = {
    (1, 0): lambda p: (p[0], p[1]),
    (0, 1): lambda p: (p[0] - 1, p[1]),
    (-1, 0): lambda p: (p[0] - 1, p[1] - 1),
    (0, -1): lambda p: (p[0], p[1] - 1),
}


def _rot_ccw(d):
    return (-d[1], d[0])


def _rot_cw(d):
    return (d[1], -d[0])


@dataclass
class Loop:
    """Closed axis-parallel polygon on the quarter-mesh grid.

    ``points`` holds the corner points (collinear points compressed); the
    polygon closes implicitly from the last point back to the first.
    """

    points: np.ndarray
    tag: str = ""
    level: int | None = None
    cluster: int = -1
    touches_domain_boundary: bool = False
    eps: Fraction = Fraction(1)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.int64)
        if len(self.points) < 4:
            raise ValueError("degenerate loop")

    def n_steps(self):
        diffs = np.abs(np.diff(np.vstack([self.points, self.points[:1]]),
                               axis=0))
        return int(diffs.sum())

    def diameter(self):
        """Exact Euclidean diameter of the polygon, in ambient units."""
        return _diameter_of(self.points) * float(self.eps) / 4.0

    def bbox(self):
        return (self.points[:, 0].min(), self.points[:, 1].min(),
                self.points[:, 0].max(), self.points[:, 1].max())


@dataclass
class Curve:
    """Open polygonal curve with endpoints on the domain boundary."""

    points: np.ndarray
    eps: Fraction = Fraction(1)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.int64)
        if len(self.points) < 2:
            raise ValueError("degenerate curve")


@dataclass
class LoopSet:
    loops: list
    eps: Fraction = Fraction(1)

    def __iter__(self):
        return iter(self.loops)

    def __len__(self):
        return len(self.loops)

    def with_tag(self, tag):
        return [lp for lp in self.loops if lp.tag == tag]


def _diameter_of(points):
    pts = np.unique(points, axis=0).astype(float)
    if len(pts) == 1:
        raise ValueError("degenerate loop has no diameter")
    hull = _convex_hull(pts)
    best = 0.0
    for i in range(len(hull)):
        d = np.max(np.sum((hull - hull[i]) ** 2, axis=1))
        best = max(best, d)
    return float(np.sqrt(best))


def _convex_hull(pts):
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def half(points):
        out = []
        for p in points:
            while len(out) >= 2 and np.cross(out[-1] - out[-2], p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


# -- contour tracing ----------------------------------------------------------

def _boundary_edges(occupied):
    """Directed unit edges with the occupied cell on the left."""
    edges = set()
    for (i, j) in occupied:
        if (i, j - 1) not in occupied:
            edges.add(((i, j), (i + 1, j)))
        if (i, j + 1) not in occupied:
            edges.add(((i + 1, j + 1), (i, j + 1)))
        if (i - 1, j) not in occupied:
            edges.add(((i, j + 1), (i, j)))
        if (i + 1, j) not in occupied:
            edges.add(((i + 1, j), (i + 1, j + 1)))
    return edges


def _compress(points):
    out = [points[0]]
    for p in points[1:]:
        if len(out) >= 2:
            (x1, y1), (x2, y2) = out[-2], out[-1]
            if (p[0] - x2, p[1] - y2) == (x2 - x1, y2 - y1):
                out.pop()
        out.append(p)
    # close-up: drop a collinear seam at the start point
    if len(out) >= 3:
        (x1, y1), (x2, y2) = out[-2], out[-1]
        if (out[0][0] - x2, out[0][1] - y2) == (x2 - x1, y2 - y1):
            out.pop()
    return out


def _trace_cycles(edges):
    """Decompose directed boundary edges into non-crossing closed loops.

    At ambiguous (checkerboard) corners the sharpest left turn is taken,
    which keeps the occupied region on the left and splits the crossing
    into two touching loops.  Every edge is consumed exactly once.
    """
    out_map = {}
    for p, q in edges:
        out_map.setdefault(p, []).append(q)
    unused = set(edges)
    loops = []
    for start_edge in sorted(edges):
        if start_edge not in unused:
            continue
        p, q = start_edge
        unused.discard(start_edge)
        pts = [p]
        while q != start_edge[0]:
            pts.append(q)
            d = (q[0] - p[0], q[1] - p[1])
            for cand in (_rot_ccw(d), d, _rot_cw(d), (-d[0], -d[1])):
                nxt = (q[0] + cand[0], q[1] + cand[1])
                if (q, nxt) in unused:
                    unused.discard((q, nxt))
                    p, q = q, nxt
                    break
            else:
                raise RuntimeError("contour tracing reached a dead end")
        loops.append(_compress(pts))
    if unused:
        raise RuntimeError("contour tracing left boundary edges unused")
    return loops


def _flood_unbounded(occupied):
    """Cells of the unbounded complement component within a margin box."""
    if not occupied:
        return set(), (0, 0, 0, 0)
    xs = [c[0] for c in occupied]
    ys = [c[1] for c in occupied]
    lo_x, hi_x = min(xs) - 1, max(xs) + 1
    lo_y, hi_y = min(ys) - 1, max(ys) + 1
    seen = set()
    stack = [(lo_x, lo_y)]
    seen.add((lo_x, lo_y))
    while stack:
        x, y = stack.pop()
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if not (lo_x <= nx <= hi_x and lo_y <= ny <= hi_y):
                continue
            if (nx, ny) in occupied or (nx, ny) in seen:
                continue
            seen.add((nx, ny))
            stack.append((nx, ny))
    return seen, (lo_x, lo_y, hi_x, hi_y)


# -- encoders -----------------------------------------------------------------

def _cluster_cells(region, cfg, labels, lab):
    cells = set()
    verts = region.vertices
    members = np.nonzero(labels == lab)[0]
    for i in members:
        x, y = 4 * verts[i][0], 4 * verts[i][1]
        cells.update(((x - 1, y - 1), (x, y - 1), (x - 1, y), (x, y)))
    for k in np.nonzero(cfg.open)[0]:
        a, b = region.edge_u[k], region.edge_v[k]
        if labels[a] != lab:
            continue
        (x1, y1), (x2, y2) = verts[a], verts[b]
        if y1 == y2:  # horizontal edge: 6 x 2 cells
            for i in range(4 * x1 - 1, 4 * x2 + 1):
                cells.add((i, 4 * y1 - 1))
                cells.add((i, 4 * y1))
        else:  # vertical edge: 2 x 6 cells
            for j in range(4 * y1 - 1, 4 * y2 + 1):
                cells.add((4 * x1 - 1, j))
                cells.add((4 * x1, j))
    return cells


def encode_bond_loops(region, cfg, eps=None):
    """Per-cluster outer and inner boundary loops of a bond configuration.

    Outer loops bound the unbounded complement component of the cluster's
    tile union (exactly one per cluster); inner loops bound its holes.
    Loops of clusters meeting the domain boundary are flagged.
    """
    eps = Fraction(eps if eps is not None else region.eps)
    labels, count = label_masked(region.n_vertices, region.edge_u,
                                 region.edge_v, cfg.open)
    full, _ = geometry.boundary_indices(region)
    touches = np.zeros(count, dtype=bool)
    touches[labels[full]] = True
    loops = []
    for lab in range(count):
        cells = _cluster_cells(region, cfg, labels, lab)
        unbounded, _ = _flood_unbounded(cells)
        edges = _boundary_edges(cells)
        outer_edges, hole_edges = set(), set()
        for p, q in edges:
            d = (q[0] - p[0], q[1] - p[1])
            comp_cell = _LEFT_CELL[(-d[0], -d[1])](q)  # cell right of p->q
            if comp_cell in unbounded:
                outer_edges.add((p, q))
            else:
                hole_edges.add((p, q))
        outer = _trace_cycles(outer_edges)
        if len(outer) != 1:
            raise RuntimeError("cluster encoding must have one outer loop")
        loops.append(Loop(np.array(outer[0]), OUTER_BOND, cluster=lab,
                          touches_domain_boundary=bool(touches[lab]), eps=eps))
        for pts in _trace_cycles(hole_edges):
            loops.append(Loop(np.array(pts), INNER_BOND, cluster=lab,
                              touches_domain_boundary=bool(touches[lab]),
                              eps=eps))
    loopset = LoopSet(loops, eps)
    nesting_levels(loopset)
    return loopset


def _domain_cells(region):
    cells = set()
    for (x, y) in map(tuple, region.vertices):
        if (region.contains((x + 1, y)) and region.contains((x, y + 1))
                and region.contains((x + 1, y + 1))):
            for i in range(4 * x, 4 * x + 4):
                for j in range(4 * y, 4 * y + 4):
                    cells.add((i, j))
    return cells


def _color_tile_cells(x, y, sign):
    """Cells of the color tile centered at vertex (x, y), quarter units.

    The plus tile is the eps-square with an eps/2 box superimposed on each
    corner; the minus tile is the eps-square with those boxes removed.
    """
    x, y = 4 * x, 4 * y
    main = {(i, j) for i in range(x - 2, x + 2) for j in range(y - 2, y + 2)}
    if sign == "+":
        for (cx, cy) in ((x + 2, y + 2), (x - 2, y + 2), (x + 2, y - 2),
                         (x - 2, y - 2)):
            main.update({(cx - 1, cy - 1), (cx, cy - 1), (cx - 1, cy),
                         (cx, cy)})
        return main
    corner_cells = {(x + 1, y + 1), (x - 2, y + 1), (x + 1, y - 2),
                    (x - 2, y - 2)}
    return main - corner_cells


def encode_color_loops(region, coloring, sign="+", eps=None):
    """Boundary loops of the blue tile union, clipped to the domain."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    eps = Fraction(eps if eps is not None else region.eps)
    domain = _domain_cells(region)
    occupied = set()
    for i in np.nonzero(~coloring.red)[0]:
        x, y = region.vertices[i]
        occupied.update(_color_tile_cells(x, y, sign))
    occupied &= domain
    tag = COLOR_PLUS if sign == "+" else COLOR_MINUS
    loops = [Loop(np.array(pts), tag, eps=eps)
             for pts in _trace_cycles(_boundary_edges(occupied))]
    loopset = LoopSet(loops, eps)
    if loops:
        nesting_levels(loopset)
    return loopset


# -- nesting ------------------------------------------------------------------

def _segments(points):
    closed = np.vstack([points, points[:1]])
    return list(zip(map(tuple, closed[:-1]), map(tuple, closed[1:])))


def _point_inside(pt2, points):
    """Parity test for a doubled-coordinate point against a loop."""
    px, py = pt2
    crossings = 0
    for (x1, y1), (x2, y2) in _segments(points):
        if y1 != y2:
            continue
        lo, hi = sorted((2 * x1, 2 * x2))
        if lo < px < hi and 2 * y1 > py:
            crossings += 1
    return crossings % 2 == 1


def _probe_point(points):
    """Doubled-coordinate midpoint of some horizontal segment of the loop."""
    for (x1, y1), (x2, y2) in _segments(points):
        if y1 == y2:
            return (x1 + x2, 2 * y1)
    raise ValueError("loop has no horizontal segment")


def _check_no_crossings(loops):
    segs = []
    for idx, lp in enumerate(loops):
        for a, b in _segments(lp.points):
            segs.append((idx, a, b))
    if len(segs) > 20000:
        return  # validation skipped on very large collections
    for i in range(len(segs)):
        li, (ax1, ay1), (ax2, ay2) = segs[i]
        for j in range(i + 1, len(segs)):
            lj, (bx1, by1), (bx2, by2) = segs[j]
            if li == lj:
                continue
            ah, bh = ay1 == ay2, by1 == by2
            if ah == bh:
                continue
            if not ah:
                (ax1, ay1, ax2, ay2), (bx1, by1, bx2, by2) = \
                    (bx1, by1, bx2, by2), (ax1, ay1, ax2, ay2)
            # now a horizontal, b vertical; proper crossing is interior
            alo, ahi = sorted((ax1, ax2))
            blo, bhi = sorted((by1, by2))
            if alo < bx1 < ahi and blo < ay1 < bhi:
                raise ValueError("crossing loops")


def nesting_levels(loopset, validate=True):
    """1 + number of distinct surrounding loops, per loop."""
    loops = list(loopset.loops)
    if validate:
        _check_no_crossings(loops)
    probes = [_probe_point(lp.points) for lp in loops]
    for i, lp in enumerate(loops):
        level = 1
        for j, other in enumerate(loops):
            if i != j and _point_inside(probes[i], other.points):
                level += 1
        lp.level = level
    return [lp.level for lp in loops]


# -- interfaces ---------------------------------------------------------------

def _domain_boundary_walk(domain_cells):
    edges = _boundary_edges(domain_cells)
    unbounded, _ = _flood_unbounded(domain_cells)
    outer = set()
    for p, q in edges:
        d = (q[0] - p[0], q[1] - p[1])
        if _LEFT_CELL[(-d[0], -d[1])](q) in unbounded:
            outer.add((p, q))
    walks = _trace_cycles(outer)
    if len(walks) != 1:
        raise ValueError("domain boundary is not a single loop")
    pts = walks[0]
    # re-densify to unit steps for edge-level bookkeeping
    dense = []
    closed = pts + [pts[0]]
    for (x1, y1), (x2, y2) in zip(closed[:-1], closed[1:]):
        dx = (x2 > x1) - (x2 < x1)
        dy = (y2 > y1) - (y2 < y1)
        steps = abs(x2 - x1) + abs(y2 - y1)
        for t in range(steps):
            dense.append((x1 + t * dx, y1 + t * dy))
    return dense


def interface_curve(region, coloring, a, b, sign="+", eps=None):
    """Interface from boundary vertex a to b: blue on its right, red on left.

    Traces the counterclockwise domain boundary arc from a, detouring
    along the blue tile boundary (kept on the right) whenever the arc
    meets it.
    """
    if tuple(a) == tuple(b):
        raise ValueError("interface endpoints must differ")
    eps = Fraction(eps if eps is not None else region.eps)
    domain = _domain_cells(region)
    occupied = set()
    for i in np.nonzero(~coloring.red)[0]:
        x, y = region.vertices[i]
        occupied.update(_color_tile_cells(x, y, sign))
    occupied &= domain

    walk = _domain_boundary_walk(domain)
    n = len(walk)
    out_map = {}

    def add_edge(p, q):
        out_map.setdefault(p, []).append(q)

    lambda_edges = set()
    for t in range(n):
        p, q = walk[t], walk[(t + 1) % n]
        lambda_edges.add((p, q))
        d = (q[0] - p[0], q[1] - p[1])
        inland = _LEFT_CELL[d](p)
        if inland in occupied:
            add_edge(q, p)  # squeezed against the wall: blue kept on right
        else:
            add_edge(p, q)
    for p, q in _boundary_edges(occupied):
        if (p, q) in lambda_edges or (q, p) in lambda_edges:
            continue
        add_edge(q, p)  # reverse: blue tile on the right of travel

    start = (4 * a[0], 4 * a[1])
    goal = (4 * b[0], 4 * b[1])
    arrive = {walk[(t + 1) % n]: walk[t] for t in range(n)}
    if start not in arrive:
        raise ValueError("endpoint a is not on the domain boundary")
    prev = arrive[start]
    heading = (start[0] - prev[0], start[1] - prev[1])
    pts = [start]
    cur = start
    used = set()
    limit = 8 * (len(domain) + len(occupied)) + 16
    while cur != goal:
        options = out_map.get(cur, [])
        nxt = None
        for cand in (_rot_cw(heading), heading, _rot_ccw(heading),
                     (-heading[0], -heading[1])):
            q = (cur[0] + cand[0], cur[1] + cand[1])
            if q in options and (cur, q) not in used:
                nxt = q
                break
        if nxt is None:
            raise RuntimeError("interface walk reached a dead end")
        used.add((cur, nxt))
        heading = (nxt[0] - cur[0], nxt[1] - cur[1])
        pts.append(nxt)
        cur = nxt
        if len(pts) > limit:
            raise RuntimeError("interface walk failed to terminate")
    return Curve(np.array(_compress_open(pts)), eps)


def _compress_open(points):
    out = [points[0]]
    for p in points[1:]:
        if len(out) >= 2:
            (x1, y1), (x2, y2) = out[-2], out[-1]
            if (p[0] - x2, p[1] - y2) == (x2 - x1, y2 - y1):
                out.pop()
        out.append(p)
    return out


# -- metrics ------------------------------------------------------------------

@nb.njit(cache=True, nogil=True)
def _frechet_kernel(px, py, qx, qy):
    n = px.shape[0]
    m = qx.shape[0]
    prev = np.empty(m)
    cur = np.empty(m)
    for j in range(m):
        d = np.sqrt((px[0] - qx[j]) ** 2 + (py[0] - qy[j]) ** 2)
        prev[j] = d if j == 0 else max(prev[j - 1], d)
    for i in range(1, n):
        for j in range(m):
            d = np.sqrt((px[i] - qx[j]) ** 2 + (py[i] - qy[j]) ** 2)
            if j == 0:
                cur[0] = max(prev[0], d)
            else:
                best = prev[j]
                if prev[j - 1] < best:
                    best = prev[j - 1]
                if cur[j - 1] < best:
                    best = cur[j - 1]
                cur[j] = max(d, best)
        prev, cur = cur, prev
    return prev[m - 1]


def _densify_closed(points):
    out = []
    closed = np.vstack([points, points[:1]])
    for (x1, y1), (x2, y2) in zip(closed[:-1], closed[1:]):
        dx = (x2 > x1) - (x2 < x1)
        dy = (y2 > y1) - (y2 < y1)
        for t in range(abs(x2 - x1) + abs(y2 - y1)):
            out.append((x1 + t * dx, y1 + t * dy))
    return np.array(out, dtype=float)


def _densify_open(points):
    out = [tuple(points[0])]
    for (x1, y1), (x2, y2) in zip(points[:-1], points[1:]):
        dx = (x2 > x1) - (x2 < x1)
        dy = (y2 > y1) - (y2 < y1)
        for t in range(1, abs(x2 - x1) + abs(y2 - y1) + 1):
            out.append((x1 + t * dx, y1 + t * dy))
    return np.array(out, dtype=float)


def _cap(points, max_points):
    n = len(points)
    if n <= max_points:
        return points
    stride = -(-n // max_points)
    return points[::stride]


def loop_distance(eta, eta_prime, max_points=128):
    """Discrete Frechet distance between closed loops, in ambient units.

    Minimized over cyclic shifts and orientation of the second loop; an
    upper bound of the reparametrization-infimum distance, tight to one
    quarter-mesh step for loops short enough to avoid subsampling.
    """
    scale = float(eta.eps) / 4.0
    p = _cap(_densify_closed(eta.points), max_points) * scale
    q0 = _cap(_densify_closed(eta_prime.points), max_points) * float(
        eta_prime.eps) / 4.0
    best = np.inf
    for q in (q0, q0[::-1]):
        qx, qy = np.ascontiguousarray(q[:, 0]), np.ascontiguousarray(q[:, 1])
        for shift in range(len(q)):
            rx = np.roll(qx, -shift)
            ry = np.roll(qy, -shift)
            d = _frechet_kernel(np.ascontiguousarray(p[:, 0]),
                                np.ascontiguousarray(p[:, 1]), rx, ry)
            if d < best:
                best = d
    return float(best)


def curve_distance(gamma, gamma_prime, max_points=256):
    """Discrete Frechet distance between open curves (orientation kept)."""
    p = _cap(_densify_open(gamma.points), max_points) * float(gamma.eps) / 4.0
    q = _cap(_densify_open(gamma_prime.points), max_points) * float(
        gamma_prime.eps) / 4.0
    return float(_frechet_kernel(
        np.ascontiguousarray(p[:, 0]), np.ascontiguousarray(p[:, 1]),
        np.ascontiguousarray(q[:, 0]), np.ascontiguousarray(q[:, 1])))


def _bbox_lower_bound(la, lb):
    sa = float(la.eps) / 4.0
    sb = float(lb.eps) / 4.0
    a = la.bbox()
    b = lb.bbox()
    return max(abs(a[0] * sa - b[0] * sb), abs(a[1] * sa - b[1] * sb),
               abs(a[2] * sa - b[2] * sb), abs(a[3] * sa - b[3] * sb))


def loopset_distance(gamma, gamma_prime, max_points=128, big_limit=40):
    """Matching distance between loop collections (upper bound).

    Scans a threshold t over loop diameters; loops larger than t must be
    matched across the collections (optimal bottleneck matching for up to
    12 loops per side, greedy nearest-neighbour beyond), loops of diameter
    at most t may stay unmatched and contribute their diameter.
    """
    a = list(gamma.loops if isinstance(gamma, LoopSet) else gamma)
    b = list(gamma_prime.loops if isinstance(gamma_prime, LoopSet)
             else gamma_prime)
    if not a and not b:
        return 0.0
    diam_a = [lp.diameter() for lp in a]
    diam_b = [lp.diameter() for lp in b]
    all_diams = sorted(set(diam_a) | set(diam_b), reverse=True)
    thresholds = [d for d in all_diams
                  if sum(x > d for x in diam_a) <= big_limit
                  and sum(x > d for x in diam_b) <= big_limit]
    thresholds.append(max(all_diams))  # match nothing
    cache = {}

    def dist(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = loop_distance(a[i], b[j], max_points)
        return cache[(i, j)]

    best = np.inf
    for t in sorted(set(thresholds)):
        ia = [i for i, d in enumerate(diam_a) if d > t]
        ib = [j for j, d in enumerate(diam_b) if d > t]
        if len(ia) != len(ib):
            continue
        unmatched = max([d for d in diam_a + diam_b if d <= t], default=0.0)
        if max(unmatched, 0.0) >= best:
            continue
        if not ia:
            score = unmatched
        elif len(ia) <= 12:
            score = max(_bottleneck(ia, ib, dist), unmatched)
        else:
            score = max(_greedy_match(ia, ib, a, b, dist), unmatched)
        best = min(best, score)
    return float(best)


def _bottleneck(ia, ib, dist):
    costs = sorted({dist(i, j) for i in ia for j in ib})
    lo, hi = 0, len(costs) - 1
    best = costs[-1]
    while lo <= hi:
        mid = (lo + hi) // 2
        if _feasible(ia, ib, dist, costs[mid]):
            best = costs[mid]
            hi = mid - 1
        else:
            lo = mid + 1
    return best


def _feasible(ia, ib, dist, thresh):
    match = {}

    def augment(i, seen):
        for j in ib:
            if j in seen or dist(i, j) > thresh:
                continue
            seen.add(j)
            if j not in match or augment(match[j], seen):
                match[j] = i
                return True
        return False

    return all(augment(i, set()) for i in ia)


def _greedy_match(ia, ib, a, b, dist):
    remaining = list(ib)
    worst = 0.0
    for i in sorted(ia, key=lambda i: -a[i].diameter()):
        remaining.sort(key=lambda j: _bbox_lower_bound(a[i], b[j]))
        best_j, best_d = None, np.inf
        for j in remaining:
            if _bbox_lower_bound(a[i], b[j]) >= best_d:
                break
            d = dist(i, j)
            if d < best_d:
                best_j, best_d = j, d
        remaining.remove(best_j)
        worst = max(worst, best_d)
    return worst


# -- export -------------------------------------------------------------------

def dump_loops(loopset):
    """`loop tag=<t> level=<k> n=<verts>` headers with quarter-mesh points."""
    lines = []
    for lp in loopset.loops:
        lines.append(f"loop tag={lp.tag} level={lp.level} n={len(lp.points)}")
        for x, y in lp.points:
            lines.append(f"{x} {y}")
    return "\n".join(lines) + "\n"


def load_loops(text, eps=Fraction(1)):
    loops = []
    lines = [ln for ln in text.splitlines() if ln.strip()]
    i = 0
    while i < len(lines):
        fields = dict(kv.split("=", 1) for kv in lines[i].split()[1:])
        n = int(fields["n"])
        pts = [tuple(map(int, lines[i + 1 + t].split())) for t in range(n)]
        level = None if fields["level"] == "None" else int(fields["level"])
        loops.append(Loop(np.array(pts), fields["tag"], level=level, eps=eps))
        i += n + 1
    return LoopSet(loops, eps)
