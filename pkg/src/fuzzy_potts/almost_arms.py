"""Almost-arms: open-path / colored-interior-cluster / open-path crossings.

An almost-arm from A to B is an open path, followed by a strong (red) or
weak (blue) path through clusters that avoid the region boundary, followed
by an open path.  Existence reduces to reachability on a cluster graph
whose nodes are FK clusters: interior clusters of the arm's color are
chained by strong/weak adjacency, with attachment to the boundary-reaching
clusters at the ends.  A literal three-step verification of a candidate
vertex sequence is kept as an independent certifier for tests.

Multi-arm events with pairwise disjoint cluster hulls are detected by
greedy extremal extraction: sweep the inner ring (counterclockwise from a
fixed ray in the plane, rightmost first in the halfplane) and repeatedly
extract an almost-arm whose hull avoids everything extracted before.
Greedy maximality is not claimed; a small-instance exhaustive oracle
bounds the gap in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fk, geometry
from ._labeling import label_masked
from .arms import ArmDetection, HALFPLANE_MODE, PLANE_MODE, OracleBudgetError, \
    _validate_word, is_alternating, reduce_word
from .coloring import BLUE, RED

WRT_Z2 = "z2"            # interior clusters avoid the full Z^2 boundary
WRT_HALFPLANE = "z_half"  # interior clusters avoid the Z x Z+ boundary


def _boundary_for(region, wrt):
    full, half = geometry.boundary_indices(region)
    if wrt == WRT_Z2:
        return full
    if wrt == WRT_HALFPLANE:
        if region.ambient != geometry.HALFPLANE:
            raise ValueError("halfplane interiors need a halfplane region")
        return half
    raise ValueError(f"unknown wrt {wrt!r}")


@dataclass
class AlmostArmSystem:
    """Cluster graph of one configuration, specialized to one wrt-ambient."""

    region: geometry.Region
    cfg: fk.BondConfig
    coloring: object
    wrt: str
    labels: np.ndarray = field(init=False)
    n_clusters: int = field(init=False)
    cluster_red: np.ndarray = field(init=False)
    interior: np.ndarray = field(init=False)
    strong_adj: list = field(init=False)
    weak_adj: list = field(init=False)

    def __post_init__(self):
        region = self.region
        self.labels, self.n_clusters = label_masked(
            region.n_vertices, region.edge_u, region.edge_v, self.cfg.open)
        red = self.coloring.red
        self.cluster_red = np.zeros(self.n_clusters, dtype=bool)
        self.cluster_red[self.labels] = red
        self.interior = np.ones(self.n_clusters, dtype=bool)
        self.interior[self.labels[_boundary_for(region, self.wrt)]] = False

        strong = [set() for _ in range(self.n_clusters)]
        weak = [set() for _ in range(self.n_clusters)]
        lab = self.labels
        for a, b in zip(lab[region.edge_u], lab[region.edge_v]):
            if a != b:
                strong[a].add(b)
                strong[b].add(a)
                weak[a].add(b)
                weak[b].add(a)
        du, dv = region.diag_pairs
        for a, b in zip(lab[du], lab[dv]):
            if a != b:
                weak[a].add(b)
                weak[b].add(a)
        self.strong_adj = strong
        self.weak_adj = weak

    def adjacency(self, color):
        return self.strong_adj if color == RED else self.weak_adj

    def chain(self, color, starts, targets, avoid=frozenset()):
        """BFS cluster chain start -> colored interiors -> target, or None."""
        adj = self.adjacency(color)
        want_red = color == RED
        starts = [c for c in starts if c not in avoid]
        targets = {c for c in targets if c not in avoid}
        for c in starts:
            if c in targets:
                return [c]
        seen = set(starts)
        queue = [(c, None) for c in starts]
        while queue:
            nxt = []
            for x, par in queue:
                for y in adj[x]:
                    if y in avoid or y in seen:
                        continue
                    if y in targets:
                        chain = [y, x]
                        while par is not None:
                            chain.append(par[0])
                            par = par[1]
                        chain.reverse()
                        return chain
                    if self.interior[y] and self.cluster_red[y] == want_red:
                        seen.add(y)
                        nxt.append((y, (x, par)))
            queue = nxt
        return None


def cluster_hull(region, cfg, path):
    """Union of the clusters met by a vertex path, as a vertex set."""
    labels, _ = label_masked(region.n_vertices, region.edge_u, region.edge_v,
                             cfg.open)
    idx = [region.vertex_index[tuple(v)] for v in path]
    hit = np.zeros(labels.max() + 1, dtype=bool)
    hit[labels[idx]] = True
    members = np.nonzero(hit[labels])[0]
    return frozenset(map(tuple, region.vertices[members]))


def _index_set(region, vertices):
    return [region.vertex_index[tuple(v)] for v in vertices]


def exists_almost_arm(region, cfg, coloring, color, A, B, wrt=WRT_Z2,
                      system=None):
    """Is there a red/blue almost-arm from A to B in the region?"""
    if color not in (RED, BLUE):
        raise ValueError("color must be R or B")
    sys_ = system or AlmostArmSystem(region, cfg, coloring, wrt)
    a_idx = _index_set(region, A)
    b_idx = _index_set(region, B)
    starts = sorted(set(sys_.labels[a_idx]))
    targets = set(sys_.labels[b_idx])
    return sys_.chain(color, starts, targets) is not None


def find_almost_arm(region, cfg, coloring, color, A, B, wrt=WRT_Z2):
    """A witness vertex sequence for the almost-arm, or None.

    Used by tests together with :func:`certify_almost_arm`; not tuned for
    speed.
    """
    sys_ = AlmostArmSystem(region, cfg, coloring, wrt)
    a_idx = _index_set(region, A)
    b_idx = _index_set(region, B)
    starts = sorted(set(sys_.labels[a_idx]))
    targets = set(sys_.labels[b_idx])
    chain = sys_.chain(color, starts, targets)
    if chain is None:
        return None
    labels = sys_.labels

    def open_adj(i):
        out = []
        for k in np.nonzero(cfg.open)[0]:
            a, b = region.edge_u[k], region.edge_v[k]
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return out

    def intra_path(cluster, src, dst):
        if src == dst:
            return [src]
        seen = {src}
        queue = [(src, None)]
        while queue:
            nxt = []
            for x, par in queue:
                for y in open_adj(x):
                    if labels[y] != cluster or y in seen:
                        continue
                    if y == dst:
                        path = [y, x]
                        while par is not None:
                            path.append(par[0])
                            par = par[1]
                        path.reverse()
                        return path
                    seen.add(y)
                    nxt.append((y, (x, par)))
            queue = nxt
        raise RuntimeError("cluster interior BFS failed")

    steps = (geometry.STRONG if color == RED else geometry.WEAK)

    def contact(ca, cb):
        for i in range(region.n_vertices):
            if labels[i] != ca:
                continue
            for w in geometry.neighbors(tuple(region.vertices[i]), steps, region):
                j = region.vertex_index[w]
                if labels[j] == cb:
                    return i, j
        raise RuntimeError("adjacent clusters without contact pair")

    a0 = next(i for i in a_idx if labels[i] == chain[0])
    seq = [a0]
    cur = a0
    for t in range(len(chain) - 1):
        u, w = contact(chain[t], chain[t + 1])
        seq.extend(intra_path(chain[t], cur, u)[1:])
        seq.append(w)
        cur = w
    b0 = next(i for i in b_idx if labels[i] == chain[-1])
    seq.extend(intra_path(chain[-1], cur, b0)[1:])
    return [tuple(region.vertices[i]) for i in seq]


def certify_almost_arm(region, cfg, coloring, color, A, B, seq, wrt=WRT_Z2):
    """Literal three-step check that a vertex sequence is an almost-arm.

    Explores the open prefix from the front, the open suffix from the
    back, verifies the middle is a strong (red) / weak (blue) path, and
    checks that the clusters of the interior middle vertices are colored
    and avoid the wrt-boundary.  Independent of the cluster-graph search.
    """
    a_set = {tuple(v) for v in A}
    b_set = {tuple(v) for v in B}
    if not seq or tuple(seq[0]) not in a_set or tuple(seq[-1]) not in b_set:
        return False
    idx = []
    for v in seq:
        i = region.vertex_index.get(tuple(v))
        if i is None:
            return False
        idx.append(i)

    def is_open_step(i, j):
        a, b = tuple(region.vertices[i]), tuple(region.vertices[j])
        k = region.edge_index.get((a, b))
        if k is None:
            k = region.edge_index.get((b, a))
        return k is not None and bool(cfg.open[k])

    ell = len(idx) - 1
    k_a = 0
    while k_a < ell and is_open_step(idx[k_a], idx[k_a + 1]):
        k_a += 1
    if k_a == ell:
        return True  # a single open path from A to B
    k_b = ell
    while k_b > 0 and is_open_step(idx[k_b - 1], idx[k_b]):
        k_b -= 1
    if k_b < k_a:
        return False

    for t in range(k_a, k_b):
        (x1, y1) = region.vertices[idx[t]]
        (x2, y2) = region.vertices[idx[t + 1]]
        dx, dy = abs(x1 - x2), abs(y1 - y2)
        if color == RED:
            if dx + dy != 1:  # strong step
                return False
        elif max(dx, dy) != 1:  # weak step
            return False

    labels, _ = label_masked(region.n_vertices, region.edge_u, region.edge_v,
                             cfg.open)
    boundary = set(labels[_boundary_for(region, wrt)])
    want_red = color == RED
    red = coloring.red
    for t in range(k_a + 1, k_b):
        i = idx[t]
        if bool(red[i]) != want_red:
            return False
        if labels[i] in boundary:
            return False
    return True


# -- greedy multi-arm extraction ---------------------------------------------

def disjoint_almost_arm_word(region, cfg, coloring, wrt=WRT_Z2, start=0):
    """Greedy word of disjoint-hull almost-arms across the annulus.

    Sweeps the inner ring (counterclockwise from the fixed corner ray in
    the plane; rightmost first in the halfplane) and extracts, at the
    first unconsumed attachment cluster, an almost-arm to the outer ring
    through unconsumed clusters.  The attachment cluster's own color is
    tried first.  Returns (word, extractions), each extraction a tuple
    (letter, cluster chain, sweep position).
    """
    if region.inner_radius is None:
        raise ValueError("almost-arm words need an annular region")
    sys_ = AlmostArmSystem(region, cfg, coloring, wrt)
    targets = set(sys_.labels[region.outer_ring()])
    walk = geometry.ring_walk(region, region.inner_radius)
    if start and region.ambient == geometry.PLANE:
        walk = np.roll(walk, -start)
    consumed = set()
    failed = {RED: set(), BLUE: set()}
    word = []
    extractions = []
    for pos, i in enumerate(walk):
        c = int(sys_.labels[i])
        if c in consumed:
            continue
        order = (RED, BLUE) if sys_.cluster_red[c] else (BLUE, RED)
        for color in order:
            if c in failed[color]:
                continue
            chain = sys_.chain(color, [c], targets, avoid=consumed)
            if chain is None:
                failed[color].add(c)
                continue
            word.append(color)
            extractions.append((color, chain, pos))
            consumed.update(chain)
            break
    return "".join(word), extractions


def _subseq(word, tau):
    it = iter(word)
    return all(ch in it for ch in tau)


def almost_arm_event(region, cfg, coloring, tau, wrt=WRT_Z2):
    """Almost-arm event: tau against the greedy disjoint-hull word.

    Plane annuli give the cyclic event; half-annuli give the linear
    halfplane events, with interiors per ``wrt`` (Z^2 interiors treat the
    axis segments as boundary, Z x Z+ interiors do not).
    """
    _validate_word(tau, {RED, BLUE})
    mode = HALFPLANE_MODE if region.ambient == geometry.HALFPLANE else PLANE_MODE
    alternating = is_alternating(tau, mode)
    target = tau if alternating else reduce_word(tau, mode)
    word, _ = disjoint_almost_arm_word(region, cfg, coloring, wrt)
    if mode == PLANE_MODE:
        hit = any(_subseq(word[s:] + word[:s], target) for s in range(len(word)))
    else:
        hit = _subseq(word, target)
    return ArmDetection(hit, not alternating)


# -- exhaustive small-instance oracle ------------------------------------------

def oracle_almost_arm_event(region, cfg, coloring, tau, wrt=WRT_Z2,
                            budget=2_000_000):
    """Exact multi-almost-arm event by backtracking on the cluster graph.

    Enumerates tuples of cluster chains with pairwise disjoint hulls whose
    chosen attachment positions are ordered counterclockwise (cyclically
    in the plane, rightmost first in the halfplane) and whose colors spell
    tau.  Small instances only.
    """
    _validate_word(tau, {RED, BLUE})
    if region.n_vertices > 120:
        raise ValueError("almost-arm oracle limited to small regions")
    sys_ = AlmostArmSystem(region, cfg, coloring, wrt)
    targets = set(sys_.labels[region.outer_ring()])
    walk = list(geometry.ring_walk(region, region.inner_radius))
    position_of = {}
    for pos, i in enumerate(walk):
        position_of.setdefault(int(sys_.labels[i]), []).append(pos)
    cyclic = region.ambient == geometry.PLANE
    n_pos = len(walk)
    state = {"budget": budget}

    def chains_from(color, c, avoid):
        """All simple chains c -> targets through unconsumed interiors."""
        adj = sys_.adjacency(color)
        want_red = color == RED
        out = []

        def rec(x, chain):
            state["budget"] -= 1
            if state["budget"] <= 0:
                raise OracleBudgetError("almost-arm oracle budget exhausted")
            if x in targets:
                out.append(list(chain))
                return
            for y in sorted(adj[x]):
                if y in avoid or y in chain:
                    continue
                if sys_.interior[y] and sys_.cluster_red[y] == want_red:
                    chain.append(y)
                    rec(y, chain)
                    chain.pop()
                elif y in targets:
                    chain.append(y)
                    out.append(list(chain))
                    chain.pop()

        if c in targets:
            out.append([c])
        rec(c, [c])
        # dedupe (c may both be a target and extend)
        uniq = []
        seen = set()
        for ch in out:
            t = tuple(ch)
            if t not in seen:
                seen.add(t)
                uniq.append(ch)
        return uniq

    start_clusters = sorted({int(sys_.labels[i]) for i in walk})

    def place(i, anchor, prev_rel, consumed):
        if i == len(tau):
            return True
        color = tau[i]
        for c in start_clusters:
            if c in consumed:
                continue
            for pos in position_of[c]:
                rel = pos if not cyclic else (
                    0 if i == 0 else (pos - anchor) % n_pos)
                if i > 0 and rel <= prev_rel:
                    continue
                for ch in chains_from(color, c, consumed):
                    if place(i + 1, anchor if i else pos, rel,
                             consumed | set(ch)):
                        return True
                if i > 0 or not cyclic:
                    # the smallest admissible position dominates: the chain
                    # set does not depend on it; the cyclic first arm must
                    # still try every anchor
                    break
        return False

    return place(0, None, -1, frozenset())
