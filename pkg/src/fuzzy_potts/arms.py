"""Arm events for colorings and bond configurations on annuli.

Red arms are strong (axis) paths and blue arms weak (diagonal-allowed)
paths in the mixed convention; the all-strong variant uses axis paths for
both colors.  Detection is exact for alternating color sequences via the
counterclockwise word of annulus-crossing components; non-alternating
sequences are resolved through their alternating reduction and tagged
``reduced_only``.  A brute-force path-backtracking oracle covers small
instances, including the non-alternating cases the reduction only
approximates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from . import fk, geometry
from ._labeling import label_masked
from .coloring import BLUE, RED, Coloring

MIXED = "mixed"        # red strong, blue weak
ALL_STRONG = "strong"  # both colors strong

PLANE_MODE = "plane"
HALFPLANE_MODE = "halfplane"


class PlanarityError(RuntimeError):
    """Crossing components with interleaved boundary attachments."""


class OracleBudgetError(RuntimeError):
    """Path enumeration exceeded its node budget."""


@dataclass(frozen=True)
class ArmDetection:
    occurs: bool
    reduced_only: bool

    def __bool__(self):
        return self.occurs


# -- color / type sequence algebra -----------------------------------------

def _validate_word(tau, alphabet):
    if not tau or any(ch not in alphabet for ch in tau):
        raise ValueError(f"sequence must be a nonempty word over {sorted(alphabet)}")


def interface_count(tau):
    """(I, I+) interface counts: cyclic changes, and 1 + linear changes."""
    _validate_word(tau, {RED, BLUE, "0", "1"})
    k = len(tau)
    linear = sum(tau[i] != tau[i + 1] for i in range(k - 1))
    cyclic = linear + (tau[-1] != tau[0])
    return cyclic, 1 + linear


def reduce_word(tau, mode):
    """Collapse consecutive repeated letters; cyclically in the plane.

    The first and last letters are treated as subsequent in the plane but
    not in the halfplane, so the plane reduction of e.g. RBR is RB.
    """
    _validate_word(tau, {RED, BLUE, "0", "1"})
    out = [tau[0]]
    for ch in tau[1:]:
        if ch != out[-1]:
            out.append(ch)
    if mode == PLANE_MODE and len(out) > 1 and out[0] == out[-1]:
        out.pop()
    elif mode not in (PLANE_MODE, HALFPLANE_MODE):
        raise ValueError(f"unknown mode {mode!r}")
    return "".join(out)


def is_alternating(tau, mode):
    """No letter repeats consecutively (cyclically in the plane)."""
    cyclic, linear_plus = interface_count(tau)
    if mode == HALFPLANE_MODE:
        return linear_plus == len(tau)
    return len(tau) == 1 or cyclic == len(tau)


# -- monochromatic components ----------------------------------------------

def color_components(region, coloring, variant=MIXED):
    """(labels_red, labels_blue) component labelings of the two colors.

    Red components always use strong adjacency; blue components use weak
    adjacency in the mixed variant and strong adjacency in the all-strong
    variant.  Labels are only meaningful on vertices of the right color.
    """
    if variant not in (MIXED, ALL_STRONG):
        raise ValueError(f"unknown variant {variant!r}")
    red = coloring.red
    eu, ev = region.edge_u, region.edge_v
    labels_r, _ = label_masked(region.n_vertices, eu, ev, red[eu] & red[ev])
    blue = ~red
    if variant == MIXED:
        du, dv = region.diag_pairs
        pu = np.concatenate([eu, du])
        pv = np.concatenate([ev, dv])
    else:
        pu, pv = eu, ev
    labels_b, _ = label_masked(region.n_vertices, pu, pv, blue[pu] & blue[pv])
    return labels_r, labels_b


# -- crossing words ---------------------------------------------------------

@dataclass
class CrossingWord:
    """Crossing components in counterclockwise order of inner attachment.

    Entries are (component_key, letter); adjacent entries always have
    distinct keys, and the halfplane word is linear starting from the
    rightmost component.
    """

    entries: list
    cyclic: bool


def _collapse(seq, cyclic):
    out = []
    for item in seq:
        if not out or item[0] != out[-1][0]:
            out.append(item)
    if cyclic:
        while len(out) > 1 and out[0][0] == out[-1][0]:
            out.pop()
    return out


def _assert_no_interleave(entries, cyclic):
    keys = [k for k, _ in entries]
    positions = {}
    for i, k in enumerate(keys):
        positions.setdefault(k, []).append(i)
    repeated = [k for k, ps in positions.items() if len(ps) > 1]
    n = len(keys)
    for a in repeated:
        # every other component must fall inside a single gap between
        # consecutive occurrences of a (cyclic gaps in the plane)
        pa = positions[a]
        gaps = list(zip(pa, pa[1:]))
        if cyclic:
            gaps.append((pa[-1], pa[0] + n))
        for b, pb in positions.items():
            if b == a:
                continue
            hits = set()
            for i in pb:
                for g, (lo, hi) in enumerate(gaps):
                    if lo < i < hi or (cyclic and lo < i + n < hi):
                        hits.add(g)
                        break
            if len(hits) > 1:
                raise PlanarityError(
                    f"interleaved crossing components {a} and {b}")


def crossing_word(region, coloring, variant=MIXED, start=0):
    """Word of components crossing the annulus, counterclockwise.

    Components are ordered by their attachment intervals on the inner
    ring, walked counterclockwise from the corner (m, m) (plane) or from
    the rightmost point (halfplane).  ``start`` rotates the plane walk.
    """
    if region.inner_radius is None or region.outer_radius is None:
        raise ValueError("crossing words need an annular region")
    labels_r, labels_b = color_components(region, coloring, variant)
    red = coloring.red
    inner = region.inner_ring()
    outer = region.outer_ring()

    def touch_sets(labels, colored):
        ti = set(labels[i] for i in inner if colored[i])
        to = set(labels[i] for i in outer if colored[i])
        return ti & to

    crossing_r = touch_sets(labels_r, red)
    crossing_b = touch_sets(labels_b, ~red)

    walk = geometry.ring_walk(region, region.inner_radius)
    cyclic = region.ambient == geometry.PLANE
    if cyclic and start:
        walk = np.roll(walk, -start)
    raw = []
    for i in walk:
        if red[i]:
            lab = labels_r[i]
            if lab in crossing_r:
                raw.append(((RED, lab), RED))
        else:
            lab = labels_b[i]
            if lab in crossing_b:
                raw.append(((BLUE, lab), BLUE))
    entries = _collapse(raw, cyclic)
    _assert_no_interleave(entries, cyclic)
    return CrossingWord(entries, cyclic)


# -- subsequence matching ----------------------------------------------------

def _subseq_distinct(seq, tau, used=frozenset(), i=0, j=0):
    """tau as a subsequence of seq letters, on pairwise distinct components."""
    if j == len(tau):
        return True
    if len(seq) - i < len(tau) - j:
        return False
    key, letter = seq[i]
    if letter == tau[j] and key not in used:
        if _subseq_distinct(seq, tau, used | {key}, i + 1, j + 1):
            return True
    return _subseq_distinct(seq, tau, used, i + 1, j)


def _match_word(entries, tau, cyclic):
    if not entries:
        return False
    if not cyclic:
        return _subseq_distinct(entries, tau)
    m = len(entries)
    return any(_subseq_distinct(entries[s:] + entries[:s], tau) for s in range(m))


# -- fuzzy Potts arm event detection -----------------------------------------

def detect_arm_event(region, coloring, tau, variant=MIXED):
    """Arm event in the plane annulus; exact for alternating sequences.

    Non-alternating sequences are decided through their plane reduction
    and flagged ``reduced_only`` (a constant-factor proxy: one component
    may supply several disjoint same-color arms, which the reduction
    treats as one).
    """
    if region.ambient != geometry.PLANE:
        raise ValueError("detect_arm_event expects a plane annulus")
    _validate_word(tau, {RED, BLUE})
    alternating = is_alternating(tau, PLANE_MODE)
    target = tau if alternating else reduce_word(tau, PLANE_MODE)
    word = crossing_word(region, coloring, variant)
    return ArmDetection(_match_word(word.entries, target, True), not alternating)


def detect_halfplane_arm_event(region, coloring, tau, variant=MIXED):
    """Arm event in the half-annulus; linear order, rightmost arm first."""
    if region.ambient != geometry.HALFPLANE:
        raise ValueError("detect_halfplane_arm_event expects a half-annulus")
    _validate_word(tau, {RED, BLUE})
    alternating = is_alternating(tau, HALFPLANE_MODE)
    target = tau if alternating else reduce_word(tau, HALFPLANE_MODE)
    word = crossing_word(region, coloring, variant)
    return ArmDetection(_match_word(word.entries, target, False), not alternating)


# -- FK arm events ------------------------------------------------------------

def _normalized_ring_coordinate(p, s, halfplane, y_min=0):
    """Exact attachment coordinate in [0, 1); linear offset in the halfplane.

    Coordinates and radii are half-integers, so Fraction conversion from
    floats is exact and cross-lattice ties are detected exactly.
    """
    pf = (Fraction(p[0]), Fraction(p[1]))
    sf = Fraction(s)
    t = geometry.ring_coordinate(pf, sf)
    per = 8 * sf
    if halfplane:
        start = 7 * sf + Fraction(y_min)
        t = (t - start) % per
    return t / per


def _fk_attachments(region, cfg):
    """Per-attachment records (u, key, type letter) for crossing clusters."""
    m, n = region.inner_radius, region.outer_radius
    halfplane = region.ambient == geometry.HALFPLANE

    labels, _ = label_masked(region.n_vertices, region.edge_u, region.edge_v,
                             cfg.open)
    inner = region.inner_ring()
    outer = region.outer_ring()
    crossing = set(labels[inner]) & set(labels[outer])
    records = []
    for i in inner:
        lab = labels[i]
        if lab in crossing:
            u = _normalized_ring_coordinate(tuple(region.vertices[i]), m, halfplane)
            records.append((u, ("1", lab), "1"))

    dual = geometry.dual_of(region)
    dlabels, _ = label_masked(dual.n_dual_vertices, dual.dual_edge_u,
                              dual.dual_edge_v, ~cfg.open)
    dm, dn = m - 0.5, n + 0.5
    dinner = dual.ring_indices(dm)
    douter = dual.ring_indices(dn)
    dcross = set(dlabels[dinner]) & set(dlabels[douter])
    y_min = -0.5 if halfplane else 0
    for i in dinner:
        lab = dlabels[i]
        if lab in dcross:
            u = _normalized_ring_coordinate(dual.dual_vertices[i], dm, halfplane,
                                            y_min=y_min)
            records.append((u, ("0", lab), "0"))
    records.sort(key=lambda rec: rec[0])
    return records


def _tie_orderings(records):
    """All orderings of the sorted records that permute exact-tie groups.

    Ties only occur between a primal and a dual attachment at the same
    normalized angle; their true counterclockwise order is not determined
    by the attachment alone, so both orders are tried.
    """
    groups = []
    i = 0
    while i < len(records):
        j = i
        while j + 1 < len(records) and records[j + 1][0] == records[i][0]:
            j += 1
        groups.append(records[i:j + 1])
        i = j + 1
    total = 1
    for g in groups:
        for i in range(2, len(g) + 1):
            total *= i
    if total > 64:  # degenerate; fall back to the sorted order
        yield records
        return

    def rec(idx, acc):
        if idx == len(groups):
            yield list(acc)
            return
        g = groups[idx]
        perms = [g] if len(g) == 1 else list(permutations(g))
        for p in perms:
            yield from rec(idx + 1, acc + list(p))

    yield from rec(0, [])


def detect_fk_arm_event(region, cfg, tau):
    """FK arm event: type-1 arms are open paths, type-0 arms dual-open paths.

    Works on plane annuli (cyclic word) and half-annuli (linear word,
    rightmost arm first); exact for alternating type sequences, reduction
    proxy otherwise.
    """
    _validate_word(tau, {"0", "1"})
    if region.inner_radius is None:
        raise ValueError("FK arm events need an annular region")
    halfplane = region.ambient == geometry.HALFPLANE
    mode = HALFPLANE_MODE if halfplane else PLANE_MODE
    alternating = is_alternating(tau, mode)
    target = tau if alternating else reduce_word(tau, mode)
    records = _fk_attachments(region, cfg)
    cyclic = not halfplane
    for ordering in _tie_orderings(records):
        entries = _collapse([(key, ch) for _, key, ch in ordering], cyclic)
        _assert_no_interleave(entries, cyclic)
        if _match_word(entries, target, cyclic):
            return ArmDetection(True, not alternating)
    return ArmDetection(False, not alternating)


# -- brute-force oracle -------------------------------------------------------

def _adjacency_lists(region, pairs_list):
    adj = [[] for _ in range(region.n_vertices)]
    for pu, pv in pairs_list:
        for a, b in zip(pu, pv):
            adj[a].append(b)
            adj[b].append(a)
    return adj


class _PathSearch:
    """Backtracking over tuples of vertex-disjoint simple paths."""

    def __init__(self, budget):
        self.budget = budget

    def tick(self):
        self.budget -= 1
        if self.budget <= 0:
            raise OracleBudgetError("oracle budget exhausted")

    def paths(self, start, adj, allowed, used, targets, path):
        """Yield simple paths to a target; stop each path at first contact."""
        self.tick()
        if start in targets:
            yield path
            return
        for w in adj[start]:
            if allowed[w] and w not in used:
                used.add(w)
                path.append(w)
                yield from self.paths(w, adj, allowed, used, targets, path)
                path.pop()
                used.remove(w)


def _order_ok(rels, lattices):
    """Non-decreasing cyclic positions; equality allowed across lattices only."""
    for i in range(1, len(rels)):
        if rels[i] < rels[i - 1]:
            return False
        if rels[i] == rels[i - 1] and lattices[i] == lattices[i - 1]:
            return False
    return True


def oracle_arm_event(region, data, tau, variant=MIXED, budget=5_000_000):
    """Ground truth by exhaustive search; exact for all sequences.

    ``data`` is a Coloring (color arms) or BondConfig (typed FK arms).
    Rejects instances with more than 64 vertices.
    """
    if region.n_vertices > 64:
        raise ValueError("oracle limited to regions with <= 64 vertices")
    if region.inner_radius is None:
        raise ValueError("oracle needs an annular region")
    halfplane = region.ambient == geometry.HALFPLANE
    m = region.inner_radius
    search = _PathSearch(budget)

    if isinstance(data, Coloring):
        _validate_word(tau, {RED, BLUE})
        red = data.red
        strong = _adjacency_lists(region, [(region.edge_u, region.edge_v)])
        if variant == MIXED:
            weak = _adjacency_lists(region, [(region.edge_u, region.edge_v),
                                             region.diag_pairs])
        else:
            weak = strong
        allowed_by = {RED: red, BLUE: ~red}
        adj_by = {RED: strong, BLUE: weak}
        lattice_by = {RED: "site", BLUE: "site"}
        starts_by = {}
        inner = region.inner_ring()
        for letter in (RED, BLUE):
            starts_by[letter] = [i for i in inner if allowed_by[letter][i]]
        targets_by = {letter: set(region.outer_ring()) for letter in (RED, BLUE)}

        def coord(letter, v):
            return _normalized_ring_coordinate(tuple(region.vertices[v]), m,
                                               halfplane)
    else:
        _validate_word(tau, {"0", "1"})
        cfg = data
        open_adj = [[] for _ in range(region.n_vertices)]
        for k in range(region.n_edges):
            if cfg.open[k]:
                a, b = region.edge_u[k], region.edge_v[k]
                open_adj[a].append(b)
                open_adj[b].append(a)
        dual = geometry.dual_of(region)
        dual_adj = [[] for _ in range(dual.n_dual_vertices)]
        for k in range(region.n_edges):
            if not cfg.open[k]:
                a, b = dual.dual_edge_u[k], dual.dual_edge_v[k]
                dual_adj[a].append(b)
                dual_adj[b].append(a)
        always_p = np.ones(region.n_vertices, dtype=bool)
        always_d = np.ones(dual.n_dual_vertices, dtype=bool)
        allowed_by = {"1": always_p, "0": always_d}
        adj_by = {"1": open_adj, "0": dual_adj}
        lattice_by = {"1": "primal", "0": "dual"}
        starts_by = {"1": list(region.ring_indices(m)),
                     "0": list(dual.ring_indices(m - 0.5))}
        targets_by = {"1": set(region.ring_indices(region.outer_radius)),
                      "0": set(dual.ring_indices(region.outer_radius + 0.5))}
        y_min = -0.5 if halfplane else 0

        def coord(letter, v):
            if letter == "1":
                return _normalized_ring_coordinate(tuple(region.vertices[v]), m,
                                                   halfplane)
            return _normalized_ring_coordinate(dual.dual_vertices[v], m - 0.5,
                                               halfplane, y_min=y_min)

    used = {"site": set(), "primal": set(), "dual": set()}

    def place(i, anchor, rels, lattices):
        if i == len(tau):
            return True
        letter = tau[i]
        lat = lattice_by[letter]
        for s in starts_by[letter]:
            if s in used[lat]:
                continue
            u = coord(letter, s)
            if halfplane:
                rel = u
            else:
                rel = 0 if i == 0 else (u - anchor) % 1
            if not _order_ok(rels + [rel], lattices + [lat]):
                continue
            used[lat].add(s)
            found = False
            for _ in search.paths(s, adj_by[letter], allowed_by[letter],
                                  used[lat], targets_by[letter], [s]):
                if place(i + 1, anchor if i else u, rels + [rel],
                         lattices + [lat]):
                    found = True
                    break
            used[lat].remove(s)
            if found:
                return True
        return False

    return place(0, None, [], [])


# -- crossing dualities -------------------------------------------------------

def has_site_crossing(region, coloring, color, mode, axis):
    """Monochromatic crossing of a box, left-right or top-bottom.

    ``mode`` is the adjacency (strong/weak); ``axis`` is "lr" or "tb".
    """
    n = region.outer_radius
    red = coloring.red
    colored = red if color == RED else ~red
    eu, ev = region.edge_u, region.edge_v
    if mode == geometry.WEAK:
        du, dv = region.diag_pairs
        pu = np.concatenate([eu, du])
        pv = np.concatenate([ev, dv])
    else:
        pu, pv = eu, ev
    labels, _ = label_masked(region.n_vertices, pu, pv, colored[pu] & colored[pv])
    xs = region.vertices[:, 0]
    ys = region.vertices[:, 1]
    if axis == "lr":
        side_a, side_b = xs == -n, xs == n
    else:
        side_a, side_b = ys == n, ys == -n
    a = {labels[i] for i in np.nonzero(side_a & colored)[0]}
    b = {labels[i] for i in np.nonzero(side_b & colored)[0]}
    return bool(a & b)


def fk_open_crossing_lr(cfg):
    """Open left-right crossing of a box region."""
    region = cfg.region
    n = region.outer_radius
    labels, _ = label_masked(region.n_vertices, region.edge_u, region.edge_v,
                             cfg.open)
    xs = region.vertices[:, 0]
    left = {labels[i] for i in np.nonzero(xs == -n)[0]}
    right = {labels[i] for i in np.nonzero(xs == n)[0]}
    return bool(left & right)


def fk_dual_crossing_tb(cfg):
    """Dual-open top-bottom crossing of the dual of a box region."""
    region = cfg.region
    n = region.outer_radius
    dual = geometry.dual_of(region)
    labels, _ = label_masked(dual.n_dual_vertices, dual.dual_edge_u,
                             dual.dual_edge_v, ~cfg.open)
    top, bottom = set(), set()
    for i, (x, y) in enumerate(dual.dual_vertices):
        if y == n + 0.5:
            top.add(labels[i])
        elif y == -n - 0.5:
            bottom.add(labels[i])
    return bool(top & bottom)
