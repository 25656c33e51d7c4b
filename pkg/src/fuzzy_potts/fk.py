"""Critical FK (random-cluster) percolation sampler.

Samples phi^xi_{G, p_c(q), q} for real cluster weight q >= 1 under free or
wired boundary conditions, using Chayes-Machta single-active-color cluster
dynamics.  For q = 1 the dynamics degenerates to independent Bernoulli
resampling of all edges.  Wired boundary conditions are realized with a
ghost vertex merged into the full vertex boundary before cluster counting
and before activation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from ._labeling import count_components_bitmask, label_masked, _EMPTY

FREE = "free"
WIRED = "wired"


def p_critical(q):
    """Self-dual critical point sqrt(q) / (1 + sqrt(q)) on Z^2."""
    if q < 1:
        raise ValueError("cluster weight q must be >= 1")
    s = math.sqrt(q)
    return s / (1.0 + s)


@dataclass
class BondConfig:
    """Edge configuration on a region; open[k] is the state of edge k.

    The dual state is always derived (dual edge k is open iff edge k is
    closed), never stored.
    """

    region: geometry.Region
    open: np.ndarray

    def __post_init__(self):
        self.open = np.ascontiguousarray(self.open, dtype=np.bool_)
        if self.open.shape != (self.region.n_edges,):
            raise ValueError("bit array length must equal the edge count")

    def copy(self):
        return BondConfig(self.region, self.open.copy())

    def dump(self):
        """`bonds <n>` header plus a hex bitstring in canonical edge order.

        Bit k is edge k (edges sorted lexicographically by endpoint
        coordinates); hex digit t encodes bits 4t..4t+3 with bit 4t as the
        most significant bit of the nibble, zero-padded at the end.
        """
        n = self.region.n_edges
        bits = np.zeros(((n + 3) // 4) * 4, dtype=np.uint8)
        bits[:n] = self.open
        nibbles = bits.reshape(-1, 4) @ np.array([8, 4, 2, 1], dtype=np.uint8)
        return f"bonds {n}\n" + "".join(f"{v:x}" for v in nibbles) + "\n"


def load_bonds(region, text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n = int(lines[0].split()[1])
    if n != region.n_edges:
        raise ValueError("snapshot does not match the region")
    bits = []
    for ch in lines[1]:
        v = int(ch, 16)
        bits.extend(((v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1))
    return BondConfig(region, np.array(bits[:n], dtype=bool))


@dataclass
class ClusterSet:
    """Cluster decomposition of omega^xi with canonical cluster ids.

    Ids are ordered by the minimal contained vertex (lexicographic); the
    merged boundary cluster of wired boundary conditions is counted once
    and identified by ``ghost_label``.
    """

    region: geometry.Region
    bc: str
    labels: np.ndarray
    n_clusters: int
    ghost_label: int = -1
    touches_inner: np.ndarray | None = None
    touches_outer: np.ndarray | None = None
    touches_boundary: np.ndarray | None = None

    def colors_of(self, per_cluster):
        return per_cluster[self.labels]


def _ghost_edges(region, bc):
    if bc == FREE:
        return None, None
    if bc != WIRED:
        raise ValueError(f"unknown boundary condition {bc!r}")
    full, _ = geometry.boundary_indices(region)
    ghost = np.full(len(full), region.n_vertices, dtype=np.int32)
    return full.astype(np.int32), ghost


def _raw_labels(region, open_arr, bc):
    eu, ev = _ghost_edges(region, bc)
    n = region.n_vertices + (0 if bc == FREE else 1)
    labels, count = label_masked(n, region.edge_u, region.edge_v, open_arr, eu, ev)
    return labels, count


def label_clusters(cfg, bc=FREE):
    """Union-find clusters of omega^xi with boundary-touch flags."""
    region = cfg.region
    labels, count = _raw_labels(region, cfg.open, bc)
    ghost_label = -1 if bc == FREE else int(labels[region.n_vertices])
    labels = labels[: region.n_vertices]
    full, _ = geometry.boundary_indices(region)
    tb = np.zeros(count, dtype=bool)
    tb[labels[full]] = True
    ti = np.zeros(count, dtype=bool)
    to = np.zeros(count, dtype=bool)
    inner = region.inner_ring()
    outer = region.outer_ring()
    if len(inner):
        ti[labels[inner]] = True
    if len(outer):
        to[labels[outer]] = True
    return ClusterSet(region, bc, labels, count, ghost_label, ti, to, tb)


@dataclass
class ChainState:
    """Single-owner mutable state of one Chayes-Machta chain."""

    region: geometry.Region
    q: float
    bc: str
    rng: np.random.Generator
    p: float = None
    open: np.ndarray = None
    sweeps: int = 0
    _ghost: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("cluster weight q must be >= 1")
        if self.p is None:
            self.p = p_critical(self.q)
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        if self.open is None:
            self.open = np.ones(self.region.n_edges, dtype=bool)  # all-open start
        self._ghost = _ghost_edges(self.region, self.bc)

    def labels(self):
        eu, ev = self._ghost
        n = self.region.n_vertices + (0 if self.bc == FREE else 1)
        return label_masked(n, self.region.edge_u, self.region.edge_v,
                            self.open, eu, ev)

    def edge_density(self):
        return float(self.open.mean())


def cm_step(state):
    """One reversible Chayes-Machta sweep; stationary for phi^xi_{G,p,q}.

    Each cluster of omega^xi (ghost cluster included) is declared active
    with probability 1/q; every edge whose two endpoint clusters are both
    active is resampled open with probability p; all other edges keep
    their state (edges between distinct clusters are closed already).
    """
    region = state.region
    labels, count = state.labels()
    active = state.rng.random(count) < 1.0 / state.q
    lab_u = labels[region.edge_u]
    lab_v = labels[region.edge_v]
    resample = active[lab_u] & active[lab_v]
    draws = state.rng.random(region.n_edges) < state.p
    state.open = np.where(resample, draws, state.open)
    state.sweeps += 1
    return state


def iter_samples(region, q, bc=FREE, burn_in=200, thin=1, count=1, seed=0, p=None):
    """Yield `count` BondConfig snapshots, `thin` sweeps apart, after burn-in.

    Deterministic function of the seed; the chain starts all-open.
    """
    if burn_in < 0 or thin < 1:
        raise ValueError("need burn_in >= 0 and thin >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    state = ChainState(region, q, bc, rng, p=p)
    for _ in range(burn_in):
        cm_step(state)
    for _ in range(count):
        for _ in range(thin):
            cm_step(state)
        yield BondConfig(region, state.open.copy())


def sample(region, q, bc=FREE, burn_in=200, thin=1, count=1, seed=0, p=None):
    """Materialized list version of :func:`iter_samples`."""
    return list(iter_samples(region, q, bc, burn_in, thin, count, seed, p))


def integrated_autocorrelation(series):
    """Integrated autocorrelation time via initial positive sequence."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    var = x.var()
    if var == 0 or n < 4:
        return 0.5
    c = x - x.mean()
    tau = 0.5
    for t in range(1, n // 2):
        rho = np.dot(c[: n - t], c[t:]) / ((n - t) * var)
        if rho < 0:
            break
        tau += rho
    return tau


def exact_rc_distribution(region, q, p, bc=FREE):
    """Exact random-cluster weights over all 2^E configurations.

    Entry ``probs[mask]`` is the probability of the configuration whose
    edge k is open iff bit k of ``mask`` is set.  Limited to small graphs.
    """
    n_edges = region.n_edges
    if n_edges > 20:
        raise ValueError("exact enumeration limited to regions with <= 20 edges")
    eu, ev = _ghost_edges(region, bc)
    if eu is None:
        eu = ev = _EMPTY
    n_nodes = region.n_vertices + (0 if bc == FREE else 1)
    weights = np.empty(1 << n_edges, dtype=float)
    lp, lq = math.log(p), math.log1p(-p)
    for mask in range(1 << n_edges):
        k_open = bin(mask).count("1")
        # wired: the ghost never adds a cluster since the boundary is nonempty
        ncl = count_components_bitmask(n_nodes, region.edge_u, region.edge_v,
                                       mask, eu, ev)
        weights[mask] = k_open * lp + (n_edges - k_open) * lq + ncl * math.log(q)
    weights = np.exp(weights - weights.max())
    return weights / weights.sum()
