"""Union-find connected-component labeling kernels.

Labels are canonical: components are numbered by first occurrence in node
order, so component 0 contains the lexicographically smallest vertex.
"""

import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@nb.njit(cache=True, nogil=True)
def label_components(n_nodes, pair_u, pair_v, mask, extra_u, extra_v):
    """Label nodes 0..n_nodes-1 under the masked pair and extra relations.

    Returns (labels, n_components); label ids follow first occurrence in
    ascending node order.
    """
    parent = np.arange(n_nodes, dtype=np.int32)
    for k in range(pair_u.shape[0]):
        if mask[k]:
            ra = _find(parent, pair_u[k])
            rb = _find(parent, pair_v[k])
            if ra != rb:
                parent[rb] = ra
    for k in range(extra_u.shape[0]):
        ra = _find(parent, extra_u[k])
        rb = _find(parent, extra_v[k])
        if ra != rb:
            parent[rb] = ra
    labels = np.empty(n_nodes, dtype=np.int32)
    newid = np.full(n_nodes, -1, dtype=np.int32)
    count = 0
    for v in range(n_nodes):
        r = _find(parent, v)
        if newid[r] < 0:
            newid[r] = count
            count += 1
        labels[v] = newid[r]
    return labels, count


_EMPTY = np.empty(0, dtype=np.int32)


def label_masked(n_nodes, pair_u, pair_v, mask, extra_u=None, extra_v=None):
    eu = _EMPTY if extra_u is None else np.asarray(extra_u, dtype=np.int32)
    ev = _EMPTY if extra_v is None else np.asarray(extra_v, dtype=np.int32)
    return label_components(n_nodes, pair_u, pair_v,
                            np.ascontiguousarray(mask, dtype=np.bool_), eu, ev)


@nb.njit(cache=True, nogil=True)
def count_components_bitmask(n_nodes, pair_u, pair_v, bits, extra_u, extra_v):
    """Component count for an edge configuration given as a bitmask."""
    parent = np.arange(n_nodes, dtype=np.int32)
    for k in range(pair_u.shape[0]):
        if (bits >> k) & 1:
            ra = _find(parent, pair_u[k])
            rb = _find(parent, pair_v[k])
            if ra != rb:
                parent[rb] = ra
    for k in range(extra_u.shape[0]):
        ra = _find(parent, extra_u[k])
        rb = _find(parent, extra_v[k])
        if ra != rb:
            parent[rb] = ra
    count = 0
    for v in range(n_nodes):
        if _find(parent, v) == v:
            count += 1
    return count
