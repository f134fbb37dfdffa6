"""Cluster vertex deletion by induced-P3 branching."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit


@dataclass(frozen=True)
class CvdResult:
    modulator: tuple
    budget_used: int


@njit
def _first_p3(adj, alive):
    # lexicographically first (center, u, w) with u < w, u-center-w induced
    n = adj.shape[0]
    for v in range(n):
        if not alive[v]:
            continue
        for u in range(n):
            if not alive[u] or not adj[v, u]:
                continue
            for w in range(u + 1, n):
                if alive[w] and adj[v, w] and not adj[u, w]:
                    return v, u, w
    return -1, -1, -1


@njit
def _branch(adj, alive, k, out, depth):
    v, u, w = _first_p3(adj, alive)
    if v < 0:
        return depth
    if k == 0:
        return -1
    for x in (v, u, w):
        alive[x] = 0
        out[depth] = x
        r = _branch(adj, alive, k - 1, out, depth + 1)
        alive[x] = 1
        if r >= 0:
            return r
    return -1


@njit
def is_cluster_mask(adj, alive):
    """True iff the subgraph induced by ``alive`` has no induced P3."""
    v, _, _ = _first_p3(adj, alive)
    return v < 0


def find_modulator_exact(G, k):
    """A modulator of size at most ``k``, or ``None``."""
    if k < 0:
        return None
    adj = np.ascontiguousarray(G.adj)
    alive = np.ones(G.n, dtype=np.uint8)
    out = np.zeros(max(k, 1), dtype=np.int64)
    r = _branch(adj, alive, k, out, 0)
    if r < 0:
        return None
    return CvdResult(tuple(sorted(out[:r].tolist())), r)


def find_modulator_min(G):
    """Minimum-size modulator via iterative deepening."""
    k = 0
    while True:
        res = find_modulator_exact(G, k)
        if res is not None:
            return res
        k += 1


def brute_force_cvd(G):
    """Smallest modulator size by trying all subsets in increasing size."""
    from itertools import combinations

    adj = np.ascontiguousarray(G.adj)
    for k in range(G.n + 1):
        for D in combinations(range(G.n), k):
            alive = np.ones(G.n, dtype=np.uint8)
            alive[list(D)] = 0
            if is_cluster_mask(adj, alive):
                return k
    return G.n
