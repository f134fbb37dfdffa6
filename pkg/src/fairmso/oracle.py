"""Brute-force ground truth: try every vertex subset."""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

import numpy as np

from ._jit import njit
from .graph import signature
from .logic import evaluate_masks
from .logic.formula import free_polarity

DEFAULT_MAX_N = 15
CHUNK = 4096


class OracleLimitError(ValueError):
    pass


def max_oracle_n():
    return int(os.environ.get("FAIRMSO_MAX_ORACLE_N", DEFAULT_MAX_N))


@dataclass
class OracleResult:
    k_star: object
    witnesses: list = field(default_factory=list)
    subsets_checked: int = 0


@njit
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit
def all_fair_costs(nbr, n):
    """Fair cost and size of every subset of ``range(n)``, indexed by bitmask."""
    N = np.int64(1) << n
    cost = np.zeros(N, dtype=np.int64)
    size = np.zeros(N, dtype=np.int64)
    for m in range(N):
        best = 0
        for v in range(n):
            c = _popcount(nbr[v] & m)
            if c > best:
                best = c
        cost[m] = best
        size[m] = _popcount(m)
    return cost, size


def _nbr_masks(G):
    return np.asarray([sum(1 << u for u in G.neighbors(v)) for v in range(G.n)], dtype=np.int64)


def _rows(ids, n):
    return ((ids[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


def _check_size(G):
    limit = max_oracle_n()
    if G.n > limit:
        raise OracleLimitError(f"graph has {G.n} vertices; the oracle limit is {limit} "
                               "(set FAIRMSO_MAX_ORACLE_N to raise it)")


def _scan(G, phi, order_rows, costs, k_max, max_witnesses, stop_first, chunk=CHUNK):
    """Evaluate candidate rows in order; returns (best cost, witnesses, checked)."""
    checked = 0
    best = None
    wit = []
    start = 0
    total = len(order_rows)
    while start < total:
        level = costs[start]
        if k_max is not None and level > k_max:
            break
        if best is not None and level > best:
            break
        end = start
        while end < total and costs[end] == level:
            end += 1
        for a in range(start, end, chunk):
            b = min(end, a + chunk)
            ok = evaluate_masks(G, order_rows[a:b], phi)
            hits = np.flatnonzero(ok)
            if stop_first and len(hits):
                checked += int(hits[0]) + 1
                row = order_rows[a + hits[0]]
                return level, [frozenset(np.flatnonzero(row).tolist())], checked
            checked += b - a
            for h in hits:
                if len(wit) < max_witnesses:
                    wit.append(frozenset(np.flatnonzero(order_rows[a + h]).tolist()))
            if len(hits):
                best = level
            if best is not None and len(wit) >= max_witnesses:
                return best, wit, checked
        start = end
    return best, wit, checked


def _brute_candidates(G):
    _check_size(G)
    cost, size = all_fair_costs(_nbr_masks(G), G.n)
    ids = np.arange(len(cost), dtype=np.int64)
    order = np.lexsort((ids, size, cost))
    return _rows(ids[order], G.n), cost[order]


def oracle_min(G, phi, max_witnesses=16, symmetric_MG=None):
    """Minimum fair cost over all sets satisfying ``phi``.

    With ``symmetric_MG`` (a modulated version of ``G``) one representative per
    symmetry class is checked instead of every subset: twins inside a clique
    part and whole cliques with equal signatures are interchangeable.
    """
    rows, costs = (_symmetric_candidates(symmetric_MG) if symmetric_MG is not None
                   else _brute_candidates(G))
    best, wit, checked = _scan(G, phi, rows, costs, None, max_witnesses, False)
    return OracleResult(best, wit, checked)


def oracle_decision(G, phi, k, symmetric_MG=None):
    """Some set of fair cost at most ``k`` satisfying ``phi``, or ``None``.

    When ``Free`` occurs only positively the property is upward closed, so only
    sets that cannot be grown without exceeding ``k`` need checking; when it
    occurs only negatively the empty set decides.
    """
    if k < 0:
        return None
    empty = np.zeros((1, G.n), dtype=np.uint8)
    if evaluate_masks(G, empty, phi)[0]:
        return frozenset()
    pol = free_polarity(phi)
    if pol in (0, -1):
        return None
    rows, costs = (_symmetric_candidates(symmetric_MG, k) if symmetric_MG is not None
                   else _brute_candidates(G))
    if pol == 1:
        keep = costs <= k
        rows, costs = rows[keep], costs[keep]
        keep = _maximal(G, rows, k)
        rows, costs = rows[keep], costs[keep]
    # small chunks: the first hit ends the search
    best, wit, _ = _scan(G, phi, rows, costs, k, 1, True, chunk=64)
    return wit[0] if wit else None


def _maximal(G, rows, k):
    """Rows to which no vertex can be added while keeping fair cost at most ``k``."""
    if not len(rows):
        return np.zeros(0, dtype=bool)
    adj = G.adj.astype(np.float32)
    # v can be added iff none of its neighbours already sees k selected vertices
    full = (rows.astype(np.float32) @ adj) >= k
    blocked = (full.astype(np.float32) @ adj) > 0
    return ~((rows == 0) & ~blocked).any(axis=1)


def _symmetric_candidates(MG, k_max=None, limit=5_000_000):
    """Representative sets, sorted by (fair cost, size, canonical order).

    Built one class of identical cliques at a time; with ``k_max`` partial sets
    whose fair cost already exceeds it are dropped (fair cost only grows).
    """
    G = MG.graph
    n = G.n
    adj = G.adj.astype(np.float32)

    def prune(rows):
        if k_max is None or not len(rows) or not n:
            return rows
        return rows[(rows.astype(np.float32) @ adj).max(axis=1) <= k_max]

    rows = np.zeros((1 << MG.d, n), dtype=np.uint8)
    for mod in range(1 << MG.d):
        for i, v in enumerate(MG.modulator):
            rows[mod, v] = mod >> i & 1
    rows = prune(rows)
    classes = {}
    for ci in range(len(MG.cliques)):
        classes.setdefault(signature(MG, ci), []).append(ci)
    for sig, members in sorted(classes.items()):
        parts_of = [[vs for _, vs in sorted(MG.parts[ci].items())] for ci in members]
        states = list(itertools.product(*[range(s + 1) for s in sig if s]))
        opts = []
        for combo in itertools.combinations_with_replacement(range(len(states)), len(members)):
            row = np.zeros(n, dtype=np.uint8)
            for parts, si in zip(parts_of, combo):
                for vs, c in zip(parts, states[si]):
                    row[list(vs[:c])] = 1
            opts.append(row)
        opts = prune(np.asarray(opts, dtype=np.uint8).reshape(-1, n))
        if len(rows) * len(opts) > limit:
            raise OracleLimitError(f"more than {limit} symmetry classes")
        rows = prune((rows[:, None, :] | opts[None, :, :]).reshape(-1, n))
    if n:
        costs = (rows.astype(np.float32) @ adj).max(axis=1).astype(np.int64)
    else:
        costs = np.zeros(len(rows), dtype=np.int64)
    sizes = rows.sum(axis=1)
    order = np.lexsort((np.arange(len(rows)), sizes, costs))
    return rows[order], costs[order]
