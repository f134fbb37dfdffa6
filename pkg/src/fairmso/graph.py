"""Graphs, cluster-deletion modulators and the fair-cost function."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GraphFormatError(ValueError):
    """Raised for malformed graph documents."""


class ModulatorError(ValueError):
    """Raised when a vertex set is not a cluster vertex deletion set."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``adj`` is a dense symmetric uint8 matrix with a zero diagonal.
    """

    __slots__ = ("n", "adj", "_nbrs", "_edges")

    def __init__(self, n, edges=()):
        if n < 0:
            raise ValueError("negative vertex count")
        self.n = int(n)
        adj = np.zeros((self.n, self.n), dtype=np.uint8)
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            adj[u, v] = adj[v, u] = 1
        adj.setflags(write=False)
        self.adj = adj
        self._nbrs = None
        self._edges = None

    @classmethod
    def from_adjacency(cls, adj):
        adj = np.asarray(adj, dtype=np.uint8)
        iu, iv = np.nonzero(np.triu(adj, 1))
        return cls(adj.shape[0], zip(iu.tolist(), iv.tolist()))

    def neighbors(self, v):
        if self._nbrs is None:
            self._nbrs = tuple(tuple(np.flatnonzero(row).tolist()) for row in self.adj)
        return self._nbrs[v]

    def edges(self):
        if self._edges is None:
            iu, iv = np.nonzero(np.triu(self.adj, 1))
            self._edges = tuple(zip(iu.tolist(), iv.tolist()))
        return self._edges

    @property
    def m(self):
        return len(self.edges())

    def degree(self, v):
        return int(self.adj[v].sum())

    def max_degree(self):
        return int(self.adj.sum(axis=1).max()) if self.n else 0

    def has_edge(self, u, v):
        return bool(self.adj[u, v])

    def induced(self, vertices):
        """Induced subgraph on ``vertices``, relabelled in the given order."""
        idx = np.asarray(list(vertices), dtype=np.int64)
        return Graph.from_adjacency(self.adj[np.ix_(idx, idx)])

    def relabel(self, perm):
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph(self.n, [(perm[u], perm[v]) for u, v in self.edges()])

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.n, self.edges()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def load_graph(text):
    """Parse an edge-list document.

    Returns ``(graph, modulator)`` where ``modulator`` is the list given on an
    optional trailing ``modulator:`` line, or ``None``.
    """
    lines = [ln.strip() for ln in text.replace("\r\n", "\n").replace("\r", "\n").split("\n")]
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln]
    if not numbered:
        raise GraphFormatError("line 1: empty document")
    lineno, head = numbered[0]
    parts = head.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise GraphFormatError(f"line {lineno}: expected 'n m', got {head!r}")
    n, m = int(parts[0]), int(parts[1])
    body = numbered[1:]
    modulator = None
    if body and body[-1][1].lower().startswith("modulator:"):
        mline, mtext = body.pop()
        toks = mtext.split(":", 1)[1].replace(",", " ").split()
        try:
            modulator = [int(t) for t in toks]
        except ValueError:
            raise GraphFormatError(f"line {mline}: bad modulator list") from None
        for v in modulator:
            if not 0 <= v < n:
                raise GraphFormatError(f"line {mline}: modulator vertex {v} out of range")
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] + 1 if body else lineno + 1)
        raise GraphFormatError(f"line {where}: expected {m} edge lines, found {len(body)}")
    edges = set()
    for ln, s in body:
        toks = s.split()
        if len(toks) != 2 or not all(t.isdigit() for t in toks):
            raise GraphFormatError(f"line {ln}: expected 'u v', got {s!r}")
        u, v = int(toks[0]), int(toks[1])
        if u >= n or v >= n:
            raise GraphFormatError(f"line {ln}: vertex id out of range (n={n})")
        if u == v:
            raise GraphFormatError(f"line {ln}: self-loop at {u}")
        edges.add((min(u, v), max(u, v)))
    return Graph(n, sorted(edges)), modulator


def dump_graph(G, modulator=None):
    out = [f"{G.n} {G.m}"]
    out += [f"{u} {v}" for u, v in G.edges()]
    if modulator is not None:
        out.append("modulator: " + " ".join(map(str, modulator)))
    return "\n".join(out) + "\n"


def as_mask(G_or_n, X):
    n = G_or_n if isinstance(G_or_n, int) else G_or_n.n
    mask = np.zeros(n, dtype=np.uint8)
    for v in X:
        mask[v] = 1
    return mask


def fair_cost(G, X):
    """Max over all vertices of the number of neighbours inside ``X``."""
    if G.n == 0:
        return 0
    mask = as_mask(G, X).astype(np.int64)
    return int((G.adj.astype(np.int64) @ mask).max())


def cluster_components(G, removed=()):
    """Connected components of ``G - removed``, each sorted, ordered by min vertex."""
    gone = set(removed)
    seen = set(gone)
    comps = []
    for s in range(G.n):
        if s in seen:
            continue
        seen.add(s)
        stack, comp = [s], []
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in G.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(tuple(sorted(comp)))
    return comps


@dataclass(frozen=True)
class ModulatedGraph:
    """A graph with a cluster vertex deletion set and the cliques of ``G - D``."""

    graph: Graph
    modulator: tuple
    cliques: tuple
    ntype: np.ndarray = field(repr=False, compare=False)
    parts: tuple = field(repr=False, compare=False)

    @property
    def d(self):
        return len(self.modulator)

    @property
    def n_types(self):
        return 1 << len(self.modulator)

    def modulator_subgraph(self):
        return self.graph.induced(self.modulator)

    def clique_of(self, v):
        for i, C in enumerate(self.cliques):
            if v in C:
                return i
        raise ValueError(f"{v} lies in the modulator")


def validate_modulator(G, D):
    """Check that ``G - D`` is a disjoint union of cliques and type every vertex."""
    D = tuple(int(v) for v in D)
    if len(set(D)) != len(D):
        raise ModulatorError("duplicate modulator vertex")
    for v in D:
        if not 0 <= v < G.n:
            raise ModulatorError(f"modulator vertex {v} not in graph")
    comps = cluster_components(G, D)
    for C in comps:
        for i, u in enumerate(C):
            for w in C[i + 1:]:
                if not G.adj[u, w]:
                    raise ModulatorError(f"not a modulator: {u} and {w} share a component but are non-adjacent",
                                         witness=(u, w))
    ntype = np.full(G.n, -1, dtype=np.int64)
    for v in range(G.n):
        if v in D:
            continue
        t = 0
        for i, m in enumerate(D):
            if G.adj[v, m]:
                t |= 1 << i
        ntype[v] = t
    ntype.setflags(write=False)
    parts = []
    for C in comps:
        p = {}
        for v in C:
            p.setdefault(int(ntype[v]), []).append(v)
        parts.append({t: tuple(vs) for t, vs in sorted(p.items())})
    return ModulatedGraph(G, D, tuple(comps), ntype, tuple(parts))


def neighborhood_type(MG, v):
    """Bitmask over the modulator: bit ``i`` set iff ``v`` is adjacent to ``D[i]``."""
    if v in MG.modulator:
        raise ValueError(f"vertex {v} is in the modulator")
    return int(MG.ntype[v])


def type_bits(t, d):
    """Bit vector of a neighbourhood type, modulator order."""
    return tuple((t >> i) & 1 for i in range(d))


def signature(MG, ci):
    """Exact per-type counts of clique ``ci`` as a length-``2^d`` tuple."""
    sig = [0] * MG.n_types
    for t, vs in MG.parts[ci].items():
        sig[t] = len(vs)
    return tuple(sig)


def truncated_signature(MG, ci, cap):
    if cap < 1:
        raise ValueError("cap must be positive")
    return tuple(min(c, cap) for c in signature(MG, ci))
