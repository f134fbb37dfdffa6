"""Instance generators: unary bin packing -> d-tuple -> fair vertex FO deletion."""
from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass

from .graph import Graph, dump_graph
from .logic.formula import (FREE, Adj, And, Eq, ExistsV, ForallV, Implies, In, Not, Or, to_sexpr)
from .logic.presets import _and

BRUTE_LIMIT = 1 << 16


@dataclass(frozen=True)
class BinPackingInstance:
    sizes: tuple
    bins: int
    capacity: int

    def __post_init__(self):
        if any(s < 1 for s in self.sizes):
            raise ValueError("item sizes must be positive")
        if self.bins < 1 or self.capacity < 0:
            raise ValueError("need at least one bin and a non-negative capacity")


@dataclass(frozen=True)
class DTupleInstance:
    tuples: tuple
    d: int
    budget: int

    def __post_init__(self):
        if self.d < 1 or self.budget < 0:
            raise ValueError("need d >= 1 and a non-negative budget")
        for t in self.tuples:
            if len(t) != self.d or any(a < 0 for a in t):
                raise ValueError(f"bad tuple {t}")
            if not any(t):
                raise ValueError("tuples must be non-zero")


@dataclass
class HardInstance:
    graph: Graph
    formula: object
    k: int
    modulator: tuple
    tuples: tuple
    groups: tuple


def binpack_to_dtuple(bp):
    return DTupleInstance(tuple((s,) * bp.bins for s in bp.sizes), bp.bins, bp.capacity)


def binpack_brute(bp):
    """YES iff the items fit into the bins (first-fit-decreasing search with backtracking)."""
    sizes = sorted(bp.sizes, reverse=True)
    load = [0] * bp.bins

    def place(i):
        if i == len(sizes):
            return True
        seen = set()
        for b in range(bp.bins):
            if load[b] in seen or load[b] + sizes[i] > bp.capacity:
                continue
            seen.add(load[b])
            load[b] += sizes[i]
            if place(i + 1):
                return True
            load[b] -= sizes[i]
        return False

    return place(0)


def pad_dtuple(dt, min_tuples=3):
    """Equivalent instance with at least ``min_tuples`` tuples free of zeros.

    Each round raises the budget by one and adds, for every coordinate k, a
    tuple that is 1 at k and ``budget + 1`` elsewhere; such a tuple can only go
    to k, so every coordinate absorbs exactly the extra unit.
    """
    kept = sum(1 for t in dt.tuples if all(t))
    rounds = 0
    while kept + rounds * dt.d < min_tuples:
        rounds += 1
    if not rounds:
        return dt
    b = dt.budget + rounds
    extra = tuple(tuple(1 if j == k else b + 1 for j in range(dt.d))
                  for _ in range(rounds) for k in range(dt.d))
    return DTupleInstance(dt.tuples + extra, dt.d, b)


def dtuple_brute(dt):
    """Exhaustive search over all assignments; ``None`` when there are too many."""
    if dt.d ** len(dt.tuples) > BRUTE_LIMIT:
        return None
    for f in itertools.product(range(dt.d), repeat=len(dt.tuples)):
        load = [0] * dt.d
        for t, k in zip(dt.tuples, f):
            load[k] += t[k]
        if max(load, default=0) <= dt.budget:
            return True
    return False


def modul(v):
    """``v`` has three pairwise distinct, pairwise non-adjacent neighbours."""
    a, b, c = f"{v}_a", f"{v}_b", f"{v}_c"
    body = _and(Adj(v, a), Adj(v, b), Adj(v, c),
                Not(Eq(a, b)), Not(Eq(a, c)), Not(Eq(b, c)),
                Not(Adj(a, b)), Not(Adj(b, c)), Not(Adj(c, a)))
    return ExistsV(a, ExistsV(b, ExistsV(c, body)))


def _exists_all(names, body):
    for v in reversed(names):
        body = ExistsV(v, body)
    return body


def _pairs(vs):
    return [(x, y) for x in vs for y in vs if x != y]


def literal_formula(d):
    """The d-clique formula as stated, read over the graph left after deletion."""
    vs = [f"v{i}" for i in range(1, d + 1)]
    parts = [Not(Eq(x, y)) for x, y in _pairs(vs) if x < y]
    parts += [Not(modul(v)) for v in vs]
    parts += [Adj(x, y) for x, y in _pairs(vs) if x < y]
    parts += [ExistsV("u", And(Adj("u", x), Not(Adj("u", y)))) for x, y in _pairs(vs)]
    return Not(_exists_all(vs, _and(*parts)))


def relativize(f):
    """Rewrite a formula about G - Free into one about G with the deleted set as Free."""
    t = type(f)
    if t is ExistsV:
        return ExistsV(f.var, And(Not(In(f.var, FREE)), relativize(f.body)))
    if t is ForallV:
        return ForallV(f.var, Implies(Not(In(f.var, FREE)), relativize(f.body)))
    if t is Not:
        return Not(relativize(f.a))
    if t in (And, Or, Implies):
        return t(relativize(f.a), relativize(f.b))
    return f


def _private(x, y):
    """``x`` has exactly one neighbour other than ``y`` that ``y`` does not see."""
    def cand(w):
        return _and(Not(Eq(w, y)), Adj(w, x), Not(Adj(w, y)))
    return ExistsV("u", And(cand("u"), ForallV("w", Implies(cand("w"), Eq("w", "u")))))


def deletion_formula(d):
    """Free is the deleted set.

    Only the clique vertices ``v_i`` have to survive; the modulator test and the
    private-neighbour test look at the whole graph, so deleting modulator
    vertices cannot hide a surviving transversal.
    """
    vs = [f"v{i}" for i in range(1, d + 1)]
    parts = [Not(In(v, FREE)) for v in vs]
    parts += [Not(Eq(x, y)) for x, y in _pairs(vs) if x < y]
    parts += [Adj(x, y) for x, y in _pairs(vs) if x < y]
    parts += [Not(modul(v)) for v in vs]
    parts += [_private(x, y) for x, y in _pairs(vs)]
    return Not(_exists_all(vs, _and(*parts)))


def dtuple_to_fairfo(dt):
    """Build the graph, formula and budget; returns a :class:`HardInstance`."""
    kept = tuple(t for t in dt.tuples if all(t))
    if len(kept) < 3:
        warnings.warn(f"only {len(kept)} tuples survive; the modulator test needs at least 3 "
                      "(pad_dtuple gives an equivalent instance that has them)", stacklevel=2)
    d = dt.d
    edges = []
    groups = []
    nxt = d
    for t in kept:
        clique = list(range(nxt, nxt + sum(t)))
        edges += itertools.combinations(clique, 2)
        start = nxt
        per = []
        for k, a in enumerate(t):
            grp = tuple(range(start, start + a))
            edges += [(k, v) for v in grp]
            per.append(grp)
            start += a
        groups.append(tuple(per))
        nxt += sum(t)
    G = Graph(nxt, edges)
    return HardInstance(G, deletion_formula(d), dt.budget, tuple(range(d)), kept, tuple(groups))


def intended_witness(inst, assignment):
    """The deleted set for an assignment of surviving tuples to coordinates."""
    return frozenset(v for grp, k in zip(inst.groups, assignment) for v in grp[k])


def read_binpack(text):
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError("first line must be 'bins capacity'")
    bins, cap = map(int, rows[0])
    return BinPackingInstance(tuple(int(r[0]) for r in rows[1:]), bins, cap)


def read_dtuple(text):
    rows = [ln.replace(",", " ").split() for ln in text.splitlines()
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise ValueError("first line must be 'd b'")
    d, b = map(int, rows[0])
    return DTupleInstance(tuple(tuple(map(int, r)) for r in rows[1:]), d, b)


def write_instance(prefix, dt, bp=None, pad=False):
    """Write PREFIX.graph, PREFIX.mso and PREFIX.meta; returns the instance.

    With ``pad`` the d-tuple instance first goes through :func:`pad_dtuple`.
    """
    given = dt
    if pad:
        dt = pad_dtuple(dt)
    inst = dtuple_to_fairfo(dt)
    with open(f"{prefix}.graph", "w") as fh:
        fh.write(dump_graph(inst.graph, inst.modulator))
    with open(f"{prefix}.mso", "w") as fh:
        fh.write(to_sexpr(inst.formula) + "\n")
    expected = dtuple_brute(given)
    if bp is not None:
        expected = binpack_brute(bp)
    meta = {
        "d": dt.d,
        "k": inst.k,
        "tuples": [list(t) for t in given.tuples],
        "kept_tuples": [list(t) for t in inst.tuples],
        "padded": pad,
        "modulator": list(inst.modulator),
        "expected": None if expected is None else ("YES" if expected else "NO"),
        "formula_free_is_deleted": to_sexpr(inst.formula),
        "formula_on_remaining_graph": to_sexpr(literal_formula(dt.d)),
    }
    if bp is not None:
        meta["binpack"] = {"sizes": list(bp.sizes), "bins": bp.bins, "capacity": bp.capacity}
    with open(f"{prefix}.meta", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return inst
