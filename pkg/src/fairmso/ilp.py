"""Per-clique fair cost, clique partition and the feasibility ILP of a shape."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from ._jit import njit
from .graph import fair_cost, signature
from .shapes import Shape, column_type, is_coherent, matched_count, pattern_admissible

SENSE_EQ, SENSE_LE, SENSE_GE = 0, 1, 2
_SENSE_TXT = {SENSE_EQ: "=", SENSE_LE: "<=", SENSE_GE: ">="}


@dataclass(frozen=True)
class PatternFilter:
    """Restriction of the solution patterns tried on every clique.

    ``side='fat'`` keeps unbounded parts fat and caps the number of unselected
    vertices per part (``part_cap``) and per clique (``clique_cap``).
    ``side='thin'`` keeps unbounded parts thin and caps selected vertices the
    same way.  ``None`` caps mean no limit.
    """

    side: Optional[str] = None
    part_cap: Optional[int] = None
    clique_cap: Optional[int] = None

    def allows(self, cT, sP, alpha):
        if self.side is None:
            return True
        total = 0
        for c, p in zip(cT, sP):
            if c == 0:
                continue
            unbounded = c > alpha
            if self.side == "fat":
                if unbounded and 2 * p < alpha:
                    return False
                amount = (alpha - p) if unbounded else c - p
            else:
                if unbounded and 2 * p > alpha:
                    return False
                amount = p
            if self.part_cap is not None and amount > self.part_cap:
                return False
            total += amount
        return self.clique_cap is None or total <= self.clique_cap


NO_FILTER = PatternFilter()


@lru_cache(maxsize=4096)
def column_patterns(cT, alpha, flt=NO_FILTER):
    """All admissible patterns of column type ``cT`` in lexicographic order."""
    ranges = [range(0, min(c, alpha) + 1) if c <= alpha else range(alpha + 1) for c in cT]
    return tuple(sP for sP in itertools.product(*ranges) if flt.allows(cT, sP, alpha))


def _popcount(x):
    return bin(x).count("1")


def clique_fc(sizes, sP, nT_star, alpha):
    """Largest number of selected neighbours seen by a vertex of the clique.

    ``sizes`` is the exact signature of the clique (length ``2**d``).  The value
    is ``|X & C|`` plus the best ``|nT & nT*|`` over present types, minus one
    when that part is entirely selected.
    """
    cT = tuple(min(s, alpha + 1) for s in sizes)
    if not pattern_admissible(cT, sP, alpha):
        raise ValueError(f"pattern {sP} is not admissible for a clique with parts {sizes}")
    sel = 0
    best = None
    for nT, s in enumerate(sizes):
        if s == 0:
            continue
        m = matched_count(s, cT[nT], sP[nT], alpha)
        if m > s:
            raise ValueError(f"pattern {sP} selects {m} of {s} vertices")
        sel += m
        cand = _popcount(nT & nT_star) - (1 if m == s else 0)
        best = cand if best is None else max(best, cand)
    return sel + (best if best is not None else 0)


def clique_selection(MG, ci, sP, alpha):
    """Lowest-numbered vertices of each part of clique ``ci`` that ``sP`` selects."""
    cT = column_type(MG, ci, alpha)
    out = []
    for nT, vs in MG.parts[ci].items():
        out += vs[:matched_count(len(vs), cT[nT], sP[nT], alpha)]
    return out


@dataclass
class CliquePartition:
    """Cliques grouped by column type and admissible-pattern set ``S``."""

    groups: dict
    S_of: list
    column_of: list

    def group_items(self):
        return sorted(self.groups.items(), key=lambda kv: (kv[0][0], sorted(kv[0][1])))


def partition_by_S(MG, nT_star, alpha, k, flt=NO_FILTER):
    groups, S_of, col_of = {}, [], []
    for ci in range(len(MG.cliques)):
        sizes = signature(MG, ci)
        cT = tuple(min(s, alpha + 1) for s in sizes)
        S = frozenset(sP for sP in column_patterns(cT, alpha, flt)
                      if _cached_fc(sizes, sP, nT_star, alpha) <= k)
        groups.setdefault((cT, S), []).append(ci)
        S_of.append(S)
        col_of.append(cT)
    return CliquePartition(groups, S_of, col_of)


@lru_cache(maxsize=1 << 16)
def _cached_fc(sizes, sP, nT_star, alpha):
    return clique_fc(sizes, sP, nT_star, alpha)


@dataclass
class ILPModel:
    names: list = field(default_factory=list)
    meta: list = field(default_factory=list)  # (cT, S, sP) per variable
    lb: list = field(default_factory=list)
    ub: list = field(default_factory=list)
    rows: list = field(default_factory=list)  # (name, {var: coef}, sense, rhs)
    trivially_infeasible: bool = False
    notes: list = field(default_factory=list)

    @property
    def n_vars(self):
        return len(self.names)

    def add_var(self, name, meta, lb, ub):
        self.names.append(name)
        self.meta.append(meta)
        self.lb.append(lb)
        self.ub.append(ub)
        return len(self.names) - 1

    def add_row(self, name, coefs, sense, rhs):
        coefs = {v: c for v, c in coefs.items() if c != 0}
        if not coefs:
            ok = (0 == rhs) if sense == SENSE_EQ else (0 <= rhs) if sense == SENSE_LE else (0 >= rhs)
            if not ok:
                self.trivially_infeasible = True
                self.notes.append(f"{name}: constant row 0 {_SENSE_TXT[sense]} {rhs} violated")
            return
        self.rows.append((name, coefs, sense, rhs))

    def dense(self):
        A = np.zeros((len(self.rows), max(self.n_vars, 1)), dtype=np.int64)
        sense = np.zeros(len(self.rows), dtype=np.int64)
        rhs = np.zeros(len(self.rows), dtype=np.int64)
        for r, (_, coefs, s, b) in enumerate(self.rows):
            for v, c in coefs.items():
                A[r, v] = c
            sense[r] = s
            rhs[r] = b
        return A, sense, rhs, np.asarray(self.lb, dtype=np.int64), np.asarray(self.ub, dtype=np.int64)


class ModelError(ValueError):
    pass


def build_model(MG, shp, partition, k, alpha, gamma):
    """Integer feasibility model for extending ``shp`` to a set of fair cost <= k.

    Variable ``x[g, sP]`` counts the cliques of group ``g = (cT, S)`` that get
    pattern ``sP``.  Rows: (1) every group is fully assigned; (2) uncapped shape
    entries are met exactly; (3) capped entries at least ``gamma`` times; (4)
    every modulator vertex sees at most ``k`` selected vertices.
    """
    if not is_coherent(shp, alpha):
        raise ModelError("shape is not coherent")
    M = shp.entries
    columns = shp.columns()
    present = sorted({cT for (cT, _) in partition.groups})
    if columns != present:
        raise ModelError(f"shape columns {columns} differ from the graph's column types {present}")
    model = ILPModel()
    col_idx = {cT: i for i, cT in enumerate(columns)}
    var_of = {}
    s_counter = {}
    for (cT, S), members in partition.group_items():
        si = s_counter.setdefault(cT, 0)
        s_counter[cT] = si + 1
        used = sorted(sP for sP in S if M.get((cT, sP), 0) > 0)
        for pi, sP in enumerate(used):
            v = model.add_var(f"x_{col_idx[cT]}_{si}_{pi}", (cT, S, sP), 0, len(members))
            var_of[(cT, S, sP)] = v
        model.add_row(f"assign_{col_idx[cT]}_{si}", {var_of[(cT, S, sP)]: 1 for sP in used},
                      SENSE_EQ, len(members))
    for (cT, sP), cnt in shp.M:
        coefs = {v: 1 for (c, S, p), v in var_of.items() if c == cT and p == sP}
        name = f"shape_{col_idx[cT]}_{'_'.join(map(str, sP))}"
        model.add_row(name, coefs, SENSE_EQ if cnt < gamma else SENSE_GE, cnt)
    # fair cost of the modulator vertices
    G = MG.graph
    for i, v in enumerate(MG.modulator):
        const = sum(1 for j, u in enumerate(MG.modulator) if (shp.nT_star >> j) & 1 and G.adj[v, u])
        coefs = {}
        for cT in columns:
            used = [sP for sP, _ in shp.patterns(cT)]
            for nT, c in enumerate(cT):
                if c == 0 or not (nT >> i) & 1:
                    continue
                fat = c > alpha and all(2 * sP[nT] > alpha for sP in used)
                if fat:
                    const += sum(len(MG.parts[ci].get(nT, ())) for ci, col in enumerate(partition.column_of)
                                 if col == cT)
                for (c2, S, sP), var in var_of.items():
                    if c2 != cT:
                        continue
                    w = -(alpha - sP[nT]) if fat else sP[nT]
                    coefs[var] = coefs.get(var, 0) + w
        model.add_row(f"fc_{i}", coefs, SENSE_LE, k - const)
    return model


@njit
def _propagate(A, sense, rhs, lo, hi):
    """Bound tightening to a fixpoint; False on proven infeasibility."""
    R, V = A.shape
    changed = True
    while changed:
        changed = False
        for r in range(R):
            mn = 0
            mx = 0
            for v in range(V):
                a = A[r, v]
                if a > 0:
                    mn += a * lo[v]
                    mx += a * hi[v]
                elif a < 0:
                    mn += a * hi[v]
                    mx += a * lo[v]
            s = sense[r]
            b = rhs[r]
            if (s != 2 and mn > b) or (s != 1 and mx < b):
                return False
            for v in range(V):
                a = A[r, v]
                if a == 0:
                    continue
                # activity of the other variables
                if a > 0:
                    omn = mn - a * lo[v]
                    omx = mx - a * hi[v]
                else:
                    omn = mn - a * hi[v]
                    omx = mx - a * lo[v]
                if s != 2:
                    # a*x <= b - omn
                    lim = b - omn
                    if a > 0:
                        nh = lim // a
                        if nh < hi[v]:
                            hi[v] = nh
                            changed = True
                    else:
                        nl = _ceil_div(-lim, -a)
                        if nl > lo[v]:
                            lo[v] = nl
                            changed = True
                if s != 1:
                    # a*x >= b - omx
                    lim = b - omx
                    if a > 0:
                        nl = _ceil_div(lim, a)
                        if nl > lo[v]:
                            lo[v] = nl
                            changed = True
                    else:
                        nh = (-lim) // (-a)
                        if nh < hi[v]:
                            hi[v] = nh
                            changed = True
                if lo[v] > hi[v]:
                    return False
                if changed:
                    # recompute the row activity with the new bounds
                    mn = 0
                    mx = 0
                    for u in range(V):
                        c = A[r, u]
                        if c > 0:
                            mn += c * lo[u]
                            mx += c * hi[u]
                        elif c < 0:
                            mn += c * hi[u]
                            mx += c * lo[u]
    return True


@njit
def _ceil_div(p, q):
    # q > 0
    return -((-p) // q)


@njit
def _bnb(A, sense, rhs, lo, hi, out):
    V = lo.shape[0]
    depth_lo = np.empty((V + 1, V), dtype=np.int64)
    depth_hi = np.empty((V + 1, V), dtype=np.int64)
    var_at = np.full(V + 1, -1, dtype=np.int64)
    val_at = np.zeros(V + 1, dtype=np.int64)
    if not _propagate(A, sense, rhs, lo, hi):
        return False
    depth = 0
    depth_lo[0] = lo
    depth_hi[0] = hi
    while True:
        cl = depth_lo[depth].copy()
        ch = depth_hi[depth].copy()
        if var_at[depth] < 0:
            best = -1
            width = 0
            for v in range(V):
                w = ch[v] - cl[v]
                if w > 0 and (best < 0 or w < width):
                    best = v
                    width = w
            if best < 0:
                for v in range(V):
                    out[v] = cl[v]
                return True
            var_at[depth] = best
            val_at[depth] = cl[best]
        else:
            val_at[depth] += 1
        v = var_at[depth]
        if val_at[depth] > ch[v]:
            var_at[depth] = -1
            if depth == 0:
                return False
            depth -= 1
            continue
        cl[v] = val_at[depth]
        ch[v] = val_at[depth]
        if _propagate(A, sense, rhs, cl, ch):
            depth_lo[depth + 1] = cl
            depth_hi[depth + 1] = ch
            var_at[depth + 1] = -1
            depth += 1


def solve_ilp(model):
    """Exact feasibility check; returns a list of variable values or ``None``."""
    if model.trivially_infeasible:
        return None
    if model.n_vars == 0:
        return [] if not model.rows else None
    A, sense, rhs, lo, hi = model.dense()
    out = np.zeros(model.n_vars, dtype=np.int64)
    if _bnb(A, sense, rhs, lo.copy(), hi.copy(), out):
        return out.tolist()
    return None


def check_assignment(model, values):
    """True iff ``values`` satisfies every bound and row of ``model``."""
    if model.trivially_infeasible:
        return False
    if any(not (l <= x <= u) for x, l, u in zip(values, model.lb, model.ub)):
        return False
    for _, coefs, s, b in model.rows:
        act = sum(c * values[v] for v, c in coefs.items())
        if (s == SENSE_EQ and act != b) or (s == SENSE_LE and act > b) or (s == SENSE_GE and act < b):
            return False
    return True


@dataclass(frozen=True)
class FairSolution:
    X: frozenset
    fair_cost: int
    shape: Shape


def extract_solution(assignment, shp, partition, MG, alpha, model):
    """Concrete vertex set from a feasible assignment.

    In every group the lowest-numbered cliques receive the lexicographically
    smallest patterns; inside each part the lowest-numbered vertices are
    selected.
    """
    X = {v for i, v in enumerate(MG.modulator) if (shp.nT_star >> i) & 1}
    counts = {}
    for var, val in enumerate(assignment):
        cT, S, sP = model.meta[var]
        counts.setdefault((cT, S), []).append((sP, val))
    for key, members in partition.group_items():
        plan = sorted(counts.get(key, []))
        queue = [sP for sP, c in plan for _ in range(c)]
        if len(queue) != len(members):
            raise ValueError("assignment does not cover its group")
        for ci, sP in zip(members, queue):
            X.update(clique_selection(MG, ci, sP, alpha))
    X = frozenset(X)
    return FairSolution(X, fair_cost(MG.graph, X), shp)


def export_lp(model):
    """CPLEX-LP style text of a feasibility model."""
    out = ["minimize", " obj: 0", "subject to"]
    for name, coefs, s, b in model.rows:
        terms = []
        for v in sorted(coefs):
            c = coefs[v]
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)} "
            terms.append(f"{sign} {mag}{model.names[v]}")
        expr = " ".join(terms)
        if expr.startswith("+ "):
            expr = expr[2:]
        out.append(f" {name}: {expr} {_SENSE_TXT[s]} {b}")
    for note in model.notes:
        out.append(f"\\ {note}")
    out.append("bounds")
    for name, l, u in zip(model.names, model.lb, model.ub):
        out.append(f" {l} <= {name} <= {u}")
    if model.names:
        out.append("general")
        out.append(" " + " ".join(model.names))
    out.append("end")
    return "\n".join(out) + "\n"
