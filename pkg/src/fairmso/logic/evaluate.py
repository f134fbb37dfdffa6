"""Exhaustive MSO1 model checking.

A formula is compiled to flat integer arrays and run by a stack-machine kernel.
Vertex quantifiers range over all vertices.  Set quantifiers range over all
subsets, enumerated by increasing size, but simple guard conjuncts of the form
``forall x (in x S -> psi)`` and ``forall x (psi -> in x S)`` (``psi`` not
mentioning ``S``) restrict the range up front without changing the semantics.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .._jit import njit
from .formula import (FREE, Adj, And, Eq, ExistsS, ExistsV, ForallS, ForallV, Implies, In, Not,
                      Or, mentions_set, miniscope)

OP_AND, OP_OR, OP_NOT, OP_IMP, OP_EXV, OP_ALLV, OP_EXS, OP_ALLS, OP_ADJ, OP_EQ, OP_IN = range(11)
G_UPPER, G_LOWER = 0, 1
MAX_SET_DOMAIN = 62


class Program:
    """Flat encoding of a formula."""

    def __init__(self, op, a, b, c, gkind, gvar, gpsi, gstart, gend, n_vslots, n_sslots):
        self.op, self.a, self.b, self.c = op, a, b, c
        self.gkind, self.gvar, self.gpsi = gkind, gvar, gpsi
        self.gstart, self.gend = gstart, gend
        self.n_vslots, self.n_sslots = n_vslots, n_sslots
        self.has_sets = bool(np.any((op == OP_EXS) | (op == OP_ALLS)))


def _is_atom(f):
    return type(f) in (Adj, Eq, In)


def _conjuncts(f):
    if type(f) is And:
        return _conjuncts(f.a) + _conjuncts(f.b)
    return [f]


def _guards(body, name, universal):
    """Collect (kind, var, psi) restrictions on set variable ``name``."""
    src = body
    if universal:
        if type(body) is not Implies:
            return []
        src = body.a
    out = []
    for g in _conjuncts(src):
        if type(g) is not ForallV or type(g.body) is not Implies:
            continue
        x, ante, cons = g.var, g.body.a, g.body.b
        if ante == In(x, name):
            psis = [p for p in _conjuncts(cons) if not mentions_set(p, name)]
            out += [(G_UPPER, x, p) for p in psis]
        elif cons == In(x, name) and not mentions_set(ante, name):
            out.append((G_LOWER, x, ante))
    return out


class _Compiler:
    def __init__(self):
        self.rows = []
        self.guards = []
        self.nv = 0
        self.ns = 1  # slot 0 is Free

    def emit(self, op, a=0, b=0, c=0):
        self.rows.append([op, a, b, c, 0, 0])
        return len(self.rows) - 1

    def comp(self, f, venv, senv):
        t = type(f)
        if t is And or t is Or:
            a, b = f.a, f.b
            # cheap atoms first so the short circuit fires early
            if _is_atom(b) and not _is_atom(a):
                a, b = b, a
            i = self.emit(OP_AND if t is And else OP_OR)
            self.rows[i][1] = self.comp(a, venv, senv)
            self.rows[i][2] = self.comp(b, venv, senv)
            return i
        if t is Implies:
            i = self.emit(OP_IMP)
            self.rows[i][1] = self.comp(f.a, venv, senv)
            self.rows[i][2] = self.comp(f.b, venv, senv)
            return i
        if t is Not:
            i = self.emit(OP_NOT)
            self.rows[i][1] = self.comp(f.a, venv, senv)
            return i
        if t is ExistsV or t is ForallV:
            slot = self.nv
            self.nv += 1
            i = self.emit(OP_EXV if t is ExistsV else OP_ALLV, slot)
            self.rows[i][2] = self.comp(f.body, {**venv, f.var: slot}, senv)
            return i
        if t is ExistsS or t is ForallS:
            slot = self.ns
            self.ns += 1
            i = self.emit(OP_EXS if t is ExistsS else OP_ALLS, slot)
            guards = _guards(f.body, f.var, t is ForallS)
            # guards are compiled in the outer scope: psi never mentions the set
            compiled = []
            for kind, x, psi in guards:
                xs = self.nv
                self.nv += 1
                compiled.append((kind, xs, self.comp(psi, {**venv, x: xs}, senv)))
            self.rows[i][4] = len(self.guards)
            self.guards.extend(compiled)
            self.rows[i][5] = len(self.guards)
            self.rows[i][2] = self.comp(f.body, venv, {**senv, f.var: slot})
            return i
        if t is Adj:
            return self.emit(OP_ADJ, venv[f.x], venv[f.y])
        if t is Eq:
            return self.emit(OP_EQ, venv[f.x], venv[f.y])
        if t is In:
            return self.emit(OP_IN, venv[f.x], 0 if f.s == FREE else senv[f.s])
        raise TypeError(f"not a formula node: {f!r}")


@lru_cache(maxsize=256)
def compile_formula(f):
    c = _Compiler()
    root = c.comp(miniscope(f), {}, {})
    assert root == 0
    rows = np.asarray(c.rows, dtype=np.int64).reshape(-1, 6)
    g = np.asarray(c.guards, dtype=np.int64).reshape(-1, 3)
    return Program(rows[:, 0].copy(), rows[:, 1].copy(), rows[:, 2].copy(), rows[:, 3].copy(),
                   g[:, 0].copy(), g[:, 1].copy(), g[:, 2].copy(), rows[:, 4].copy(), rows[:, 5].copy(),
                   max(c.nv, 1), c.ns)


@njit
def _ev(op, a, b, gkind, gvar, gpsi, gstart, gend, adj, env, sets,
        st_node, st_state, st_iter, st_aux, st_c, st_r, lower, upper, freev):
    """Iterative evaluation with an explicit stack; returns the root's truth value."""
    n = adj.shape[0]
    top = 0
    st_node[0] = 0
    st_state[0] = 0
    ret = False
    while top >= 0:
        i = st_node[top]
        o = op[i]
        s = st_state[top]
        if o == 8:
            ret = adj[env[a[i]], env[b[i]]] != 0
            top -= 1
        elif o == 10:
            ret = sets[b[i], env[a[i]]] != 0
            top -= 1
        elif o == 9:
            ret = env[a[i]] == env[b[i]]
            top -= 1
        elif o <= 3:
            if s == 0:
                st_state[top] = 1
                top += 1
                st_node[top] = a[i]
                st_state[top] = 0
            elif s == 1 and o != 2:
                # AND stops on False, OR on True, IMPLIES on a False antecedent
                if (o == 0 and not ret) or (o == 1 and ret):
                    top -= 1
                elif o == 3 and not ret:
                    ret = True
                    top -= 1
                else:
                    st_state[top] = 2
                    top += 1
                    st_node[top] = b[i]
                    st_state[top] = 0
            elif o == 2:
                ret = not ret
                top -= 1
            else:
                top -= 1
        elif o == 4 or o == 5:
            want = o == 4
            if s == 0:
                if n == 0:
                    ret = not want
                    top -= 1
                    continue
                st_iter[top] = 0
                env[a[i]] = 0
                st_state[top] = 1
                top += 1
                st_node[top] = b[i]
                st_state[top] = 0
            elif ret == want:
                top -= 1
            else:
                v = st_iter[top] + 1
                if v == n:
                    ret = not want
                    top -= 1
                else:
                    st_iter[top] = v
                    env[a[i]] = v
                    top += 1
                    st_node[top] = b[i]
                    st_state[top] = 0
        else:
            want = o == 6
            if s == 0:
                for v in range(n):
                    lower[top, v] = 0
                    upper[top, v] = 1
                st_aux[top] = gstart[i]
                st_iter[top] = 0
            elif s == 1:
                # record the guard value just computed for vertex st_iter
                g = st_aux[top]
                v = st_iter[top]
                if gkind[g] == 0:
                    if not ret:
                        upper[top, v] = 0
                elif ret:
                    lower[top, v] = 1
                v += 1
                if v == n:
                    v = 0
                    st_aux[top] = g + 1
                st_iter[top] = v
            if s <= 1:
                g = st_aux[top]
                if g < gend[i] and n > 0:
                    env[gvar[g]] = st_iter[top]
                    st_state[top] = 1
                    top += 1
                    st_node[top] = gpsi[g]
                    st_state[top] = 0
                    continue
                f = 0
                empty = False
                for v in range(n):
                    if lower[top, v] and not upper[top, v]:
                        empty = True
                    if upper[top, v] and not lower[top, v]:
                        freev[top, f] = v
                        f += 1
                    sets[a[i], v] = lower[top, v]
                if empty:
                    ret = not want
                    top -= 1
                    continue
                st_aux[top] = f
                st_r[top] = 0
                st_c[top] = 0
                st_state[top] = 2
                top += 1
                st_node[top] = b[i]
                st_state[top] = 0
                continue
            if ret == want:
                top -= 1
                continue
            # next subset of the free positions: Gosper's hack within a size class
            f = st_aux[top]
            c = st_c[top]
            r = st_r[top]
            limit = np.int64(1) << f
            if c != 0:
                u = c & -c
                w = c + u
                c = w + (((w ^ c) // u) >> 2)
            if c == 0 or c >= limit:
                r += 1
                if r > f:
                    ret = not want
                    top -= 1
                    continue
                c = (np.int64(1) << r) - 1
            st_c[top] = c
            st_r[top] = r
            for j in range(f):
                sets[a[i], freev[top, j]] = (c >> j) & 1
            top += 1
            st_node[top] = b[i]
            st_state[top] = 0
    return ret


@njit
def _ev_alloc(op, a, b, gkind, gvar, gpsi, gstart, gend, adj, env, sets):
    m = op.shape[0] + 1
    n = max(adj.shape[0], 1)
    st_node = np.zeros(m, dtype=np.int64)
    st_state = np.zeros(m, dtype=np.int64)
    st_iter = np.zeros(m, dtype=np.int64)
    st_aux = np.zeros(m, dtype=np.int64)
    st_c = np.zeros(m, dtype=np.int64)
    st_r = np.zeros(m, dtype=np.int64)
    lower = np.zeros((m, n), dtype=np.uint8)
    upper = np.zeros((m, n), dtype=np.uint8)
    freev = np.zeros((m, n), dtype=np.int64)
    return _ev(op, a, b, gkind, gvar, gpsi, gstart, gend, adj, env, sets,
               st_node, st_state, st_iter, st_aux, st_c, st_r, lower, upper, freev)


@njit
def run_program(op, a, b, gkind, gvar, gpsi, gstart, gend, adj, free_mask, n_vslots, n_sslots):
    n = adj.shape[0]
    env = np.zeros(n_vslots, dtype=np.int64)
    sets = np.zeros((n_sslots, max(n, 1)), dtype=np.uint8)
    for v in range(n):
        sets[0, v] = free_mask[v]
    return _ev_alloc(op, a, b, gkind, gvar, gpsi, gstart, gend, adj, env, sets)


@njit
def run_program_many(op, a, b, gkind, gvar, gpsi, gstart, gend, adj, masks, n_vslots, n_sslots):
    """Evaluate one formula for every row of ``masks``."""
    n = adj.shape[0]
    out = np.zeros(masks.shape[0], dtype=np.uint8)
    env = np.zeros(n_vslots, dtype=np.int64)
    sets = np.zeros((n_sslots, max(n, 1)), dtype=np.uint8)
    m = op.shape[0] + 1
    nn = max(n, 1)
    st_node = np.zeros(m, dtype=np.int64)
    st_state = np.zeros(m, dtype=np.int64)
    st_iter = np.zeros(m, dtype=np.int64)
    st_aux = np.zeros(m, dtype=np.int64)
    st_c = np.zeros(m, dtype=np.int64)
    st_r = np.zeros(m, dtype=np.int64)
    lower = np.zeros((m, nn), dtype=np.uint8)
    upper = np.zeros((m, nn), dtype=np.uint8)
    freev = np.zeros((m, nn), dtype=np.int64)
    for r in range(masks.shape[0]):
        for v in range(n):
            sets[0, v] = masks[r, v]
        out[r] = _ev(op, a, b, gkind, gvar, gpsi, gstart, gend, adj, env, sets,
                     st_node, st_state, st_iter, st_aux, st_c, st_r, lower, upper, freev)
    return out


def _check_domain(prog, n):
    if prog.has_sets and n > MAX_SET_DOMAIN:
        raise ValueError(f"set quantification over {n} > {MAX_SET_DOMAIN} vertices is not supported")


def program_args(prog):
    return (prog.op, prog.a, prog.b, prog.gkind, prog.gvar, prog.gpsi, prog.gstart, prog.gend)


def evaluate(G, free_set, phi):
    """Truth of ``phi`` on ``G`` with ``Free`` interpreted as ``free_set``."""
    prog = compile_formula(phi)
    _check_domain(prog, G.n)
    if G.n == 0:
        return _evaluate_empty(phi, free_set)
    mask = np.zeros(G.n, dtype=np.uint8)
    for v in free_set:
        mask[v] = 1
    adj = np.ascontiguousarray(G.adj)
    return bool(run_program(*program_args(prog), adj, mask, prog.n_vslots, prog.n_sslots))


def evaluate_masks(G, masks, phi):
    """Vectorised :func:`evaluate` over a 2-d uint8 array of membership rows."""
    prog = compile_formula(phi)
    _check_domain(prog, G.n)
    masks = np.ascontiguousarray(masks, dtype=np.uint8)
    if G.n == 0:
        return np.array([_evaluate_empty(phi, ())] * len(masks), dtype=np.uint8)
    adj = np.ascontiguousarray(G.adj)
    return run_program_many(*program_args(prog), adj, masks, prog.n_vslots, prog.n_sslots)


def _evaluate_empty(f, free_set):
    # empty structure: vertex quantifiers are vacuous, the only set is empty
    t = type(f)
    if t is And:
        return _evaluate_empty(f.a, ()) and _evaluate_empty(f.b, ())
    if t is Or:
        return _evaluate_empty(f.a, ()) or _evaluate_empty(f.b, ())
    if t is Implies:
        return (not _evaluate_empty(f.a, ())) or _evaluate_empty(f.b, ())
    if t is Not:
        return not _evaluate_empty(f.a, ())
    if t is ExistsV:
        return False
    if t is ForallV:
        return True
    return _evaluate_empty(f.body, ())
