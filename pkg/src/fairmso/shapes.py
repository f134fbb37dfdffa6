"""Compliant sets, trimming, solution patterns and shapes.

Vectors over neighbourhood types are tuples of length ``2**d`` indexed by the
type bitmask.  A column type ``cT`` caps part sizes at ``alpha + 1`` (which
means "more than alpha"); a solution pattern ``sP`` has entries in
``0..alpha``.  On an unbounded part an entry above ``alpha/2`` stands for "all
but ``alpha - sP`` vertices".
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .graph import Graph, as_mask, validate_modulator
from .logic import evaluate, evaluate_masks
from .reduction import delete_vertices, select_Q

BOUNDED, THIN, FAT = "bounded", "thin", "fat"


def _check_alpha(alpha):
    if alpha < 1 or alpha % 2 == 0:
        raise ValueError(f"alpha must be a positive odd integer, got {alpha}")


def classify(nT, cT, sP, alpha):
    if cT[nT] <= alpha:
        return BOUNDED
    return THIN if 2 * sP[nT] < alpha else FAT


def matched_count(size, cap_entry, p, alpha):
    """How many vertices of a part of ``size`` vertices pattern entry ``p`` selects."""
    if cap_entry <= alpha or 2 * p < alpha:
        return p
    return size - (alpha - p)


def pattern_admissible(cT, sP, alpha):
    """Pattern entries fit the column: bounded entries may not exceed the part size."""
    return all(0 <= p <= alpha and (c > alpha or p <= c) for c, p in zip(cT, sP))


def column_type(MG, ci, alpha):
    sig = [0] * MG.n_types
    for t, vs in MG.parts[ci].items():
        sig[t] = min(len(vs), alpha + 1)
    return tuple(sig)


def part_counts(MG, ci, X):
    """Per type: (part size, selected count)."""
    Xs = set(X)
    out = {}
    for t, vs in MG.parts[ci].items():
        out[t] = (len(vs), sum(1 for v in vs if v in Xs))
    return out


def part_compliant(size, sel, alpha):
    return 2 * sel < alpha or 2 * (size - sel) < alpha


def is_compliant(MG, X, alpha):
    _check_alpha(alpha)
    return all(part_compliant(s, x, alpha)
               for ci in range(len(MG.cliques)) for s, x in part_counts(MG, ci, X).values())


def make_compliant(MG, X, alpha, phi=None, verify=False):
    """Shrink ``X`` inside every non-compliant part down to ``floor(alpha/2)`` vertices.

    The result is a compliant subset of ``X``.  With ``verify`` the formula is
    re-evaluated on the result and a :class:`RuntimeError` raised if it fails.
    """
    _check_alpha(alpha)
    Xs = set(X)
    out = set(Xs)
    for parts in MG.parts:
        for vs in parts.values():
            sel = sum(1 for v in vs if v in Xs)
            if not part_compliant(len(vs), sel, alpha):
                out -= select_Q(vs, Xs, alpha)
    if verify and phi is not None and not evaluate(MG.graph, out, phi):
        raise RuntimeError("compliant shrink lost the formula (alpha below the safe bound?)")
    return out


def trim(MG, X, alpha):
    """Cut every part larger than ``alpha`` down to ``alpha + 1`` vertices.

    Returns the trimmed modulated graph and the image of ``X`` in it.
    """
    if not is_compliant(MG, X, alpha):
        raise ValueError("trim needs an alpha-compliant set")
    Xs = set(X)
    gone = []
    for parts in MG.parts:
        for vs in parts.values():
            s = len(vs)
            if s <= alpha:
                continue
            sel = [v for v in vs if v in Xs]
            uns = [v for v in vs if v not in Xs]
            x = len(sel)
            if 2 * x > 2 * s - alpha:
                keep_sel = alpha + 1 - (s - x)
            else:
                keep_sel = min(x, alpha // 2)
            keep_uns = alpha + 1 - keep_sel
            gone += sel[keep_sel:] + uns[keep_uns:]
    return delete_vertices(MG, Xs, gone)


def pattern_of(MG, ci, X, alpha):
    """Solution pattern matched by ``X`` on clique ``ci`` (needs compliance)."""
    sP = [0] * MG.n_types
    for t, (s, x) in part_counts(MG, ci, X).items():
        if s <= alpha or 2 * x < alpha:
            sP[t] = x
        elif 2 * (s - x) < alpha:
            sP[t] = alpha - (s - x)
        else:
            raise ValueError(f"clique {ci} type {t} is not {alpha}-compliant")
    return tuple(sP)


@dataclass(frozen=True)
class Shape:
    """Modulator selection ``nT_star`` (bitmask) plus capped multiplicities.

    ``M`` is a sorted tuple of ``((cT, sP), count)`` with positive counts.
    """

    nT_star: int
    M: tuple

    @classmethod
    def build(cls, nT_star, entries):
        return cls(int(nT_star), tuple(sorted((k, int(c)) for k, c in dict(entries).items() if c > 0)))

    @property
    def entries(self):
        return dict(self.M)

    def columns(self):
        return sorted({cT for (cT, _), _ in self.M})

    def patterns(self, cT):
        return [(sP, c) for (ct, sP), c in self.M if ct == cT]

    def dump(self, d):
        lines = ["nT*: " + "".join(str((self.nT_star >> i) & 1) for i in range(d))]
        for (cT, sP), c in self.M:
            lines.append(f"cT=<{','.join(map(str, cT))}> sP=<{','.join(map(str, sP))}> count={c}")
        return "\n".join(lines)


@njit
def _shape_rows(masks, mod, part_ptr, part_idx, part_clique, part_type, col_of_clique, pows, B, alpha):
    """Per row: modulator bitmask, then sorted clique keys ``col * B + code``.

    A row starting with -1 is not alpha-compliant.
    """
    R = masks.shape[0]
    nc = col_of_clique.shape[0]
    P = part_clique.shape[0]
    out = np.empty((R, nc + 1), dtype=np.int64)
    codes = np.zeros(nc, dtype=np.int64)
    for r in range(R):
        star = 0
        for i in range(mod.shape[0]):
            if masks[r, mod[i]]:
                star |= np.int64(1) << i
        codes[:] = 0
        ok = True
        for p in range(P):
            x = 0
            for j in range(part_ptr[p], part_ptr[p + 1]):
                x += masks[r, part_idx[j]]
            s = part_ptr[p + 1] - part_ptr[p]
            if s <= alpha or 2 * x < alpha:
                e = x
            elif 2 * (s - x) < alpha:
                e = alpha - (s - x)
            else:
                ok = False
                break
            codes[part_clique[p]] += e * pows[part_type[p]]
        if not ok:
            out[r, :] = -1
            continue
        out[r, 0] = star
        for c in range(nc):
            codes[c] += col_of_clique[c] * B
        out[r, 1:] = np.sort(codes)
    return out


def _layout(MG, alpha):
    cols = sorted({column_type(MG, ci, alpha) for ci in range(len(MG.cliques))})
    col_id = {c: i for i, c in enumerate(cols)}
    ptr, idx, pc, pt = [0], [], [], []
    for ci, parts in enumerate(MG.parts):
        for t, vs in parts.items():
            idx += vs
            ptr.append(len(idx))
            pc.append(ci)
            pt.append(t)
    col_of = [col_id[column_type(MG, ci, alpha)] for ci in range(len(MG.cliques))]
    a = lambda x: np.asarray(x, dtype=np.int64)  # noqa: E731
    return cols, a(ptr), a(idx), a(pc), a(pt), a(col_of)


def compute_shapes(MG, masks, alpha, gamma):
    """Shapes of many candidate sets at once.

    ``masks`` is an ``(R, n)`` 0/1 array.  Returns ``(shapes, index)`` where
    ``index[r]`` points into the list of distinct shapes, or is -1 when row
    ``r`` is not alpha-compliant.
    """
    _check_alpha(alpha)
    masks = np.ascontiguousarray(masks, dtype=np.uint8)
    if MG.graph.n == 0:
        return [Shape(0, ())], np.zeros(len(masks), dtype=np.int64)
    masks = masks.reshape(-1, MG.graph.n)
    nt = MG.n_types
    B = (alpha + 1) ** nt
    cols, ptr, idx, pc, pt, col_of = _layout(MG, alpha)
    if B * max(len(cols), 1) >= 2 ** 62:
        shapes, index, seen = [], np.empty(len(masks), dtype=np.int64), {}
        for r, row in enumerate(masks):
            X = set(np.flatnonzero(row).tolist())
            if not is_compliant(MG, X, alpha):
                index[r] = -1
                continue
            shp = _compute_shape_slow(MG, X, alpha, gamma)
            index[r] = seen.setdefault(shp, len(seen))
            if index[r] == len(shapes):
                shapes.append(shp)
        return shapes, index
    pows = np.asarray([(alpha + 1) ** t for t in range(nt)], dtype=np.int64)
    mod = np.asarray(MG.modulator, dtype=np.int64)
    rows = _shape_rows(masks, mod, ptr, idx, pc, pt, col_of, pows, B, alpha)
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    seen, shapes, decoded = {}, [], {}
    remap = np.empty(len(uniq), dtype=np.int64)
    for u, row in enumerate(uniq):
        if row[0] < 0:
            remap[u] = -1
            continue
        counts = {}
        for key in row[1:].tolist():
            k = decoded.get(key)
            if k is None:
                col, code = divmod(key, B)
                sP = tuple((code // (alpha + 1) ** t) % (alpha + 1) for t in range(nt))
                k = decoded[key] = (cols[col], sP)
            counts[k] = min(gamma, counts.get(k, 0) + 1)
        shp = Shape.build(int(row[0]), counts)
        if shp not in seen:
            seen[shp] = len(shapes)
            shapes.append(shp)
        remap[u] = seen[shp]
    return shapes, remap[inv]


def _compute_shape_slow(MG, X, alpha, gamma):
    Xs = set(X)
    nT_star = sum(1 << i for i, v in enumerate(MG.modulator) if v in Xs)
    counts = {}
    for ci in range(len(MG.cliques)):
        key = (column_type(MG, ci, alpha), pattern_of(MG, ci, Xs, alpha))
        counts[key] = min(gamma, counts.get(key, 0) + 1)
    return Shape.build(nT_star, counts)


def compute_shape(MG, X, alpha, gamma):
    """The unique shape agreeing with the compliant set ``X``."""
    shapes, index = compute_shapes(MG, as_mask(MG.graph.n, X)[None, :], alpha, gamma)
    if index[0] < 0:
        raise ValueError(f"set is not {alpha}-compliant")
    return shapes[index[0]]


def is_coherent(shp, alpha):
    for cT in shp.columns():
        used = [sP for sP, _ in shp.patterns(cT)]
        for nT, c in enumerate(cT):
            if c > alpha and len({2 * sP[nT] < alpha for sP in used}) > 1:
                return False
    return True


def associated_instance(shp, modulator_subgraph, alpha):
    """Smallest graph and set realising ``shp``.

    The modulator comes first (vertices ``0..d-1`` wired as in
    ``modulator_subgraph``), then ``count`` cliques per entry of ``M`` in its
    sorted order.  Each clique has ``cT[nT]`` vertices of type ``nT`` and the
    lowest-numbered ones of each part are selected.
    """
    d = modulator_subgraph.n
    edges = list(modulator_subgraph.edges())
    X = {i for i in range(d) if (shp.nT_star >> i) & 1}
    nxt = d
    for (cT, sP), count in shp.M:
        if len(cT) != 1 << d or len(sP) != 1 << d:
            raise ValueError("shape vectors do not match the modulator size")
        if not pattern_admissible(cT, sP, alpha):
            raise ValueError(f"pattern {sP} exceeds column {cT}")
        for _ in range(count):
            clique = []
            for nT, size in enumerate(cT):
                take = matched_count(size, size, sP[nT], alpha)
                for j in range(size):
                    v = nxt
                    nxt += 1
                    edges += [(v, i) for i in range(d) if (nT >> i) & 1]
                    clique.append(v)
                    if j < take:
                        X.add(v)
            edges += [(u, w) for k, u in enumerate(clique) for w in clique[k + 1:]]
    return Graph(nxt, edges), X


def associated_modulated(shp, modulator_subgraph, alpha):
    G, X = associated_instance(shp, modulator_subgraph, alpha)
    return validate_modulator(G, range(modulator_subgraph.n)), X


def evaluate_shape(shp, phi, modulator_subgraph, alpha):
    G, X = associated_instance(shp, modulator_subgraph, alpha)
    return evaluate(G, X, phi)


def _block(cT, sP, alpha):
    """Size of one clique of column ``cT`` and the offsets selected by ``sP``."""
    if not pattern_admissible(cT, sP, alpha):
        raise ValueError(f"pattern {sP} exceeds column {cT}")
    offsets, start = [], 0
    for nT, size in enumerate(cT):
        offsets.extend(range(start, start + matched_count(size, size, sP[nT], alpha)))
        start += size
    return start, offsets


def _selection(shp, d, alpha, cache):
    """The set of :func:`associated_instance` without building the graph."""
    X = [i for i in range(d) if (shp.nT_star >> i) & 1]
    nxt = d
    for key, count in shp.M:
        block = cache.get(key)
        if block is None:
            block = cache[key] = _block(key[0], key[1], alpha)
        size, offsets = block
        for _ in range(count):
            X.extend([o + nxt for o in offsets])
            nxt += size
    return X


def evaluate_shapes(shapes, phi, modulator_subgraph, alpha):
    """``evaluate_shape`` for many shapes; ``phi`` may also be a list of formulas.

    Associated instances only depend on the clique types and their counts, so
    shapes sharing them are evaluated in one batch over a single graph.  Returns
    a boolean array, with one row per formula when a list is given.
    """
    phis = list(phi) if isinstance(phi, (list, tuple)) else [phi]
    groups = {}
    for i, shp in enumerate(shapes):
        tot = {}
        for (cT, _), c in shp.M:
            tot[cT] = tot.get(cT, 0) + c
        groups.setdefault(tuple(sorted(tot.items())), []).append(i)
    out = np.zeros((len(phis), len(shapes)), dtype=bool)
    d = modulator_subgraph.n
    cache = {}
    for idx in groups.values():
        G, _ = associated_instance(shapes[idx[0]], modulator_subgraph, alpha)
        masks = np.zeros((len(idx), G.n), dtype=np.uint8)
        for row, i in enumerate(idx):
            masks[row, _selection(shapes[i], d, alpha, cache)] = 1
        for j, f in enumerate(phis):
            out[j, idx] = evaluate_masks(G, masks, f)
    return out if isinstance(phi, (list, tuple)) else out[0]
