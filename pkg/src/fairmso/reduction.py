"""Twin-class shrinking and irrelevant-clique removal."""
from __future__ import annotations

from .graph import validate_modulator


def select_Q(T, X, tau):
    """Vertices ``Q`` of the twin class ``T`` to discard, leaving exactly ``tau``.

    With ``t = |T|`` and ``x = |X & T|`` the survivors keep ``x`` selected
    vertices when ``x <= tau/2``, ``floor(tau/2)`` when
    ``tau/2 < x <= t - tau/2`` and ``tau - (t - x)`` otherwise.  Lowest-index
    vertices are removed first on each side.
    """
    T = sorted(T)
    t = len(T)
    if t < tau:
        raise ValueError(f"twin class of size {t} is smaller than tau={tau}")
    Xs = set(X)
    inside = [v for v in T if v in Xs]
    outside = [v for v in T if v not in Xs]
    x = len(inside)
    if 2 * x <= tau:
        q = outside[:t - tau]
    elif 2 * x <= 2 * t - tau:
        q = inside[:x - tau // 2] + outside[:(t - x) - (tau - tau // 2)]
    else:
        q = inside[:t - tau]
    return set(q)


def twin_classes(MG, X):
    """Twin classes keyed by (clique index, neighbourhood type, in X)."""
    Xs = set(X)
    out = {}
    for ci, parts in enumerate(MG.parts):
        for t, vs in parts.items():
            for flag in (True, False):
                cls = tuple(v for v in vs if (v in Xs) == flag)
                if cls:
                    out[(ci, t, flag)] = cls
    return out


def labeled_clique_type(MG, ci, X):
    """Per-type (selected, unselected) counts; equal keys mean label-isomorphic cliques."""
    Xs = set(X)
    key = []
    for t, vs in MG.parts[ci].items():
        sel = sum(1 for v in vs if v in Xs)
        key.append((t, sel, len(vs) - sel))
    return tuple(key)


def delete_vertices(MG, X, gone):
    """Remove ``gone`` (outside the modulator) and relabel by increasing old id."""
    gone = set(gone)
    if gone & set(MG.modulator):
        raise ValueError("cannot delete modulator vertices")
    keep = [v for v in range(MG.graph.n) if v not in gone]
    new_id = {v: i for i, v in enumerate(keep)}
    G2 = MG.graph.induced(keep)
    MG2 = validate_modulator(G2, [new_id[v] for v in MG.modulator])
    return MG2, {new_id[v] for v in X if v in new_id}


def remove_irrelevant_clique(MG, X, gamma):
    """Drop one clique whose labelled type occurs more than ``gamma`` times.

    Returns ``(reduced MG, reduced X, removed clique index)`` or ``None``.
    """
    if gamma < 1:
        raise ValueError("gamma must be positive")
    groups = {}
    for ci in range(len(MG.cliques)):
        groups.setdefault(labeled_clique_type(MG, ci, X), []).append(ci)
    for key in sorted(groups):
        members = groups[key]
        if len(members) > gamma:
            ci = members[-1]
            MG2, X2 = delete_vertices(MG, X, MG.cliques[ci])
            return MG2, X2, ci
    return None
