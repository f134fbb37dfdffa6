"""Acceptance checks, one function per criterion.

Each ``criterion_*`` function returns ``(passed, summary, payload)`` where
``payload`` is JSON-serialisable.  ``python3 tests/acceptance_lib.py c1`` prints
the payload of a criterion, which the determinism check compares byte for
byte against a second process.
"""
import itertools
import json
import os
import random
import sys
import time
import warnings
from collections import Counter

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))

from corpus import FO_CORPUS, _multisets, atlas_graphs, build, clique_shapes, connected_graphs  # noqa: E402

from fairmso.cvd import brute_force_cvd, find_modulator_min  # noqa: E402
from fairmso.graph import Graph, fair_cost, signature, validate_modulator  # noqa: E402
from fairmso.hardness import (BinPackingInstance, binpack_brute, binpack_to_dtuple,  # noqa: E402
                              dtuple_to_fairfo, pad_dtuple)
from fairmso.ilp import (SENSE_EQ, SENSE_GE, SENSE_LE, ILPModel, check_assignment,  # noqa: E402
                         clique_fc, clique_selection, column_patterns, solve_ilp)
from fairmso.logic import NatSet, derive_params, evaluate, evaluate_masks, metrics, preset_formula  # noqa: E402
from fairmso.oracle import oracle_decision, oracle_min  # noqa: E402
from fairmso.reduction import remove_irrelevant_clique, select_Q  # noqa: E402
from fairmso.shapes import compute_shapes, evaluate_shapes, trim  # noqa: E402
from fairmso.solver import SolveConfig, preset_pattern_filter, solve_min  # noqa: E402

RESULTS = {}


def dumps(payload):
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


# criterion 1 -----------------------------------------------------------------

def presets():
    sigma, rho = NatSet.parse("0,1"), NatSet.parse("coN:0")
    out = {}
    for name in ("vc", "ds", "fvs", "oct"):
        out[name] = (preset_formula(name), preset_pattern_filter(name))
    out["sigma_rho"] = (preset_formula("sigma_rho", sigma, rho),
                        preset_pattern_filter("sigma_rho", sigma, rho))
    return out


def all_connected(n_max):
    import networkx as nx
    return [Graph(g.number_of_nodes(), g.edges()) for g in nx.graph_atlas_g()[1:]
            if g.number_of_nodes() <= n_max and nx.is_connected(g)]


def _int(x):
    return None if x is None else int(x)


def criterion_1():
    graphs = [("random", G) for G in connected_graphs(2024, 200, n_max=11, d_max=3)]
    graphs += [("atlas", G) for G in all_connected(7)]
    rows, bad = [], []
    for i, (src, G) in enumerate(graphs):
        MG = validate_modulator(G, find_modulator_min(G).modulator)
        for name, (phi, flt) in presets().items():
            rep = solve_min(MG, phi, SolveConfig(pattern_filter=flt))
            ref = _int(oracle_min(G, phi).k_star)
            X = None if rep.answer is None else sorted(map(int, rep.answer.X))
            ok = rep.k_star == ref
            if X is not None:
                ok = ok and evaluate(G, X, phi) and fair_cost(G, X) == rep.k_star
            rows.append([src, i, name, _int(rep.k_star), ref, X])
            if not ok:
                bad.append([src, i, name, _int(rep.k_star), ref])
    summary = f"{len(graphs)} graphs x 5 presets, {len(bad)} mismatches"
    return not bad, summary, {"rows": rows, "mismatches": bad}


# criterion 2 / 3 ---------------------------------------------------------------

_SWAP = {0: 0, 1: 2, 2: 1, 3: 3}


def modulated_graphs(n_max, d_max, keep=None):
    """Modulated graphs with n <= n_max and |D| <= min(d_max, 2); the two
    modulator vertices of d = 2 are treated as interchangeable."""
    for d in range(min(d_max, 2) + 1):
        pairs = list(itertools.combinations(range(d), 2))
        cl = clique_shapes(d, n_max - d)
        for mask in range(1 << len(pairs)):
            mod_edges = [p for i, p in enumerate(pairs) if mask >> i & 1]
            for cliques in _multisets(cl, n_max - d):
                if d == 2:
                    swapped = sorted(tuple(sorted(_SWAP[t] for t in C)) for C in cliques)
                    if swapped < sorted(cliques):
                        continue
                if keep is not None and not keep(cliques):
                    continue
                yield build(d, mod_edges, cliques)


def orbit_sets(MG):
    """One set per orbit of twin swaps and swaps of identical cliques, as 0/1 rows."""
    n = MG.graph.n
    rows = np.zeros((1 << MG.d, n), dtype=np.uint8)
    for m in range(1 << MG.d):
        for i, v in enumerate(MG.modulator):
            rows[m, v] = m >> i & 1
    classes = {}
    for ci in range(len(MG.cliques)):
        key = tuple(sorted((t, len(vs)) for t, vs in MG.parts[ci].items()))
        classes.setdefault(key, []).append(ci)
    for key, members in sorted(classes.items()):
        states = list(itertools.product(*[range(s + 1) for _, s in key]))
        opts = []
        for combo in itertools.combinations_with_replacement(range(len(states)), len(members)):
            row = np.zeros(n, dtype=np.uint8)
            for ci, si in zip(members, combo):
                for (t, _), c in zip(key, states[si]):
                    row[list(MG.parts[ci][t][:c])] = 1
            opts.append(row)
        rows = (rows[:, None, :] | np.asarray(opts, dtype=np.uint8)[None, :, :]).reshape(-1, n)
    return rows


def _formulas_by_params(d):
    groups = {}
    for phi in FO_CORPUS:
        p = derive_params(metrics(phi), d)
        assert metrics(phi).q_v <= 2 and metrics(phi).q_S == 0
        groups.setdefault((p.alpha, p.gamma), []).append(phi)
    return groups


def criterion_2(n_max=9, d_max=2):
    graphs = checks = bad = 0
    for MG in modulated_graphs(n_max, d_max):
        graphs += 1
        G, modsub = MG.graph, MG.modulator_subgraph()
        masks = orbit_sets(MG)
        for (alpha, gamma), phis in _formulas_by_params(MG.d).items():
            shapes, index = compute_shapes(MG, masks, alpha, gamma)
            ok = index >= 0
            by_shape = evaluate_shapes(shapes, phis, modsub, alpha)
            for j, phi in enumerate(phis):
                direct = evaluate_masks(G, masks[ok], phi)
                bad += int((by_shape[j][index[ok]] != direct).sum())
                checks += int(ok.sum())
    summary = f"{graphs} modulated graphs, {checks} (set, formula) checks, {bad} mismatches"
    return bad == 0, summary, {"graphs": graphs, "checks": checks, "mismatches": bad}


def _case_table_ok(t, x, tau):
    T = list(range(t))
    X = set(range(x))
    rest = set(T) - select_Q(T, X, tau)
    sel = len(rest & X)
    if len(rest) != tau:
        return False
    if 2 * x <= tau:
        return sel == x
    if 2 * x <= 2 * t - tau:
        return sel == tau // 2
    return sel == tau - (t - x)


def criterion_3(n_max=9, d_max=2):
    table = [(t, x, tau) for tau in (2, 4, 8) for t in range(tau, 31) for x in range(t + 1)]
    table_bad = [c for c in table if not _case_table_ok(*c)]
    checks = bad = trimmed = 0
    for MG in modulated_graphs(n_max, d_max):
        G = MG.graph
        masks = orbit_sets(MG)
        biggest = max((len(vs) for p in MG.parts for vs in p.values()), default=0)
        for (alpha, _), phis in _formulas_by_params(MG.d).items():
            if biggest <= alpha + 1:
                # no part is cut, so trimming returns the graph unchanged
                MG2, X2 = trim(MG, set(), alpha)
                assert MG2.graph == G and X2 == set()
                continue
            for row in masks:
                X = set(np.flatnonzero(row).tolist())
                try:
                    MG2, X2 = trim(MG, X, alpha)
                except ValueError:
                    continue
                trimmed += 1
                for phi in phis:
                    checks += 1
                    bad += evaluate(G, X, phi) != evaluate(MG2.graph, X2, phi)
    ok = not table_bad and bad == 0
    summary = (f"{len(table)} select_Q cases ({len(table_bad)} wrong); "
               f"{trimmed} trimmed sets, {checks} evaluations, {bad} mismatches")
    return ok, summary, {"table_bad": table_bad, "checks": checks, "mismatches": bad}


# criterion 4 -----------------------------------------------------------------

def criterion_4(n_max=10, d_max=2):
    by_q = {1: [f for f in FO_CORPUS if metrics(f).q_v == 1], 2: [f for f in FO_CORPUS if metrics(f).q_v == 2]}
    instances = checks = bad = 0
    for qv, phis in by_q.items():
        gamma = 2 * (qv + 1)

        def repeated(cliques):
            return max(Counter(cliques).values(), default=0) > gamma

        for MG in modulated_graphs(n_max, d_max, keep=repeated):
            for row in orbit_sets(MG):
                X = set(np.flatnonzero(row).tolist())
                res = remove_irrelevant_clique(MG, X, gamma)
                if res is None:
                    continue
                instances += 1
                MG2, X2, _ = res
                for phi in phis:
                    checks += 1
                    bad += evaluate(MG.graph, X, phi) != evaluate(MG2.graph, X2, phi)
    summary = f"{instances} instances, {checks} evaluations, {bad} mismatches"
    return bad == 0 and instances > 0, summary, {"instances": instances, "mismatches": bad}


# criterion 5 -----------------------------------------------------------------

def _brute_fc(MG, ci, sP, nT_star, alpha):
    X = set(clique_selection(MG, ci, sP, alpha))
    X |= {v for i, v in enumerate(MG.modulator) if nT_star >> i & 1}
    return max(len(set(MG.graph.neighbors(v)) & X) for v in MG.cliques[ci])


def criterion_5():
    checks = bad = 0
    for alpha in (3, 5):
        for d in (0, 1, 2, 3):
            for types in itertools.chain(itertools.combinations(range(1 << d), 1),
                                         itertools.combinations(range(1 << d), 2)):
                for sizes in itertools.product(range(1, 9), repeat=len(types)):
                    if sum(sizes) > 8:
                        continue
                    MG = build(d, [], [tuple(sorted(t for t, s in zip(types, sizes) for _ in range(s)))])
                    sig = signature(MG, 0)
                    cT = tuple(min(s, alpha + 1) for s in sig)
                    for sP in column_patterns(cT, alpha):
                        for star in range(1 << d):
                            checks += 1
                            bad += clique_fc(sig, sP, star, alpha) != _brute_fc(MG, 0, sP, star, alpha)
    summary = f"{checks} (clique, pattern, nT*) checks, {bad} mismatches"
    return bad == 0, summary, {"checks": checks, "mismatches": bad}


# criterion 6 -----------------------------------------------------------------

def random_model(r):
    m = ILPModel()
    nv = r.randint(0, 6)
    for i in range(nv):
        m.add_var(f"x{i}", None, 0, r.randint(0, 10))
    for j in range(r.randint(0, 5)):
        coefs = {v: r.randint(-3, 3) for v in range(nv) if r.random() < 0.6}
        m.add_row(f"r{j}", coefs, r.choice([SENSE_EQ, SENSE_LE, SENSE_GE]), r.randint(-5, 20))
    return m


def criterion_6(count=500, seed=6):
    r = random.Random(seed)
    bad = feasible = 0
    for _ in range(count):
        m = random_model(r)
        sol = solve_ilp(m)
        want = any(check_assignment(m, list(v))
                   for v in itertools.product(*[range(lo, hi + 1) for lo, hi in zip(m.lb, m.ub)]))
        feasible += want
        if (sol is not None) != want or (sol is not None and not check_assignment(m, sol)):
            bad += 1
    summary = f"{count} models ({feasible} feasible), {bad} mismatches"
    return bad == 0, summary, {"models": count, "feasible": feasible, "mismatches": bad}


# criterion 7 -----------------------------------------------------------------

def partitions(total, largest=None):
    if total == 0:
        yield ()
        return
    largest = total if largest is None else largest
    for p in range(min(total, largest), 0, -1):
        for rest in partitions(total - p, p):
            yield (p,) + rest


def binpack_instances(max_sum=12, max_bins=2):
    for bins in range(1, max_bins + 1):
        for total in range(max_sum + 1):
            for sizes in partitions(total):
                for cap in range(total + 1):
                    yield BinPackingInstance(sizes, bins, cap)


def hard_instance(bp):
    """The composed reduction: bin packing -> d-tuple (padded to 3 tuples) -> graph."""
    return dtuple_to_fairfo(pad_dtuple(binpack_to_dtuple(bp)))


def criterion_7(max_sum=12):
    rows, bad, unpadded_bad = [], [], []
    for bp in binpack_instances(max_sum):
        want = binpack_brute(bp)
        inst = hard_instance(bp)
        MG = validate_modulator(inst.graph, inst.modulator)
        got = oracle_decision(inst.graph, inst.formula, inst.k, symmetric_MG=MG) is not None
        padded = inst.tuples != tuple(t for t in binpack_to_dtuple(bp).tuples if all(t))
        if padded:
            # the construction without padding, reported for reference
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                raw = dtuple_to_fairfo(binpack_to_dtuple(bp))
            raw_got = oracle_decision(raw.graph, raw.formula, raw.k,
                                      symmetric_MG=validate_modulator(raw.graph, raw.modulator)) is not None
            if raw_got != want:
                unpadded_bad.append([list(bp.sizes), bp.bins, bp.capacity, want, raw_got])
        key = [list(bp.sizes), bp.bins, bp.capacity]
        rows.append(key + [want, got, padded])
        if got != want:
            bad.append(key + [want, got])
    summary = (f"{len(rows)} instances, {len(bad)} mismatches "
               f"({sum(r[-1] for r in rows)} padded; without padding {len(unpadded_bad)} "
               f"mismatch{'es' if len(unpadded_bad) != 1 else ''}: {unpadded_bad})")
    return not bad, summary, {"rows": rows, "mismatches": bad, "unpadded_mismatches": unpadded_bad}


# criterion 8 -----------------------------------------------------------------

def criterion_8(seed=8):
    r = random.Random(seed)
    graphs = []
    while len(graphs) < 100:
        n = r.randint(1, 9)
        p = r.choice([0.2, 0.4, 0.6, 0.8])
        graphs.append(Graph(n, [e for e in itertools.combinations(range(n), 2) if r.random() < p]))
    graphs.append(Graph(5, [(i, (i + 1) % 5) for i in range(5)]))
    graphs.append(Graph(4, [(0, 1), (1, 2), (2, 3)]))
    seen = set()
    for bp in binpack_instances():
        G = hard_instance(bp).graph
        if G not in seen:
            seen.add(G)
            graphs.append(G)
    bad = []
    for i, G in enumerate(graphs):
        res = find_modulator_min(G)
        validate_modulator(G, res.modulator)
        if len(res.modulator) != brute_force_cvd(G):
            bad.append(i)
    summary = f"{len(graphs)} graphs ({len(seen)} from the hardness generator), {len(bad)} mismatches"
    return not bad, summary, {"graphs": len(graphs), "mismatches": bad}


CRITERIA = {
    "c1": criterion_1, "c2": criterion_2, "c3": criterion_3, "c4": criterion_4, "c5": criterion_5,
    "c6": criterion_6, "c7": criterion_7, "c8": criterion_8,
}


def run(name):
    t = time.time()
    ok, summary, payload = CRITERIA[name]()
    return ok, f"{summary} [{time.time() - t:.0f}s]", payload


if __name__ == "__main__":
    print(dumps(CRITERIA[sys.argv[1]]()[2]))
