import itertools

import pytest
from corpus import FO_CORPUS, build, random_modulated, rng

from fairmso.graph import Graph, validate_modulator
from fairmso.logic import derive_params, evaluate, metrics
from fairmso.reduction import (labeled_clique_type, remove_irrelevant_clique, select_Q,
                               twin_classes)


def kept_selected(t, x, tau):
    T = list(range(t))
    X = set(range(x))
    Q = select_Q(T, X, tau)
    rest = set(T) - Q
    return len(rest), len(rest & X)


def test_select_q_examples():
    assert kept_selected(20, 3, 8) == (8, 3)
    assert kept_selected(20, 10, 8) == (8, 4)
    assert kept_selected(20, 18, 8) == (8, 6)


def test_select_q_case_table_small():
    for tau in (2, 4, 8):
        for t in range(tau, 16):
            for x in range(t + 1):
                size, sel = kept_selected(t, x, tau)
                assert size == tau
                if 2 * x <= tau:
                    assert sel == x
                elif 2 * x <= 2 * t - tau:
                    assert sel == tau // 2
                else:
                    assert sel == tau - (t - x)


def test_select_q_removes_lowest_first():
    Q = select_Q([5, 1, 9, 3, 7], {1, 3}, 2)
    assert Q == {1, 5, 7}


def test_select_q_too_small():
    with pytest.raises(ValueError):
        select_Q([0, 1], set(), 4)


def test_twin_classes():
    MG = build(1, [], [(0, 1, 1), (1,)])
    tc = twin_classes(MG, {2})
    assert tc[(0, 1, True)] == (2,) and tc[(0, 1, False)] == (3,)
    assert tc[(0, 0, False)] == (1,)


def test_select_q_preserves_formulas_sample():
    r = rng(9)
    for _ in range(40):
        MG = random_modulated(r, r.randint(3, 10), r.randint(0, 2), max_clique=7)
        X = {v for v in range(MG.graph.n) if r.random() < 0.5}
        for phi in FO_CORPUS:
            tau = derive_params(metrics(phi), MG.d).tau
            for T in twin_classes(MG, X).values():
                if len(T) < tau:
                    continue
                Q = select_Q(T, X, tau)
                keep = [v for v in range(MG.graph.n) if v not in Q]
                new = {v: i for i, v in enumerate(keep)}
                G2 = MG.graph.induced(keep)
                X2 = {new[v] for v in X if v in new}
                assert evaluate(MG.graph, X, phi) == evaluate(G2, X2, phi)


def test_irrelevant_clique_examples():
    MG = build(1, [], [(0,), (1,), (0, 1)])
    assert remove_irrelevant_clique(MG, set(), 2) is None
    four = build(1, [], [(1, 1)] * 4)
    res = remove_irrelevant_clique(four, {1, 3, 5, 7}, 3)
    assert res is not None
    MG2, X2, ci = res
    assert ci == 3 and len(MG2.cliques) == 3 and len(X2) == 3
    assert remove_irrelevant_clique(four, {1, 3, 5}, 3) is None


def test_irrelevant_differing_labels():
    four = build(0, [], [(0, 0)] * 4)
    # four identical K2's but selection differs: {}, {a}, {a,b}, {a}
    X = {2, 4, 5, 6}
    assert remove_irrelevant_clique(four, X, 3) is None
    assert labeled_clique_type(four, 0, X) != labeled_clique_type(four, 2, X)


def test_irrelevant_preserves_evaluation_sample():
    r = rng(13)
    for _ in range(30):
        d = r.randint(0, 2)
        base = tuple(sorted(r.randrange(1 << d) for _ in range(r.randint(1, 2))))
        cliques = [base] * r.randint(4, 7)
        MG = build(d, [(0, 1)] if d == 2 else [], cliques)
        for phi in FO_CORPUS:
            gamma = derive_params(metrics(phi), d).gamma
            X = {v for v in range(MG.graph.n) if r.random() < 0.3}
            res = remove_irrelevant_clique(MG, X, gamma)
            if res is not None:
                MG2, X2, _ = res
                assert evaluate(MG.graph, X, phi) == evaluate(MG2.graph, X2, phi)


def test_gamma_must_be_positive():
    with pytest.raises(ValueError):
        remove_irrelevant_clique(validate_modulator(Graph(1), []), set(), 0)


def test_exhaustive_select_q_small():
    for t, tau in itertools.product(range(1, 12), (2, 4)):
        if t < tau:
            continue
        for x in range(t + 1):
            assert kept_selected(t, x, tau)[0] == tau
