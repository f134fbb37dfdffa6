"""Shape enumeration + model checking + ILP: the end-to-end solver."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .graph import fair_cost
from .ilp import (NO_FILTER, FairSolution, ModelError, PatternFilter, build_model,
                  column_patterns, extract_solution, partition_by_S, solve_ilp)
from .logic import derive_params, evaluate, metrics
from .logic.presets import NatSet
from .shapes import Shape, compute_shape, evaluate_shape, is_compliant

COHERENT_ONLY = "coherent-only"
REPORT_SKIPPED = "report-skipped"


@dataclass(frozen=True)
class SolveConfig:
    alpha: Optional[int] = None
    gamma: Optional[int] = None
    pattern_filter: PatternFilter = NO_FILTER
    coherence_policy: str = COHERENT_ONLY
    jobs: int = 1
    record_shapes: bool = False
    max_shapes: Optional[int] = None


@dataclass
class SolveReport:
    answer: object = None
    k_star: Optional[int] = None
    shapes_enumerated: int = 0
    shapes_satisfying: int = 0
    shapes_incoherent_skipped: int = 0
    witnesses_rejected: int = 0
    alpha: int = 0
    gamma: int = 0
    heuristic: bool = False
    shapes: list = field(default_factory=list)

    def absorb(self, other):
        self.shapes_enumerated += other.shapes_enumerated
        self.shapes_satisfying += other.shapes_satisfying
        self.shapes_incoherent_skipped += other.shapes_incoherent_skipped
        self.witnesses_rejected += other.witnesses_rejected


class ShapeLimitError(RuntimeError):
    pass


def preset_pattern_filter(problem, sigma=None, rho=None):
    """Patterns a minimum solution never needs, per preset.

    Vertex cover keeps at most one vertex of a clique outside the solution, the
    cycle and bipartiteness conditions at most two.  Domination never gains
    from a second selected twin; for sigma-rho the selected count per part is
    bounded by one more than the largest interesting neighbour count.
    """
    p = problem.replace("-", "_")
    if p == "vc":
        return PatternFilter("fat", 1, 1)
    if p in ("fvs", "oct"):
        return PatternFilter("fat", 2, 2)
    if p == "ds":
        return PatternFilter("thin", 1, None)
    if p == "sigma_rho":
        if isinstance(sigma, str):
            sigma = NatSet.parse(sigma)
        if isinstance(rho, str):
            rho = NatSet.parse(rho)
        if sigma is None or rho is None:
            raise ValueError("sigma_rho needs sigma and rho")
        if not sigma.cofinite:
            cap = sigma.max_finite() + 1
            return PatternFilter("thin", cap, cap)
        if sigma.is_all and rho.cofinite:
            return PatternFilter("thin", rho.max_finite() + 1, None)
        raise ValueError(f"inadmissible (sigma, rho) = ({sigma}, {rho})")
    raise ValueError(f"unknown problem {problem!r}")


def resolve_params(MG, phi, cfg):
    return derive_params(metrics(phi), MG.d, cfg.alpha, cfg.gamma)


def _distributions(N, pats, gamma):
    """Count vectors over ``pats`` for ``N`` cliques; ``gamma`` means "gamma or more"."""
    def rec(i, left, capped):
        if i == len(pats):
            if capped or left == 0:
                yield ()
            return
        top = min(left, gamma)
        for c in range(top, -1, -1):
            for rest in rec(i + 1, left - c, capped or c == gamma):
                yield (c,) + rest
    yield from rec(0, N, False)


def _column_coherent(cT, used, alpha):
    for nT, c in enumerate(cT):
        if c > alpha and len({2 * sP[nT] < alpha for sP in used}) > 1:
            return False
    return True


def _eval_task(args):
    shp, phi, modsub, alpha = args
    return evaluate_shape(shp, phi, modsub, alpha)


class _Search:
    def __init__(self, MG, phi, cfg):
        self.MG, self.phi, self.cfg = MG, phi, cfg
        p = resolve_params(MG, phi, cfg)
        self.params = p
        self.alpha = p.alpha
        # counts never exceed the number of cliques, so a larger cap changes nothing
        self.gamma = min(p.gamma, len(MG.cliques) + 1)
        self.modsub = MG.modulator_subgraph()
        self.eval_cache = {}
        self.pool = ProcessPoolExecutor(cfg.jobs) if cfg.jobs > 1 else None

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()

    def report(self):
        return SolveReport(alpha=self.alpha, gamma=self.params.gamma,
                           heuristic=self.params.heuristic)

    def shapes(self, k, rep):
        """Coherent candidate shapes in deterministic order, with their partitions."""
        MG, alpha, gamma = self.MG, self.alpha, self.gamma
        for star in range(1 << MG.d):
            part = partition_by_S(MG, star, alpha, k, self.cfg.pattern_filter)
            per_col = []
            total = coherent = 1
            for cT in sorted(set(part.column_of)):
                members = [ci for ci, c in enumerate(part.column_of) if c == cT]
                allowed = set().union(*(part.S_of[ci] for ci in members))
                pats = [sP for sP in column_patterns(cT, alpha, self.cfg.pattern_filter) if sP in allowed]
                dists = []
                n_all = 0
                for dist in _distributions(len(members), pats, gamma):
                    n_all += 1
                    used = [sP for sP, c in zip(pats, dist) if c]
                    if _column_coherent(cT, used, alpha):
                        dists.append({(cT, sP): c for sP, c in zip(pats, dist) if c})
                total *= n_all
                coherent *= len(dists)
                per_col.append(dists)
            rep.shapes_incoherent_skipped += total - coherent
            for combo in itertools.product(*per_col):
                entries = {}
                for dct in combo:
                    entries.update(dct)
                rep.shapes_enumerated += 1
                if self.cfg.max_shapes is not None and rep.shapes_enumerated > self.cfg.max_shapes:
                    raise ShapeLimitError(f"more than {self.cfg.max_shapes} shapes")
                yield Shape.build(star, entries), part

    def evaluate_many(self, shps):
        todo = [s for s in shps if s not in self.eval_cache]
        if todo:
            args = [(s, self.phi, self.modsub, self.alpha) for s in todo]
            if self.pool is not None:
                vals = list(self.pool.map(_eval_task, args, chunksize=8))
            else:
                vals = [_eval_task(a) for a in args]
            self.eval_cache.update(zip(todo, vals))
        return [self.eval_cache[s] for s in shps]

    def decide(self, k, batch=32):
        rep = self.report()
        feasible = []

        def flush():
            if self.pool is not None:
                self.evaluate_many([f[0] for f in feasible])
            for shp, part, model, vals in feasible:
                ok = self.evaluate_many([shp])[0]
                if self.cfg.record_shapes:
                    rep.shapes.append((shp, ok))
                if not ok:
                    continue
                rep.shapes_satisfying += 1
                sol = extract_solution(vals, shp, part, self.MG, self.alpha, model)
                if self._verify(sol, shp, k):
                    return self._prune(sol)
                rep.witnesses_rejected += 1
            feasible.clear()
            return None

        for shp, part in self.shapes(k, rep):
            try:
                model = build_model(self.MG, shp, part, k, self.alpha, self.gamma)
            except ModelError:
                continue
            vals = solve_ilp(model)
            if vals is None:
                if self.cfg.record_shapes:
                    rep.shapes.append((shp, None))
                continue
            feasible.append((shp, part, model, vals))
            if len(feasible) >= batch:
                sol = flush()
                if sol is not None:
                    rep.answer = sol
                    return rep
        sol = flush()
        rep.answer = sol
        return rep

    def _verify(self, sol, shp, k):
        MG = self.MG
        if fair_cost(MG.graph, sol.X) > k or not is_compliant(MG, sol.X, self.alpha):
            return False
        if compute_shape(MG, sol.X, self.alpha, self.gamma) != shp:
            raise AssertionError("extracted set does not realise its shape")
        return evaluate(MG.graph, sol.X, self.phi)


    def _prune(self, sol):
        """Drop vertices (highest first) while the set stays a compliant solution."""
        MG, X = self.MG, set(sol.X)
        for v in sorted(sol.X, reverse=True):
            Y = X - {v}
            if is_compliant(MG, Y, self.alpha) and evaluate(MG.graph, Y, self.phi):
                X = Y
        if X == set(sol.X):
            return sol
        X = frozenset(X)
        return FairSolution(X, fair_cost(MG.graph, X), compute_shape(MG, X, self.alpha, self.gamma))


def solve_decision(MG, phi, k, cfg=SolveConfig()):
    """A satisfying set of fair cost at most ``k`` found through coherent shapes."""
    s = _Search(MG, phi, cfg)
    try:
        rep = s.decide(k) if k >= 0 else s.report()
    finally:
        s.close()
    if rep.answer is not None:
        rep.k_star = rep.answer.fair_cost
    return rep


def solve_min(MG, phi, cfg=SolveConfig()):
    """Minimum fair cost by binary search over ``k`` in ``[0, max degree]``."""
    s = _Search(MG, phi, cfg)
    total = s.report()
    try:
        hi = MG.graph.max_degree()
        best = s.decide(hi)
        total.absorb(best)
        if best.answer is None:
            total.shapes = best.shapes
            return total
        hi = best.answer.fair_cost
        lo = 0
        while lo < hi:
            mid = (lo + hi) // 2
            r = s.decide(mid)
            total.absorb(r)
            if r.answer is not None:
                best = r
                hi = r.answer.fair_cost
            else:
                lo = mid + 1
    finally:
        s.close()
    total.answer = best.answer
    total.k_star = best.answer.fair_cost
    total.shapes = best.shapes
    return total
