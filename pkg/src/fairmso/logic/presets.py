"""Formulas for the standard fair vertex problems.

In every preset the reserved set ``Free`` plays the role of the solution set.
"""
from __future__ import annotations

from dataclasses import dataclass

from .formula import FREE, Adj, And, Eq, ExistsS, ExistsV, ForallV, Implies, In, Not, Or

PROBLEMS = ("vc", "fvs", "oct", "ds", "sigma_rho")


@dataclass(frozen=True)
class NatSet:
    """A finite or cofinite subset of the naturals.

    ``values`` lists the members of a finite set, or the excluded values of a
    cofinite one.
    """

    values: frozenset
    cofinite: bool = False

    @classmethod
    def finite(cls, *vals):
        return cls(frozenset(vals), False)

    @classmethod
    def co(cls, *gap):
        return cls(frozenset(gap), True)

    @classmethod
    def parse(cls, text):
        """``N``, ``coN:1,2`` (naturals minus a gap) or a comma list."""
        t = text.strip()
        if t in ("N", "coN", "coN:"):
            return cls(frozenset(), True)
        if t.startswith("coN:"):
            return cls(frozenset(_ints(t[4:])), True)
        return cls(frozenset(_ints(t)), False)

    @property
    def is_all(self):
        return self.cofinite and not self.values

    def __contains__(self, x):
        return (x not in self.values) if self.cofinite else (x in self.values)

    def max_finite(self):
        return max(self.values) if self.values else -1

    def __str__(self):
        body = ",".join(map(str, sorted(self.values)))
        if self.cofinite:
            return "N" if not body else f"coN:{body}"
        return body or "{}"


def _ints(s):
    toks = [x for x in s.replace(" ", "").split(",") if x]
    vals = [int(x) for x in toks]
    if any(v < 0 for v in vals):
        raise ValueError("natural numbers only")
    return vals


def _and(*fs):
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def _or(*fs):
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def _nin(x, s=FREE):
    return Not(In(x, s))


def vc_formula():
    return ForallV("x", ForallV("y", Implies(And(_nin("x"), _nin("y")), Not(Adj("x", "y")))))


def ds_formula():
    return ForallV("v", Implies(_nin("v"), ExistsV("u", And(Adj("u", "v"), In("u", FREE)))))


def fvs_formula():
    # a nonempty S outside Free in which every vertex has two distinct S-neighbours
    inner = ExistsV("y", _and(In("y", "S"), Adj("x", "y"),
                              ExistsV("z", _and(In("z", "S"), Adj("x", "z"), Not(Eq("z", "y"))))))
    core = And(ExistsV("w", In("w", "S")),
               ForallV("x", Implies(In("x", "S"), And(_nin("x"), inner))))
    return Not(ExistsS("S", core))


def oct_formula():
    both = lambda s: And(In("x", s), In("y", s))  # noqa: E731
    outside = lambda: And(_nin("x"), _nin("x", "A"))  # noqa: E731
    body_b = _and(
        ForallV("x", Implies(In("x", "B"), outside())),
        ForallV("x", Implies(outside(), In("x", "B"))),
        ForallV("x", ForallV("y", Implies(Adj("x", "y"), Not(Or(both("A"), both("B")))))),
    )
    return ExistsS("A", And(ForallV("x", Implies(In("x", "A"), _nin("x"))), ExistsS("B", body_b)))


def _fresh(prefix, used):
    i = 1
    while f"{prefix}{i}" in used:
        i += 1
    used.add(f"{prefix}{i}")
    return f"{prefix}{i}"


def atleast(t, v, used=None):
    """At least ``t`` pairwise distinct neighbours of ``v`` lie in Free."""
    if t <= 0:
        return None
    used = set(used or ()) | {v}
    names = [_fresh("u", used) for _ in range(t)]

    def build(j):
        u = names[j]
        parts = [In(u, FREE), Adj(u, v)] + [Not(Eq(u, w)) for w in names[:j]]
        if j + 1 < t:
            parts.append(build(j + 1))
        return ExistsV(u, _and(*parts))

    return build(0)


def _runs(vals):
    vals = sorted(vals)
    runs = []
    for x in vals:
        if runs and runs[-1][1] == x - 1:
            runs[-1][1] = x
        else:
            runs.append([x, x])
    return runs


def count_in(v, S):
    """Formula for ``|N(v) & Free|`` in a finite/cofinite set, or None if trivial."""
    if S.is_all:
        return None
    clauses = []
    for lo, hi in _runs(S.values):
        lo_f = atleast(lo, v)
        hi_f = Not(atleast(hi + 1, v))
        clauses.append(hi_f if lo_f is None else And(lo_f, hi_f))
    if not clauses:
        inside = In(v, FREE)
        return And(inside, Not(inside))
    f = _or(*clauses)
    return Not(f) if S.cofinite else f


def admissible_sigma_rho(sigma, rho):
    return (not sigma.cofinite) or (sigma.is_all and rho.cofinite)


def sigma_rho_formula(sigma, rho):
    if not admissible_sigma_rho(sigma, rho):
        raise ValueError(f"inadmissible (sigma, rho) = ({sigma}, {rho}): need sigma finite, "
                         "or sigma = N with rho cofinite")
    s_f = count_in("v", sigma)
    r_f = count_in("v", rho)
    parts = []
    if s_f is not None:
        parts.append(Implies(In("v", FREE), s_f))
    if r_f is not None:
        parts.append(Implies(_nin("v"), r_f))
    if not parts:
        return ForallV("v", Or(In("v", FREE), _nin("v")))
    return ForallV("v", _and(*parts))


def preset_formula(problem, sigma=None, rho=None):
    p = problem.replace("-", "_")
    if p == "vc":
        return vc_formula()
    if p == "ds":
        return ds_formula()
    if p == "fvs":
        return fvs_formula()
    if p == "oct":
        return oct_formula()
    if p == "sigma_rho":
        if sigma is None or rho is None:
            raise ValueError("sigma_rho needs sigma and rho")
        return sigma_rho_formula(sigma, rho)
    raise ValueError(f"unknown problem {problem!r}")
