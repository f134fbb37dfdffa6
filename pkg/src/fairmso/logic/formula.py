"""MSO1 formula AST, s-expression parser/printer, metrics and derived parameters."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

FREE = "Free"


class FormulaError(ValueError):
    def __init__(self, msg, pos=None):
        super().__init__(msg if pos is None else f"{msg} at offset {pos}")
        self.pos = pos


@dataclass(frozen=True)
class And:
    a: object
    b: object


@dataclass(frozen=True)
class Or:
    a: object
    b: object


@dataclass(frozen=True)
class Not:
    a: object


@dataclass(frozen=True)
class Implies:
    a: object
    b: object


@dataclass(frozen=True)
class ExistsV:
    var: str
    body: object


@dataclass(frozen=True)
class ForallV:
    var: str
    body: object


@dataclass(frozen=True)
class ExistsS:
    var: str
    body: object


@dataclass(frozen=True)
class ForallS:
    var: str
    body: object


@dataclass(frozen=True)
class Adj:
    x: str
    y: str


@dataclass(frozen=True)
class Eq:
    x: str
    y: str


@dataclass(frozen=True)
class In:
    x: str
    s: str


BINARY = {"and": And, "or": Or, "implies": Implies}
QUANT = {"existsV": ExistsV, "forallV": ForallV, "existsS": ExistsS, "forallS": ForallS}
ATOMS = {"adj": Adj, "eq": Eq, "in": In}
HEADS = {v: k for k, v in {**BINARY, **QUANT, **ATOMS}.items()}
HEADS[Not] = "not"
VERTEX_Q = (ExistsV, ForallV)
SET_Q = (ExistsS, ForallS)

_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")
_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokenize(text):
    pos, out = 0, []
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise FormulaError("unexpected character", pos)
            return out
        start = m.start(m.lastindex)
        out.append((m.group(m.lastindex), start))
        pos = m.end()
        if pos >= len(text):
            return out


def parse_formula(text):
    """Parse a fully parenthesised s-expression into a formula.

    Variables must be bound before use; ``Free`` is the only unbound set name.
    """
    toks = _tokenize(text)
    if not toks:
        raise FormulaError("empty formula", 0)
    i = 0

    def expect(tok):
        nonlocal i
        if i >= len(toks):
            raise FormulaError(f"expected {tok!r} but input ended", len(text))
        t, p = toks[i]
        if t != tok:
            raise FormulaError(f"expected {tok!r}, got {t!r}", p)
        i += 1

    def ident(kind):
        nonlocal i
        if i >= len(toks):
            raise FormulaError(f"expected {kind} but input ended", len(text))
        t, p = toks[i]
        if t in "()" or not _IDENT.match(t):
            raise FormulaError(f"expected {kind}, got {t!r}", p)
        i += 1
        return t, p

    def form(vs, ss):
        nonlocal i
        expect("(")
        if i >= len(toks):
            raise FormulaError("missing head", len(text))
        head, p = toks[i]
        i += 1
        if head in BINARY:
            node = BINARY[head](form(vs, ss), form(vs, ss))
        elif head == "not":
            node = Not(form(vs, ss))
        elif head in QUANT:
            name, np_ = ident("variable")
            if name == FREE:
                raise FormulaError("'Free' cannot be bound", np_)
            if head.endswith("V"):
                node = QUANT[head](name, form(vs | {name}, ss - {name}))
            else:
                node = QUANT[head](name, form(vs - {name}, ss | {name}))
        elif head in ("adj", "eq"):
            x, xp = ident("vertex variable")
            y, yp = ident("vertex variable")
            for v, vp in ((x, xp), (y, yp)):
                if v not in vs:
                    raise FormulaError(f"unbound vertex variable {v!r}", vp)
            node = ATOMS[head](x, y)
        elif head == "in":
            x, xp = ident("vertex variable")
            s, sp = ident("set variable")
            if x not in vs:
                raise FormulaError(f"unbound vertex variable {x!r}", xp)
            if s != FREE and s not in ss:
                raise FormulaError(f"unbound set variable {s!r}", sp)
            node = In(x, s)
        else:
            raise FormulaError(f"unknown head {head!r}", p)
        if i < len(toks) and toks[i][0] != ")":
            raise FormulaError(f"arity mismatch for {head!r}: extra argument {toks[i][0]!r}", toks[i][1])
        expect(")")
        return node

    node = form(frozenset(), frozenset())
    if i != len(toks):
        raise FormulaError(f"trailing input {toks[i][0]!r}", toks[i][1])
    return node


def to_sexpr(f):
    """Inverse of :func:`parse_formula` (single line)."""
    t = type(f)
    if t in (And, Or, Implies):
        return f"({HEADS[t]} {to_sexpr(f.a)} {to_sexpr(f.b)})"
    if t is Not:
        return f"(not {to_sexpr(f.a)})"
    if t in QUANT.values():
        return f"({HEADS[t]} {f.var} {to_sexpr(f.body)})"
    if t is In:
        return f"(in {f.x} {f.s})"
    return f"({HEADS[t]} {f.x} {f.y})"


def children(f):
    t = type(f)
    if t in (And, Or, Implies):
        return (f.a, f.b)
    if t is Not:
        return (f.a,)
    if t in QUANT.values():
        return (f.body,)
    return ()


def walk(f):
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(children(g))


def mentions_set(f, name):
    return any(type(g) is In and g.s == name for g in walk(f))


def free_names(f):
    """Variable and set names occurring free in ``f`` (``Free`` included)."""
    t = type(f)
    if t in (Adj, Eq):
        return {f.x, f.y}
    if t is In:
        return {f.x, f.s}
    if t in QUANT.values():
        return free_names(f.body) - {f.var}
    out = set()
    for c in children(f):
        out |= free_names(c)
    return out


def _flatten(f, t):
    return _flatten(f.a, t) + _flatten(f.b, t) if type(f) is t else [f]


def _chain(t, fs):
    out = fs[-1]
    for g in reversed(fs[:-1]):
        out = t(g, out)
    return out


def miniscope(f):
    """Equivalent formula with vertex quantifiers pushed past parts that ignore them.

    ``exists x (A and B)`` becomes ``A and exists x B`` when ``x`` is not free in
    ``A``; dually for ``forall`` over disjunctions and implication antecedents.
    Both forms agree on the empty graph as well.
    """
    t = type(f)
    if t is Not:
        return Not(miniscope(f.a))
    if t in (And, Or, Implies):
        return t(miniscope(f.a), miniscope(f.b))
    if t in (ExistsS, ForallS):
        return t(f.var, miniscope(f.body))
    if t not in (ExistsV, ForallV):
        return f
    x, body = f.var, miniscope(f.body)
    if t is ExistsV:
        parts = _flatten(body, And)
        dep = [g for g in parts if x in free_names(g)]
        ind = [g for g in parts if x not in free_names(g)]
        if not ind or not dep:
            return ExistsV(x, body)
        return _chain(And, ind + [ExistsV(x, _chain(And, dep))])
    if type(body) is Implies:
        pre = _flatten(body.a, And)
        dep = [g for g in pre if x in free_names(g)]
        ind = [g for g in pre if x not in free_names(g)]
        if not ind:
            return ForallV(x, body)
        inner = ForallV(x, Implies(_chain(And, dep), body.b) if dep else body.b)
        if not dep and x not in free_names(body.b):
            return ForallV(x, body)
        return Implies(_chain(And, ind), inner)
    parts = _flatten(body, Or)
    dep = [g for g in parts if x in free_names(g)]
    ind = [g for g in parts if x not in free_names(g)]
    if not ind or not dep:
        return ForallV(x, body)
    return _chain(Or, ind + [ForallV(x, _chain(Or, dep))])


def free_polarity(f):
    """+1 if ``Free`` occurs only positively (the formula is upward closed in it),
    -1 if only negatively, 0 if it does not occur, ``None`` if mixed."""
    seen = set()
    stack = [(f, 1)]
    while stack:
        g, sign = stack.pop()
        t = type(g)
        if t is In:
            if g.s == FREE:
                seen.add(sign)
        elif t is Not:
            stack.append((g.a, -sign))
        elif t is Implies:
            stack += [(g.a, -sign), (g.b, sign)]
        else:
            stack += [(c, sign) for c in children(g)]
    if len(seen) > 1:
        return None
    return seen.pop() if seen else 0


@dataclass(frozen=True)
class FormulaMetrics:
    q_v: int
    q_S: int

    @property
    def is_FO(self):
        return self.q_S == 0


def metrics(f):
    q_v = q_s = 0
    for g in walk(f):
        if isinstance(g, VERTEX_Q):
            q_v += 1
        elif isinstance(g, SET_Q):
            q_s += 1
    return FormulaMetrics(q_v, q_s)


@dataclass(frozen=True)
class DerivedParams:
    tau: int
    alpha: int
    gamma: int
    theoretical_alpha: int
    theoretical_gamma: int

    @property
    def heuristic(self):
        """True when an override sits below the worst-case bound."""
        return self.alpha < self.theoretical_alpha or self.gamma < self.theoretical_gamma


def theoretical_gamma(m, d, alpha):
    return 2 * 2 ** ((1 << d) * alpha * m.q_S) * (m.q_v + 1)


def derive_params(m, d, alpha: Optional[int] = None, gamma: Optional[int] = None):
    """Compute tau, alpha and gamma for formula metrics ``m`` and modulator size ``d``.

    Overrides replace the computed values; :attr:`DerivedParams.heuristic`
    reports whether they fall below the worst-case bounds.
    """
    base = 4 * 2 ** m.q_S * m.q_v
    th_alpha = base + 1 if base % 2 == 0 else base + 2
    tau = 2 * 2 ** m.q_S * m.q_v
    if alpha is not None:
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        if alpha % 2 == 0:
            raise ValueError(f"alpha must be odd, got {alpha}")
    a = th_alpha if alpha is None else alpha
    th_gamma = theoretical_gamma(m, d, a)
    if gamma is not None and gamma <= 0:
        raise ValueError("gamma must be positive")
    g = th_gamma if gamma is None else gamma
    return DerivedParams(tau, a, g, th_alpha, theoretical_gamma(m, d, th_alpha))
