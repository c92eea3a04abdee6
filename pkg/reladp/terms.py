"""First-order terms, positions, substitutions, matching and unification.

Terms are immutable values compared structurally. A position is a tuple of
1-based argument indices; the empty tuple is the root. Python's tuple order is
exactly the lexicographic order on positions with prefixes first, so sorting
positions needs no custom key.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from itertools import product
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

Position = Tuple[int, ...]
ROOT: Position = ()


@dataclass(frozen=True, order=True)
class Symbol:
    name: str
    arity: int
    sharp: bool = False
    compound: bool = False

    def sharped(self) -> "Symbol":
        return replace(self, sharp=True)

    def display(self, taken: Iterable[str] = ()) -> str:
        if not self.sharp:
            return self.name
        upper = self.name.upper()
        if upper == self.name or upper in set(taken):
            return self.name + "#"
        return upper

    def __str__(self) -> str:
        return self.display()


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    symbol: Symbol
    args: Tuple["Term", ...] = ()

    def __post_init__(self):
        if len(self.args) != self.symbol.arity:
            raise ValueError(
                f"{self.symbol.name} expects {self.symbol.arity} arguments, got {len(self.args)}"
            )

    def __str__(self) -> str:
        return term_str(self)


Term = Union[Var, App]
Substitution = Dict[str, Term]

# Compound symbols bundle the annotated subterms of a right-hand side.
C0 = Symbol("c0", 0, compound=True)
C2 = Symbol("c2", 2, compound=True)


def const(name: str) -> App:
    return App(Symbol(name, 0))


def app(name: str, *args: Term) -> App:
    return App(Symbol(name, len(args)), tuple(args))


def term_str(t: Term, taken: Iterable[str] = ()) -> str:
    taken = frozenset(taken)
    if isinstance(t, Var):
        return t.name
    name = t.symbol.display(taken)
    if not t.args:
        return name
    return f"{name}({','.join(term_str(a, taken) for a in t.args)})"


def positions(t: Term) -> List[Position]:
    """All positions of t in preorder, which is <lex with prefixes first."""
    out: List[Position] = []

    def walk(u: Term, pos: Position):
        out.append(pos)
        if isinstance(u, App):
            for i, arg in enumerate(u.args, start=1):
                walk(arg, pos + (i,))

    walk(t, ROOT)
    return out


def function_positions(t: Term) -> List[Position]:
    return [p for p in positions(t) if isinstance(subterm_at(t, p), App)]


def variable_positions(t: Term) -> List[Position]:
    return [p for p in positions(t) if isinstance(subterm_at(t, p), Var)]


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise IndexError(f"position {pos} is not a position of the term")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    if not isinstance(t, App) or not 1 <= pos[0] <= len(t.args):
        raise IndexError(f"position {pos} is not a position of the term")
    i = pos[0] - 1
    args = t.args[:i] + (replace_at(t.args[i], pos[1:], new),) + t.args[i + 1:]
    return App(t.symbol, args)


def is_prefix(p: Position, q: Position) -> bool:
    return q[: len(p)] == p


def sharp_root(t: Term) -> Term:
    if isinstance(t, Var):
        raise ValueError("cannot sharp a variable")
    return App(t.symbol.sharped(), t.args)


def iter_subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from iter_subterms(a)


def symbols(t: Term) -> set:
    return {u.symbol for u in iter_subterms(t) if isinstance(u, App)}


def variables(t: Term) -> List[str]:
    """Variable names of t in order of first occurrence."""
    seen: Dict[str, None] = {}
    for u in iter_subterms(t):
        if isinstance(u, Var):
            seen.setdefault(u.name)
    return list(seen)


def var_occurrences(t: Term) -> Counter:
    return Counter(u.name for u in iter_subterms(t) if isinstance(u, Var))


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def apply_subst(t: Term, sigma: Substitution) -> Term:
    # Simultaneous: inserted terms are never substituted again.
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return App(t.symbol, tuple(apply_subst(a, sigma) for a in t.args))


def match_term(pattern: Term, subject: Term, sigma: Optional[Substitution] = None) -> Optional[Substitution]:
    """Return sigma with pattern·sigma == subject, or None."""
    sigma = dict(sigma or {})
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
            continue
        if not isinstance(s, App) or s.symbol != p.symbol:
            return None
        stack.extend(zip(p.args, s.args))
    return sigma


def _walk(t, sigma):
    while isinstance(t, Var) and t.name in sigma:
        t = sigma[t.name]
    return t


def _resolve(t, sigma):
    t = _walk(t, sigma)
    if isinstance(t, Var) or not t.args:
        return t
    return App(t.symbol, tuple(_resolve(a, sigma) for a in t.args))


def _occurs(name, t, sigma) -> bool:
    t = _walk(t, sigma)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a, sigma) for a in t.args)


def unify_terms(s: Term, t: Term) -> Optional[Substitution]:
    """Idempotent most general unifier of s and t, or None.

    Callers rename the two terms apart when their variables are unrelated.
    """
    sigma: Substitution = {}
    work = [(s, t)]
    while work:
        a, b = work.pop()
        a, b = _walk(a, sigma), _walk(b, sigma)
        if a == b:
            continue
        if isinstance(b, Var) and not isinstance(a, Var):
            a, b = b, a
        if isinstance(a, Var):
            if _occurs(a.name, b, sigma):
                return None
            sigma[a.name] = b
            continue
        if a.symbol != b.symbol:
            return None
        work.extend(zip(a.args, b.args))
    return {name: _resolve(value, sigma) for name, value in sigma.items()}


def rename(t: Term, fresh: "FreshVars") -> Term:
    """Consistently replace the variables of t by fresh ones."""
    return apply_subst(t, {x: fresh() for x in variables(t)})


class FreshVars:
    """Supply of variable names that cannot clash with parsed identifiers."""

    def __init__(self, prefix: str = "?v"):
        self.prefix = prefix
        self.count = 0

    def __call__(self) -> Var:
        self.count += 1
        return Var(f"{self.prefix}{self.count}")


def ground_terms(signature: Iterable[Symbol], max_depth: int) -> List[Term]:
    """Ground terms over the signature up to max_depth, shallowest first."""
    signature = sorted(signature, key=lambda f: (f.arity, f.name))
    levels: List[List[Term]] = [[App(f) for f in signature if f.arity == 0]]
    seen = set(levels[0])
    for _ in range(max_depth):
        pool = [u for level in levels for u in level]
        layer = []
        for f in signature:
            if f.arity == 0:
                continue
            for args in product(pool, repeat=f.arity):
                u = App(f, args)
                if u not in seen:
                    seen.add(u)
                    layer.append(u)
        levels.append(layer)
    return [u for level in levels for u in level]
