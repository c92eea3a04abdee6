"""Annotated terms, annotated dependency pairs (ADPs) and ADP problems.

An annotated term is a plain term plus the set of positions whose symbols are
annotated. Sharped symbols are only materialized when printing and when
building the terms a reduction pair has to compare.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import singledispatch
from itertools import combinations
from typing import FrozenSet, Iterable, List, Sequence, Tuple

from reladp.errors import AdpError
from reladp.terms import (
    C0,
    C2,
    App,
    Position,
    Symbol,
    Term,
    Var,
    function_positions,
    sharp_root,
    subterm_at,
    symbols,
    term_str,
    variables,
)
from reladp.trs import BASE, MAIN, RelativeTrs, Rule, is_duplicating


@dataclass(frozen=True)
class AnnotatedTerm:
    plain: Term
    annotated: Tuple[Position, ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(set(self.annotated)))
        object.__setattr__(self, "annotated", ordered)
        for pos in ordered:
            try:
                sub = subterm_at(self.plain, pos)
            except IndexError:
                raise AdpError(f"annotated position {pos} does not exist in {self.plain}") from None
            if isinstance(sub, Var):
                raise AdpError(f"annotated position {pos} of {self.plain} is a variable")

    def sharped(self) -> Term:
        """The term over the sharped signature."""
        return _sharp_at(self.plain, set(self.annotated), ())

    def show(self, taken: Iterable[str] = ()) -> str:
        return term_str(self.sharped(), taken)

    def __str__(self) -> str:
        return self.show()


def _sharp_at(t, marked, pos):
    if isinstance(t, Var):
        return t
    symbol = t.symbol.sharped() if pos in marked else t.symbol
    args = tuple(_sharp_at(a, marked, pos + (i,)) for i, a in enumerate(t.args, start=1))
    return App(symbol, args)


@dataclass(frozen=True)
class Adp:
    lhs: Term
    rhs: AnnotatedTerm
    origin: str = MAIN

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise AdpError(f"left-hand side of an ADP is the variable {self.lhs}")
        missing = set(variables(self.rhs.plain)) - set(variables(self.lhs))
        if missing:
            raise AdpError(f"variables {sorted(missing)} of the right-hand side do not occur on the left")

    @property
    def rule(self) -> Rule:
        return Rule(self.lhs, self.rhs.plain)

    @property
    def annotations(self) -> Tuple[Position, ...]:
        return self.rhs.annotated

    def show(self, taken: Iterable[str] = ()) -> str:
        return f"{term_str(self.lhs, taken)} -> {self.rhs.show(taken)}"

    def __str__(self) -> str:
        return self.show()


@dataclass(frozen=True)
class AdpProblem:
    main: Tuple[Adp, ...] = ()
    base: Tuple[Adp, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "main", _dedupe(self.main))
        object.__setattr__(self, "base", _dedupe(self.base))
        for adp in self.base:
            # Flattened, possibly duplicating main rules may sit in base.
            if adp.annotations and is_duplicating(adp.rule):
                raise AdpError(f"annotated base ADP {adp} is duplicating")

    @property
    def adps(self) -> Tuple[Adp, ...]:
        return self.main + self.base

    @property
    def defined(self) -> FrozenSet[Symbol]:
        return frozenset(a.lhs.symbol for a in self.adps)

    @property
    def signature(self) -> FrozenSet[Symbol]:
        out = set()
        for a in self.adps:
            out |= symbols(a.lhs) | symbols(a.rhs.plain)
        return frozenset(out)

    def annotated_count(self) -> int:
        return sum(1 for a in self.adps if a.annotations)

    def has_annotations(self) -> bool:
        return any(a.annotations for a in self.adps)

    def show(self) -> str:
        taken = {f.name for f in self.signature}
        return f"({_braced(self.main, taken)}, {_braced(self.base, taken)})"

    def __str__(self) -> str:
        return self.show()


def _dedupe(items):
    return tuple(dict.fromkeys(items))


def _braced(adps, taken) -> str:
    return "{" + "; ".join(a.show(taken) for a in adps) + "}" if adps else "∅"


def _defined_positions(t, defined):
    return [p for p in function_positions(t) if subterm_at(t, p).symbol in defined]


def canonical_adp_problem(trs: RelativeTrs) -> AdpProblem:
    """(DP(R), DP(R=)): one annotation per main ADP, up to two per base ADP."""
    defined = trs.defined
    for rule in trs.base:
        if is_duplicating(rule):
            raise AdpError(f"base rule {rule} is duplicating; preprocess the system first")
    main = []
    for rule in trs.main:
        found = _defined_positions(rule.rhs, defined)
        choices = [(p,) for p in found] or [()]
        main += [Adp(rule.lhs, AnnotatedTerm(rule.rhs, phi), MAIN) for phi in choices]
    base = []
    for rule in trs.base:
        found = _defined_positions(rule.rhs, defined)
        if len(found) > 2:
            choices = list(combinations(found, 2))
        else:
            choices = [tuple(found)]
        base += [Adp(rule.lhs, AnnotatedTerm(rule.rhs, phi), BASE) for phi in choices]
    return AdpProblem(tuple(main), tuple(base))


@singledispatch
def flatten(x):
    raise TypeError(f"cannot flatten {type(x).__name__}")


@flatten.register
def _(x: AnnotatedTerm) -> AnnotatedTerm:
    return AnnotatedTerm(x.plain) if x.annotated else x


@flatten.register
def _(x: Adp) -> Adp:
    return replace(x, rhs=flatten(x.rhs)) if x.annotations else x


@flatten.register(tuple)
@flatten.register(list)
def _(x) -> tuple:
    return _dedupe(flatten(a) for a in x)


def annotated_subterms(t: AnnotatedTerm) -> List[Tuple[Position, Term]]:
    return [(p, subterm_at(t.plain, p)) for p in t.annotated]


def ann_of_rhs(r: AnnotatedTerm) -> Term:
    """Bundle the annotated subterms of r under the compound symbols."""
    subs = [sharp_root(u) for _, u in annotated_subterms(r)]
    if not subs:
        return App(C0)
    if len(subs) == 1:
        return subs[0]
    if len(subs) == 2:
        return App(C2, tuple(subs))
    raise AdpError(f"{r} carries {len(subs)} annotations; at most 2 can be bundled")


def split_adps(adps: Sequence[Adp]) -> Tuple[Adp, ...]:
    return _dedupe(
        replace(a, rhs=AnnotatedTerm(a.rhs.plain, (p,))) for a in adps for p in a.annotations
    )


def flat_rules(adps: Iterable[Adp]) -> Tuple[Rule, ...]:
    return _dedupe(a.rule for a in adps)
