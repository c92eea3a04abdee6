"""Rules and relative term rewrite systems R / R=."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Tuple

from reladp.errors import RuleError
from reladp.terms import Symbol, Term, Var, symbols, term_str, var_occurrences, variables

MAIN = "main"
BASE = "base"


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise RuleError(f"left-hand side of {self} is a variable")
        missing = set(variables(self.rhs)) - set(variables(self.lhs))
        if missing:
            raise RuleError(f"variables {sorted(missing)} of the right-hand side do not occur on the left in {self}")

    @property
    def root(self) -> Symbol:
        return self.lhs.symbol

    def show(self, arrow: str = "->", taken: Iterable[str] = ()) -> str:
        return f"{term_str(self.lhs, taken)} {arrow} {term_str(self.rhs, taken)}"

    def __str__(self) -> str:
        return self.show()


def is_duplicating(rule: Rule) -> bool:
    left = var_occurrences(rule.lhs)
    return any(n > left[x] for x, n in var_occurrences(rule.rhs).items())


def dominates(main: Iterable[Rule], base: Iterable[Rule]) -> bool:
    """True iff no root symbol of a main lhs occurs in a base rhs."""
    roots = {r.root for r in main}
    return not any(symbols(r.rhs) & roots for r in base)


@dataclass(frozen=True)
class RelativeTrs:
    main: Tuple[Rule, ...] = ()
    base: Tuple[Rule, ...] = ()
    signature: FrozenSet[Symbol] = field(default=None)

    def __post_init__(self):
        sig = set()
        for rule in self.main + self.base:
            sig |= symbols(rule.lhs) | symbols(rule.rhs)
        if self.signature is not None:
            sig |= set(self.signature)
        object.__setattr__(self, "signature", frozenset(sig))

    @property
    def rules(self) -> Tuple[Rule, ...]:
        return self.main + self.base

    @property
    def defined(self) -> FrozenSet[Symbol]:
        return defined_symbols(self)

    @property
    def constructors(self) -> FrozenSet[Symbol]:
        return self.signature - self.defined

    def with_rules(self, main: Iterable[Rule], base: Iterable[Rule]) -> "RelativeTrs":
        return RelativeTrs(tuple(main), tuple(base), self.signature)

    def __str__(self) -> str:
        lines = [r.show("->") for r in self.main] + [r.show("->=") for r in self.base]
        return "\n".join(lines)


def defined_symbols(trs: RelativeTrs) -> FrozenSet[Symbol]:
    return frozenset(r.root for r in trs.rules)


def rules_defined(rules: Iterable[Rule]) -> FrozenSet[Symbol]:
    return frozenset(r.root for r in rules)

