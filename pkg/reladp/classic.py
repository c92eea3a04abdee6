"""The ordinary dependency pair framework, the two derelatifying processors
and the dominance fast paths that reduce relative termination to it."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from reladp.adp import Adp, AdpProblem, annotated_subterms, flat_rules, split_adps
from reladp.errors import AdpError
from reladp.graph import may_reach, minimal_lassos, strongly_connected_components
from reladp.limits import NO_DEADLINE, Deadline
from reladp.orders import Constraint, OrientationResult, orient
from reladp.terms import Symbol, function_positions, sharp_root, subterm_at, term_str, symbols
from reladp.trs import RelativeTrs, Rule, dominates, is_duplicating, rules_defined

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DpProblem:
    pairs: Tuple[Rule, ...] = ()
    rules: Tuple[Rule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(dict.fromkeys(self.pairs)))
        object.__setattr__(self, "rules", tuple(dict.fromkeys(self.rules)))
        for pair in self.pairs:
            if not (pair.lhs.symbol.sharp and getattr(pair.rhs, "symbol", None) and pair.rhs.symbol.sharp):
                raise AdpError(f"dependency pair {pair} must have sharped roots")

    @property
    def defined(self) -> FrozenSet[Symbol]:
        return rules_defined(self.rules)

    def show(self) -> str:
        taken = {f.name for r in self.rules + self.pairs for f in symbols(r.lhs) | symbols(r.rhs)}
        pairs = "{" + "; ".join(p.show("->", taken) for p in self.pairs) + "}" if self.pairs else "∅"
        return f"({pairs}, {len(self.rules)} rules)"

    def __str__(self) -> str:
        return self.show()


def dp_of(adps: Iterable[Adp]) -> Tuple[Rule, ...]:
    """ℓ# → t# for every annotated subterm t of every ADP's rhs."""
    out = []
    for adp in adps:
        for _, sub in annotated_subterms(adp.rhs):
            out.append(Rule(sharp_root(adp.lhs), sharp_root(sub)))
    return tuple(dict.fromkeys(out))


def dependency_pairs(rules: Sequence[Rule]) -> Tuple[Rule, ...]:
    """Classical DPs of a TRS; defined symbols are the roots of its own lhs."""
    defined = rules_defined(rules)
    out = []
    for rule in rules:
        for pos in function_positions(rule.rhs):
            sub = subterm_at(rule.rhs, pos)
            if sub.symbol in defined:
                out.append(Rule(sharp_root(rule.lhs), sharp_root(sub)))
    return tuple(dict.fromkeys(out))


def drp1(problem: AdpProblem) -> Optional[DpProblem]:
    """(DP(P), ♭(P ∪ P=)) when no base ADP carries an annotation."""
    if any(a.annotations for a in problem.base):
        return None
    return DpProblem(dp_of(problem.main), flat_rules(problem.adps))


def drp2(problem: AdpProblem, selection: Iterable[int]) -> AdpProblem:
    """Move the selected base ADPs, split to one annotation each, into main."""
    selection = sorted(set(selection))
    for j in selection:
        if not 0 <= j < len(problem.base):
            raise AdpError(f"base index {j} out of range")
    chosen = [problem.base[j] for j in selection]
    rest = tuple(a for j, a in enumerate(problem.base) if j not in selection)
    return AdpProblem(problem.main + split_adps(chosen), rest)


def drp2_selection(problem: AdpProblem) -> List[int]:
    """Annotated base ADPs on minimal lassos, or every annotated base ADP."""
    m = len(problem.main)
    on_lassos = sorted({n - m for q in minimal_lassos(problem) for n in q if n >= m})
    picked = [j for j in on_lassos if problem.base[j].annotations]
    return picked or [j for j, a in enumerate(problem.base) if a.annotations]


def _edges(problem):
    defined = problem.defined
    edges = set()
    for i, p in enumerate(problem.pairs):
        for j, q in enumerate(problem.pairs):
            if p.rhs.symbol == q.lhs.symbol and may_reach(p.rhs, q.lhs, defined):
                edges.add((i, j))
    return edges


def classic_sccs(problem: DpProblem) -> List[FrozenSet[int]]:
    edges = _edges(problem)
    adj = {i: sorted(b for a, b in edges if a == i) for i in range(len(problem.pairs))}
    out = [
        frozenset(c)
        for c in strongly_connected_components(adj)
        if len(c) > 1 or (c[0], c[0]) in edges
    ]
    return sorted(out, key=min)


def classic_dg_processor(problem: DpProblem) -> List[DpProblem]:
    return [
        DpProblem(tuple(problem.pairs[i] for i in sorted(c)), problem.rules)
        for c in classic_sccs(problem)
    ]


def classic_reduction_pair(problem: DpProblem, max_coeff: int = 2, deadline: Deadline = NO_DEADLINE) -> Optional[OrientationResult]:
    """All rules and pairs weak, as many pairs as possible strict (indices into pairs)."""
    rules = [Constraint(r.lhs, r.rhs, str(r)) for r in problem.rules]
    pairs = [Constraint(p.lhs, p.rhs, str(p)) for p in problem.pairs]
    offset = len(rules)
    found = orient(rules + pairs, list(range(offset, offset + len(pairs))), max_coeff, False, (), deadline)
    if found is None:
        log.info("classic rpp: no reduction pair with coefficients ≤ %d for %s", max_coeff, problem)
        return None
    pol, strict = found
    return OrientationResult(pol, frozenset(i - offset for i in strict), "classic-rpp", max_coeff)


def classic_rpp_processor(problem: DpProblem, max_coeff: int = 2, deadline: Deadline = NO_DEADLINE) -> Optional[DpProblem]:
    result = classic_reduction_pair(problem, max_coeff, deadline)
    if result is None:
        return None
    return remove_pairs(problem, result.strict)


def remove_pairs(problem: DpProblem, strict: Iterable[int]) -> DpProblem:
    strict = set(strict)
    return DpProblem(tuple(p for i, p in enumerate(problem.pairs) if i not in strict), problem.rules)


def greedy_partition(trs: RelativeTrs) -> Tuple[Tuple[Rule, ...], Tuple[Rule, ...]]:
    """Split R= into (R=a, R=b) with R=b non-duplicating and dominated by R ∪ R=a,
    moving rules to R=a until the domination holds."""
    rb = [r for r in trs.base if not is_duplicating(r)]
    ra = [r for r in trs.base if is_duplicating(r)]
    changed = True
    while changed:
        changed = False
        roots = {r.root for r in trs.main + tuple(ra)}
        for rule in list(rb):
            if symbols(rule.rhs) & roots:
                rb.remove(rule)
                ra.append(rule)
                changed = True
    order = {r: i for i, r in enumerate(trs.base)}
    return tuple(sorted(ra, key=order.get)), tuple(sorted(rb, key=order.get))


def dominance_fast_path(trs: RelativeTrs, partition: Optional[Tuple[Sequence[Rule], Sequence[Rule]]] = None) -> Optional[DpProblem]:
    """Ordinary DP problem whose termination implies relative termination.

    Without a partition, first tries R= as a whole (R= non-duplicating and
    dominated by R), then the greedy split, which is used only when both of
    its parts are nonempty.
    """
    if partition is None:
        if not any(is_duplicating(r) for r in trs.base) and dominates(trs.main, trs.base):
            return DpProblem(dependency_pairs(trs.main), trs.main + trs.base)
        ra, rb = greedy_partition(trs)
        if not ra or not rb:
            return None
        partition = (ra, rb)
    ra, rb = (tuple(part) for part in partition)
    if any(is_duplicating(r) for r in rb) or not dominates(trs.main + ra, rb):
        return None
    return DpProblem(dependency_pairs(trs.main + ra), trs.main + trs.base)


def describe_pairs(pairs: Iterable[Rule]) -> List[str]:
    return [f"{term_str(p.lhs)} -> {term_str(p.rhs)}" for p in pairs]
