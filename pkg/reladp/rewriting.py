"""Plain relative rewriting, ADP rewriting with variable reposition functions,
and the bounded searches built on top of them.

The loop search is the NO-side of the prover: from seed terms it explores
rewrite sequences breadth-first and reports a trace t -> ... -> C[t·σ] that
contains a main step. Pumping that trace repeats the main step forever.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import islice, product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from reladp.adp import Adp, AdpProblem, AnnotatedTerm
from reladp.errors import RewriteError
from reladp.limits import NO_DEADLINE, Deadline
from reladp.terms import (
    App,
    Position,
    Substitution,
    Symbol,
    Term,
    apply_subst,
    function_positions,
    ground_terms,
    is_prefix,
    iter_subterms,
    match_term,
    positions,
    replace_at,
    size,
    subterm_at,
    term_str,
    variable_positions,
    variables,
)
from reladp.trs import BASE, MAIN, RelativeTrs, Rule

log = logging.getLogger(__name__)

PR = "pr"
R = "r"


@dataclass(frozen=True)
class Vrf:
    """Maps each variable position of an ADP's lhs to a position of the same
    variable in its rhs, or to None (⊥)."""

    mapping: Tuple[Tuple[Position, Optional[Position]], ...] = ()

    def __getitem__(self, pos: Position) -> Optional[Position]:
        return dict(self.mapping)[pos]

    def items(self):
        return self.mapping

    def __str__(self) -> str:
        def show(p):
            return ".".join(map(str, p)) or "ε"

        parts = [f"{show(a)}↦{'⊥' if b is None else show(b)}" for a, b in self.mapping]
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class RewriteStep:
    position: Position
    rule: Union[Rule, Adp]
    substitution: Substitution
    result: Union[Term, AnnotatedTerm]
    kind: str
    case: Optional[str] = None
    vrf: Optional[Vrf] = None

    @property
    def arrow(self) -> str:
        return "->" if self.kind == MAIN else "->="

    def __hash__(self):
        return hash((self.position, self.rule, self.result, self.kind, self.case, self.vrf))


def rewrite_successors(trs: RelativeTrs, t: Term) -> List[RewriteStep]:
    """All one-step successors of t, by position in <lex order, main rules first."""
    steps = []
    for pos in function_positions(t):
        sub = subterm_at(t, pos)
        for kind, rules in ((MAIN, trs.main), (BASE, trs.base)):
            for rule in rules:
                sigma = match_term(rule.lhs, sub)
                if sigma is None:
                    continue
                result = replace_at(t, pos, apply_subst(rule.rhs, sigma))
                steps.append(RewriteStep(pos, rule, sigma, result, kind))
    return steps


def enumerate_vrfs(adp: Adp) -> List[Vrf]:
    lhs, rhs = adp.lhs, adp.rhs.plain
    sources = variable_positions(lhs)
    choices = []
    for pos in sources:
        name = subterm_at(lhs, pos)
        targets = [q for q in variable_positions(rhs) if subterm_at(rhs, q) == name]
        choices.append(targets + [None])
    return [Vrf(tuple(zip(sources, combo))) for combo in product(*choices)]


def _apply_adp(defined, s, at, adp, vrf):
    try:
        redex = subterm_at(s.plain, at)
    except IndexError:
        raise RewriteError(f"{at} is not a position of {s}") from None
    if not isinstance(redex, App) or redex.symbol not in defined:
        raise RewriteError(f"position {at} of {s} does not carry a defined symbol")
    sigma = match_term(adp.lhs, redex)
    if sigma is None:
        raise RewriteError(f"{adp} does not match {term_str(redex)}")
    case = PR if at in s.annotated else R
    # Annotations below a variable of the lhs travel to where the VRF sends it.
    moved = []
    for rho, target in vrf.items():
        if target is None:
            continue
        below = at + rho
        for p in s.annotated:
            if is_prefix(below, p):
                moved.append(target + p[len(below):])
    phi = list(adp.annotations) + moved if case == PR else moved
    kept = [p for p in s.annotated if not is_prefix(at, p)]
    plain = replace_at(s.plain, at, apply_subst(adp.rhs.plain, sigma))
    result = AnnotatedTerm(plain, tuple(kept) + tuple(at + q for q in phi))
    return result, sigma, case


def adp_rewrite_step(adps: Sequence[Adp], s: AnnotatedTerm, at: Position, adp: Adp, vrf: Vrf) -> AnnotatedTerm:
    """One ADP step: case (pr) when `at` is annotated, case (r) otherwise."""
    defined = {a.lhs.symbol for a in adps} | {adp.lhs.symbol}
    return _apply_adp(defined, s, at, adp, vrf)[0]


def annotated_successors(problem: AdpProblem, s: AnnotatedTerm) -> List[RewriteStep]:
    defined = problem.defined
    steps = []
    for pos in function_positions(s.plain):
        if subterm_at(s.plain, pos).symbol not in defined:
            continue
        for kind, adps in ((MAIN, problem.main), (BASE, problem.base)):
            for adp in adps:
                if match_term(adp.lhs, subterm_at(s.plain, pos)) is None:
                    continue
                for vrf in enumerate_vrfs(adp):
                    result, sigma, case = _apply_adp(defined, s, pos, adp, vrf)
                    steps.append(RewriteStep(pos, adp, sigma, result, kind, case, vrf))
    return steps


@dataclass(frozen=True)
class LoopWitness:
    start: Term
    trace: Tuple[RewriteStep, ...]
    context_position: Position
    loop_substitution: Substitution
    main_step_count: int
    seed: Optional[Term] = None
    prefix: Tuple[RewriteStep, ...] = ()

    def lines(self) -> List[str]:
        out = []
        if self.prefix:
            out.append(f"seed {term_str(self.seed)} reaches the loop start in {len(self.prefix)} step(s)")
        chain = term_str(self.start)
        for step in self.trace:
            chain += f" {step.arrow} {term_str(step.result)}"
        out.append(chain)
        where = ".".join(map(str, self.context_position)) or "ε"
        sigma = ", ".join(f"{x}↦{term_str(v)}" for x, v in sorted(self.loop_substitution.items()))
        out.append(f"the start term reappears at position {where} with substitution {{{sigma}}}")
        out.append(f"main steps per iteration: {self.main_step_count}")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


def _fresh_name(stem, taken) -> str:
    name, i = stem, 0
    while name in taken:
        i += 1
        name = f"{stem}{i}"
    return name


def seed_terms(trs: RelativeTrs, seed_depth: int = 2, max_seeds: int = 200) -> List[Term]:
    """Every lhs instantiated with ground terms, constructor terms first.

    Seeds of the different rules are interleaved so the cap does not starve
    the later rules.
    """
    defined = trs.defined
    signature = set(trs.signature)
    if not any(f.arity == 0 for f in signature):
        fresh = Symbol(_fresh_name("c", {f.name for f in signature}), 0)
        log.debug("no constants in the signature, seeding with the fresh constant %s", fresh.name)
        signature.add(fresh)
    pool = ground_terms(signature, seed_depth)
    pool.sort(key=lambda u: (any(isinstance(v, App) and v.symbol in defined for v in iter_subterms(u)), size(u)))
    per_rule = []
    for rule in trs.main + trs.base:
        names = variables(rule.lhs)
        combos = islice(product(pool, repeat=len(names)), max_seeds)
        per_rule.append([apply_subst(rule.lhs, dict(zip(names, combo))) for combo in combos])
    seeds: Dict[Term, None] = {}
    for column in range(max(map(len, per_rule), default=0)):
        for row in per_rule:
            if column < len(row):
                seeds.setdefault(row[column])
    return list(seeds)[:max_seeds]


@dataclass
class _Node:
    term: Term
    parent: Optional["_Node"]
    step: Optional[RewriteStep]
    depth: int
    subterms: frozenset = field(default=frozenset())


def _path(node):
    out = []
    while node is not None:
        out.append(node)
        node = node.parent
    return out[::-1]


def _embedding(term, pattern):
    for pos in positions(term):
        sigma = match_term(pattern, subterm_at(term, pos))
        if sigma is not None:
            return pos, sigma
    return None


def _check_loop(node, seed):
    path = _path(node)
    mains = 0
    for i in range(len(path) - 2, -1, -1):
        step = path[i + 1].step
        if step.kind == MAIN:
            mains += 1
        if not mains:
            continue
        found = _embedding(node.term, path[i].term)
        if found is None:
            continue
        pos, sigma = found
        return LoopWitness(
            start=path[i].term,
            trace=tuple(n.step for n in path[i + 1:]),
            context_position=pos,
            loop_substitution=sigma,
            main_step_count=mains,
            seed=seed,
            prefix=tuple(n.step for n in path[1 : i + 1]),
        )
    return None


def search_loop_from(trs: RelativeTrs, seed: Term, max_depth: int, max_term_size: int, deadline: Deadline = NO_DEADLINE) -> Optional[LoopWitness]:
    root = _Node(seed, None, None, 0)
    frontier = [root]
    seen = {(seed, False)}
    for _ in range(max_depth):
        nxt = []
        for node in frontier:
            if deadline.expired():
                return None
            main_seen = any(n.step.kind == MAIN for n in _path(node)[1:])
            for step in rewrite_successors(trs, node.term):
                if size(step.result) > max_term_size:
                    continue
                child = _Node(step.result, node, step, node.depth + 1)
                witness = _check_loop(child, seed)
                if witness is not None:
                    return witness
                key = (step.result, main_seen or step.kind == MAIN)
                if key not in seen:
                    seen.add(key)
                    nxt.append(child)
        frontier = nxt
        if not frontier:
            break
    return None


def find_relative_loop(
    trs: RelativeTrs,
    max_depth: int = 6,
    max_term_size: int = 30,
    seed_depth: int = 2,
    max_seeds: int = 200,
    deadline: Deadline = NO_DEADLINE,
) -> Optional[LoopWitness]:
    if max_depth < 1 or max_term_size < 1:
        raise ValueError("loop search bounds must be positive")
    if not trs.main:
        return None
    seeds = seed_terms(trs, seed_depth, max_seeds)
    log.debug("loop search over %d seed terms", len(seeds))
    # Shallow pass over all seeds first, so quick loops win over deep ones.
    for depth in sorted({min(3, max_depth), max_depth}):
        for seed in seeds:
            if deadline.expired():
                return None
            witness = search_loop_from(trs, seed, depth, max_term_size, deadline)
            if witness is not None:
                log.info("loop found from seed %s", term_str(seed))
                return witness
    return None


def replay_witness(trs: RelativeTrs, witness: LoopWitness) -> bool:
    """Re-execute the witness and check the self-embedding equation."""

    def replay(term, steps):
        for step in steps:
            rules = trs.main if step.kind == MAIN else trs.base
            if step.rule not in rules:
                return None
            redex = subterm_at(term, step.position)
            sigma = match_term(step.rule.lhs, redex)
            if sigma is None:
                return None
            term = replace_at(term, step.position, apply_subst(step.rule.rhs, sigma))
            if term != step.result:
                return None
        return term

    try:
        if witness.prefix:
            if replay(witness.seed, witness.prefix) != witness.start:
                return False
        end = replay(witness.start, witness.trace)
        if end is None:
            return False
        embedded = subterm_at(end, witness.context_position)
    except IndexError:
        return False
    mains = sum(1 for s in witness.trace if s.kind == MAIN)
    return mains >= 1 and mains == witness.main_step_count and embedded == apply_subst(witness.start, witness.loop_substitution)


def max_main_steps(trs: RelativeTrs, t: Term, depth: int, memo: Optional[dict] = None) -> int:
    """Largest number of main steps over plain sequences of length ≤ depth from t."""
    memo = {} if memo is None else memo
    key = (t, depth)
    if key not in memo:
        best = 0
        if depth > 0:
            for step in rewrite_successors(trs, t):
                gain = 1 if step.kind == MAIN else 0
                best = max(best, gain + max_main_steps(trs, step.result, depth - 1, memo))
        memo[key] = best
    return memo[key]


def max_pr_main_steps(problem: AdpProblem, s: AnnotatedTerm, depth: int, memo: Optional[dict] = None) -> int:
    """Largest number of (pr) steps with main ADPs over annotated sequences of length ≤ depth."""
    memo = {} if memo is None else memo
    key = (s, depth)
    if key not in memo:
        best = 0
        if depth > 0:
            results = {}
            for step in annotated_successors(problem, s):
                gain = 1 if step.kind == MAIN and step.case == PR else 0
                results[step.result] = max(results.get(step.result, 0), gain)
            for result, gain in results.items():
                best = max(best, gain + max_pr_main_steps(problem, result, depth - 1, memo))
        memo[key] = best
    return memo[key]
