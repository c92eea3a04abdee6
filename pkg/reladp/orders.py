"""Linear polynomial interpretations over the naturals and the processors that
use them as reduction pairs.

A symbol f of arity n is interpreted as c + a1*x1 + ... + an*xn with every
coefficient in {0..max_coeff}. Comparisons use absolute positiveness: p ≥ q
holds if every coefficient and the constant of p - q is non-negative, and
p > q additionally needs a constant gap of at least 1.

The search assigns the unknown coefficients one at a time in a fixed order.
Every unknown is a natural number and interpreted terms are polynomials with
non-negative coefficients in the unknowns, so a partial assignment can be
refuted as soon as the largest possible left side falls below the smallest
possible right side for some variable of a constraint.
"""

from __future__ import annotations

import logging
import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from reladp.adp import Adp, AdpProblem, AnnotatedTerm, ann_of_rhs, flatten
from reladp.errors import InterpretationError
from reladp.limits import NO_DEADLINE, Deadline
from reladp.terms import C0, C2, Symbol, Term, Var, sharp_root, term_str
from reladp.trs import BASE, MAIN, RelativeTrs, Rule, is_duplicating

log = logging.getLogger(__name__)

RPP = "rpp"
RULE_REMOVAL = "rule-removal"
DUP_PREPROCESS = "dup-preprocess"
MODES = (RPP, RULE_REMOVAL, DUP_PREPROCESS)


@dataclass(frozen=True)
class LinearPoly:
    constant: int = 0
    coefficients: Tuple[Tuple[str, int], ...] = ()

    @classmethod
    def of(cls, constant: int = 0, coefficients: Optional[Mapping[str, int]] = None) -> "LinearPoly":
        items = tuple(sorted((x, c) for x, c in (coefficients or {}).items() if c))
        return cls(constant, items)

    @classmethod
    def var(cls, name: str) -> "LinearPoly":
        return cls(0, ((name, 1),))

    def coeff(self, name: str) -> int:
        return dict(self.coefficients).get(name, 0)

    @property
    def variables(self) -> List[str]:
        return [x for x, _ in self.coefficients]

    def __add__(self, other: "LinearPoly") -> "LinearPoly":
        merged = defaultdict(int, self.coefficients)
        for x, c in other.coefficients:
            merged[x] += c
        return LinearPoly.of(self.constant + other.constant, merged)

    def scale(self, k: int) -> "LinearPoly":
        return LinearPoly.of(self.constant * k, {x: c * k for x, c in self.coefficients})

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        return self.constant + sum(c * assignment[x] for x, c in self.coefficients)

    def __str__(self) -> str:
        parts = [str(self.constant)] if self.constant or not self.coefficients else []
        parts += [x if c == 1 else f"{c}*{x}" for x, c in self.coefficients]
        return " + ".join(parts)


def weakly_geq(p: LinearPoly, q: LinearPoly) -> bool:
    if p.constant < q.constant:
        return False
    return all(p.coeff(x) >= c for x, c in q.coefficients)


def strictly_gt(p: LinearPoly, q: LinearPoly) -> bool:
    return weakly_geq(p, q) and p.constant >= q.constant + 1


def _placeholder(i) -> str:
    return f"x{i}"


@dataclass(frozen=True)
class PolyInterpretation:
    """Templates over the placeholders x1..xn; c0 and c2 are fixed."""

    table: Tuple[Tuple[Symbol, LinearPoly], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[Symbol, LinearPoly]) -> "PolyInterpretation":
        return cls(tuple(sorted(mapping.items(), key=lambda kv: (kv[0].sharp, kv[0].name, kv[0].arity))))

    def __getitem__(self, symbol: Symbol) -> LinearPoly:
        if symbol == C0:
            return LinearPoly()
        if symbol == C2:
            return LinearPoly.of(0, {"x1": 1, "x2": 1})
        for key, poly in self.table:
            if key == symbol:
                return poly
        raise InterpretationError(f"no interpretation for symbol {symbol.display()}")

    def __contains__(self, symbol: Symbol) -> bool:
        return symbol in (C0, C2) or any(key == symbol for key, _ in self.table)

    def lines(self, taken: Iterable[str] = ()) -> List[str]:
        taken = frozenset(taken)
        out = []
        for symbol, poly in self.table:
            args = ",".join(_placeholder(i) for i in range(1, symbol.arity + 1))
            head = symbol.display(taken) + (f"({args})" if args else "")
            out.append(f"Pol({head}) = {poly}")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


def interpret_term(pol: PolyInterpretation, t: Term) -> LinearPoly:
    if isinstance(t, Var):
        return LinearPoly.var(t.name)
    template = pol[t.symbol]
    result = LinearPoly(template.constant)
    for i, arg in enumerate(t.args, start=1):
        weight = template.coeff(_placeholder(i))
        if weight:
            result = result + interpret_term(pol, arg).scale(weight)
    return result


@dataclass(frozen=True)
class Constraint:
    left: Term
    right: Term
    label: str = ""

    def show(self, taken: Iterable[str] = ()) -> str:
        return f"{term_str(self.left, taken)} vs {term_str(self.right, taken)}"


@dataclass(frozen=True)
class OrientationResult:
    interpretation: PolyInterpretation
    strict: FrozenSet[int]
    mode: str = RPP
    max_coeff: int = 2


# -- symbolic interpretation -------------------------------------------------

Mono = Tuple[int, ...]
SymPoly = Dict[Mono, int]


class _Unknowns:
    def __init__(self):
        self.slots: Dict[Tuple[Symbol, int], int] = {}
        self.owner: List[Tuple[Symbol, int]] = []

    def get(self, symbol: Symbol, slot: int) -> int:
        key = (symbol, slot)
        if key not in self.slots:
            self.slots[key] = len(self.owner)
            self.owner.append(key)
        return self.slots[key]


def _symbolic(t, unknowns):
    """Interpretation of t keyed by variable name (None = constant part)."""
    if isinstance(t, Var):
        return {t.name: {(): 1}}
    out: Dict[Optional[str], SymPoly] = defaultdict(dict)
    if t.symbol == C0:
        return out
    if t.symbol == C2:
        for arg in t.args:
            for key, poly in _symbolic(arg, unknowns).items():
                _accumulate(out[key], poly, ())
        return out
    out[None][(unknowns.get(t.symbol, 0),)] = 1
    for i, arg in enumerate(t.args, start=1):
        u = unknowns.get(t.symbol, i)
        for key, poly in _symbolic(arg, unknowns).items():
            _accumulate(out[key], poly, (u,))
    return out


def _accumulate(target, poly, factor):
    for mono, c in poly.items():
        key = tuple(sorted(mono + factor))
        target[key] = target.get(key, 0) + c


class _Compiled:
    def __init__(self, constraint: Constraint, unknowns: _Unknowns):
        left = _symbolic(constraint.left, unknowns)
        right = _symbolic(constraint.right, unknowns)
        self.parts = []
        keys = [None] + sorted(k for k in set(left) | set(right) if k is not None)
        for key in keys:
            lpoly = list(left.get(key, {}).items())
            rpoly = list(right.get(key, {}).items())
            # The constant part is kept even when empty: strictness lives there.
            if key is None or rpoly:
                self.parts.append((key, lpoly, rpoly))
        self.unknowns = sorted({u for _, lp, rp in self.parts for mono, _ in lp + rp for u in mono})


def _bound(poly, vals, fill) -> int:
    total = 0
    for mono, coef in poly:
        prod = coef
        for u in mono:
            v = vals[u]
            prod *= fill[u] if v is None else v
            if not prod:
                break
        total += prod
    return total


def _refuted(c, strict, vals, lo, hi) -> bool:
    for key, lpoly, rpoly in c.parts:
        gap = 1 if strict and key is None else 0
        if _bound(lpoly, vals, hi) < _bound(rpoly, vals, lo) + gap:
            return True
    return False


class _Search:
    def __init__(self, constraints: Sequence[Constraint], max_coeff: int, monotone: bool, deadline: Deadline):
        self.unknowns = _Unknowns()
        self.compiled = [_Compiled(c, self.unknowns) for c in constraints]
        self.max_coeff = max_coeff
        self.monotone = monotone
        self.deadline = deadline
        self.nodes = 0
        n = len(self.unknowns.owner)
        self.lo = [(1 if monotone and slot else 0) for _, slot in self.unknowns.owner]
        self.hi = [max_coeff] * n

    def _strict_satisfied(self, i, vals) -> bool:
        return not _refuted(self.compiled[i], True, vals, self.lo, self.hi)

    def _order(self, required):
        order: Dict[int, None] = {}
        for i in list(required) + list(range(len(self.compiled))):
            for u in self.compiled[i].unknowns:
                order.setdefault(u)
        # Unknowns that occur in no comparison still get a value.
        for u in range(len(self.unknowns.owner)):
            order.setdefault(u)
        return list(order)

    def solve(self, required: FrozenSet[int]) -> Optional[List[int]]:
        """An assignment orienting every constraint weakly and `required` strictly."""
        vals: List[Optional[int]] = [None] * len(self.unknowns.owner)
        watch = defaultdict(list)
        for i, c in enumerate(self.compiled):
            for u in c.unknowns:
                watch[u].append(i)
        for i, c in enumerate(self.compiled):
            if not c.unknowns and _refuted(c, i in required, vals, self.lo, self.hi):
                return None
        order = self._order(sorted(required))

        def dfs(k) -> bool:
            if k == len(order):
                return True
            self.nodes += 1
            if self.nodes % 2048 == 0:
                self.deadline.check()
            u = order[k]
            for value in range(self.lo[u], self.hi[u] + 1):
                vals[u] = value
                if not any(_refuted(self.compiled[i], i in required, vals, self.lo, self.hi) for i in watch[u]):
                    if dfs(k + 1):
                        return True
            vals[u] = None
            return False

        return list(vals) if dfs(0) else None

    def interpretation(self, vals: Sequence[int]) -> PolyInterpretation:
        templates: Dict[Symbol, Dict[int, int]] = defaultdict(dict)
        for (symbol, slot), value in zip(self.unknowns.owner, vals):
            templates[symbol][slot] = value
        mapping = {}
        for symbol, slots in templates.items():
            coeffs = {_placeholder(i): slots.get(i, 0) for i in range(1, symbol.arity + 1)}
            mapping[symbol] = LinearPoly.of(slots.get(0, 0), coeffs)
        return PolyInterpretation.of(mapping)

    def strict_set(self, vals: Sequence[int], candidates: Iterable[int]) -> FrozenSet[int]:
        return frozenset(i for i in candidates if self._strict_satisfied(i, vals))


def orient(
    constraints: Sequence[Constraint],
    candidates: Sequence[int],
    max_coeff: int = 2,
    monotone: bool = False,
    required: Iterable[int] = (),
    deadline: Deadline = NO_DEADLINE,
) -> Optional[Tuple[PolyInterpretation, FrozenSet[int]]]:
    """Weakly orient all constraints, strictly orient `required` and greedily
    as many `candidates` as possible (at least one).

    Returns the interpretation and the strictly oriented constraint indices.
    """
    if max_coeff < 1:
        raise ValueError("max_coeff must be at least 1")
    search = _Search(constraints, max_coeff, monotone, deadline)
    required = frozenset(required)
    vals = None
    for c in candidates:
        vals = search.solve(required | {c})
        if vals is not None:
            break
    if vals is None:
        log.debug("orientation search exhausted after %d nodes", search.nodes)
        return None
    strict = search.strict_set(vals, candidates) | required
    for c in candidates:
        if c in strict:
            continue
        better = search.solve(strict | {c})
        if better is not None:
            vals = better
            strict = search.strict_set(vals, candidates) | strict | {c}
    log.debug("orientation found after %d nodes", search.nodes)
    return search.interpretation(vals), frozenset(strict)


# -- reduction pairs for ADP problems ----------------------------------------


def _rule_constraints(rules):
    return [Constraint(r.lhs, r.rhs, str(r)) for r in dict.fromkeys(rules)]


def find_reduction_pair(
    problem: AdpProblem,
    max_coeff: int = 2,
    mode: str = RPP,
    deadline: Deadline = NO_DEADLINE,
) -> Optional[OrientationResult]:
    """Search a linear polynomial reduction pair for the given processor mode.

    The strict set of the result indexes `problem.adps` (main then base).
    """
    if mode not in MODES:
        raise ValueError(f"unknown orientation mode {mode!r}")
    adps = problem.adps
    rules = list(dict.fromkeys(a.rule for a in adps))
    if mode == RPP:
        constraints = _rule_constraints(rules)
        marked = [i for i, a in enumerate(adps) if a.annotations]
        offset = len(constraints)
        constraints += [Constraint(sharp_root(adps[i].lhs), ann_of_rhs(adps[i].rhs), adps[i].show()) for i in marked]
        found = orient(constraints, list(range(offset, len(constraints))), max_coeff, False, (), deadline)
        if found is None:
            log.info("rpp: no reduction pair with coefficients ≤ %d for %s", max_coeff, problem)
            return None
        pol, strict = found
        chosen = frozenset(marked[i - offset] for i in strict)
    else:
        constraints = _rule_constraints(rules)
        required = ()
        if mode == DUP_PREPROCESS:
            required = [rules.index(a.rule) for a in problem.base if is_duplicating(a.rule)]
        found = orient(constraints, list(range(len(constraints))), max_coeff, True, required, deadline)
        if found is None:
            log.info("%s: no monotone interpretation with coefficients ≤ %d", mode, max_coeff)
            return None
        pol, strict = found
        gone = {rules[i] for i in strict}
        chosen = frozenset(i for i, a in enumerate(adps) if a.rule in gone)
    return OrientationResult(pol, chosen, mode, max_coeff)


def rpp_processor(problem: AdpProblem, result: OrientationResult) -> AdpProblem:
    """Strict ADPs leave their component and come back flattened in base."""
    if not result.strict:
        raise ValueError("empty strict set makes no progress")
    m = len(problem.main)
    main = tuple(a for i, a in enumerate(problem.main) if i not in result.strict)
    base = tuple(a for j, a in enumerate(problem.base) if m + j not in result.strict)
    moved = tuple(flatten(a) for i, a in enumerate(problem.adps) if i in result.strict)
    return AdpProblem(main, base + moved)


def rule_removal_processor(problem: AdpProblem, result: OrientationResult) -> AdpProblem:
    if not result.strict:
        raise ValueError("empty strict set makes no progress")
    m = len(problem.main)
    main = tuple(a for i, a in enumerate(problem.main) if i not in result.strict)
    base = tuple(a for j, a in enumerate(problem.base) if m + j not in result.strict)
    return AdpProblem(main, base)


@dataclass(frozen=True)
class Preprocessing:
    trs: RelativeTrs
    removed: Tuple[Rule, ...] = ()
    moved: Tuple[Rule, ...] = ()
    orientation: Optional[OrientationResult] = None


def plain_problem(trs: RelativeTrs) -> AdpProblem:
    main = tuple(Adp(r.lhs, AnnotatedTerm(r.rhs), MAIN) for r in trs.main)
    base = tuple(Adp(r.lhs, AnnotatedTerm(r.rhs), BASE) for r in trs.base)
    return AdpProblem(main, base)


def preprocess(trs: RelativeTrs, max_coeff: int = 2, deadline: Deadline = NO_DEADLINE) -> Preprocessing:
    duplicating = tuple(r for r in trs.base if is_duplicating(r))
    if not duplicating:
        return Preprocessing(trs)
    problem = plain_problem(trs)
    result = find_reduction_pair(problem, max_coeff, DUP_PREPROCESS, deadline)
    if result is not None:
        gone = {problem.adps[i].rule for i in result.strict}
        log.info("removed %d strictly decreasing rules, including every duplicating base rule", len(gone))
        reduced = trs.with_rules([r for r in trs.main if r not in gone], [r for r in trs.base if r not in gone])
        return Preprocessing(reduced, tuple(r for r in trs.rules if r in gone), (), result)
    log.info("moving %d duplicating base rules to the main TRS", len(duplicating))
    moved = trs.with_rules(trs.main + duplicating, [r for r in trs.base if r not in duplicating])
    return Preprocessing(moved, (), duplicating, None)


def preprocess_duplicating_base(trs: RelativeTrs, max_coeff: int = 2) -> RelativeTrs:
    return preprocess(trs, max_coeff).trs


# -- numeric re-check --------------------------------------------------------


def sample_check(
    pol: PolyInterpretation,
    comparisons: Iterable[Tuple[Term, Term, bool]],
    samples: int = 200,
    max_value: int = 10,
    seed: int = 0,
) -> List[Tuple[Term, Term, Dict[str, int]]]:
    """Evaluate each claimed comparison at random natural assignments.

    Returns the violations found (empty when every claim held).
    """
    rng = random.Random(seed)
    violations = []
    for left, right, strict in comparisons:
        lp, rp = interpret_term(pol, left), interpret_term(pol, right)
        names = sorted(set(lp.variables) | set(rp.variables))
        for _ in range(samples):
            point = {x: rng.randint(0, max_value) for x in names}
            lv, rv = lp.evaluate(point), rp.evaluate(point)
            if lv < rv or (strict and lv == rv):
                violations.append((left, right, point))
                break
    return violations


def claimed_comparisons(problem: AdpProblem, result: OrientationResult) -> List[Tuple[Term, Term, bool]]:
    """Every inequality an orientation result asserts for its problem."""
    out = []
    for a in problem.adps:
        out.append((a.lhs, a.rhs.plain, False))
    if result.mode == RPP:
        for i, a in enumerate(problem.adps):
            if a.annotations:
                out.append((sharp_root(a.lhs), ann_of_rhs(a.rhs), i in result.strict))
    else:
        for i, a in enumerate(problem.adps):
            out.append((a.lhs, a.rhs.plain, i in result.strict))
    return out

