"""Bounded comparison of plain relative rewriting with annotated rewriting on
an exhaustive family of tiny systems over a, f and g."""

import random
from itertools import combinations, product

import pytest

from reladp.adp import AnnotatedTerm, canonical_adp_problem
from reladp.parser import parse_relative_trs
from reladp.rewriting import max_main_steps, max_pr_main_steps
from reladp.terms import app, const, function_positions, subterm_at

RULES = [
    "a -> f(a)",
    "a -> g(a)",
    "f(x) -> g(x)",
    "g(x) -> f(x)",
    "f(x) -> x",
    "g(x) -> x",
    "f(a) -> a",
    "f(x) -> f(g(x))",
    "g(f(x)) -> f(g(x))",
    "f(g(x)) -> g(f(x))",
    "g(x) -> g(g(x))",
    "f(x) -> a",
    "g(a) -> f(a)",
    "f(f(x)) -> g(x)",
    "g(g(x)) -> f(x)",
]
DEPTH = 4


def start_terms():
    out = []
    for n in range(5):
        for word in product("fg", repeat=n):
            t = const("a")
            for name in word:
                t = app(name, t)
            out.append(t)
    return out


def fully_annotated(t, defined):
    return AnnotatedTerm(t, tuple(p for p in function_positions(t) if subterm_at(t, p).symbol in defined))


def system(main, base):
    """A relative system from one or more main and base rules written with ->."""
    main = [main] if isinstance(main, str) else list(main)
    base = [base] if isinstance(base, str) else list(base)
    lines = main + [rule.replace(" -> ", " ->= ") for rule in base]
    return parse_relative_trs("(VAR x)\n(RULES\n" + "".join(f"  {rule}\n" for rule in lines) + ")")


def check_agreement(trs, starts):
    problem = canonical_adp_problem(trs)
    plain_memo, ann_memo = {}, {}
    for t in starts:
        plain = max_main_steps(trs, t, DEPTH, plain_memo)
        annotated = max_pr_main_steps(problem, fully_annotated(t, trs.defined), DEPTH, ann_memo)
        assert annotated <= plain, (str(trs), t)
        assert min(plain, 2) == min(annotated, 2), (str(trs), t)


@pytest.mark.slow
def test_annotated_and_plain_main_steps_agree():
    starts = start_terms()
    assert len(starts) == 31
    checked = 0
    for main, base in product(RULES, repeat=2):
        check_agreement(system(main, base), starts)
        checked += 1
    assert checked == 225


def two_rule_systems(count, seed=0):
    pairs = list(combinations(RULES, 2))
    rng = random.Random(seed)
    shapes = [(pairs, pairs), (pairs, RULES), (RULES, pairs)]
    return [tuple(rng.choice(side) for side in shape) for shape in shapes for _ in range(count)]


@pytest.mark.slow
@pytest.mark.parametrize("main, base", two_rule_systems(10))
def test_agreement_with_two_rules_on_a_side(main, base):
    check_agreement(system(main, base), start_terms())


def test_one_annotation_per_main_adp_loses_a_created_redex(parse):
    trs = parse("(VAR x)\n(RULES\n  h(x) -> f(f(x))\n  f(x) -> x\n)")
    start = app("h", const("c"))
    assert max_main_steps(trs, start, DEPTH) == 3
    problem = canonical_adp_problem(trs)
    assert max_pr_main_steps(problem, fully_annotated(start, trs.defined), DEPTH) == 2
