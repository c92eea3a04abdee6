from itertools import product

import pytest

from reladp.adp import AdpProblem, canonical_adp_problem, flatten
from reladp.graph import (
    cap,
    decompose,
    dependency_graph_dot,
    dg_processor,
    estimate_dependency_graph,
    minimal_lassos,
    restrict,
    sccs,
    strongly_connected_components,
)
from reladp.parser import parse_relative_trs
from reladp.rewriting import rewrite_successors
from reladp.terms import ROOT, FreshVars, Symbol, Var, app, apply_subst, ground_terms, match_term, subterm_at, variables

x, y = Var("x"), Var("y")

# Node numbering of the canonical (DP(R_divL), DP(R=_mset2)) problem.
DIVL_NODES = [
    "minus(x,O) -> x",
    "minus(s(x),s(y)) -> MINUS(x,y)",
    "div(x,s(O)) -> x",
    "div(s(x),s(y)) -> s(DIV(minus(x,y),s(y)))",
    "div(s(x),s(y)) -> s(div(MINUS(x,y),s(y)))",
    "divL(x,nil) -> x",
    "divL(x,cons(y,xs)) -> DIVL(div(x,y),xs)",
    "divL(x,cons(y,xs)) -> divL(DIV(x,y),xs)",
    "divL(z,cons(x,cons(y,zs))) -> DIVL(z,cons(y,cons(x,zs)))",
]


def test_cap_replaces_defined_subterms_below_the_root():
    div = Symbol("div", 2)
    minus = Symbol("minus", 2)
    t = app("div", app("minus", x, y), app("s", y))
    capped = cap(t, {div, minus}, FreshVars("?c"))
    assert capped == app("div", Var("?c1"), app("s", y))


def test_tarjan_components():
    components = strongly_connected_components({0: [1], 1: [0, 2], 2: []})
    assert sorted(components) == [(0, 1), (2,)]


def test_divl_mset2_graph(system):
    problem = canonical_adp_problem(system("divl_mset2"))
    graph = estimate_dependency_graph(problem)
    assert [adp.show() for adp in graph.nodes] == DIVL_NODES
    assert graph.main_count == 8
    expected = {(8, 8), (8, 6), (8, 7), (6, 6), (6, 7), (7, 3), (7, 4), (3, 3), (3, 4), (4, 0), (4, 1), (1, 1)}
    assert expected <= graph.edges
    assert not any(b == 8 for a, b in graph.edges if a < 6)
    for unannotated in (0, 2, 5):
        assert graph.successors(unannotated) == []
    assert sccs(graph) == [frozenset({1}), frozenset({3}), frozenset({6, 8})]


def test_divl_mset2_decomposition(system):
    problem = canonical_adp_problem(system("divl_mset2"))
    assert minimal_lassos(problem) == []
    d = decompose(problem)
    assert d.lassos == ()
    assert len(d.problems) == 3
    flat_base = flatten(problem.base[0])
    assert flat_base in d.problems[0].base
    assert flat_base in d.problems[1].base
    assert problem.base[0] in d.problems[2].base
    assert [adp.show() for adp in d.problems[2].main] == [DIVL_NODES[6]]


def test_r2_graph_and_lasso(system):
    problem = canonical_adp_problem(system("r2_redex_creating"))
    graph = estimate_dependency_graph(problem)
    assert graph.edges == frozenset({(1, 1), (1, 0)})
    assert sccs(graph) == [frozenset({1})]
    assert minimal_lassos(problem) == [frozenset({0, 1})]
    assert dg_processor(problem) == [problem]


def test_nothing_left_without_annotations(system):
    full = canonical_adp_problem(system("divl_mset2"))
    assert dg_processor(AdpProblem(flatten(full.main), flatten(full.base))) == []


def test_no_lassos_without_base(system):
    assert minimal_lassos(canonical_adp_problem(system("divl_plain"))) == []


def test_restrict_flattens_everything_outside():
    problem = AdpProblem()
    assert restrict(problem, frozenset()) == problem


def test_sub_problems_keep_the_rules(system):
    problem = canonical_adp_problem(system("divl_mset2"))
    rules = {a.rule for a in problem.adps}
    for sub in dg_processor(problem):
        assert {a.rule for a in sub.adps} == rules


def test_dot_export(system):
    source = dependency_graph_dot(canonical_adp_problem(system("r2_redex_creating")))
    assert "shape=box" in source
    assert "shape=ellipse" in source
    assert "n1 -> n0" in source
    assert "n1 -> n1" in source


TINY_RULES = [
    "a -> f(a)",
    "f(x) -> g(x)",
    "g(x) -> f(x)",
    "f(x) -> x",
    "f(a) -> a",
    "g(f(x)) -> f(g(x))",
    "f(g(x)) -> g(f(x))",
    "g(x) -> g(g(x))",
    "f(f(x)) -> g(x)",
    "g(a) -> f(a)",
]


def below_root_reducts(trs, t, steps):
    reached = {t}
    frontier = {t}
    for _ in range(steps):
        frontier = {s.result for u in frontier for s in rewrite_successors(trs, u) if s.position != ROOT}
        frontier -= reached
        reached |= frontier
    return reached


def concrete_edges(trs, problem, steps=4):
    """Edges witnessed by ground chain steps: A1 at the root, a few steps
    strictly below the root of one of its annotated subterms, then A2 at
    the root of that subterm."""
    nodes = problem.main + problem.base
    instances = ground_terms(trs.signature, 1)
    edges = set()
    for i, source in enumerate(nodes):
        names = variables(source.lhs)
        for combo in product(instances, repeat=len(names)):
            rhs = apply_subst(source.rhs.plain, dict(zip(names, combo)))
            for p in source.annotations:
                for u in below_root_reducts(trs, subterm_at(rhs, p), steps):
                    for j, target in enumerate(nodes):
                        if match_term(target.lhs, u) is not None:
                            edges.add((i, j))
    return edges


@pytest.mark.slow
@pytest.mark.parametrize("main", TINY_RULES)
def test_estimated_graph_contains_every_concrete_edge(main):
    seen = 0
    for base in TINY_RULES:
        lhs, rhs = base.split(" -> ")
        trs = parse_relative_trs(f"(VAR x)\n(RULES\n  {main}\n  {lhs} ->= {rhs}\n)")
        problem = canonical_adp_problem(trs)
        concrete = concrete_edges(trs, problem)
        assert concrete <= estimate_dependency_graph(problem).edges, (main, base)
        seen += len(concrete)
    assert seen > 0
