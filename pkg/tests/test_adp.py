import pytest

from reladp.adp import (
    Adp,
    AdpProblem,
    AnnotatedTerm,
    ann_of_rhs,
    annotated_subterms,
    canonical_adp_problem,
    flatten,
    split_adps,
)
from reladp.errors import AdpError
from reladp.terms import C0, C2, App, Var, app, const
from reladp.trs import BASE, MAIN

x, y = Var("x"), Var("y")
f, a = const("f"), const("a")


def shown(adps):
    return {adp.show() for adp in adps}


def test_canonical_r2(system):
    problem = canonical_adp_problem(system("r2_redex_creating"))
    assert shown(problem.main) == {"a -> b"}
    assert shown(problem.base) == {"f -> d(F,A)"}


def test_canonical_r3(system):
    problem = canonical_adp_problem(system("r3_nested"))
    assert shown(problem.main) == {"a(x) -> b(x)"}
    assert shown(problem.base) == {"f -> A(F)"}


def test_canonical_div_rule_gets_one_adp_per_call(system):
    problem = canonical_adp_problem(system("divl_plain"))
    div_adps = [adp.show() for adp in problem.main if adp.lhs.symbol.name == "div" and adp.annotations]
    assert sorted(div_adps) == sorted(
        [
            "div(s(x),s(y)) -> s(DIV(minus(x,y),s(y)))",
            "div(s(x),s(y)) -> s(div(MINUS(x,y),s(y)))",
        ]
    )
    assert all(len(adp.annotations) <= 1 for adp in problem.main)
    assert problem.base == ()


def test_canonical_base_takes_pairs_of_positions(parse):
    trs = parse("(RULES\n a -> b\n f ->= g(a, a, a)\n)")
    problem = canonical_adp_problem(trs)
    assert [adp.annotations for adp in problem.base] == [((1,), (2,)), ((1,), (3,)), ((2,), (3,))]


def test_canonical_rejects_duplicating_base(system):
    with pytest.raises(AdpError):
        canonical_adp_problem(system("r1_duplicating"))


def test_annotation_positions_are_validated():
    with pytest.raises(AdpError):
        AnnotatedTerm(app("g", x), ((1,),))
    with pytest.raises(AdpError):
        AnnotatedTerm(app("g", x), ((2,),))


def test_flatten():
    t = AnnotatedTerm(app("f", app("f", x)), ((), (1,)))
    assert t.show() == "F(F(x))"
    assert flatten(t) == AnnotatedTerm(app("f", app("f", x)))
    assert flatten(flatten(t)) == flatten(t)
    adp = Adp(f, AnnotatedTerm(app("d", f, a), ((1,), (2,))), BASE)
    assert shown(flatten((adp,))) == {"f -> d(f,a)"}
    with pytest.raises(TypeError):
        flatten("f")


def test_annotated_subterms_in_lex_order():
    t = AnnotatedTerm(app("d", f, a), ((2,), (1,)))
    assert annotated_subterms(t) == [((1,), f), ((2,), a)]
    assert annotated_subterms(AnnotatedTerm(app("d", f, a))) == []
    nested = AnnotatedTerm(app("f", app("f", x)), ((1,),))
    assert annotated_subterms(nested) == [((1,), app("f", x))]


def test_ann_of_rhs():
    assert ann_of_rhs(AnnotatedTerm(const("b"))) == App(C0)
    single = ann_of_rhs(AnnotatedTerm(app("s", app("d", x, y)), ((1,),)))
    assert single.symbol.sharp and single.symbol.name == "d"
    pair = ann_of_rhs(AnnotatedTerm(app("d", f, a), ((1,), (2,))))
    assert pair.symbol == C2
    assert [arg.symbol.name for arg in pair.args] == ["f", "a"]
    with pytest.raises(AdpError):
        ann_of_rhs(AnnotatedTerm(app("g", a, a, a), ((1,), (2,), (3,))))


def test_split():
    base = Adp(
        app("f", app("s", y)),
        AnnotatedTerm(app("d", app("f", y), a), ((1,), (2,))),
        BASE,
    )
    assert shown(split_adps([base])) == {"f(s(y)) -> d(F(y),a)", "f(s(y)) -> d(f(y),A)"}
    assert split_adps([Adp(a, AnnotatedTerm(const("b")), MAIN)]) == ()
    nested = Adp(f, AnnotatedTerm(app("a", f), ((), (1,))), BASE)
    assert shown(split_adps([nested])) == {"f -> A(f)", "f -> a(F)"}
    assert all(len(adp.annotations) == 1 for adp in split_adps([base, nested]))


def test_problem_keeps_duplicating_base_only_when_flat():
    dup = app("d", x, x)
    flat = Adp(app("g", x), AnnotatedTerm(dup), BASE)
    assert AdpProblem((), (flat,)).base == (flat,)
    with pytest.raises(AdpError):
        AdpProblem((), (Adp(app("g", x), AnnotatedTerm(app("d", app("g", x), x), ((1,),)), BASE),))


def test_problem_summary(system):
    problem = canonical_adp_problem(system("r2_redex_creating"))
    assert problem.show() == "({a -> b}, {f -> d(F,A)})"
    assert AdpProblem((), problem.base).show() == "(∅, {f -> d(F,A)})"
