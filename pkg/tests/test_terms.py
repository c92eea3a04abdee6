import random
from itertools import product

import pytest

from reladp.terms import (
    App,
    ROOT,
    FreshVars,
    Symbol,
    Var,
    app,
    apply_subst,
    const,
    depth,
    function_positions,
    ground_terms,
    match_term,
    positions,
    rename,
    replace_at,
    size,
    subterm_at,
    term_str,
    unify_terms,
    var_occurrences,
    variables,
    variable_positions,
)

x, y, z = Var("x"), Var("y"), Var("z")
a, b = const("a"), const("b")


def test_positions_are_preorder_and_lexicographic():
    t = app("f", app("g", x), a)
    assert positions(t) == [ROOT, (1,), (1, 1), (2,)]
    assert positions(x) == [ROOT]
    assert function_positions(x) == []
    assert positions(t) == sorted(positions(t))
    assert function_positions(t) == [(), (1,), (2,)]
    assert variable_positions(t) == [(1, 1)]


def test_subterm_and_replace():
    t = app("f", app("g", x), a)
    assert subterm_at(t, (1, 1)) == x
    assert replace_at(t, (1,), b) == app("f", b, a)
    assert replace_at(t, (), b) == b
    with pytest.raises(IndexError):
        subterm_at(t, (3,))
    with pytest.raises(IndexError):
        replace_at(t, (1, 1, 1), a)


def test_arity_is_checked():
    with pytest.raises(ValueError):
        App(Symbol("f", 2), (a,))


def test_variables_in_first_occurrence_order():
    t = app("f", y, app("g", x, y))
    assert variables(t) == ["y", "x"]
    assert var_occurrences(t) == {"y": 2, "x": 1}
    assert size(t) == 5
    assert depth(t) == 2


def test_match():
    assert match_term(app("f", x, x), app("f", a, a)) == {"x": a}
    assert match_term(app("f", x, x), app("f", a, b)) is None
    assert match_term(app("f", x), app("g", a)) is None
    assert match_term(x, app("g", a)) == {"x": app("g", a)}


def test_unifier_is_most_general_and_idempotent():
    s = app("f", x, app("g", y))
    t = app("f", app("g", z), x)
    sigma = unify_terms(s, t)
    assert sigma is not None
    assert apply_subst(s, sigma) == apply_subst(t, sigma)
    assert apply_subst(apply_subst(s, sigma), sigma) == apply_subst(s, sigma)
    # One variable of {y, z} survives, so the common instance keeps a variable.
    assert len(variables(apply_subst(s, sigma))) == 1


@pytest.mark.parametrize(
    "s, t",
    [
        (x, app("f", x)),
        (app("f", a), app("g", a)),
        (app("f", x, x), app("f", a, b)),
    ],
)
def test_unification_failures(s, t):
    assert unify_terms(s, t) is None


def test_rename_is_consistent():
    t = app("f", x, x, y)
    r = rename(t, FreshVars("?v"))
    assert r == app("f", Var("?v1"), Var("?v1"), Var("?v2"))


def test_sharp_display_avoids_clashes():
    div = Symbol("div", 2, sharp=True)
    assert div.display() == "DIV"
    assert Symbol("f", 1, sharp=True).display({"F"}) == "f#"
    assert Symbol("O", 0, sharp=True).display() == "O#"
    assert term_str(App(div, (x, y))) == "DIV(x,y)"


def test_ground_terms_shallowest_first():
    s = Symbol("s", 1)
    assert ground_terms({Symbol("a", 0), s}, 2) == [a, app("s", a), app("s", app("s", a))]


SMALL_SIGNATURE = [Symbol("a", 0), Symbol("f", 1), Symbol("g", 2)]


def random_term(rng, depth, names=("x", "y", "z")):
    if depth == 0 or rng.random() < 0.3:
        return Var(rng.choice(names)) if rng.random() < 0.5 else a
    f = rng.choice(SMALL_SIGNATURE[1:])
    return App(f, tuple(random_term(rng, depth - 1, names) for _ in range(f.arity)))


@pytest.mark.parametrize("seed", range(50))
def test_match_recovers_the_substitution(seed):
    rng = random.Random(seed)
    pattern = random_term(rng, 3)
    sigma = {name: random_term(rng, 2, ("u", "v")) for name in variables(pattern)}
    subject = apply_subst(pattern, sigma)
    assert match_term(pattern, subject) == sigma
    other = random_term(rng, 3, ("u", "v"))
    found = match_term(pattern, other)
    if found is not None:
        assert apply_subst(pattern, found) == other


def small_terms():
    """Every term of size at most 3 over a, f/1, g/2 and the variables x, y."""
    size1 = [x, y, a]
    size2 = [app("f", t) for t in size1]
    size3 = [app("f", t) for t in size2] + [app("g", s, t) for s, t in product(size1, repeat=2)]
    return size1 + size2 + size3


def test_unifiable_exactly_when_a_ground_instance_agrees():
    # Common instances of these pairs have depth at most 2, so grounding the
    # variables with terms of depth at most 2 decides unifiability.
    pool = ground_terms(SMALL_SIGNATURE, 2)
    grounders = [{"x": gx, "y": gy} for gx, gy in product(pool, repeat=2)]
    terms = small_terms()
    assert len(terms) == 18
    unifiable = 0
    for s, t in product(terms, repeat=2):
        equalizers = [theta for theta in grounders if apply_subst(s, theta) == apply_subst(t, theta)]
        sigma = unify_terms(s, t)
        assert (sigma is not None) == bool(equalizers), (s, t)
        if sigma is None:
            continue
        unifiable += 1
        common = apply_subst(s, sigma)
        assert common == apply_subst(t, sigma)
        for theta in equalizers:
            assert match_term(common, apply_subst(s, theta)) is not None, (s, t, theta)
    assert 0 < unifiable < len(terms) ** 2
