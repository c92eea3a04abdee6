import pytest

from reladp.errors import TrsParseError
from reladp.parser import parse_relative_trs, print_trs, read_trs
from reladp.terms import Var, app, const
from reladp.trs import Rule


def test_main_and_base_rules(system):
    trs = system("divl_mset2")
    assert len(trs.main) == 6
    assert len(trs.base) == 1
    assert trs.base[0].root.name == "divL"
    assert {f.name for f in trs.defined} == {"minus", "div", "divL"}
    assert {f.name for f in trs.constructors} == {"O", "s", "nil", "cons"}


def test_comments_are_skipped():
    trs = parse_relative_trs("(COMMENT a (nested) comment)\n(RULES\n  a -> b\n)")
    assert trs.main == (Rule(const("a"), const("b")),)
    assert trs.base == ()


def test_base_only_system():
    trs = parse_relative_trs("(VAR x)(RULES f(x) ->= g(x))")
    assert trs.main == ()
    assert trs.base == (Rule(app("f", Var("x")), app("g", Var("x"))),)


@pytest.mark.parametrize(
    "text",
    [
        "(VAR x)(RULES x -> a)",
        "(VAR x)(RULES a -> x)",
        "(VAR x y)(RULES f(x) -> g(y))",
        "(VAR x)(RULES f(x) -> x(a))",
        "(RULES f(a) -> f(a, a))",
        "(RULES a => b)",
        "(RULES a -> b",
        "(THEORY a)",
        "(RULES a b)",
    ],
)
def test_malformed_input(text):
    with pytest.raises(TrsParseError):
        parse_relative_trs(text)


def test_error_carries_line_and_column():
    with pytest.raises(TrsParseError) as info:
        parse_relative_trs("(VAR x y)\n(RULES\n  f(x) -> g(y)\n)")
    assert info.value.line == 3
    assert info.value.column == 3
    assert str(info.value).startswith("line 3, column 3:")


def test_printed_system_parses_back(system):
    for name in ("divl_mset2", "r1_duplicating", "r4_cycle"):
        trs = system(name)
        assert parse_relative_trs(print_trs(trs)) == trs


def test_read_from_file(tmp_path):
    path = tmp_path / "tiny.trs"
    path.write_text("(VAR x)\n(RULES\n  f(x) -> x\n)\n")
    trs = read_trs(path)
    assert trs.main == (Rule(app("f", Var("x")), Var("x")),)
    with pytest.raises(OSError):
        read_trs(tmp_path / "missing.trs")


def test_undecodable_file(tmp_path):
    path = tmp_path / "binary.trs"
    path.write_bytes(b"\xff\xfe(RULES a -> b)")
    with pytest.raises(TrsParseError, match="UTF-8"):
        read_trs(path)


def test_deep_nesting_is_a_parse_error():
    deep = "f(" * 20000 + "a" + ")" * 20000
    with pytest.raises(TrsParseError, match="nested too deeply"):
        parse_relative_trs(f"(RULES\n  {deep} -> a\n)")
