"""Reader and canonical printer for TPDB-style relative .trs files.

    (VAR x y zs)
    (RULES
      minus(x, O) -> x
      cons(x, cons(y, zs)) ->= cons(y, cons(x, zs))
    )

`->` marks main rules, `->=` base rules. Identifiers declared in VAR are
variables; every other identifier is a function symbol whose arity is fixed by
its first occurrence. COMMENT blocks are skipped.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Dict

from reladp.errors import RuleError, TrsParseError
from reladp.terms import App, Symbol, Term, Var, variables
from reladp.trs import RelativeTrs, Rule

TOKEN = re.compile(r"\s+|(?P<tok>->=|->|[(),]|[A-Za-z0-9_']+)")


def _strip_comments(text) -> str:
    # Blank out (COMMENT ...) blocks, keeping newlines so positions stay valid.
    out = list(text)
    for m in re.finditer(r"\(\s*COMMENT\b", text):
        if out[m.start()] == " ":
            continue
        level, i = 0, m.start()
        while i < len(text):
            if text[i] == "(":
                level += 1
            elif text[i] == ")":
                level -= 1
                if level == 0:
                    break
            i += 1
        for j in range(m.start(), min(i + 1, len(text))):
            if out[j] != "\n":
                out[j] = " "
    return "".join(out)


def _tokenize(text):
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = TOKEN.match(text, pos)
        if m is None:
            raise TrsParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        if m.group("tok"):
            tokens.append((m.group("tok"), line, pos - line_start + 1))
        chunk = m.group(0)
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0
        self.variables = set()
        self.arities: Dict[str, int] = {}

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def where(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i][1:]
        if self.tokens:
            _, line, col = self.tokens[-1]
            return line, col + 1
        return 1, 1

    def error(self, message):
        return TrsParseError(message, *self.where())

    def expect(self, token):
        if self.peek() != token:
            found = self.peek() or "end of input"
            raise self.error(f"expected {token!r}, found {found!r}")
        self.i += 1

    def identifier(self):
        tok = self.peek()
        if tok is None or not re.fullmatch(r"[A-Za-z0-9_']+", tok):
            raise self.error(f"expected an identifier, found {tok or 'end of input'!r}")
        self.i += 1
        return tok

    def parse(self):
        main, base = [], []
        while self.peek() is not None:
            self.expect("(")
            section = self.identifier()
            if section == "VAR":
                while self.peek() not in (")", None):
                    self.variables.add(self.identifier())
            elif section == "RULES":
                while self.peek() not in (")", None):
                    line, col = self.where()
                    rule, relative = self.rule()
                    try:
                        rule = Rule(*rule)
                    except RuleError as e:
                        raise TrsParseError(str(e), line, col) from None
                    (base if relative else main).append(rule)
            else:
                raise self.error(f"unknown section {section!r}")
            self.expect(")")
        return RelativeTrs(tuple(main), tuple(base))

    def rule(self):
        line, col = self.where()
        lhs = self.term()
        if isinstance(lhs, Var):
            raise TrsParseError(f"left-hand side is the variable {lhs.name}", line, col)
        arrow = self.peek()
        if arrow not in ("->", "->="):
            raise self.error(f"expected '->' or '->=', found {arrow or 'end of input'!r}")
        self.i += 1
        rhs = self.term()
        missing = [x for x in variables(rhs) if x not in variables(lhs)]
        if missing:
            raise TrsParseError(f"variable {missing[0]} of the right-hand side does not occur on the left", line, col)
        return (lhs, rhs), arrow == "->="

    def term(self) -> Term:
        line, col = self.where()
        name = self.identifier()
        args = []
        applied = self.peek() == "("
        if applied:
            self.i += 1
            if self.peek() != ")":
                args.append(self.term())
                while self.peek() == ",":
                    self.i += 1
                    args.append(self.term())
            self.expect(")")
        if name in self.variables:
            if applied:
                raise TrsParseError(f"variable {name} applied to arguments", line, col)
            return Var(name)
        known = self.arities.setdefault(name, len(args))
        if known != len(args):
            raise TrsParseError(f"symbol {name} used with arity {len(args)} but earlier with arity {known}", line, col)
        return App(Symbol(name, len(args)), tuple(args))


def parse_relative_trs(text: str) -> RelativeTrs:
    try:
        return _Parser(_tokenize(_strip_comments(text))).parse()
    except RecursionError:
        raise TrsParseError("terms are nested too deeply") from None


def read_trs(path) -> RelativeTrs:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise TrsParseError(f"{path} is not valid UTF-8 ({e.reason} at byte {e.start})") from None
    return parse_relative_trs(text)


def print_trs(trs: RelativeTrs) -> str:
    names = []
    for rule in trs.rules:
        for x in variables(rule.lhs):
            if x not in names:
                names.append(x)
    lines = []
    if names:
        lines.append(f"(VAR {' '.join(sorted(names))})")
    lines.append("(RULES")
    lines += [f"  {r.show('->')}" for r in trs.main]
    lines += [f"  {r.show('->=')}" for r in trs.base]
    lines.append(")")
    return "\n".join(lines) + "\n"
