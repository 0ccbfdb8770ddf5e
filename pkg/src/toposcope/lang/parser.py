"""Recursive-descent parser for the formula language.

Grammar (``not`` binds tightest, then ``and``, ``or``, and the
right-associative ``=>``; binder bodies extend as far right as possible)::

    formula := disj ("=>" formula)?
    disj    := conj ("or" conj)*
    conj    := unary ("and" unary)*
    unary   := "not" unary | ("exists" | "forall") IDENT ":" IDENT "." formula | atom
    atom    := "true" | "false" | "(" formula ")" | term "=" term | IDENT ("(" terms ")")?
    term    := IDENT ("(" terms? ")")?
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ToposError
from .syntax import (
    And,
    App,
    Bottom,
    Eq,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    Rel,
    Span,
    Top,
    Var,
)

KEYWORDS = {"true", "false", "not", "and", "or", "exists", "forall"}

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<arrow>=>)|(?P<punct>[():,.=])|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
)


class FormulaSyntaxError(ToposError):
    def __init__(self, message: str, line: int, col: int, expected=(), offset: int = 0):
        self.line = line
        self.col = col
        self.offset = offset
        self.expected = frozenset(expected)
        exp = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{line}:{col}: {message}{exp}")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword text, punctuation text, "ident" or "eof"
    text: str
    start: int
    end: int
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, offset=pos)
        kind = m.lastgroup
        word = m.group()
        if kind == "ws":
            for i, ch in enumerate(word):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            if kind == "ident":
                kind = word if word in KEYWORDS else "ident"
            else:
                kind = word
            tokens.append(Token(kind, word, pos, m.end(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", pos, pos, line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, expected):
        expected = {"identifier" if e == "ident" else e for e in expected}
        t = self.tok
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise FormulaSyntaxError(f"unexpected {what}", t.line, t.col, expected, offset=t.start)

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail({kind})
        return self.advance()

    def span_from(self, first: Token) -> Span:
        last = self.tokens[self.i - 1]
        return Span(first.start, last.end, first.line, first.col)

    def formula(self):
        first = self.tok
        left = self.disj()
        if self.tok.kind == "=>":
            self.advance()
            right = self.formula()
            return Implies(left, right, span=self.span_from(first))
        return left

    def disj(self):
        first = self.tok
        left = self.conj()
        while self.tok.kind == "or":
            self.advance()
            left = Or(left, self.conj(), span=self.span_from(first))
        return left

    def conj(self):
        first = self.tok
        left = self.unary()
        while self.tok.kind == "and":
            self.advance()
            left = And(left, self.unary(), span=self.span_from(first))
        return left

    def unary(self):
        first = self.tok
        if first.kind == "not":
            self.advance()
            return Not(self.unary(), span=self.span_from(first))
        if first.kind in ("exists", "forall"):
            self.advance()
            var = self.expect("ident").text
            self.expect(":")
            sort = self.expect("ident").text
            self.expect(".")
            body = self.formula()
            node = Exists if first.kind == "exists" else Forall
            return node(var, sort, body, span=self.span_from(first))
        return self.atom()

    def atom(self):
        first = self.tok
        if first.kind == "true":
            self.advance()
            return Top(span=self.span_from(first))
        if first.kind == "false":
            self.advance()
            return Bottom(span=self.span_from(first))
        if first.kind == "(":
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        if first.kind != "ident":
            self.fail({"true", "false", "not", "exists", "forall", "(", "identifier"})
        term = self.term()
        if self.tok.kind == "=":
            self.advance()
            right = self.term()
            return Eq(term, right, span=self.span_from(first))
        if isinstance(term, Var):
            return Rel(term.name, (), span=term.span)
        return Rel(term.fn, term.args, span=term.span)

    def term(self):
        first = self.tok
        if first.kind != "ident":
            self.fail({"identifier"})
        name = self.advance().text
        if self.tok.kind != "(":
            return Var(name, span=self.span_from(first))
        self.advance()
        args = []
        if self.tok.kind != ")":
            args.append(self.term())
            while self.tok.kind == ",":
                self.advance()
                args.append(self.term())
        if self.tok.kind != ")":
            self.fail({",", ")"})
        self.advance()
        return App(name, tuple(args), span=self.span_from(first))


def parse(text: str):
    """Parse a formula; raises :class:`FormulaSyntaxError` with position info."""
    p = _Parser(text)
    phi = p.formula()
    if p.tok.kind != "eof":
        p.fail({"and", "or", "=>", "end of input"})
    return phi


def parse_term(text: str):
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "eof":
        p.fail({"end of input"})
    return t
