"""Expression-language parser and program evaluator.

A program is a sequence of newline- (or ``;``-) separated statements::

    odd const mu nonzero        # symbol declarations
    even param a nonzero
    even const eps pm1
    fn Phi(x, t, th1, th2) even # function declaration
    D1(D1(Phi)) - dx(Phi)       # expression statements evaluate to
    th1*th2 + th2*th1           # canonical form

The coordinates ``x``, ``t`` (even) and ``th1``, ``th2`` (odd) are
predeclared.  Function occurrences take an optional derivative suffix
``Phi_x,th1`` (slot names, first applied first) and an optional
argument list ``f[a*x - t, th1]`` for composed occurrences.  The
operator names D1, D2, Q1, Q2, dx, dt, dth1, dth2 are reserved and
applied with parentheses.  ``^`` raises to an integer or parenthesised
rational power, and ``/`` divides (even denominators only).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebra import (EVEN, ODD, AlgebraError, Context, DeclarationError,
                      Expr, FunctionDecl, Symbol, as_expr, atom, multiply,
                      occurrence, power)
from .calculus import OperatorAlgebra, superspace

OPERATOR_NAMES = ("D1", "D2", "Q1", "Q2", "dx", "dt", "dth1", "dth2")
KEYWORDS = ("odd", "even", "const", "param", "coord", "fn", "nonzero", "pm1")


class ParseError(AlgebraError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # NAME INT OP NEWLINE EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>[\n;])
  | (?P<int>\d+)
  | (?P<name>[A-Za-z][A-Za-z0-9]*)
  | (?P<op>[-+*/^()\[\],_])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "newline":
            tokens.append(Token("NEWLINE", value, line, col))
            if value == "\n":
                line += 1
                col = 1
            else:
                col += 1
        elif kind in ("ws", "comment"):
            col += len(value)
        else:
            kmap = {"int": "INT", "name": "NAME", "op": "OP"}
            tokens.append(Token(kmap[kind], value, line, col))
            col += len(value)
        pos = m.end()
    tokens.append(Token("EOF", "", line, col))
    return tokens


@dataclass
class Statement:
    kind: str          # "decl" | "fn" | "expr"
    source: str
    expr: Optional[Expr] = None


@dataclass
class Program:
    ctx: Context
    statements: list[Statement] = field(default_factory=list)

    @property
    def expressions(self) -> list[Expr]:
        return [s.expr for s in self.statements if s.kind == "expr"]


class Parser:
    def __init__(self, text: str, ctx: Optional[Context] = None):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.ctx = superspace(ctx)
        self.ops = OperatorAlgebra(self.ctx)

    # -- token plumbing ------------------------------------------------------
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {tok.text!r}", tok.line, tok.col)
        return self.advance()

    def at_op(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "OP" and tok.text == text

    # -- program -------------------------------------------------------------
    def parse_program(self) -> Program:
        prog = Program(self.ctx)
        while True:
            while self.peek().kind == "NEWLINE":
                self.advance()
            tok = self.peek()
            if tok.kind == "EOF":
                return prog
            start = self.pos
            if tok.kind == "NAME" and tok.text in ("odd", "even"):
                self.parse_decl()
                prog.statements.append(Statement("decl", self._slice(start)))
            elif tok.kind == "NAME" and tok.text == "fn":
                self.parse_fn()
                prog.statements.append(Statement("fn", self._slice(start)))
            else:
                e = self.parse_expr()
                prog.statements.append(Statement("expr", self._slice(start), e))
            tok = self.peek()
            if tok.kind not in ("NEWLINE", "EOF"):
                raise ParseError(f"unexpected {tok.text!r} after statement",
                                 tok.line, tok.col)

    def _slice(self, start: int) -> str:
        toks = self.tokens[start:self.pos]
        return " ".join(t.text for t in toks)

    def parse_decl(self):
        parity = EVEN if self.advance().text == "even" else ODD
        kind_tok = self.expect("NAME")
        if kind_tok.text not in ("const", "param", "coord"):
            raise ParseError(f"expected const/param/coord, found {kind_tok.text!r}",
                             kind_tok.line, kind_tok.col)
        name_tok = self.expect("NAME")
        self._check_fresh(name_tok)
        nonzero = square_one = False
        if self.peek().kind == "NAME" and self.peek().text in ("nonzero", "pm1"):
            flag = self.advance().text
            nonzero = True
            square_one = flag == "pm1"
        if square_one and parity == ODD:
            raise ParseError("pm1 requires an even symbol", name_tok.line, name_tok.col)
        self.ctx.symbol(name_tok.text, parity, kind_tok.text,
                        nonzero=nonzero, square_one=square_one)

    def parse_fn(self):
        self.advance()  # 'fn'
        name_tok = self.expect("NAME")
        self._check_fresh(name_tok)
        self.expect("OP", "(")
        slots = []
        while True:
            arg = self.expect("NAME")
            try:
                sym = self.ctx.symbols[arg.text]
            except KeyError:
                raise ParseError(f"undeclared coordinate {arg.text!r}",
                                 arg.line, arg.col) from None
            slots.append(sym)
            if self.at_op(","):
                self.advance()
                continue
            break
        self.expect("OP", ")")
        parity_tok = self.expect("NAME")
        if parity_tok.text not in ("odd", "even"):
            raise ParseError("expected parity odd/even after argument list",
                             parity_tok.line, parity_tok.col)
        self.ctx.function(name_tok.text, slots,
                          EVEN if parity_tok.text == "even" else ODD)

    def _check_fresh(self, tok: Token):
        if tok.text in KEYWORDS or tok.text in OPERATOR_NAMES:
            raise ParseError(f"{tok.text!r} is reserved", tok.line, tok.col)
        if tok.text in self.ctx:
            raise ParseError(f"{tok.text!r} is already declared", tok.line, tok.col)

    # -- expressions ----------------------------------------------------------
    def parse_expr(self) -> Expr:
        e = self.parse_term()
        while self.peek().kind == "OP" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.parse_term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def parse_term(self) -> Expr:
        e = self.parse_unary()
        while self.peek().kind == "OP" and self.peek().text in "*/":
            op = self.advance().text
            rhs = self.parse_unary()
            if op == "*":
                e = multiply(e, rhs)
            else:
                tok = self.peek()
                try:
                    e = multiply(e, power(rhs, -1))
                except AlgebraError as err:
                    raise ParseError(str(err), tok.line, tok.col) from None
        return e

    def parse_unary(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return -self.parse_unary()
        if self.at_op("+"):
            self.advance()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.at_op("^"):
            tok = self.advance()
            exp = self.parse_exponent()
            try:
                return power(base, exp)
            except AlgebraError as err:
                raise ParseError(str(err), tok.line, tok.col) from None
        return base

    def parse_exponent(self) -> Fraction:
        if self.peek().kind == "INT":
            return Fraction(int(self.advance().text))
        self.expect("OP", "(")
        sign = 1
        if self.at_op("-"):
            self.advance()
            sign = -1
        num = int(self.expect("INT").text)
        den = 1
        if self.at_op("/"):
            self.advance()
            den = int(self.expect("INT").text)
        self.expect("OP", ")")
        return Fraction(sign * num, den)

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "INT":
            self.advance()
            return as_expr(int(tok.text))
        if tok.kind == "OP" and tok.text == "(":
            self.advance()
            e = self.parse_expr()
            self.expect("OP", ")")
            return e
        if tok.kind != "NAME":
            raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)
        name = self.advance().text
        if name in OPERATOR_NAMES:
            self.expect("OP", "(")
            arg = self.parse_expr()
            self.expect("OP", ")")
            return self.ops.named(name)(arg)
        try:
            decl = self.ctx.lookup(name)
        except DeclarationError:
            raise ParseError(f"undeclared identifier {name!r}",
                             tok.line, tok.col) from None
        if isinstance(decl, Symbol):
            return atom(decl)
        return self.parse_occurrence(decl, tok)

    def parse_occurrence(self, fn: FunctionDecl, tok: Token) -> Expr:
        derivs: list[str] = []
        if self.at_op("_"):
            self.advance()
            slot_names = {n for n, _ in fn.slots}
            d = self.expect("NAME")
            if d.text not in slot_names:
                raise ParseError(f"{fn.name!r} has no slot {d.text!r}", d.line, d.col)
            derivs.append(d.text)
            while (self.at_op(",") and self.tokens[self.pos + 1].kind == "NAME"
                   and self.tokens[self.pos + 1].text in slot_names):
                self.advance()
                derivs.append(self.advance().text)
        args = None
        if self.at_op("["):
            self.advance()
            args = [self.parse_expr()]
            while self.at_op(","):
                self.advance()
                args.append(self.parse_expr())
            self.expect("OP", "]")
            if len(args) != len(fn.slots):
                raise ParseError(
                    f"{fn.name!r} takes {len(fn.slots)} arguments, got {len(args)}",
                    tok.line, tok.col)
            ambient = all(
                a == atom(self.ctx.symbols.get(n, object())) if n in self.ctx.symbols
                else False
                for a, (n, _) in zip(args, fn.slots))
            if ambient:
                args = None
        try:
            return occurrence(fn, tuple(derivs),
                              args=None if args is None else tuple(args))
        except AlgebraError as err:
            raise ParseError(str(err), tok.line, tok.col) from None


def parse_program(text: str, ctx: Optional[Context] = None) -> Program:
    return Parser(text, ctx).parse_program()


def parse_expression(text: str, ctx: Optional[Context] = None) -> Expr:
    parser = Parser(text, ctx)
    e = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(f"unexpected trailing {tok.text!r}", tok.line, tok.col)
    return e
