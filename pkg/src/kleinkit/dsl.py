"""Assertion-script language: lexer, parser, AST, and renderer.

Grammar (statements end with ``;``, ``#`` starts a line comment)::

    script     := statement*
    statement  := "mode" IDENT ("boson" | "fermion") ";"
                | "exchange" IDENT IDENT "=" expr ";"
                | "q" ("formal" | expr) ";"
                | "let" IDENT "=" expr ";"
                | "assert_zero" expr ";"
                | "assert_equal" expr "," expr ";"
                | "verify_map" IDENT ["expect" expectation] ";"
                | "numeric" clause+ ";"
    expectation:= "all" "=" expr | IDENT IDENT "=" expr ("," IDENT IDENT "=" expr)*
    clause     := "dim" INT | "theta" ratio ("," ratio)* | "tol" NUMBER
    ratio      := ["-"] INT ["/" INT]
    expr       := term (("+" | "-") term)*
    term       := unary ("*" unary)*
    unary      := "-" unary | power
    power      := primary ["^" ["-"] INT]
    primary    := "(" expr ")" | INT ["/" INT] | "q"
                | "ann" "(" IDENT ")" | "cre" "(" IDENT ")" | "adj" "(" expr ")"
                | "phase" "[" IDENT ":" ["-"] INT ("," IDENT ":" ["-"] INT)* "]"
                | "comm" "(" expr "," expr ")" | "acomm" "(" expr "," expr ")"
                | "qcomm" "(" expr "," expr "," expr ")"
                | "map" "(" IDENT "," expr ")"
                | IDENT

Conventions: ``theta`` values are multiples of pi, written as exact rationals
(``1, 1/3, 2/7`` means pi, pi/3, 2pi/7); catalog names use underscores in
scripts (``total_parity_on_b``) and are translated to the hyphenated catalog
form by the runner; ``map(name, e)`` applies a catalog dressing to an
expression; ``q`` inside an expression is the deformation parameter itself.

Parsing is whole-script: the first failure raises :class:`ParseError` with a
line/column position and the set of token kinds that would have been accepted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

KEYWORDS = frozenset(
    {
        "mode",
        "boson",
        "fermion",
        "exchange",
        "q",
        "formal",
        "let",
        "ann",
        "cre",
        "adj",
        "phase",
        "comm",
        "acomm",
        "qcomm",
        "map",
        "assert_zero",
        "assert_equal",
        "verify_map",
        "numeric",
        "dim",
        "theta",
        "tol",
    }
)

_TOKEN_RE = re.compile(
    r"""
    (?P<WS>[ \t\r]+)
  | (?P<NL>\n)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<NUMBER>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<INT>\d+)
  | (?P<IDENT>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<PUNCT>[;,:=()\[\]^*+\-/])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    """Lexical or syntactic failure with position and expected-token set."""

    def __init__(self, line: int, column: int, message: str, expected: tuple[str, ...] = ()):
        self.line = line
        self.column = column
        self.message = message
        self.expected = tuple(expected)
        suffix = f" (expected: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"line {line}, col {column}: {message}{suffix}")


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        pos = m.end()
        if kind == "NL":
            line += 1
            line_start = pos
            continue
        if kind in ("WS", "COMMENT"):
            continue
        if kind == "IDENT" and value in KEYWORDS:
            kind = value
        elif kind == "PUNCT":
            kind = value
        tokens.append(Token(kind, value, line, col))
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


# --- expression AST ----------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class QPow:
    exponent: int


@dataclass(frozen=True)
class Ann:
    mode: str


@dataclass(frozen=True)
class Cre:
    mode: str


@dataclass(frozen=True)
class Adj:
    arg: "Expr"


@dataclass(frozen=True)
class Phase:
    items: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Comm:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class AComm:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class QComm:
    left: "Expr"
    right: "Expr"
    factor: "Expr"


@dataclass(frozen=True)
class MapApply:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = object


# --- statements ---------------------------------------------------------------


@dataclass(frozen=True)
class ModeStmt:
    name: str
    statistics: str
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class ExchangeStmt:
    first: str
    second: str
    value: Expr
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class QStmt:
    formal: bool
    value: Expr | None
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class LetStmt:
    name: str
    value: Expr
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class AssertZero:
    expr: Expr
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class AssertEqual:
    left: Expr
    right: Expr
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class VerifyMap:
    name: str
    expect_all: Expr | None
    expect_pairs: tuple[tuple[str, str, Expr], ...] | None
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class NumericStmt:
    dim: int | None
    thetas: tuple[Fraction, ...] | None
    tol: float | None
    line: int = field(compare=False, default=0)


Statement = object


@dataclass(frozen=True)
class Program:
    statements: tuple[Statement, ...]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.declared_modes: set[str] = set()
        self.q_seen = False

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, expected: tuple[str, ...] = ()) -> ParseError:
        tok = self.peek()
        got = "end of input" if tok.kind == "EOF" else repr(tok.text)
        return ParseError(tok.line, tok.column, f"{message}, got {got}", expected)

    def expect(self, *kinds: str) -> Token:
        if self.peek().kind in kinds:
            return self.advance()
        raise self.error("unexpected token", kinds)

    # -- statements --

    def parse_program(self) -> Program:
        statements = []
        while not self.at("EOF"):
            statements.append(self.parse_statement())
        return Program(tuple(statements))

    def parse_statement(self) -> Statement:
        tok = self.peek()
        handler = {
            "mode": self._mode_stmt,
            "exchange": self._exchange_stmt,
            "q": self._q_stmt,
            "let": self._let_stmt,
            "assert_zero": self._assert_zero,
            "assert_equal": self._assert_equal,
            "verify_map": self._verify_map,
            "numeric": self._numeric_stmt,
        }.get(tok.kind)
        if handler is None:
            raise self.error(
                "expected a statement",
                ("mode", "exchange", "q", "let", "assert_zero", "assert_equal", "verify_map", "numeric"),
            )
        return handler()

    def _mode_stmt(self) -> ModeStmt:
        line = self.advance().line
        name_tok = self.expect("IDENT")
        if name_tok.text in self.declared_modes:
            raise ParseError(
                name_tok.line, name_tok.column, f"duplicate declaration of mode {name_tok.text!r}"
            )
        statistics = self.expect("boson", "fermion").text
        self.expect(";")
        self.declared_modes.add(name_tok.text)
        return ModeStmt(name_tok.text, statistics, line)

    def _exchange_stmt(self) -> ExchangeStmt:
        line = self.advance().line
        first = self._declared_mode()
        second = self._declared_mode()
        self.expect("=")
        value = self.parse_expr()
        self.expect(";")
        return ExchangeStmt(first, second, value, line)

    def _declared_mode(self) -> str:
        tok = self.expect("IDENT")
        if tok.text not in self.declared_modes:
            raise ParseError(tok.line, tok.column, f"mode {tok.text!r} is not declared")
        return tok.text

    def _q_stmt(self) -> QStmt:
        tok = self.advance()
        if self.q_seen:
            raise ParseError(tok.line, tok.column, "duplicate q setting")
        self.q_seen = True
        if self.at("formal"):
            self.advance()
            self.expect(";")
            return QStmt(True, None, tok.line)
        value = self.parse_expr()
        self.expect(";")
        return QStmt(False, value, tok.line)

    def _let_stmt(self) -> LetStmt:
        line = self.advance().line
        name = self.expect("IDENT").text
        self.expect("=")
        value = self.parse_expr()
        self.expect(";")
        return LetStmt(name, value, line)

    def _assert_zero(self) -> AssertZero:
        line = self.advance().line
        expr = self.parse_expr()
        self.expect(";")
        return AssertZero(expr, line)

    def _assert_equal(self) -> AssertEqual:
        line = self.advance().line
        left = self.parse_expr()
        self.expect(",")
        right = self.parse_expr()
        self.expect(";")
        return AssertEqual(left, right, line)

    def _verify_map(self) -> VerifyMap:
        line = self.advance().line
        name = self.expect("IDENT").text
        expect_all = None
        expect_pairs = None
        if self.at("IDENT") and self.peek().text == "expect":
            self.advance()
            if self.at("IDENT") and self.peek().text == "all":
                self.advance()
                self.expect("=")
                expect_all = self.parse_expr()
            else:
                pairs = [self._expect_pair()]
                while self.at(","):
                    self.advance()
                    pairs.append(self._expect_pair())
                expect_pairs = tuple(pairs)
        self.expect(";")
        return VerifyMap(name, expect_all, expect_pairs, line)

    def _expect_pair(self) -> tuple[str, str, Expr]:
        first = self._declared_mode()
        second = self._declared_mode()
        self.expect("=")
        return (first, second, self.parse_expr())

    def _numeric_stmt(self) -> NumericStmt:
        line = self.advance().line
        dim = thetas = tol = None
        saw_clause = False
        while True:
            if self.at("dim"):
                self.advance()
                dim = int(self.expect("INT").text)
            elif self.at("theta"):
                self.advance()
                values = [self._ratio()]
                while self.at(","):
                    self.advance()
                    values.append(self._ratio())
                thetas = tuple(values)
            elif self.at("tol"):
                self.advance()
                tok = self.expect("NUMBER", "INT")
                tol = float(tok.text)
            else:
                break
            saw_clause = True
        if not saw_clause:
            raise self.error("numeric needs at least one clause", ("dim", "theta", "tol"))
        self.expect(";")
        return NumericStmt(dim, thetas, tol, line)

    def _ratio(self) -> Fraction:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        num = int(self.expect("INT").text)
        if self.at("/"):
            self.advance()
            den = int(self.expect("INT").text)
            return Fraction(sign * num, den)
        return Fraction(sign * num)

    # -- expressions --

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.parse_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.at("*"):
            self.advance()
            node = Mul(node, self.parse_unary())
        return node

    def parse_unary(self) -> Expr:
        if self.at("-"):
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def _signed_int(self) -> int:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        return sign * int(self.expect("INT").text)

    def parse_power(self) -> Expr:
        base = self.parse_primary()
        if self.at("^"):
            self.advance()
            k = self._signed_int()
            if isinstance(base, QPow):
                return QPow(base.exponent * k)
            return Pow(base, k)
        return base

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "INT":
            self.advance()
            num = int(tok.text)
            if self.at("/"):
                self.advance()
                den = int(self.expect("INT").text)
                return Num(Fraction(num, den))
            return Num(Fraction(num))
        if tok.kind == "q":
            self.advance()
            return QPow(1)
        if tok.kind in ("ann", "cre"):
            self.advance()
            self.expect("(")
            name = self.expect("IDENT").text
            self.expect(")")
            return Ann(name) if tok.kind == "ann" else Cre(name)
        if tok.kind == "adj":
            self.advance()
            self.expect("(")
            arg = self.parse_expr()
            self.expect(")")
            return Adj(arg)
        if tok.kind == "phase":
            self.advance()
            self.expect("[")
            items = [self._phase_item()]
            while self.at(","):
                self.advance()
                items.append(self._phase_item())
            self.expect("]")
            return Phase(tuple(items))
        if tok.kind in ("comm", "acomm"):
            self.advance()
            self.expect("(")
            left = self.parse_expr()
            self.expect(",")
            right = self.parse_expr()
            self.expect(")")
            return Comm(left, right) if tok.kind == "comm" else AComm(left, right)
        if tok.kind == "qcomm":
            self.advance()
            self.expect("(")
            left = self.parse_expr()
            self.expect(",")
            right = self.parse_expr()
            self.expect(",")
            factor = self.parse_expr()
            self.expect(")")
            return QComm(left, right, factor)
        if tok.kind == "map":
            self.advance()
            self.expect("(")
            name = self.expect("IDENT").text
            self.expect(",")
            arg = self.parse_expr()
            self.expect(")")
            return MapApply(name, arg)
        if tok.kind == "IDENT":
            self.advance()
            return Ref(tok.text)
        raise self.error(
            "expected an expression",
            ("(", "INT", "q", "ann", "cre", "adj", "phase", "comm", "acomm", "qcomm", "map", "IDENT"),
        )

    def _phase_item(self) -> tuple[str, int]:
        name = self.expect("IDENT").text
        self.expect(":")
        return (name, self._signed_int())


def parse(text: str) -> Program:
    """Parse a whole script; raises :class:`ParseError` on the first failure."""
    return _Parser(tokenize(text)).parse_program()


# --- rendering -----------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node: Expr) -> int:
    if isinstance(node, (Add, Sub)):
        return _PREC_ADD
    if isinstance(node, Mul):
        return _PREC_MUL
    if isinstance(node, Neg):
        return _PREC_NEG
    if isinstance(node, Pow) or (isinstance(node, QPow) and node.exponent != 1):
        return _PREC_POW
    return _PREC_ATOM


def render_expr(node: Expr, min_prec: int = _PREC_ADD) -> str:
    text = _render_unwrapped(node)
    if _prec(node) < min_prec:
        return f"({text})"
    return text


def _render_unwrapped(node: Expr) -> str:
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, QPow):
        return "q" if node.exponent == 1 else f"q^{node.exponent}"
    if isinstance(node, Ann):
        return f"ann({node.mode})"
    if isinstance(node, Cre):
        return f"cre({node.mode})"
    if isinstance(node, Adj):
        return f"adj({render_expr(node.arg)})"
    if isinstance(node, Phase):
        inner = ",".join(f"{n}:{k}" for n, k in node.items)
        return f"phase[{inner}]"
    if isinstance(node, Comm):
        return f"comm({render_expr(node.left)}, {render_expr(node.right)})"
    if isinstance(node, AComm):
        return f"acomm({render_expr(node.left)}, {render_expr(node.right)})"
    if isinstance(node, QComm):
        return (
            f"qcomm({render_expr(node.left)}, {render_expr(node.right)}, "
            f"{render_expr(node.factor)})"
        )
    if isinstance(node, MapApply):
        return f"map({node.name}, {render_expr(node.arg)})"
    if isinstance(node, Ref):
        return node.name
    if isinstance(node, Add):
        return f"{render_expr(node.left, _PREC_ADD)} + {render_expr(node.right, _PREC_MUL)}"
    if isinstance(node, Sub):
        return f"{render_expr(node.left, _PREC_ADD)} - {render_expr(node.right, _PREC_MUL)}"
    if isinstance(node, Mul):
        return f"{render_expr(node.left, _PREC_MUL)}*{render_expr(node.right, _PREC_NEG)}"
    if isinstance(node, Neg):
        return f"-{render_expr(node.arg, _PREC_NEG)}"
    if isinstance(node, Pow):
        return f"{render_expr(node.base, _PREC_ATOM)}^{node.exponent}"
    raise TypeError(f"cannot render {node!r}")


def render_program(program: Program) -> str:
    """Canonical text for a program; re-parsing yields an equal program."""
    lines = []
    for stmt in program.statements:
        if isinstance(stmt, ModeStmt):
            lines.append(f"mode {stmt.name} {stmt.statistics};")
        elif isinstance(stmt, ExchangeStmt):
            lines.append(f"exchange {stmt.first} {stmt.second} = {render_expr(stmt.value)};")
        elif isinstance(stmt, QStmt):
            lines.append("q formal;" if stmt.formal else f"q {render_expr(stmt.value)};")
        elif isinstance(stmt, LetStmt):
            lines.append(f"let {stmt.name} = {render_expr(stmt.value)};")
        elif isinstance(stmt, AssertZero):
            lines.append(f"assert_zero {render_expr(stmt.expr)};")
        elif isinstance(stmt, AssertEqual):
            lines.append(f"assert_equal {render_expr(stmt.left)}, {render_expr(stmt.right)};")
        elif isinstance(stmt, VerifyMap):
            body = f"verify_map {stmt.name}"
            if stmt.expect_all is not None:
                body += f" expect all = {render_expr(stmt.expect_all)}"
            elif stmt.expect_pairs is not None:
                pairs = ", ".join(f"{a} {b} = {render_expr(v)}" for a, b, v in stmt.expect_pairs)
                body += f" expect {pairs}"
            lines.append(body + ";")
        elif isinstance(stmt, NumericStmt):
            clauses = []
            if stmt.dim is not None:
                clauses.append(f"dim {stmt.dim}")
            if stmt.thetas is not None:
                clauses.append(
                    "theta "
                    + ", ".join(
                        str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"
                        for t in stmt.thetas
                    )
                )
            if stmt.tol is not None:
                clauses.append(f"tol {stmt.tol!r}")
            lines.append("numeric " + " ".join(clauses) + ";")
        else:
            raise TypeError(f"cannot render statement {stmt!r}")
    return "\n".join(lines) + ("\n" if lines else "")
