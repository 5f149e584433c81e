"""Recursive-descent parser for the quantum while-language DSL.

Grammar (UTF-8 text, `#` line comments):

    program    := "qubits" INT ";" (gatedef | stmt)*
    gatedef    := "defgate" IDENT "=" matrix ";"
    stmt       := "skip" ";"
                | "init" qlist ";"
                | IDENT qlist ";"
                | "assert" IDENT ":" projexpr "on" qlist implblock? ";"
                | "if" "measure" "(" qlist ")" "in" bitset block ("else" block)?
                | "while" "measure" "(" qlist ")" "in" bitset ("cap" INT)? block
    implblock  := "impl" "{" (IDENT qlist ";" | "check" QUBIT ";")* "}"
    block      := "{" stmt* "}"
    projexpr   := or-of and-of tensor-of (~atom); atoms are span{...},
                  I[dim], or parenthesized expressions; "(x)" is tensor

The optional impl block attaches a hand-written check circuit to an
assertion; it is used for resource counting and is not required for
execution.
"""

from __future__ import annotations

import re

import numpy as np

from ..errors import (
    BadProjectionExpr,
    DslSyntaxError,
    NonUnitaryGateDef,
    QubitOutOfRange,
    UnknownGate,
)
from ..projections import (
    Projection,
    complement,
    from_kets,
    identity_projection,
    join,
    meet,
    tensor,
)
from .gates import BUILTIN, VARIADIC
from .syntax import (
    Assert,
    IfMeasure,
    ImplOp,
    Init,
    Program,
    Seq,
    Skip,
    Unitary,
    WhileMeasure,
)

_TOKEN_RE = re.compile(
    r"""
      (?P<WS>\s+|\#[^\n]*)
    | (?P<TENSOR>\(x\))
    | (?P<KET>\|[01+\-]+>)
    | (?P<NUMBER>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?i?)
    | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<SYM>[;:,{}\[\]()&|~=+\-*])
    """,
    re.VERBOSE,
)

_KEYWORDS = {
    "qubits", "defgate", "skip", "init", "assert", "on", "impl", "check",
    "if", "while", "measure", "in", "else", "cap", "span", "I",
}


class _Token:
    __slots__ = ("kind", "text", "line", "col", "pos")

    def __init__(self, kind, text, line, col, pos):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col
        self.pos = pos

    def __repr__(self):
        return f"{self.kind}({self.text!r})"


def _tokenize(text: str):
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok_text = m.group()
        if kind != "WS":
            tokens.append(_Token(kind, tok_text, line, pos - line_start + 1, pos))
        line += tok_text.count("\n")
        if "\n" in tok_text:
            line_start = pos + tok_text.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", line, pos - line_start + 1, pos))
    return tokens


_KET_CHAR = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.qubit_count = 0
        self.gate_defs = {}

    # token plumbing -------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise DslSyntaxError(message, tok.line, tok.col)

    def expect_sym(self, sym: str) -> _Token:
        tok = self.peek()
        if tok.kind == "SYM" and tok.text == sym:
            return self.next()
        self.fail(f"expected {sym!r}, found {tok.text!r}")

    def expect_kw(self, kw: str) -> _Token:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text == kw:
            return self.next()
        self.fail(f"expected {kw!r}, found {tok.text!r}")

    def at_kw(self, kw: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.text == kw

    def at_sym(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "SYM" and tok.text == sym

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.kind == "NUMBER" and re.fullmatch(r"\d+", tok.text):
            self.next()
            return int(tok.text)
        self.fail(f"expected integer, found {tok.text!r}")

    def expect_qubit(self) -> int:
        tok = self.peek()
        if tok.kind == "IDENT" and re.fullmatch(r"q\d+", tok.text):
            self.next()
            q = int(tok.text[1:])
            if q >= self.qubit_count:
                raise QubitOutOfRange(
                    f"q{q} out of range for {self.qubit_count} qubits "
                    f"(line {tok.line})"
                )
            return q
        self.fail(f"expected qubit (qN), found {tok.text!r}")

    def qlist(self) -> tuple:
        qubits = [self.expect_qubit()]
        while self.at_sym(","):
            self.next()
            qubits.append(self.expect_qubit())
        return tuple(qubits)

    # top level ------------------------------------------------------

    def program(self) -> Program:
        self.expect_kw("qubits")
        self.qubit_count = self.expect_int()
        if self.qubit_count < 1:
            self.fail("qubit count must be positive")
        self.expect_sym(";")
        stmts = []
        while self.peek().kind != "EOF":
            if self.at_kw("defgate"):
                self.gatedef()
            else:
                stmts.append(self.stmt())
        return Program(self.qubit_count, self.gate_defs, Seq(tuple(stmts)))

    def gatedef(self):
        self.expect_kw("defgate")
        name_tok = self.peek()
        name = self.ident()
        self.expect_sym("=")
        m = self.matrix()
        self.expect_sym(";")
        d = m.shape[0]
        if m.shape[0] != m.shape[1] or d & (d - 1) or d < 2:
            self.fail(f"gate {name} matrix must be square power-of-two", name_tok)
        if np.max(np.abs(m @ m.conj().T - np.eye(d))) > 1e-8:
            raise NonUnitaryGateDef(f"gate {name} is not unitary (line {name_tok.line})")
        self.gate_defs[name] = m

    def ident(self) -> str:
        tok = self.peek()
        if tok.kind != "IDENT":
            self.fail(f"expected identifier, found {tok.text!r}")
        return self.next().text

    def matrix(self) -> np.ndarray:
        self.expect_sym("[")
        rows = [self.matrix_row()]
        while self.at_sym(","):
            self.next()
            rows.append(self.matrix_row())
        self.expect_sym("]")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            self.fail("ragged matrix rows")
        return np.array(rows, dtype=complex)

    def matrix_row(self) -> list:
        self.expect_sym("[")
        entries = [self.complex_literal()]
        while self.at_sym(","):
            self.next()
            entries.append(self.complex_literal())
        self.expect_sym("]")
        return entries

    def complex_literal(self) -> complex:
        sign = 1.0
        if self.at_sym("-"):
            self.next()
            sign = -1.0
        elif self.at_sym("+"):
            self.next()
        first, first_imag = self.number_part()
        first *= sign
        if first_imag:
            return complex(0.0, first)
        if self.at_sym("+") or self.at_sym("-"):
            sign2 = -1.0 if self.next().text == "-" else 1.0
            second, second_imag = self.number_part()
            if not second_imag:
                self.fail("imaginary part must end in 'i'")
            return complex(first, sign2 * second)
        return complex(first, 0.0)

    def number_part(self):
        tok = self.peek()
        if tok.kind != "NUMBER":
            self.fail(f"expected number, found {tok.text!r}")
        self.next()
        text = tok.text
        imag = text.endswith("i")
        if imag:
            text = text[:-1]
        return float(text), imag

    # statements -----------------------------------------------------

    def stmt(self):
        if self.at_kw("skip"):
            self.next()
            self.expect_sym(";")
            return Skip()
        if self.at_kw("init"):
            self.next()
            qubits = self.qlist()
            self.expect_sym(";")
            return Init(qubits)
        if self.at_kw("assert"):
            return self.assert_stmt()
        if self.at_kw("if"):
            return self.if_stmt()
        if self.at_kw("while"):
            return self.while_stmt()
        tok = self.peek()
        name = self.ident()
        qubits = self.qlist()
        self.expect_sym(";")
        self.check_gate(name, len(qubits), tok)
        return Unitary(name, qubits)

    def check_gate(self, name: str, arity: int, tok: _Token):
        if name in VARIADIC:
            return
        if name in self.gate_defs:
            d = self.gate_defs[name].shape[0]
        elif name in BUILTIN:
            d = BUILTIN[name].shape[0]
        else:
            raise UnknownGate(f"{name} (line {tok.line})")
        need = d.bit_length() - 1
        if arity != need:
            self.fail(f"gate {name} acts on {need} qubits, got {arity}", tok)

    def assert_stmt(self) -> Assert:
        kw = self.expect_kw("assert")
        site = self.ident()
        self.expect_sym(":")
        start = self.peek().pos
        proj = self.projexpr()
        end = self.tokens[self.i - 1]
        expr_text = " ".join(self.text[start : end.pos + len(end.text)].split())
        self.expect_kw("on")
        qubits = self.qlist()
        if len(set(qubits)) != len(qubits):
            self.fail("duplicate qubit in assert target", kw)
        if proj.ambient_qubits != len(qubits):
            raise BadProjectionExpr(
                f"assertion {site}: expression on {proj.ambient_qubits} qubits, "
                f"target lists {len(qubits)} (line {kw.line})"
            )
        impl = None
        if self.at_kw("impl"):
            impl = self.impl_block()
        self.expect_sym(";")
        return Assert(site, qubits, proj, expr_text, impl, kw.line)

    def impl_block(self) -> tuple:
        self.expect_kw("impl")
        self.expect_sym("{")
        ops = []
        while not self.at_sym("}"):
            if self.at_kw("check"):
                self.next()
                q = self.expect_qubit()
                self.expect_sym(";")
                ops.append(ImplOp("check", None, (q,)))
            else:
                tok = self.peek()
                name = self.ident()
                qubits = self.qlist()
                self.expect_sym(";")
                self.check_gate(name, len(qubits), tok)
                ops.append(ImplOp("gate", name, qubits))
        self.expect_sym("}")
        return tuple(ops)

    def bitset(self) -> frozenset:
        self.expect_sym("{")
        bits = [self.bits_token()]
        while self.at_sym(","):
            self.next()
            bits.append(self.bits_token())
        self.expect_sym("}")
        if len({len(b) for b in bits}) != 1:
            self.fail("bitstrings of differing widths")
        return frozenset(bits)

    def bits_token(self) -> str:
        tok = self.peek()
        if tok.kind == "NUMBER" and re.fullmatch(r"[01]+", tok.text):
            self.next()
            return tok.text
        self.fail(f"expected bitstring, found {tok.text!r}")

    def measured_head(self):
        self.expect_kw("measure")
        self.expect_sym("(")
        qubits = self.qlist()
        self.expect_sym(")")
        self.expect_kw("in")
        outcomes = self.bitset()
        if len(next(iter(outcomes))) != len(qubits):
            self.fail("bitstring width does not match measured qubit count")
        return qubits, outcomes

    def block(self) -> Seq:
        self.expect_sym("{")
        stmts = []
        while not self.at_sym("}"):
            stmts.append(self.stmt())
        self.expect_sym("}")
        return Seq(tuple(stmts))

    def if_stmt(self) -> IfMeasure:
        self.expect_kw("if")
        qubits, outcomes = self.measured_head()
        then_body = self.block()
        else_body = Seq(())
        if self.at_kw("else"):
            self.next()
            else_body = self.block()
        return IfMeasure(qubits, outcomes, then_body, else_body)

    def while_stmt(self) -> WhileMeasure:
        self.expect_kw("while")
        qubits, outcomes = self.measured_head()
        cap = 1000
        if self.at_kw("cap"):
            self.next()
            cap = self.expect_int()
        body = self.block()
        return WhileMeasure(qubits, outcomes, body, cap)

    # projection expressions -----------------------------------------

    def projexpr(self) -> Projection:
        left = self.and_expr()
        while self.at_sym("|"):
            self.next()
            right = self.and_expr()
            self.match_ambient(left, right)
            left = join(left, right)
        return left

    def and_expr(self) -> Projection:
        left = self.tensor_expr()
        while self.at_sym("&"):
            self.next()
            right = self.tensor_expr()
            self.match_ambient(left, right)
            left = meet(left, right)
        return left

    def match_ambient(self, a: Projection, b: Projection):
        if a.ambient_qubits != b.ambient_qubits:
            raise BadProjectionExpr(
                f"operands act on {a.ambient_qubits} and {b.ambient_qubits} qubits"
            )

    def tensor_expr(self) -> Projection:
        left = self.unary()
        while self.peek().kind == "TENSOR":
            self.next()
            left = tensor(left, self.unary())
        return left

    def unary(self) -> Projection:
        if self.at_sym("~"):
            self.next()
            return complement(self.unary())
        return self.atom()

    def atom(self) -> Projection:
        if self.at_kw("span"):
            return self.span()
        if self.at_kw("I"):
            self.next()
            self.expect_sym("[")
            tok = self.peek()
            dim = self.expect_int()
            self.expect_sym("]")
            if dim < 2 or dim & (dim - 1):
                self.fail(f"I[{dim}]: dimension must be a power of two", tok)
            return identity_projection(dim.bit_length() - 1)
        if self.at_sym("("):
            self.next()
            p = self.projexpr()
            self.expect_sym(")")
            return p
        self.fail(f"expected projection expression, found {self.peek().text!r}")

    def span(self) -> Projection:
        self.expect_kw("span")
        self.expect_sym("{")
        tok = self.peek()
        kets = [self.ketsum()]
        while self.at_sym(","):
            self.next()
            kets.append(self.ketsum())
        self.expect_sym("}")
        if len({len(k) for k in kets}) != 1:
            raise BadProjectionExpr(
                f"span generators of differing widths (line {tok.line})"
            )
        n = int(np.log2(len(kets[0])))
        nonzero = [k for k in kets if np.linalg.norm(k) > 1e-12]
        return from_kets(nonzero, n)

    def ketsum(self) -> np.ndarray:
        total = None
        sign = 1.0
        if self.at_sym("-"):
            self.next()
            sign = -1.0
        while True:
            term = sign * self.kterm()
            if total is None:
                total = term
            elif len(total) != len(term):
                self.fail("kets of differing widths in one sum")
            else:
                total = total + term
            if self.at_sym("+"):
                self.next()
                sign = 1.0
            elif self.at_sym("-"):
                self.next()
                sign = -1.0
            else:
                return total

    def kterm(self) -> np.ndarray:
        coef = 1.0
        if self.peek().kind == "NUMBER":
            value, imag = self.number_part()
            if imag:
                self.fail("ket coefficients must be real")
            coef = value
            self.expect_sym("*")
        tok = self.peek()
        if tok.kind != "KET":
            self.fail(f"expected ket, found {tok.text!r}")
        self.next()
        chars = tok.text[1:-1]
        v = np.array([1.0 + 0j])
        for c in chars:
            v = np.kron(v, _KET_CHAR[c])
        return coef * v


def parse_program(text: str) -> Program:
    """Parse DSL text into a Program; errors carry line and column."""
    return _Parser(text).program()
