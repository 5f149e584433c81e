"""AST of the quantum while-language, plus the program printer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..projections import Projection


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Init:
    qubits: tuple


@dataclass(frozen=True)
class Unitary:
    name: str
    qubits: tuple


@dataclass(frozen=True)
class ImplOp:
    """One operation inside an assert's hand-written implementation block:
    either a gate application or a single-qubit expect-zero check."""

    kind: str  # "gate" or "check"
    name: str | None
    qubits: tuple


@dataclass(frozen=True)
class Assert:
    site: str
    qubits: tuple
    projection: Projection
    expr_text: str
    impl: tuple | None = None  # tuple of ImplOp
    line: int = 0


@dataclass(frozen=True)
class IfMeasure:
    qubits: tuple
    outcomes: frozenset  # bitstrings selecting the then-branch
    then_body: "Seq"
    else_body: "Seq"


@dataclass(frozen=True)
class WhileMeasure:
    qubits: tuple
    outcomes: frozenset  # bitstrings that continue the loop
    body: "Seq"
    max_iters: int = 1000


@dataclass(frozen=True)
class Seq:
    stmts: tuple


@dataclass
class Program:
    qubit_count: int
    gate_defs: dict
    body: Seq
    metadata: tuple = ()

    def assert_sites(self):
        """All Assert statements in program order."""
        out = []

        def walk(stmt):
            if isinstance(stmt, Seq):
                for s in stmt.stmts:
                    walk(s)
            elif isinstance(stmt, Assert):
                out.append(stmt)
            elif isinstance(stmt, IfMeasure):
                walk(stmt.then_body)
                walk(stmt.else_body)
            elif isinstance(stmt, WhileMeasure):
                walk(stmt.body)

        walk(self.body)
        return out


def format_complex(z: complex) -> str:
    """Complex literal for defgate matrices: a, bi, or a+bi at 12 digits."""
    re = float(np.real(z))
    im = float(np.imag(z))
    if abs(im) < 1e-14:
        return f"{re:.12g}"
    if abs(re) < 1e-14:
        return f"{im:.12g}i"
    sign = "+" if im >= 0 else "-"
    return f"{re:.12g}{sign}{abs(im):.12g}i"


def format_matrix(m: np.ndarray) -> str:
    rows = []
    for row in np.asarray(m):
        rows.append("[" + ", ".join(format_complex(z) for z in row) + "]")
    return "[" + ",\n  ".join(rows) + "]"


def _qlist(qubits) -> str:
    return ", ".join(f"q{i}" for i in qubits)


def _print_stmt(stmt, indent: int, out: list):
    pad = "    " * indent
    if isinstance(stmt, Skip):
        out.append(pad + "skip;")
    elif isinstance(stmt, Init):
        out.append(pad + f"init {_qlist(stmt.qubits)};")
    elif isinstance(stmt, Unitary):
        out.append(pad + f"{stmt.name} {_qlist(stmt.qubits)};")
    elif isinstance(stmt, Assert):
        head = pad + f"assert {stmt.site}: {stmt.expr_text} on {_qlist(stmt.qubits)}"
        if stmt.impl is None:
            out.append(head + ";")
        else:
            out.append(head + " impl {")
            for op in stmt.impl:
                if op.kind == "check":
                    out.append(pad + f"    check q{op.qubits[0]};")
                else:
                    out.append(pad + f"    {op.name} {_qlist(op.qubits)};")
            out.append(pad + "};")
    elif isinstance(stmt, IfMeasure):
        bits = ", ".join(sorted(stmt.outcomes))
        out.append(pad + f"if measure ({_qlist(stmt.qubits)}) in {{{bits}}} {{")
        for s in stmt.then_body.stmts:
            _print_stmt(s, indent + 1, out)
        if stmt.else_body.stmts:
            out.append(pad + "} else {")
            for s in stmt.else_body.stmts:
                _print_stmt(s, indent + 1, out)
        out.append(pad + "}")
    elif isinstance(stmt, WhileMeasure):
        bits = ", ".join(sorted(stmt.outcomes))
        out.append(
            pad
            + f"while measure ({_qlist(stmt.qubits)}) in {{{bits}}} cap {stmt.max_iters} {{"
        )
        for s in stmt.body.stmts:
            _print_stmt(s, indent + 1, out)
        out.append(pad + "}")
    elif isinstance(stmt, Seq):
        for s in stmt.stmts:
            _print_stmt(s, indent, out)
    else:
        raise TypeError(f"unknown statement {stmt!r}")


def program_to_text(program: Program) -> str:
    out = [f"qubits {program.qubit_count};"]
    for name, m in program.gate_defs.items():
        out.append(f"defgate {name} = {format_matrix(m)};")
    for s in program.body.stmts:
        _print_stmt(s, 0, out)
    return "\n".join(out) + "\n"
