"""Pretty-printer producing MiniC source that re-parses to an equal AST."""

from __future__ import annotations

from .ast import (
    AddrOf,
    Call,
    ChainLoad,
    ChainStore,
    Copy,
    Decl,
    FunctionDecl,
    If,
    Load,
    Program,
    Return,
    Stmt,
    Store,
)

_INDENT = "    "


def _operand(src: str | int) -> str:
    return str(src)


def _stmt_lines(stmt: Stmt, depth: int) -> list[str]:
    pad = _INDENT * depth
    if isinstance(stmt, Decl):
        return [f"{pad}let {stmt.name}: {stmt.type};"]
    if isinstance(stmt, AddrOf):
        return [f"{pad}{stmt.dst} = &{stmt.src};"]
    if isinstance(stmt, Copy):
        return [f"{pad}{stmt.dst} = {_operand(stmt.src)};"]
    if isinstance(stmt, Load):
        if stmt.field is None:
            return [f"{pad}{stmt.dst} = *{stmt.base};"]
        return [f"{pad}{stmt.dst} = {stmt.base}->{stmt.field};"]
    if isinstance(stmt, Store):
        if stmt.field is None:
            return [f"{pad}*{stmt.base} = {_operand(stmt.src)};"]
        return [f"{pad}{stmt.base}->{stmt.field} = {_operand(stmt.src)};"]
    if isinstance(stmt, ChainLoad):
        chain = "".join(f"->{f}" for f in stmt.fields)
        return [f"{pad}{stmt.dst} = {stmt.base}{chain};"]
    if isinstance(stmt, ChainStore):
        chain = "".join(f"->{f}" for f in stmt.fields)
        return [f"{pad}{stmt.base}{chain} = {_operand(stmt.src)};"]
    if isinstance(stmt, Call):
        args = ", ".join(_operand(a) for a in stmt.args)
        call = f"{stmt.callee}({args})"
        if stmt.dst is None:
            return [f"{pad}{call};"]
        return [f"{pad}{stmt.dst} = {call};"]
    if isinstance(stmt, Return):
        if stmt.src is None:
            return [f"{pad}return;"]
        return [f"{pad}return {_operand(stmt.src)};"]
    if isinstance(stmt, If):
        lines = [f"{pad}if ({stmt.cond}) {{"]
        for inner in stmt.then:
            lines.extend(_stmt_lines(inner, depth + 1))
        if stmt.orelse:
            lines.append(f"{pad}}} else {{")
            for inner in stmt.orelse:
                lines.extend(_stmt_lines(inner, depth + 1))
        lines.append(f"{pad}}}")
        return lines
    raise TypeError(f"unhandled statement {stmt!r}")


def format_signature(fn: FunctionDecl) -> str:
    params = ", ".join(f"{name}: {ptype}" for name, ptype in fn.params)
    return f"fn {fn.name}({params}) -> {fn.return_type}"


def format_function(fn: FunctionDecl) -> str:
    lines = [f"{format_signature(fn)} {{"]
    for stmt in fn.body:
        lines.extend(_stmt_lines(stmt, 1))
    lines.append("}")
    return "\n".join(lines)


def pretty_print(program: Program) -> str:
    chunks: list[str] = []
    for rec in program.records:
        lines = [f"struct {rec.name} {{"]
        for fname, ftype in rec.fields:
            lines.append(f"{_INDENT}{fname}: {ftype};")
        lines.append("}")
        chunks.append("\n".join(lines))
    for g in program.globals:
        chunks.append(f"global {g.name}: {g.type};")
    for fn in program.functions:
        chunks.append(format_function(fn))
    return "\n\n".join(chunks) + "\n"
