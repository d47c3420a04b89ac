"""Lowering to the single-dereference statement form.

Multi-selector chains are split through fresh `%t<N>` temporaries, one
per intermediate hop, declared immediately before first use. Counters
are scoped per function and start above any `%t` name already present,
which makes the pass idempotent.
"""

from __future__ import annotations

import re

from .ast import (
    ChainLoad,
    ChainStore,
    Decl,
    FunctionDecl,
    GlobalDecl,
    If,
    Load,
    Program,
    PtrType,
    RecordDecl,
    Stmt,
    Store,
    Type,
    walk_stmts,
)
from .types import Layouts

_TEMP_RE = re.compile(r"%t(\d+)$")


class _FreshTemps:
    def __init__(self, fn: FunctionDecl):
        self.next = 0
        for stmt in walk_stmts(fn.body):
            if isinstance(stmt, Decl):
                m = _TEMP_RE.match(stmt.name)
                if m:
                    self.next = max(self.next, int(m.group(1)) + 1)

    def take(self) -> str:
        name = f"%t{self.next}"
        self.next += 1
        return name


def _copy_stmt(stmt: Stmt) -> Stmt:
    if isinstance(stmt, If):
        return If(stmt.cond, [_copy_stmt(s) for s in stmt.then], [_copy_stmt(s) for s in stmt.orelse], pos=stmt.pos)
    return stmt


def _var_types(fn: FunctionDecl) -> dict[str, Type]:
    env: dict[str, Type] = dict(fn.params)
    for stmt in walk_stmts(fn.body):
        if isinstance(stmt, Decl):
            env[stmt.name] = stmt.type
    return env


def _lower_body(
    body: list[Stmt],
    env: dict[str, Type],
    layouts: Layouts,
    fresh: _FreshTemps,
) -> list[Stmt]:
    out: list[Stmt] = []
    for stmt in body:
        if isinstance(stmt, (ChainLoad, ChainStore)):
            base = stmt.base
            base_type = env[base]
            hops = stmt.fields[:-1]
            last = stmt.fields[-1]
            for field in hops:
                hop_type = layouts.selector_result(base_type, field)
                temp = fresh.take()
                env[temp] = hop_type
                out.append(Decl(temp, hop_type, pos=stmt.pos))
                out.append(Load(temp, base, field, pos=stmt.pos))
                base, base_type = temp, hop_type
            if isinstance(stmt, ChainLoad):
                out.append(Load(stmt.dst, base, last, pos=stmt.pos))
            else:
                out.append(Store(base, last, stmt.src, pos=stmt.pos))
        elif isinstance(stmt, If):
            out.append(
                If(
                    stmt.cond,
                    _lower_body(stmt.then, env, layouts, fresh),
                    _lower_body(stmt.orelse, env, layouts, fresh),
                    pos=stmt.pos,
                )
            )
        else:
            out.append(_copy_stmt(stmt))
    return out


def lower_function(fn: FunctionDecl, layouts: Layouts) -> FunctionDecl:
    fresh = _FreshTemps(fn)
    env = _var_types(fn)
    body = _lower_body(fn.body, env, layouts, fresh)
    return FunctionDecl(fn.name, list(fn.params), fn.return_type, body, pos=fn.pos)


def lower_program(program: Program) -> Program:
    """Return a normalized program in which every statement dereferences at most once."""
    layouts = Layouts(program)
    return Program(
        [RecordDecl(r.name, list(r.fields), pos=r.pos) for r in program.records],
        [GlobalDecl(g.name, g.type, pos=g.pos) for g in program.globals],
        [lower_function(fn, layouts) for fn in program.functions],
    )


def is_lowered(program: Program) -> bool:
    for fn in program.functions:
        for stmt in walk_stmts(fn.body):
            if isinstance(stmt, (ChainLoad, ChainStore)):
                return False
    return True


def function_var_types(fn: FunctionDecl) -> dict[str, Type]:
    """Declared type of every parameter and local of a function."""
    return _var_types(fn)


def pointer_vars(fn: FunctionDecl) -> set[str]:
    return {name for name, t in _var_types(fn).items() if isinstance(t, PtrType)}
