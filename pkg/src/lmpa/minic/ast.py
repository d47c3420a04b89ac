"""AST for MiniC, the small C-like language this analyzer consumes.

The surface syntax supports records with pointer fields, globals, heap
allocation through modeled APIs, field loads/stores, plain dereference,
calls, returns, and `if`/`else`. Statements after lowering perform at
most one dereference each. Conditions are symbolic: they are carried as
predicates and never evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Pos:
    line: int
    column: int


UNKNOWN_POS = Pos(0, 0)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Type:
    """Base class; concrete types below."""


@dataclass(frozen=True)
class IntType(Type):
    def __str__(self) -> str:
        return "int"


@dataclass(frozen=True)
class CharType(Type):
    def __str__(self) -> str:
        return "char"


@dataclass(frozen=True)
class VoidType(Type):
    def __str__(self) -> str:
        return "void"


@dataclass(frozen=True)
class PtrType(Type):
    pointee: Type

    def __str__(self) -> str:
        return f"ptr<{self.pointee}>"


@dataclass(frozen=True)
class ArrayType(Type):
    """Arrays behave like a record with the single synthetic field `elts`."""

    elem: Type

    def __str__(self) -> str:
        return f"array<{self.elem}>"


@dataclass(frozen=True)
class RecordType(Type):
    name: str

    def __str__(self) -> str:
        return self.name


INT = IntType()
CHAR = CharType()
VOID = VoidType()


def is_pointer(t: Type) -> bool:
    return isinstance(t, PtrType)


def is_scalar(t: Type) -> bool:
    return isinstance(t, (IntType, CharType))


# ---------------------------------------------------------------------------
# Expressions appearing in conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AccessExpr:
    """`name` optionally followed by `->field` selectors (conditions only)."""

    base: str
    fields: tuple[str, ...] = ()

    def __str__(self) -> str:
        return self.base + "".join(f"->{f}" for f in self.fields)


COND_OPS = ("<", "<=", ">", ">=", "==", "!=")


@dataclass(frozen=True)
class Condition:
    lhs: AccessExpr
    op: str
    rhs: AccessExpr | int

    def __str__(self) -> str:
        return f"{self.lhs} {self.op} {self.rhs}"


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass
class Stmt:
    pos: Pos = field(default=UNKNOWN_POS, kw_only=True, compare=False)


@dataclass
class Decl(Stmt):
    name: str
    type: Type


@dataclass
class AddrOf(Stmt):
    """`dst = &src;` — src is a local, parameter, or global variable."""

    dst: str
    src: str


@dataclass
class Copy(Stmt):
    """`dst = src;` — src is a variable name or an integer literal (null)."""

    dst: str
    src: str | int


@dataclass
class Load(Stmt):
    """`dst = base->field;` or `dst = *base;` (field is None)."""

    dst: str
    base: str
    field: str | None


@dataclass
class Store(Stmt):
    """`base->field = src;` or `*base = src;` (field is None)."""

    base: str
    field: str | None
    src: str | int


@dataclass
class Call(Stmt):
    """`dst = callee(args);` or bare `callee(args);`."""

    dst: str | None
    callee: str
    args: list[str | int]


@dataclass
class Return(Stmt):
    src: str | int | None


@dataclass
class If(Stmt):
    cond: Condition
    then: list[Stmt]
    orelse: list[Stmt]


# Surface-only statement: multi-selector load/store chains the lowering
# pass splits into single-dereference Load/Store through temporaries.


@dataclass
class ChainLoad(Stmt):
    """`dst = base->f1->f2...;` with more than one selector."""

    dst: str
    base: str
    fields: list[str]


@dataclass
class ChainStore(Stmt):
    """`base->f1->...->fn = src;` with more than one selector."""

    base: str
    fields: list[str]
    src: str | int


# ---------------------------------------------------------------------------
# Declarations
# ---------------------------------------------------------------------------


@dataclass
class RecordDecl:
    name: str
    fields: list[tuple[str, Type]]
    pos: Pos = field(default=UNKNOWN_POS, compare=False)


@dataclass
class GlobalDecl:
    name: str
    type: Type
    pos: Pos = field(default=UNKNOWN_POS, compare=False)


@dataclass
class FunctionDecl:
    name: str
    params: list[tuple[str, Type]]
    return_type: Type
    body: list[Stmt]
    pos: Pos = field(default=UNKNOWN_POS, compare=False)

    def param_index(self, name: str) -> int | None:
        for i, (p, _) in enumerate(self.params):
            if p == name:
                return i
        return None


@dataclass
class Program:
    records: list[RecordDecl]
    globals: list[GlobalDecl]
    functions: list[FunctionDecl]

    def function(self, name: str) -> FunctionDecl:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    def global_names(self) -> set[str]:
        return {g.name for g in self.globals}


def walk_stmts(body: list[Stmt]):
    """Yield every statement in `body`, descending into if branches."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, If):
            yield from walk_stmts(stmt.then)
            yield from walk_stmts(stmt.orelse)


def iter_stmts_guarded(body: list[Stmt], guards: tuple[str, ...] = ()):
    """Yield (index, stmt, guard texts) in program order.

    Guards are the enclosing `if` conditions as text; else-branches carry
    the negated form `!(...)`. Indices number every statement, including
    the `if` statements themselves.
    """
    counter = [0]

    def walk(stmts: list[Stmt], active: tuple[str, ...]):
        for stmt in stmts:
            idx = counter[0]
            counter[0] += 1
            yield idx, stmt, active
            if isinstance(stmt, If):
                cond_text = str(stmt.cond)
                yield from walk(stmt.then, active + (cond_text,))
                yield from walk(stmt.orelse, active + (f"!({cond_text})",))

    yield from walk(body, guards)
