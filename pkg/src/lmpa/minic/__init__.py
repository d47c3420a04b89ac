"""MiniC frontend: parsing, validation, pretty-printing, and IR lowering."""

from .ast import (
    CHAR,
    INT,
    VOID,
    AccessExpr,
    AddrOf,
    ArrayType,
    Call,
    Condition,
    Copy,
    Decl,
    FunctionDecl,
    GlobalDecl,
    If,
    Load,
    Program,
    PtrType,
    RecordDecl,
    RecordType,
    Return,
    Stmt,
    Store,
    Type,
    is_pointer,
    is_scalar,
    walk_stmts,
)
from .lower import function_var_types, is_lowered, lower_function, lower_program
from .parser import parse_module
from .pretty import format_function, format_signature, pretty_print
from .types import DEREF_FIELD, ELTS_FIELD, Layouts

__all__ = [
    "CHAR",
    "INT",
    "VOID",
    "DEREF_FIELD",
    "ELTS_FIELD",
    "AccessExpr",
    "AddrOf",
    "ArrayType",
    "Call",
    "Condition",
    "Copy",
    "Decl",
    "FunctionDecl",
    "GlobalDecl",
    "If",
    "Layouts",
    "Load",
    "Program",
    "PtrType",
    "RecordDecl",
    "RecordType",
    "Return",
    "Stmt",
    "Store",
    "Type",
    "format_function",
    "format_signature",
    "function_var_types",
    "is_lowered",
    "is_pointer",
    "is_scalar",
    "lower_function",
    "lower_program",
    "parse_module",
    "pretty_print",
    "walk_stmts",
]
