"""Recursive-descent parser and static validation for MiniC.

`parse_module` produces a validated `Program`: unique top-level names,
resolvable type references, unique parameter/local names, and return
coverage on every control path for non-void functions. Multi-selector
load/store chains are kept as Chain nodes; `lower.py` splits them.
"""

from __future__ import annotations

from ..errors import DuplicateNameError, ParseError, UndeclaredFieldError, UnknownTypeError
from .ast import (
    CHAR,
    COND_OPS,
    INT,
    VOID,
    AccessExpr,
    AddrOf,
    ArrayType,
    Call,
    ChainLoad,
    ChainStore,
    Condition,
    Copy,
    Decl,
    FunctionDecl,
    GlobalDecl,
    If,
    Load,
    Pos,
    Program,
    PtrType,
    RecordDecl,
    RecordType,
    Return,
    Stmt,
    Store,
    Type,
    walk_stmts,
)
from .lexer import Token, tokenize


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.cur
        self.pos += 1
        return tok

    def _error(self, message: str) -> ParseError:
        return ParseError(message, self.cur.line, self.cur.column)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.cur
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise self._error(f"expected {want!r}, found {tok.text!r}")
        return self._advance()

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        tok = self.cur
        if tok.kind == kind and (text is None or tok.text == text):
            return self._advance()
        return None

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.cur.kind == kind and (text is None or self.cur.text == text)

    # -- grammar ----------------------------------------------------------

    def program(self) -> Program:
        records: list[RecordDecl] = []
        globals_: list[GlobalDecl] = []
        functions: list[FunctionDecl] = []
        while not self.at("eof"):
            if self.at("keyword", "struct"):
                records.append(self.record_decl())
            elif self.at("keyword", "global"):
                globals_.append(self.global_decl())
            elif self.at("keyword", "fn"):
                functions.append(self.function_decl())
            else:
                raise self._error("expected 'struct', 'global', or 'fn'")
        return Program(records, globals_, functions)

    def record_decl(self) -> RecordDecl:
        start = self.expect("keyword", "struct")
        name = self.expect("ident").text
        self.expect("symbol", "{")
        fields: list[tuple[str, Type]] = []
        while not self.accept("symbol", "}"):
            fname = self.expect("ident").text
            self.expect("symbol", ":")
            ftype = self.type_expr()
            self.expect("symbol", ";")
            fields.append((fname, ftype))
        return RecordDecl(name, fields, pos=Pos(start.line, start.column))

    def global_decl(self) -> GlobalDecl:
        start = self.expect("keyword", "global")
        name = self.expect("ident").text
        self.expect("symbol", ":")
        gtype = self.type_expr()
        self.expect("symbol", ";")
        return GlobalDecl(name, gtype, pos=Pos(start.line, start.column))

    def function_decl(self) -> FunctionDecl:
        start = self.expect("keyword", "fn")
        name = self.expect("ident").text
        self.expect("symbol", "(")
        params: list[tuple[str, Type]] = []
        if not self.at("symbol", ")"):
            while True:
                pname = self.expect("ident").text
                self.expect("symbol", ":")
                ptype = self.type_expr()
                params.append((pname, ptype))
                if not self.accept("symbol", ","):
                    break
        self.expect("symbol", ")")
        self.expect("symbol", "->")
        rtype = self.type_expr()
        body = self.block()
        return FunctionDecl(name, params, rtype, body, pos=Pos(start.line, start.column))

    def type_expr(self) -> Type:
        tok = self.expect("ident")
        if tok.text == "int":
            return INT
        if tok.text == "char":
            return CHAR
        if tok.text == "void":
            return VOID
        if tok.text in ("ptr", "array"):
            self.expect("symbol", "<")
            inner = self.type_expr()
            self.expect("symbol", ">")
            return PtrType(inner) if tok.text == "ptr" else ArrayType(inner)
        return RecordType(tok.text)

    def block(self) -> list[Stmt]:
        self.expect("symbol", "{")
        stmts: list[Stmt] = []
        while not self.accept("symbol", "}"):
            stmts.append(self.statement())
        return stmts

    def statement(self) -> Stmt:
        tok = self.cur
        pos = Pos(tok.line, tok.column)
        if self.accept("keyword", "let"):
            name = self.expect("ident").text
            self.expect("symbol", ":")
            dtype = self.type_expr()
            self.expect("symbol", ";")
            return Decl(name, dtype, pos=pos)
        if self.accept("keyword", "return"):
            src: str | int | None = None
            if not self.at("symbol", ";"):
                src = self.value_operand()
            self.expect("symbol", ";")
            return Return(src, pos=pos)
        if self.accept("keyword", "if"):
            self.expect("symbol", "(")
            cond = self.condition()
            self.expect("symbol", ")")
            then = self.block()
            orelse: list[Stmt] = []
            if self.accept("keyword", "else"):
                orelse = self.block()
            return If(cond, then, orelse, pos=pos)
        if self.accept("symbol", "*"):
            base = self.expect("ident").text
            self.expect("symbol", "=")
            src = self.value_operand()
            self.expect("symbol", ";")
            return Store(base, None, src, pos=pos)
        name = self.expect("ident").text
        if self.at("symbol", "("):
            args = self.call_args()
            self.expect("symbol", ";")
            return Call(None, name, args, pos=pos)
        if self.at("symbol", "->"):
            fields = self.selector_chain()
            self.expect("symbol", "=")
            src = self.value_operand()
            self.expect("symbol", ";")
            if len(fields) == 1:
                return Store(name, fields[0], src, pos=pos)
            return ChainStore(name, fields, src, pos=pos)
        self.expect("symbol", "=")
        stmt = self.assignment_rhs(name, pos)
        self.expect("symbol", ";")
        return stmt

    def assignment_rhs(self, dst: str, pos: Pos) -> Stmt:
        if self.accept("symbol", "&"):
            src = self.expect("ident").text
            return AddrOf(dst, src, pos=pos)
        if self.accept("symbol", "*"):
            base = self.expect("ident").text
            return Load(dst, base, None, pos=pos)
        if self.at("int"):
            return Copy(dst, int(self._advance().text), pos=pos)
        name = self.expect("ident").text
        if self.at("symbol", "("):
            args = self.call_args()
            return Call(dst, name, args, pos=pos)
        if self.at("symbol", "->"):
            fields = self.selector_chain()
            if len(fields) == 1:
                return Load(dst, name, fields[0], pos=pos)
            return ChainLoad(dst, name, fields, pos=pos)
        return Copy(dst, name, pos=pos)

    def selector_chain(self) -> list[str]:
        fields: list[str] = []
        while self.accept("symbol", "->"):
            fields.append(self.expect("ident").text)
        return fields

    def call_args(self) -> list[str | int]:
        self.expect("symbol", "(")
        args: list[str | int] = []
        if not self.at("symbol", ")"):
            while True:
                args.append(self.value_operand())
                if not self.accept("symbol", ","):
                    break
        self.expect("symbol", ")")
        return args

    def value_operand(self) -> str | int:
        if self.at("int"):
            return int(self._advance().text)
        return self.expect("ident").text

    def condition(self) -> Condition:
        lhs = self.access_expr()
        op_tok = self.cur
        if op_tok.kind != "symbol" or op_tok.text not in COND_OPS:
            raise self._error(f"expected comparison operator, found {op_tok.text!r}")
        self._advance()
        rhs: AccessExpr | int
        if self.at("int"):
            rhs = int(self._advance().text)
        else:
            rhs = self.access_expr()
        return Condition(lhs, op_tok.text, rhs)

    def access_expr(self) -> AccessExpr:
        base = self.expect("ident").text
        fields = tuple(self.selector_chain())
        return AccessExpr(base, fields)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _check_type(t: Type, record_names: set[str], where: str) -> None:
    if isinstance(t, RecordType):
        if t.name not in record_names:
            raise UnknownTypeError(f"unknown type {t.name!r} in {where}")
    elif isinstance(t, (PtrType, ArrayType)):
        inner = t.pointee if isinstance(t, PtrType) else t.elem
        _check_type(inner, record_names, where)


def _check_return_placement(body: list[Stmt], fn_name: str) -> None:
    # A return must end its block: anything after it is dead code.
    for i, stmt in enumerate(body):
        if isinstance(stmt, Return) and i != len(body) - 1:
            raise ParseError(
                f"unreachable statement after return in {fn_name!r}",
                stmt.pos.line,
                stmt.pos.column,
            )
        if isinstance(stmt, If):
            _check_return_placement(stmt.then, fn_name)
            _check_return_placement(stmt.orelse, fn_name)


def _always_returns(body: list[Stmt]) -> bool:
    for stmt in body:
        if isinstance(stmt, Return):
            return True
        if isinstance(stmt, If):
            if stmt.orelse and _always_returns(stmt.then) and _always_returns(stmt.orelse):
                return True
    return False


def _validate(program: Program) -> None:
    record_names: set[str] = set()
    for rec in program.records:
        if rec.name in record_names:
            raise DuplicateNameError(f"record {rec.name!r} declared twice")
        record_names.add(rec.name)
        seen_fields: set[str] = set()
        for fname, ftype in rec.fields:
            if fname in seen_fields:
                raise DuplicateNameError(f"field {fname!r} declared twice in {rec.name!r}")
            seen_fields.add(fname)
            _check_type(ftype, record_names | {r.name for r in program.records}, f"field {rec.name}.{fname}")

    all_records = {r.name for r in program.records}
    global_names: set[str] = set()
    for g in program.globals:
        if g.name in global_names:
            raise DuplicateNameError(f"global {g.name!r} declared twice")
        global_names.add(g.name)
        _check_type(g.type, all_records, f"global {g.name}")

    fn_names: set[str] = set()
    for fn in program.functions:
        if fn.name in fn_names:
            raise DuplicateNameError(f"function {fn.name!r} declared twice")
        fn_names.add(fn.name)
        seen_params: set[str] = set()
        for pname, ptype in fn.params:
            if pname in seen_params:
                raise DuplicateNameError(f"parameter {pname!r} declared twice in {fn.name!r}")
            seen_params.add(pname)
            _check_type(ptype, all_records, f"parameter {fn.name}({pname})")
        _check_type(fn.return_type, all_records, f"return type of {fn.name}")
        declared = set(seen_params)
        for stmt in walk_stmts(fn.body):
            if isinstance(stmt, Decl):
                if stmt.name in declared:
                    raise DuplicateNameError(f"{stmt.name!r} declared twice in {fn.name!r}")
                declared.add(stmt.name)
                _check_type(stmt.type, all_records, f"local {fn.name}.{stmt.name}")
        _check_return_placement(fn.body, fn.name)
        if fn.return_type != VOID and not _always_returns(fn.body):
            raise ParseError(
                f"function {fn.name!r} does not return on every path", fn.pos.line, fn.pos.column
            )


def _check_scopes(program: Program) -> None:
    """Every referenced name must be a parameter, local, global, or callee."""
    from .types import Layouts

    layouts = Layouts(program)
    global_types = {g.name: g.type for g in program.globals}

    for fn in program.functions:
        local_types: dict[str, Type] = dict(fn.params)
        for stmt in walk_stmts(fn.body):
            if isinstance(stmt, Decl):
                local_types[stmt.name] = stmt.type
        in_scope = local_types.keys() | global_types.keys()

        def type_of(name: str) -> Type:
            return local_types.get(name) or global_types[name]

        def need(name: str, stmt: Stmt) -> None:
            if name not in in_scope:
                raise ParseError(
                    f"use of undeclared name {name!r} in {fn.name!r}",
                    stmt.pos.line,
                    stmt.pos.column,
                )

        def check_access(expr: AccessExpr, stmt: Stmt) -> None:
            need(expr.base, stmt)
            t = type_of(expr.base)
            for field in expr.fields:
                try:
                    t = layouts.selector_result(t, field)
                except UndeclaredFieldError as exc:
                    raise ParseError(str(exc), stmt.pos.line, stmt.pos.column) from exc

        for stmt in walk_stmts(fn.body):
            names: list[str] = []
            if isinstance(stmt, AddrOf):
                names = [stmt.dst, stmt.src]
            elif isinstance(stmt, Copy):
                names = [stmt.dst] + ([stmt.src] if isinstance(stmt.src, str) else [])
            elif isinstance(stmt, Load):
                names = [stmt.dst, stmt.base]
            elif isinstance(stmt, Store):
                names = [stmt.base] + ([stmt.src] if isinstance(stmt.src, str) else [])
            elif isinstance(stmt, ChainLoad):
                names = [stmt.dst, stmt.base]
            elif isinstance(stmt, ChainStore):
                names = [stmt.base] + ([stmt.src] if isinstance(stmt.src, str) else [])
            elif isinstance(stmt, Call):
                names = ([stmt.dst] if stmt.dst else []) + [a for a in stmt.args if isinstance(a, str)]
            elif isinstance(stmt, Return):
                names = [stmt.src] if isinstance(stmt.src, str) else []
            elif isinstance(stmt, If):
                check_access(stmt.cond.lhs, stmt)
                if isinstance(stmt.cond.rhs, AccessExpr):
                    check_access(stmt.cond.rhs, stmt)
            for name in names:
                need(name, stmt)


def parse_module(source: str) -> Program:
    """Parse and validate MiniC source text."""
    program = _Parser(tokenize(source)).program()
    _validate(program)
    _check_scopes(program)
    return program
