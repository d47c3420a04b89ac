"""Summary operations: the structured IR a function's effects decode to.

A summary is a sequence of ops over access paths:

    alloc  dst <- fresh:<tag>   an allocation escaping at dst
    store  dst <- src           a field-path receives src's values
    copy   dst <- src           a variable-level location receives src
    return ret <- src           the return value carries src
    kill   dst                  dst was strongly updated: only the last
                                non-kill op writing dst survives application

Ops may carry an opaque guard condition (never evaluated). Fresh tags
are unique within one summary; their text encodes the underlying
allocation site so caller-side minting preserves provenance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..minic.ast import FunctionDecl, PtrType, Type, is_pointer
from ..minic.types import DEREF_FIELD, Layouts
from ..sysapi import ApiCall
from .paths import AccessPath, Param, Ret, format_path, parse_path

OP_KINDS = ("alloc", "store", "copy", "return", "kill")


@dataclass(frozen=True)
class Fresh:
    tag: str

    def __str__(self) -> str:
        return f"fresh:{self.tag}"


@dataclass(frozen=True)
class SummaryOp:
    op: str
    dst: AccessPath
    src: AccessPath | Fresh | None = None  # absent for kill
    cond: str | None = None

    def to_json(self) -> dict:
        if self.src is None:
            src = None
        elif isinstance(self.src, Fresh):
            src = f"fresh:{self.src.tag}"
        else:
            src = format_path(self.src)
        return {"op": self.op, "dst": format_path(self.dst), "src": src, "cond": self.cond}

    @staticmethod
    def from_json(doc: dict) -> "SummaryOp":
        op = doc["op"]
        dst = parse_path(doc["dst"])
        raw_src = doc.get("src")
        src: AccessPath | Fresh | None
        if raw_src is None:
            src = None
        elif isinstance(raw_src, str) and raw_src.startswith("fresh:"):
            src = Fresh(raw_src[len("fresh:") :])
        else:
            src = parse_path(raw_src)
        return SummaryOp(op, dst, src, doc.get("cond"))


def op_kind_for(dst: AccessPath, src: AccessPath | Fresh) -> str:
    """Canonical op kind from the shapes of dst and src."""
    if isinstance(src, Fresh):
        return "alloc" if dst.is_var_level else "store"
    if isinstance(dst.base, Ret) and dst.is_var_level:
        return "return"
    return "copy" if dst.is_var_level else "store"


def surviving_ops(ops: list[SummaryOp]) -> list[SummaryOp]:
    """Apply kill semantics: for each killed dst keep only the last writer."""
    killed = {format_path(op.dst) for op in ops if op.op == "kill"}
    if not killed:
        return [op for op in ops if op.op != "kill"]
    last_writer: dict[str, int] = {}
    for i, op in enumerate(ops):
        if op.op != "kill" and format_path(op.dst) in killed:
            last_writer[format_path(op.dst)] = i
    out: list[SummaryOp] = []
    for i, op in enumerate(ops):
        if op.op == "kill":
            continue
        dst_text = format_path(op.dst)
        if dst_text in killed and last_writer[dst_text] != i:
            continue
        out.append(op)
    return out


@dataclass
class RawSummary:
    """Escaping effects extracted from a solved graph: the clamp superset."""

    ops: list[SummaryOp] = field(default_factory=list)
    conditions: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ops": [op.to_json() for op in self.ops], "conditions": list(self.conditions)}

    def op_signatures(self) -> set[tuple]:
        """Kind/dst/src triples with fresh tags erased, for stability checks."""
        out = set()
        for op in self.ops:
            src = "fresh" if isinstance(op.src, Fresh) else (format_path(op.src) if op.src else None)
            out.add((op.op, format_path(op.dst), src, op.cond))
        return out


@dataclass
class NLSummary:
    """Natural-language rendering of a raw summary; the raw part is retained
    as the superset every decoded op is clamped against."""

    text: str
    conditions: list[str]
    raw: RawSummary


@dataclass
class ApiListSummary:
    calls: list[ApiCall]


@dataclass
class ConservativeSummary:
    """Maximal-effect summary used when precision is unavailable (widened
    recursion groups, forced control runs)."""

    ops: list[SummaryOp]


FunctionSummary = ApiListSummary | NLSummary | ConservativeSummary


def summary_kind(summary: FunctionSummary) -> str:
    if isinstance(summary, ApiListSummary):
        return "api_list"
    if isinstance(summary, NLSummary):
        return "nl"
    return "conservative"


def _reachable_pointer_paths(root: AccessPath, t: Type, layouts: Layouts, depth: int) -> list[tuple[AccessPath, Type]]:
    """Pointer-typed paths reachable from a pointer of type t, up to `depth` selectors."""
    out: list[tuple[AccessPath, Type]] = []
    if depth == 0 or not isinstance(t, PtrType):
        return out
    pointee = t.pointee
    selectors: list[tuple[str, Type]] = []
    if isinstance(pointee, PtrType):
        selectors.append((DEREF_FIELD, pointee))
    for fname, ftype in layouts.fields_of(pointee).items():
        if isinstance(ftype, PtrType):
            selectors.append((fname, ftype))
    for sel, stype in selectors:
        path = root.extend(sel)
        out.append((path, stype))
        out.extend(_reachable_pointer_paths(path, stype, layouts, depth - 1))
    return out


def conservative_ops(fn: FunctionDecl, layouts: Layouts, depth: int = 2) -> list[SummaryOp]:
    """Worst-case effects: the return value may alias every pointer argument,
    and every parameter-reachable pointer field may receive every pointer
    argument. Reachability is cut off at `depth` selectors so recursive
    record types stay finite."""
    pointer_params = [i for i, (_, t) in enumerate(fn.params) if is_pointer(t)]
    ops: list[SummaryOp] = []
    if is_pointer(fn.return_type):
        for j in pointer_params:
            ops.append(SummaryOp("return", AccessPath(Ret()), AccessPath(Param(j))))
    for i in pointer_params:
        root = AccessPath(Param(i))
        ptype = fn.params[i][1]
        for path, _ in _reachable_pointer_paths(root, ptype, layouts, depth):
            for j in pointer_params:
                ops.append(SummaryOp("store", path, AccessPath(Param(j))))
    return ops
