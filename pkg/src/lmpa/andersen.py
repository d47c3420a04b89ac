"""Field-sensitive inclusion solving for one function.

`solve_function` turns a lowered function body, an initial environment,
and callee summaries into kernel constraints and computes the least
fixpoint:

* AddrOf  x = &v      site(v) ∈ pts(x)
* Copy    x = y       pts(y) ⊆ pts(x)
* Load    x = y->f    ∀o ∈ pts(y): pts(o.f) ⊆ pts(x)
* Store   x->f = y    ∀o ∈ pts(x): pts(y) ⊆ pts(o.f)
* `*y` / `*x` are field accesses through the synthetic field `deref`;
  the deref cell of an address-taken variable's site is the variable's
  own node, so `*(&v)` and `v` stay unified.
* Calls dispatch to the API transfer functions or replay the callee's
  summary ops at the call site; `if` joins both branches.

Strong updates never happen here; only summary-level kill ops (handled
before ops reach this module) remove facts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    InvalidPathError,
    MissingSummaryError,
    UnboundParamError,
    UndeclaredFieldError,
    UnresolvedArgError,
)
from .kernel import ConstraintSystem, solve as kernel_solve
from .memmodel import GLOBAL, STACK, AbstractObject, ObjectTable
from .minic.ast import (
    VOID,
    AddrOf,
    Call,
    Copy,
    Decl,
    FunctionDecl,
    If,
    Load,
    Program,
    PtrType,
    Return,
    Store,
    Type,
    walk_stmts,
)
from .minic.lower import function_var_types
from .minic.types import DEREF_FIELD, Layouts
from .pointsto import PointsToGraph
from .summary.ops import (
    ApiListSummary,
    ConservativeSummary,
    Fresh,
    FunctionSummary,
    NLSummary,
    SummaryOp,
    surviving_ops,
)
from .summary.paths import AccessPath, Global, Param, PathContext, Ret, parse_path, resolve_path_type
from .sysapi import ALLOCATING_APIS, API_CATALOG, ApiCall, is_modeled_api, payload_fields

RET_NODE = "ret"


class FieldIds:
    """Interns field names to dense integer ids for the kernel."""

    def __init__(self) -> None:
        self._ids: dict[str, int] = {}
        self._names: list[str] = []

    def id(self, name: str) -> int:
        fid = self._ids.get(name)
        if fid is None:
            fid = len(self._names)
            self._ids[name] = fid
            self._names.append(name)
        return fid

    def name(self, fid: int) -> str:
        return self._names[fid]


@dataclass
class RunContext:
    """Shared per-run state: one object table and field interner."""

    objects: ObjectTable
    layouts: Layouts
    fields: FieldIds
    global_types: dict[str, Type]

    @staticmethod
    def for_program(program: Program, objects: ObjectTable | None = None) -> "RunContext":
        return RunContext(
            objects=objects or ObjectTable(),
            layouts=Layouts(program),
            fields=FieldIds(),
            global_types={g.name: g.type for g in program.globals},
        )


class ConstraintBuilder:
    """Accumulates kernel constraints; var nodes are keyed by caller-chosen keys."""

    def __init__(self, ctx: RunContext):
        self.ctx = ctx
        self.num_nodes = 0
        self.var_nodes: dict[object, int] = {}
        self.seeds: list[tuple[int, int]] = []
        self.copies: list[tuple[int, int]] = []
        self.loads: list[tuple[int, int, int]] = []
        self.stores: list[tuple[int, int, int]] = []
        self.store_objs: list[tuple[int, int, int]] = []
        self.field_nodes: dict[tuple[int, int], int] = {}

    def _new_node(self) -> int:
        node = self.num_nodes
        self.num_nodes += 1
        return node

    def var_node(self, key) -> int:
        node = self.var_nodes.get(key)
        if node is None:
            node = self._new_node()
            self.var_nodes[key] = node
        return node

    def temp_node(self) -> int:
        return self._new_node()

    def site_for_var(self, obj: AbstractObject, var_key) -> None:
        """Unify the site's deref cell with the variable's own node."""
        fid = self.ctx.fields.id(DEREF_FIELD)
        self.field_nodes.setdefault((obj.id, fid), self.var_node(var_key))

    def field_node(self, obj_id: int, field_name: str) -> int:
        key = (obj_id, self.ctx.fields.id(field_name))
        node = self.field_nodes.get(key)
        if node is None:
            node = self._new_node()
            self.field_nodes[key] = node
        return node

    def seed(self, node: int, obj_id: int) -> None:
        self.seeds.append((node, obj_id))

    def copy(self, src: int, dst: int) -> None:
        self.copies.append((src, dst))

    def load(self, base: int, field_name: str, dst: int) -> None:
        self.loads.append((base, self.ctx.fields.id(field_name), dst))

    def store(self, base: int, field_name: str, src: int) -> None:
        self.stores.append((base, self.ctx.fields.id(field_name), src))

    def store_obj(self, base: int, field_name: str, obj_id: int) -> None:
        self.store_objs.append((base, self.ctx.fields.id(field_name), obj_id))

    def build(self) -> ConstraintSystem:
        return ConstraintSystem(
            num_nodes=self.num_nodes,
            seeds=self.seeds,
            copies=self.copies,
            loads=self.loads,
            stores=self.stores,
            store_objs=self.store_objs,
            field_nodes=dict(self.field_nodes),
        )


@dataclass
class SolveOutcome:
    graph: PointsToGraph
    freed: list[tuple[int, str]]  # (stmt index, object label)


@dataclass
class _CallPlan:
    """Everything needed to lower one call statement."""

    stmt: Call
    index: int
    binding: dict[int, str | int]  # parameter position -> actual operand


class _FunctionLowering:
    def __init__(
        self,
        fn: FunctionDecl,
        ctx: RunContext,
        summaries: dict[str, FunctionSummary],
        decoded: dict[int, list[SummaryOp]],
        callee_decls: dict[str, FunctionDecl],
    ):
        self.fn = fn
        self.ctx = ctx
        self.builder = ConstraintBuilder(ctx)
        self.summaries = summaries
        self.decoded = decoded
        self.callee_decls = callee_decls
        self.var_types = function_var_types(fn)
        self.free_sites: list[tuple[int, int]] = []  # (stmt index, arg node)

    # -- name resolution ---------------------------------------------------

    def node_of(self, name: str) -> int:
        return self.builder.var_node(name)

    def operand_node(self, operand: str | int) -> int | None:
        if isinstance(operand, int):
            return None
        return self.node_of(operand)

    def type_of(self, name: str) -> Type | None:
        return self.var_types.get(name) or self.ctx.global_types.get(name)

    def _addr_site(self, var: str) -> AbstractObject:
        if var in self.var_types:
            obj = self.ctx.objects.stack_site(self.fn.name, var, self.var_types[var])
        else:
            obj = self.ctx.objects.global_site(var, self.ctx.global_types.get(var))
        self.builder.site_for_var(obj, var)
        return obj

    # -- statement walk ----------------------------------------------------

    def declare_all(self) -> None:
        for name, _ in self.fn.params:
            self.node_of(name)
        self.node_of(RET_NODE)
        for gname in self.ctx.global_types:
            self.node_of(gname)
        for stmt in walk_stmts(self.fn.body):
            if isinstance(stmt, Decl):
                self.node_of(stmt.name)

    def lower_body(self) -> None:
        index = [0]

        def walk(stmts):
            for stmt in stmts:
                idx = index[0]
                index[0] += 1
                if isinstance(stmt, If):
                    walk(stmt.then)
                    walk(stmt.orelse)
                    continue
                self.lower_stmt(stmt, idx)

        walk(self.fn.body)

    def lower_stmt(self, stmt, idx: int) -> None:
        b = self.builder
        if isinstance(stmt, Decl):
            return
        if isinstance(stmt, AddrOf):
            b.seed(self.node_of(stmt.dst), self._addr_site(stmt.src).id)
            return
        if isinstance(stmt, Copy):
            src = self.operand_node(stmt.src)
            if src is not None:
                b.copy(src, self.node_of(stmt.dst))
            return
        if isinstance(stmt, Load):
            b.load(self.node_of(stmt.base), stmt.field or DEREF_FIELD, self.node_of(stmt.dst))
            return
        if isinstance(stmt, Store):
            src = self.operand_node(stmt.src)
            if src is not None:
                b.store(self.node_of(stmt.base), stmt.field or DEREF_FIELD, src)
            return
        if isinstance(stmt, Return):
            src = self.operand_node(stmt.src) if stmt.src is not None else None
            if src is not None:
                b.copy(src, self.node_of(RET_NODE))
            return
        if isinstance(stmt, Call):
            self.lower_call(stmt, idx)
            return
        raise TypeError(f"statement not lowered: {stmt!r}")

    # -- calls ---------------------------------------------------------------

    def lower_call(self, stmt: Call, idx: int) -> None:
        if is_modeled_api(stmt.callee):
            self.lower_api_body_call(stmt, idx)
            return
        summary = self.summaries.get(stmt.callee)
        if summary is None:
            raise MissingSummaryError(f"{self.fn.name}: no summary for callee {stmt.callee!r}")
        plan = _CallPlan(stmt, idx, dict(enumerate(stmt.args)))
        if isinstance(summary, ApiListSummary):
            for call in summary.calls:
                self.lower_api_summary_call(call, plan)
        elif isinstance(summary, NLSummary):
            ops = self.decoded.get(idx)
            if ops is None:
                ops = summary.raw.ops
            self.apply_ops(surviving_ops(ops), plan)
        elif isinstance(summary, ConservativeSummary):
            self.apply_ops(surviving_ops(summary.ops), plan)
        else:  # pragma: no cover - summary union is closed
            raise TypeError(f"unknown summary {summary!r}")

    def lower_api_body_call(self, stmt: Call, idx: int) -> None:
        info = API_CATALOG[stmt.callee]
        nodes: dict[str, int | None] = {}
        types: dict[str, Type | None] = {}
        for formal, pos in info["positional"].items():
            if pos < len(stmt.args):
                arg = stmt.args[pos]
                nodes[formal] = self.operand_node(arg)
                types[formal] = self.type_of(arg) if isinstance(arg, str) else None
        if stmt.dst is not None:
            nodes["ret"] = self.node_of(stmt.dst)
            types["ret"] = self.type_of(stmt.dst)
        self.lower_api(stmt.callee, nodes, types, idx)

    def lower_api_summary_call(self, call: ApiCall, plan: _CallPlan) -> None:
        nodes: dict[str, int | None] = {}
        types: dict[str, Type | None] = {}
        for formal, expr in call.arg_map.items():
            node, vtype = self.resolve_call_expr(expr, plan)
            nodes[formal] = node
            types[formal] = vtype
        self.lower_api(call.api, nodes, types, plan.index)

    def resolve_call_expr(self, expr: str, plan: _CallPlan) -> tuple[int | None, Type | None]:
        """Resolve a callee-frame access-path expression at this call site."""
        return self.resolve_path(parse_path(expr), plan, for_load=True)

    def resolve_path(
        self, path: AccessPath, plan: _CallPlan, *, for_load: bool
    ) -> tuple[int | None, Type | None]:
        """Node holding the path's value (loads through selectors); None when
        the path bottoms out in a literal argument or a discarded result."""
        node, vtype = self.resolve_base(path, plan)
        if node is None:
            return None, None
        for sel in path.selectors:
            temp = self.builder.temp_node()
            self.builder.load(node, sel, temp)
            node = temp
            vtype = self._selector_type(vtype, sel)
        return node, vtype

    def resolve_base(self, path: AccessPath, plan: _CallPlan) -> tuple[int | None, Type | None]:
        base = path.base
        if isinstance(base, Param):
            if base.index not in plan.binding:
                raise UnboundParamError(
                    f"{self.fn.name}: call to {plan.stmt.callee!r} binds no param {base.index}"
                )
            actual = plan.binding[base.index]
            if isinstance(actual, int):
                return None, None
            return self.node_of(actual), self.type_of(actual)
        if isinstance(base, Ret):
            if plan.stmt.dst is None:
                return None, None
            return self.node_of(plan.stmt.dst), self.type_of(plan.stmt.dst)
        if isinstance(base, Global):
            if base.name not in self.ctx.global_types:
                return None, None
            return self.node_of(base.name), self.ctx.global_types[base.name]
        raise TypeError(base)

    def _selector_type(self, vtype: Type | None, sel: str) -> Type | None:
        if not isinstance(vtype, PtrType):
            return None
        try:
            return self.ctx.layouts.field_type(vtype.pointee, sel)
        except UndeclaredFieldError:
            return None

    # -- API transfer functions ---------------------------------------------

    def lower_api(
        self,
        api: str,
        nodes: dict[str, int | None],
        types: dict[str, Type | None],
        idx: int,
    ) -> None:
        b = self.builder
        if api in ALLOCATING_APIS:
            ret = nodes.get("ret")
            if ret is not None:
                ret_type = types.get("ret")
                otype = ret_type.pointee if isinstance(ret_type, PtrType) else None
                obj = self.ctx.objects.heap_site(self.fn.name, idx, otype)
                b.seed(ret, obj.id)
                if api == "strdup":
                    src = nodes.get("src")
                    if src is not None:
                        self._copy_payload(src, types.get("src"), target_obj=obj)
            return
        if api == "memcpy":
            dst, src = nodes.get("dst"), nodes.get("src")
            if dst is not None and src is not None:
                self._copy_payload(src, types.get("src"), target_node=dst)
            return
        if api == "free":
            dst = nodes.get("dst")
            if dst is not None:
                self.free_sites.append((idx, dst))
            return
        # memset / snprintf: no points-to facts.

    def _copy_payload(
        self,
        src: int,
        src_type: Type | None,
        *,
        target_node: int | None = None,
        target_obj: AbstractObject | None = None,
    ) -> None:
        """pts(os.f) ⊆ pts(od.f) for every payload field f of the src pointee."""
        pointee = src_type.pointee if isinstance(src_type, PtrType) else None
        for fname in payload_fields(pointee, self.ctx.layouts):
            temp = self.builder.temp_node()
            self.builder.load(src, fname, temp)
            if target_node is not None:
                self.builder.store(target_node, fname, temp)
            else:
                assert target_obj is not None
                self.builder.copy(temp, self.builder.field_node(target_obj.id, fname))

    # -- summary op application ----------------------------------------------

    def mint_for_tag(self, tag: str, plan: _CallPlan, otype: Type | None) -> AbstractObject:
        root = tag.split("~", 1)[0]
        if root.startswith("stack@"):
            owner, var = root[len("stack@") :].split(":", 1)
            return self.ctx.objects.stack_site(owner, var, otype)
        if root.startswith("global@"):
            name = root[len("global@") :]
            return self.ctx.objects.global_site(name, self.ctx.global_types.get(name))
        return self.ctx.objects.minted(self.fn.name, plan.index, tag, root, otype)

    def apply_ops(self, ops: list[SummaryOp], plan: _CallPlan) -> None:
        callee = self.callee_decls.get(plan.stmt.callee)
        for op in ops:
            self.apply_op(op, plan, callee)

    def apply_op(self, op: SummaryOp, plan: _CallPlan, callee: FunctionDecl | None) -> None:
        b = self.builder
        src_node: int | None = None
        src_obj: AbstractObject | None = None
        if isinstance(op.src, Fresh):
            otype = self._op_value_type(op, callee)
            src_obj = self.mint_for_tag(op.src.tag, plan, otype)
        elif isinstance(op.src, AccessPath):
            if isinstance(op.src.base, Ret):
                return  # a summary cannot read its own return slot
            src_node, _ = self.resolve_path(op.src, plan, for_load=True)
            if src_node is None:
                return
        else:
            return  # kill ops are filtered before application

        if op.dst.is_var_level:
            dst_node, _ = self.resolve_base(op.dst, plan)
            if dst_node is None:
                return
            if src_obj is not None:
                b.seed(dst_node, src_obj.id)
            else:
                b.copy(src_node, dst_node)
            return

        prefix = AccessPath(op.dst.base, op.dst.selectors[:-1])
        final = op.dst.selectors[-1]
        base_node, _ = self.resolve_path(prefix, plan, for_load=True)
        if base_node is None:
            return
        if src_obj is not None:
            b.store_obj(base_node, final, src_obj.id)
        else:
            b.store(base_node, final, src_node)

    def _op_value_type(self, op: SummaryOp, callee: FunctionDecl | None) -> Type | None:
        """Pointee type of the op's dst in the callee frame (for minted objects)."""
        if callee is None:
            return None
        ctx = PathContext(
            [t for _, t in callee.params], callee.return_type, self.ctx.global_types
        )
        try:
            vtype = resolve_path_type(op.dst, ctx, self.ctx.layouts)
        except InvalidPathError:
            return None
        return vtype.pointee if isinstance(vtype, PtrType) else None

    # -- results ---------------------------------------------------------------

    def graph_from_result(self, result) -> PointsToGraph:
        graph = PointsToGraph(self.fn.name, self.ctx.objects)
        for key, node in self.builder.var_nodes.items():
            if isinstance(key, str):
                graph.var_pts[key] = set(result.objects_of(node))
        for (obj_id, fid), node in result.field_nodes.items():
            objs = set(result.objects_of(node))
            if not objs:
                continue
            fname = self.ctx.fields.name(fid)
            graph.field_pts.setdefault((obj_id, fname), set()).update(objs)
        return graph


def seed_from_graph(builder: ConstraintBuilder, init: PointsToGraph) -> None:
    for name, objs in init.var_pts.items():
        node = builder.var_node(name)
        for obj in objs:
            builder.seed(node, obj)
    for (obj_id, fname), objs in init.field_pts.items():
        node = builder.field_node(obj_id, fname)
        for obj in objs:
            builder.seed(node, obj)


def solve_function(
    fn: FunctionDecl,
    init: PointsToGraph,
    summaries: dict[str, FunctionSummary],
    ctx: RunContext,
    decoded: dict[int, list[SummaryOp]] | None = None,
    callee_decls: dict[str, FunctionDecl] | None = None,
) -> SolveOutcome:
    """Least fixpoint of the inclusion constraints for one lowered function.

    `init` seeds the environment (parameter specs); `summaries` must
    cover every declared callee; `decoded` carries per-call-site decoded
    ops for NL summaries (falling back to the retained raw ops).
    """
    lowering = _FunctionLowering(fn, ctx, summaries, decoded or {}, callee_decls or {})
    lowering.declare_all()
    seed_from_graph(lowering.builder, init)
    lowering.lower_body()
    result = kernel_solve(lowering.builder.build())
    graph = lowering.graph_from_result(result)
    freed: list[tuple[int, str]] = []
    for idx, node in lowering.free_sites:
        for label in sorted(ctx.objects.label(o) for o in result.objects_of(node)):
            freed.append((idx, label))
    return SolveOutcome(graph=graph, freed=freed)


def _host_lowering(g: PointsToGraph, ctx: RunContext) -> _FunctionLowering:
    """A lowering whose node space mirrors an existing graph's variables."""
    from .minic.ast import VOID

    host = FunctionDecl(g.function, [], VOID, [])
    lowering = _FunctionLowering(host, ctx, {}, {}, {})
    for name in g.var_pts:
        lowering.builder.var_node(name)
    for obj in ctx.objects.all_objects():
        if obj.kind == GLOBAL and obj.var_name in g.var_pts:
            lowering.builder.site_for_var(obj, obj.var_name)
        elif obj.kind == STACK and obj.function == g.function and obj.var_name in g.var_pts:
            lowering.builder.site_for_var(obj, obj.var_name)
    seed_from_graph(lowering.builder, g)
    return lowering


def _delta_between(final: PointsToGraph, init: PointsToGraph) -> PointsToGraph:
    delta = PointsToGraph(init.function, final.objects)
    for name, objs in final.var_pts.items():
        new = objs - init.var_pts.get(name, set())
        if new:
            delta.var_pts[name] = new
    for key, objs in final.field_pts.items():
        new = objs - init.field_pts.get(key, set())
        if new:
            delta.field_pts[key] = new
    return delta


def apply_summary_at_callsite(
    summary: FunctionSummary,
    binding: dict[int, str | int],
    g: PointsToGraph,
    ctx: RunContext,
    *,
    dst: str | None = None,
    callee: FunctionDecl | None = None,
    ops_override: list[SummaryOp] | None = None,
    site_index: int = 0,
) -> PointsToGraph:
    """Instantiate a summary against an existing caller graph; returns the
    additive delta.

    Param bases resolve through `binding` to the caller's points-to sets,
    fresh tags mint caller-side objects (one per tag per call site),
    store/copy ops become inclusion edges, and return ops flow into
    `dst`. Guarded ops apply unconditionally unless killed.
    """
    lowering = _host_lowering(g, ctx)
    stmt = Call(dst, getattr(callee, "name", "<summary>"), [])
    plan = _CallPlan(stmt, site_index, dict(binding))
    if dst is not None:
        lowering.builder.var_node(dst)
    if isinstance(summary, ApiListSummary):
        for call in summary.calls:
            lowering.lower_api_summary_call(call, plan)
    else:
        ops = ops_override
        if ops is None:
            ops = summary.raw.ops if isinstance(summary, NLSummary) else summary.ops
        if callee is not None:
            lowering.callee_decls[stmt.callee] = callee
        for op in surviving_ops(ops):
            lowering.apply_op(op, plan, callee)
    result = kernel_solve(lowering.builder.build())
    final = lowering.graph_from_result(result)
    for name in g.var_pts:
        final.var_pts.setdefault(name, set())
    return _delta_between(final, g)


def apply_api_model(call: ApiCall, g: PointsToGraph, ctx: RunContext, site_index: int = 0) -> PointsToGraph:
    """Apply one modeled API call whose arg_map names variables of `g`.

    Returns the additive delta; `free` contributes no facts (its Freed
    events surface through the full pipeline's diagnostics).
    """
    problem = call.validate()
    if problem:
        raise UnresolvedArgError(problem)
    lowering = _host_lowering(g, ctx)
    nodes: dict[str, int | None] = {}
    types: dict[str, Type | None] = {}
    for formal, expr in call.arg_map.items():
        if expr not in g.var_pts:
            raise UnresolvedArgError(f"arg_map expression {expr!r} resolves to nothing in scope")
        nodes[formal] = lowering.builder.var_node(expr)
        types[formal] = ctx.global_types.get(expr)
    # Variable types are not recorded in the graph; recover the pointee
    # type for allocation/copy from the object table when possible.
    for formal, expr in call.arg_map.items():
        if types[formal] is None:
            objs = g.var_pts.get(expr, set())
            for oid in sorted(objs):
                otype = ctx.objects.get(oid).otype
                if otype is not None:
                    types[formal] = PtrType(otype)
                    break
    lowering.lower_api(call.api, nodes, types, site_index)
    result = kernel_solve(lowering.builder.build())
    final = lowering.graph_from_result(result)
    for name in g.var_pts:
        final.var_pts.setdefault(name, set())
    return _delta_between(final, g)
