"""Call graph construction, SCC condensation, and bottom-up analysis order."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownCalleeError
from .minic.ast import Call, Program, walk_stmts
from .sysapi import is_modeled_api


@dataclass(frozen=True)
class CallEdge:
    caller: str
    callee: str
    site: int  # unique per caller


@dataclass
class CallGraph:
    nodes: set[str]
    edges: list[CallEdge] = field(default_factory=list)

    def callees_of(self, fn: str) -> list[str]:
        seen: list[str] = []
        for e in self.edges:
            if e.caller == fn and e.callee not in seen:
                seen.append(e.callee)
        return seen


@dataclass
class AnalysisOrder:
    """SCC groups ordered callees-first; singletons for non-recursive functions."""

    groups: list[list[str]]


def build_call_graph(program: Program) -> CallGraph:
    """Edges (f, g) for every call in f's body to a declared function g.

    Calls to modeled system APIs are dispatched by transfer functions and
    never become graph nodes. Anything else is an unknown callee.
    """
    declared = {fn.name for fn in program.functions}
    cg = CallGraph(nodes=set(declared))
    for fn in program.functions:
        site = 0
        for stmt in walk_stmts(fn.body):
            if not isinstance(stmt, Call):
                continue
            if stmt.callee in declared:
                cg.edges.append(CallEdge(fn.name, stmt.callee, site))
                site += 1
            elif not is_modeled_api(stmt.callee):
                raise UnknownCalleeError(
                    f"{fn.name} calls {stmt.callee!r}, which is neither declared nor a modeled API"
                )
    return cg


def _tarjan_sccs(graph: dict[str, list[str]]) -> list[list[str]]:
    """SCCs in callee-first order, iterative to survive deep graphs."""
    counter = [0]
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    stack: list[str] = []
    on_stack: set[str] = set()
    sccs: list[list[str]] = []

    for root in sorted(graph):
        if root in index:
            continue
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(graph[root]))]
        while work:
            v, neighbours = work[-1]
            advanced = False
            for w in neighbours:
                if w not in index:
                    index[w] = lowlink[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph[w])))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                scc: list[str] = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.append(w)
                    if w == v:
                        break
                sccs.append(sorted(scc))
    return sccs


def analysis_order(cg: CallGraph) -> AnalysisOrder:
    """Groups in reverse topological order: every callee group precedes its callers.

    Deterministic: members sorted lexicographically, groups ordered by the
    condensation's topology with lexicographic tie-breaking.
    """
    graph: dict[str, list[str]] = {n: [] for n in sorted(cg.nodes)}
    for e in cg.edges:
        if e.callee not in graph[e.caller]:
            graph[e.caller].append(e.callee)
    for n in graph:
        graph[n].sort()

    sccs = _tarjan_sccs(graph)
    group_of = {n: i for i, scc in enumerate(sccs) for n in scc}

    # Tarjan already emits callees before callers; re-sort stably by
    # condensation depth so equal-depth groups come out lexicographically.
    depth: dict[int, int] = {}

    def group_depth(gi: int) -> int:
        if gi in depth:
            return depth[gi]
        d = 0
        for n in sccs[gi]:
            for callee in graph[n]:
                cgi = group_of[callee]
                if cgi != gi:
                    d = max(d, group_depth(cgi) + 1)
        depth[gi] = d
        return d

    order = sorted(range(len(sccs)), key=lambda gi: (group_depth(gi), sccs[gi]))
    return AnalysisOrder([sccs[gi] for gi in order])


def is_recursive_group(cg: CallGraph, group: list[str]) -> bool:
    if len(group) > 1:
        return True
    fn = group[0]
    return any(e.caller == fn and e.callee == fn for e in cg.edges)


def to_dot(cg: CallGraph) -> str:
    lines = ["digraph cg {"]
    for name in sorted(cg.nodes):
        lines.append(f'  "{name}";')
    for e in sorted(cg.edges, key=lambda e: (e.caller, e.callee, e.site)):
        lines.append(f'  "{e.caller}" -> "{e.callee}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
