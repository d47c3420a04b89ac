"""Pure-Python propagation kernel.

Difference propagation over a FIFO worklist: each node carries a
``pending`` mask of objects not yet pushed through its outgoing
constraints. Points-to sets are Python ints used as bitsets, so set
union is one `|`. The compiled backend mirrors this algorithm exactly,
including the order in which new field nodes are allocated.
"""

from __future__ import annotations

from collections import deque


def solve(cs):
    from . import SolveResult

    num_nodes = cs.num_nodes
    pts: list[int] = [0] * num_nodes
    pending: list[int] = [0] * num_nodes
    copy_out: list[list[int]] = [[] for _ in range(num_nodes)]
    loads_at: list[list[tuple[int, int]]] = [[] for _ in range(num_nodes)]
    stores_at: list[list[tuple[int, int]]] = [[] for _ in range(num_nodes)]
    store_objs_at: list[list[tuple[int, int]]] = [[] for _ in range(num_nodes)]
    edge_seen: set[tuple[int, int]] = set()
    field_nodes: dict[tuple[int, int], int] = dict(cs.field_nodes)

    for src, dst in cs.copies:
        if src != dst and (src, dst) not in edge_seen:
            edge_seen.add((src, dst))
            copy_out[src].append(dst)
    for base, fld, dst in cs.loads:
        loads_at[base].append((fld, dst))
    for base, fld, src in cs.stores:
        stores_at[base].append((fld, src))
    for base, fld, obj in cs.store_objs:
        store_objs_at[base].append((fld, obj))

    worklist: deque[int] = deque()
    queued: list[bool] = [False] * num_nodes

    def grow() -> int:
        node = len(pts)
        pts.append(0)
        pending.append(0)
        copy_out.append([])
        loads_at.append([])
        stores_at.append([])
        store_objs_at.append([])
        queued.append(False)
        return node

    def field_node(obj: int, fld: int) -> int:
        key = (obj, fld)
        node = field_nodes.get(key)
        if node is None:
            node = grow()
            field_nodes[key] = node
        return node

    def enqueue(node: int) -> None:
        if not queued[node]:
            queued[node] = True
            worklist.append(node)

    def add(node: int, mask: int) -> None:
        new = mask & ~(pts[node] | pending[node])
        if new:
            pending[node] |= new
            enqueue(node)

    def add_edge(src: int, dst: int) -> None:
        if src == dst or (src, dst) in edge_seen:
            return
        edge_seen.add((src, dst))
        copy_out[src].append(dst)
        add(dst, pts[src] | pending[src])

    for node, obj in cs.seeds:
        add(node, 1 << obj)

    while worklist:
        node = worklist.popleft()
        queued[node] = False
        delta = pending[node]
        if not delta:
            continue
        pending[node] = 0
        pts[node] |= delta

        if loads_at[node] or stores_at[node] or store_objs_at[node]:
            objs = []
            rest = delta
            while rest:
                low = rest & -rest
                objs.append(low.bit_length() - 1)
                rest ^= low
            for fld, dst in loads_at[node]:
                for obj in objs:
                    add_edge(field_node(obj, fld), dst)
            for fld, src in stores_at[node]:
                for obj in objs:
                    add_edge(src, field_node(obj, fld))
            for fld, obj_in in store_objs_at[node]:
                bit = 1 << obj_in
                for obj in objs:
                    add(field_node(obj, fld), bit)
        for dst in copy_out[node]:
            add(dst, delta)

    return SolveResult(pts=pts, field_nodes=field_nodes)
