"""Inclusion-constraint propagation kernel.

This is the hot loop of the whole analyzer: the least-fixpoint solve of
Andersen-style subset constraints over integer node and object ids. Two
interchangeable backends implement the identical algorithm:

* ``lmpa.kernel._speedups`` — Cython extension (built by setup.py)
* ``lmpa.kernel._fallback`` — pure Python

The compiled backend is used when importable unless ``LMPA_PURE_PYTHON``
is set to a non-empty value. Both return bit-identical results (same
points-to masks, same dynamically allocated field-node ids); the test
suite asserts this equivalence and ``benchmarks/bench_kernel.py``
compares their throughput.

Constraint forms over nodes (variables, fields) and objects:

* seed:      o ∈ pts(n)
* copy:      pts(src) ⊆ pts(dst)
* load:      for every o ∈ pts(base): pts(node(o, f)) ⊆ pts(dst)
* store:     for every o ∈ pts(base): pts(src) ⊆ pts(node(o, f))
* store_obj: for every o ∈ pts(base): obj ∈ pts(node(o, f))

``field_nodes`` pre-assigns (object, field) pairs to nodes; the kernel
allocates fresh node ids for pairs first touched during solving. The
pre-assignment is how address-taken variables stay unified with their
own object's ``deref`` cell.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field


@dataclass
class ConstraintSystem:
    num_nodes: int
    seeds: list[tuple[int, int]] = field(default_factory=list)
    copies: list[tuple[int, int]] = field(default_factory=list)
    loads: list[tuple[int, int, int]] = field(default_factory=list)  # (base, field, dst)
    stores: list[tuple[int, int, int]] = field(default_factory=list)  # (base, field, src)
    store_objs: list[tuple[int, int, int]] = field(default_factory=list)  # (base, field, obj)
    field_nodes: dict[tuple[int, int], int] = field(default_factory=dict)


@dataclass
class SolveResult:
    """pts[n] is a bitmask of object ids; field_nodes includes kernel-allocated nodes."""

    pts: list[int]
    field_nodes: dict[tuple[int, int], int]

    def objects_of(self, node: int) -> list[int]:
        mask = self.pts[node]
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out


from . import _fallback  # noqa: E402

solve_python = _fallback.solve

try:
    from . import _speedups  # type: ignore[attr-defined]

    solve_compiled = _speedups.solve
except ImportError:  # pragma: no cover - depends on build environment
    _speedups = None
    solve_compiled = None

if os.environ.get("LMPA_PURE_PYTHON") or solve_compiled is None:
    ACTIVE_BACKEND = "python"
    solve = solve_python
else:
    ACTIVE_BACKEND = "compiled"
    solve = solve_compiled


def available_backends() -> dict[str, object]:
    backends: dict[str, object] = {"python": solve_python}
    if solve_compiled is not None:
        backends["compiled"] = solve_compiled
    return backends
