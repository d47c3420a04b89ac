"""Abstract memory objects and the per-run object table.

One table is shared by every solve in a run, so ids are unique run-wide
and cross-function queries (aliasing between two functions' views) are
meaningful. Heap objects use allocation-site abstraction: one object per
allocation statement per function. Objects minted in a caller for a
callee summary's fresh tag remember the tag as `root_label`, which is
the underlying allocation site's label; canonical comparisons (the
inline oracle) use it to conflate per-call-site copies.
"""

from __future__ import annotations

from dataclasses import dataclass

from .minic.ast import Type

HEAP = "heap"
STACK = "stack"
GLOBAL = "global"
VIRTUAL_PARAM = "vparam"
VIRTUAL_FIELD = "vfield"


@dataclass
class AbstractObject:
    id: int
    kind: str
    label: str
    root_label: str
    function: str | None  # owning function (None for global sites)
    otype: Type | None  # type of the memory the object models
    var_name: str | None = None  # stack/global sites: the variable they model
    seed_path: str | None = None  # virtual objects: canonical access path text

    def is_virtual(self) -> bool:
        return self.kind in (VIRTUAL_PARAM, VIRTUAL_FIELD)


class ObjectTable:
    """Registers abstract objects with stable, deterministic ids."""

    def __init__(self) -> None:
        self._objects: list[AbstractObject] = []
        self._index: dict[tuple, int] = {}

    def __len__(self) -> int:
        return len(self._objects)

    def get(self, oid: int) -> AbstractObject:
        return self._objects[oid]

    def all_objects(self) -> list[AbstractObject]:
        return list(self._objects)

    def label(self, oid: int) -> str:
        return self._objects[oid].label

    def labels(self, oids) -> list[str]:
        return sorted(self._objects[o].label for o in oids)

    def _intern(self, key: tuple, build) -> AbstractObject:
        if key in self._index:
            return self._objects[self._index[key]]
        oid = len(self._objects)
        obj = build(oid)
        self._objects.append(obj)
        self._index[key] = oid
        return obj

    def stack_site(self, function: str, var: str, otype: Type | None) -> AbstractObject:
        key = (STACK, function, var)
        label = f"stack@{function}:{var}"
        return self._intern(
            key,
            lambda oid: AbstractObject(oid, STACK, label, label, function, otype, var_name=var),
        )

    def global_site(self, name: str, otype: Type | None) -> AbstractObject:
        key = (GLOBAL, name)
        label = f"global@{name}"
        return self._intern(
            key,
            lambda oid: AbstractObject(oid, GLOBAL, label, label, None, otype, var_name=name),
        )

    def heap_site(self, function: str, stmt_index: int, otype: Type | None) -> AbstractObject:
        key = (HEAP, function, stmt_index)
        label = f"heap@{function}:{stmt_index}"
        return self._intern(
            key,
            lambda oid: AbstractObject(oid, HEAP, label, label, function, otype),
        )

    def minted(
        self,
        caller: str,
        stmt_index: int,
        tag: str,
        root_label: str,
        otype: Type | None,
    ) -> AbstractObject:
        """Caller-side object for a summary's fresh tag, one per tag per call site."""
        key = ("mint", caller, stmt_index, tag)
        label = f"{root_label}#{caller}:{stmt_index}"
        return self._intern(
            key,
            lambda oid: AbstractObject(oid, HEAP, label, root_label, caller, otype),
        )

    def virtual_param(self, function: str, index: int, label: str, otype: Type | None, seed_path: str) -> AbstractObject:
        key = (VIRTUAL_PARAM, function, index)
        return self._intern(
            key,
            lambda oid: AbstractObject(
                oid, VIRTUAL_PARAM, label, f"virt@{function}:{seed_path}", function, otype, seed_path=seed_path
            ),
        )

    def virtual_field(self, function: str, path: str, label: str, otype: Type | None) -> AbstractObject:
        key = (VIRTUAL_FIELD, function, path)
        return self._intern(
            key,
            lambda oid: AbstractObject(
                oid, VIRTUAL_FIELD, label, f"virt@{function}:{path}", function, otype, seed_path=path
            ),
        )
