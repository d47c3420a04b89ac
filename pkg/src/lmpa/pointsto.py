"""Points-to graphs: the per-function Andersen solution."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownNodeError
from .memmodel import ObjectTable


@dataclass
class PointsToGraph:
    """var_pts: variable -> object ids; field_pts: (object id, field) -> object ids.

    Sets are plain Python sets of ids; serialization sorts by object
    label so output is deterministic. Every declared variable of the
    function has a var_pts entry (possibly empty), so querying an
    unassigned variable answers the empty set rather than erroring.
    """

    function: str
    objects: ObjectTable
    var_pts: dict[str, set[int]] = field(default_factory=dict)
    field_pts: dict[tuple[int, str], set[int]] = field(default_factory=dict)

    def declare_var(self, name: str) -> None:
        self.var_pts.setdefault(name, set())

    def pts_var(self, name: str) -> set[int]:
        if name not in self.var_pts:
            raise UnknownNodeError(f"{self.function}: no variable {name!r}")
        return self.var_pts[name]

    def pts_field(self, obj: int, fld: str) -> set[int]:
        return self.field_pts.get((obj, fld), set())

    def _resolve(self, node) -> set[int]:
        if isinstance(node, str):
            return self.pts_var(node)
        if isinstance(node, tuple) and len(node) == 2:
            obj, fld = node
            if isinstance(obj, str):  # label form
                matches = [o.id for o in self.objects.all_objects() if o.label == obj]
                if not matches:
                    raise UnknownNodeError(f"no object labeled {obj!r}")
                out: set[int] = set()
                for oid in matches:
                    out |= self.pts_field(oid, fld)
                return out
            return self.pts_field(obj, fld)
        raise UnknownNodeError(f"bad node {node!r}")

    def to_json_dict(self) -> dict:
        vars_out = {
            name: self.objects.labels(objs)
            for name, objs in sorted(self.var_pts.items())
            if objs
        }
        fields_out = {}
        for (oid, fld), objs in self.field_pts.items():
            if objs:
                fields_out[f"{self.objects.label(oid)}.{fld}"] = self.objects.labels(objs)
        return {
            "function": self.function,
            "vars": dict(sorted(vars_out.items())),
            "fields": dict(sorted(fields_out.items())),
        }


def query_points_to(g: PointsToGraph, node) -> set[int]:
    """Stored points-to set of a variable name or (object, field) node."""
    return set(g._resolve(node))


def query_alias(g: PointsToGraph, a, b) -> bool:
    """True iff the two nodes' points-to sets intersect."""
    return bool(g._resolve(a) & g._resolve(b))
