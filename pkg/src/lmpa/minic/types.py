"""Record layouts and access-path typing helpers.

Array types are uniform with records: `array<T>` exposes the single
synthetic field `elts` of type `ptr<T>`. Plain dereference uses the
synthetic selector `deref`, typed as the pointee.
"""

from __future__ import annotations

from ..errors import UndeclaredFieldError
from .ast import ArrayType, Program, PtrType, RecordType, Type

DEREF_FIELD = "deref"
ELTS_FIELD = "elts"


class Layouts:
    """Field tables for every record (and synthetic array) type in a program."""

    def __init__(self, program: Program):
        self._records: dict[str, dict[str, Type]] = {
            rec.name: dict(rec.fields) for rec in program.records
        }

    def record_fields(self, name: str) -> dict[str, Type]:
        return self._records[name]

    def fields_of(self, t: Type) -> dict[str, Type]:
        """Declared fields of a pointee type (empty for scalars)."""
        if isinstance(t, RecordType):
            return self._records.get(t.name, {})
        if isinstance(t, ArrayType):
            return {ELTS_FIELD: PtrType(t.elem)}
        return {}

    def field_type(self, pointee: Type, field: str) -> Type:
        """Type stored at `field` of an object of type `pointee`.

        `deref` is accepted on any pointee and yields the value type the
        cell holds (the pointee itself for pointer cells).
        """
        if field == DEREF_FIELD:
            return pointee
        fields = self.fields_of(pointee)
        if field not in fields:
            raise UndeclaredFieldError(f"type {pointee} has no field {field!r}")
        return fields[field]

    def selector_result(self, base: Type, field: str) -> Type:
        """Type of `base-><field>` / `*base` where base must be a pointer."""
        if not isinstance(base, PtrType):
            raise UndeclaredFieldError(f"cannot dereference non-pointer type {base}")
        return self.field_type(base.pointee, field)


def pointee_of(t: Type) -> Type | None:
    return t.pointee if isinstance(t, PtrType) else None
