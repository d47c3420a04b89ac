"""Transfer functions for the modeled system APIs.

These are the abstraction targets for behavior analysis and the
vocabulary of API-list summaries. The catalog is deliberately small;
each entry states which formals it requires and which access paths it
may write (its mod set), so the side-effect gate can reason about
proposed abstractions.

Points-to semantics:

* malloc/calloc/strdup: a fresh heap object flows into the ret target;
  strdup additionally copies pointer payload from src.
* memcpy: for every dst object and src object, every field's points-to
  set (including the plain-deref cell) of src flows into the same field
  of dst.
* memset / snprintf: no points-to facts (MiniC has no byte reinterpretation).
* free: no points-to change (no strong updates); emits a Freed event per
  pointed-to object into the diagnostics stream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .minic.ast import PtrType, Type
from .minic.types import DEREF_FIELD, Layouts

# formal roles: ret = the call's result target, dst/src = pointer args, size = scalar
API_CATALOG: dict[str, dict] = {
    "malloc": {"required": ["ret"], "positional": {}, "writes": ["ret"]},
    "calloc": {"required": ["ret"], "positional": {}, "writes": ["ret"]},
    "strdup": {"required": ["ret", "src"], "positional": {"src": 0}, "writes": ["ret"]},
    "free": {"required": ["dst"], "positional": {"dst": 0}, "writes": []},
    "memcpy": {"required": ["dst", "src"], "positional": {"dst": 0, "src": 1}, "writes": ["dst->*"]},
    "memset": {"required": ["dst"], "positional": {"dst": 0}, "writes": ["dst->*"]},
    "snprintf": {"required": ["dst"], "positional": {"dst": 0}, "writes": ["dst->*"]},
}

ALLOCATING_APIS = ("malloc", "calloc", "strdup")


@dataclass(frozen=True)
class ApiCall:
    """One modeled call: the API name plus formal-to-expression bindings.

    Expressions are access-path strings in the frame the call is applied
    from (`ret`, `param:1`, `param:0->buf`, ...).
    """

    api: str
    arg_map: dict[str, str]

    def validate(self) -> str | None:
        if self.api not in API_CATALOG:
            return f"unknown api {self.api!r}"
        missing = [f for f in API_CATALOG[self.api]["required"] if f not in self.arg_map]
        if missing:
            return f"{self.api} arg_map missing {', '.join(missing)}"
        return None


def is_modeled_api(name: str) -> bool:
    return name in API_CATALOG


def catalog_json() -> list[dict]:
    return [
        {"name": name, "formals": list(info["required"]), "writes": list(info["writes"])}
        for name, info in sorted(API_CATALOG.items())
    ]


def payload_fields(t: Type | None, layouts: Layouts) -> list[str]:
    """Fields whose points-to payload memcpy-style copying transfers.

    For record/array pointees these are the declared pointer-valued
    fields; a pointer-cell pointee contributes its deref slot.
    """
    if t is None:
        return []
    if isinstance(t, PtrType):
        return [DEREF_FIELD]
    return [f for f, ft in layouts.fields_of(t).items() if isinstance(ft, PtrType)]


def positional_arg_map(api: str, args: list, has_dst: bool) -> dict[str, int | str]:
    """Map a direct body call's positional args onto the API's formals.

    Returns formal -> argument index, plus ret -> "ret" when the call
    assigns its result somewhere.
    """
    info = API_CATALOG[api]
    out: dict[str, int | str] = {}
    for formal, idx in info["positional"].items():
        if idx < len(args):
            out[formal] = idx
    if "ret" in info["required"] and has_dst:
        out["ret"] = "ret"
    return out
