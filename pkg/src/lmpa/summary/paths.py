"""Access paths: symbolic locations rooted at a parameter, the return
value, or a global, extended by field and dereference selectors.

Canonical text form (embeddable in JSON and model prompts):

    param:0            first parameter
    ret                the return value
    global:pool        a global variable
    param:0->large     field `large` of what param 0 points to
    param:1[*]         the cell param 1 points to (plain dereference)

`parse_path(format_path(p)) == p` for every path.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import InvalidPathError
from ..minic.ast import PtrType, Type
from ..minic.types import DEREF_FIELD, Layouts

DEREF = "[*]"


@dataclass(frozen=True)
class Param:
    index: int


@dataclass(frozen=True)
class Ret:
    pass


@dataclass(frozen=True)
class Global:
    name: str


Base = Param | Ret | Global


@dataclass(frozen=True)
class AccessPath:
    base: Base
    selectors: tuple[str, ...] = ()  # field names; DEREF_FIELD for plain deref

    def extend(self, selector: str) -> "AccessPath":
        return AccessPath(self.base, self.selectors + (selector,))

    def parent(self) -> "AccessPath":
        return AccessPath(self.base, self.selectors[:-1])

    def prefixes(self) -> list["AccessPath"]:
        """Proper prefixes, shortest first, excluding the bare base."""
        return [AccessPath(self.base, self.selectors[:i]) for i in range(1, len(self.selectors))]

    @property
    def is_var_level(self) -> bool:
        return not self.selectors

    def __str__(self) -> str:
        return format_path(self)


def format_path(path: AccessPath) -> str:
    if isinstance(path.base, Param):
        text = f"param:{path.base.index}"
    elif isinstance(path.base, Ret):
        text = "ret"
    else:
        text = f"global:{path.base.name}"
    for sel in path.selectors:
        text += DEREF if sel == DEREF_FIELD else f"->{sel}"
    return text


_BASE_RE = re.compile(r"^(param:(\d+)|ret|global:([A-Za-z_][A-Za-z0-9_]*))")
_SEL_RE = re.compile(r"->([A-Za-z_][A-Za-z0-9_]*)|\[\*\]")


def parse_path(text: str) -> AccessPath:
    m = _BASE_RE.match(text)
    if not m:
        raise InvalidPathError(f"bad access path {text!r}")
    if m.group(2) is not None:
        base: Base = Param(int(m.group(2)))
    elif m.group(0) == "ret":
        base = Ret()
    else:
        base = Global(m.group(3))
    selectors: list[str] = []
    pos = m.end()
    while pos < len(text):
        sm = _SEL_RE.match(text, pos)
        if not sm:
            raise InvalidPathError(f"bad selector at {text[pos:]!r} in {text!r}")
        selectors.append(sm.group(1) if sm.group(1) is not None else DEREF_FIELD)
        pos = sm.end()
    return AccessPath(base, tuple(selectors))


@dataclass
class PathContext:
    """Declared types a path can be checked against: one function's frame."""

    param_types: list[Type]
    return_type: Type
    global_types: dict[str, Type]


def resolve_path_type(path: AccessPath, ctx: PathContext, layouts: Layouts) -> Type:
    """Value type at the path; raises InvalidPathError when it does not type-check."""
    if isinstance(path.base, Param):
        if not 0 <= path.base.index < len(ctx.param_types):
            raise InvalidPathError(f"no parameter {path.base.index} for path {path}")
        t = ctx.param_types[path.base.index]
    elif isinstance(path.base, Ret):
        t = ctx.return_type
    else:
        if path.base.name not in ctx.global_types:
            raise InvalidPathError(f"unknown global in path {path}")
        t = ctx.global_types[path.base.name]
    for sel in path.selectors:
        if not isinstance(t, PtrType):
            raise InvalidPathError(f"cannot dereference non-pointer at {sel!r} in {path}")
        try:
            t = layouts.field_type(t.pointee, sel)
        except Exception as exc:
            raise InvalidPathError(f"{exc} in {path}") from exc
    return t


def path_is_pointer(path: AccessPath, ctx: PathContext, layouts: Layouts) -> bool:
    try:
        return isinstance(resolve_path_type(path, ctx, layouts), PtrType)
    except InvalidPathError:
        return False
