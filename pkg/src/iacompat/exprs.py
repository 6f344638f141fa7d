"""Constraint expression trees.

The dialect mixes OCL and VDM surface syntax: enum literals ``<off>``,
old-state references ``x~`` / ``x@pre`` (postconditions only), map domain
membership ``n in set dom mem``, map application ``mem(n)`` / ``devOn[devId]``,
record field access ``.c``, collection built-ins ``size``, ``lastItem``,
``domain``, ``range``, ``front``, ``notEmpty`` (dotted or arrow form), set
literals ``{false}``, and the boolean/integer connectives.

Nodes are frozen dataclasses; structural equality is the canonical notion of
expression identity used everywhere (round-trips, conjunction sharing).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from .domains import (
    BOOL,
    ENUM,
    INT,
    OPAQUE,
    Domain,
    OpaqueDomain,
    Sort,
    VariableDecl,
    resolve_path,
    sorts_compatible,
)

BUILTIN_METHODS = ("size", "lastItem", "domain", "range", "front", "notEmpty")


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class EnumLit(Expr):
    name: str


@dataclass(frozen=True)
class SetLit(Expr):
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class VarRef(Expr):
    """Dotted variable path. ``old`` marks a pre-state reference (~ / @pre)."""

    path: tuple[str, ...]
    old: bool = False

    @property
    def dotted(self) -> str:
        return ".".join(self.path)


@dataclass(frozen=True)
class Not(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # and or implies = <> < <= > >= + -
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Membership(Expr):
    """``item in set collection``."""

    item: Expr
    collection: Expr


@dataclass(frozen=True)
class Apply(Expr):
    """Map or sequence application, written ``m(k)`` or ``m[k]``."""

    target: Expr
    key: Expr


@dataclass(frozen=True)
class FieldAccess(Expr):
    """Record field access on a non-path target, e.g. ``mem(n).c``."""

    target: Expr
    name: str


@dataclass(frozen=True)
class MethodCall(Expr):
    target: Expr
    name: str
    args: tuple[Expr, ...] = ()


# ---------------------------------------------------------------------------
# printing

_LEVEL = {
    "implies": 1,
    "or": 2,
    "and": 3,
    # not = 4
    "=": 5, "<>": 5, "<": 5, "<=": 5, ">": 5, ">=": 5,
    "+": 6, "-": 6,
}
_POSTFIX_LEVEL = 7


def _level(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _LEVEL[e.op]
    if isinstance(e, Not):
        return 4
    if isinstance(e, Membership):
        return 5
    return _POSTFIX_LEVEL + 1


def to_text(e: Expr) -> str:
    """Canonical concrete syntax. parse(to_text(e)) reproduces e exactly."""

    def wrap(child: Expr, minlevel: int) -> str:
        s = to_text(child)
        return f"({s})" if _level(child) < minlevel else s

    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, IntLit):
        return str(e.value) if e.value >= 0 else f"-{-e.value}"
    if isinstance(e, EnumLit):
        return f"<{e.name}>"
    if isinstance(e, SetLit):
        return "{" + ", ".join(to_text(x) for x in e.items) + "}"
    if isinstance(e, VarRef):
        return e.dotted + ("@pre" if e.old else "")
    if isinstance(e, Not):
        return "not " + wrap(e.operand, 4)
    if isinstance(e, BinOp):
        lvl = _LEVEL[e.op]
        if e.op == "implies":
            # right associative: parenthesize a left child at the same level
            return f"{wrap(e.left, lvl + 1)} implies {wrap(e.right, lvl)}"
        return f"{wrap(e.left, lvl)} {e.op} {wrap(e.right, lvl + 1)}"
    if isinstance(e, Membership):
        return f"{wrap(e.item, 6)} in set {wrap(e.collection, 6)}"
    if isinstance(e, Apply):
        return f"{wrap(e.target, _POSTFIX_LEVEL)}({to_text(e.key)})"
    if isinstance(e, FieldAccess):
        return f"{wrap(e.target, _POSTFIX_LEVEL)}.{e.name}"
    if isinstance(e, MethodCall):
        base = wrap(e.target, _POSTFIX_LEVEL)
        if e.name == "notEmpty":
            return f"{base}->notEmpty"
        return f"{base}.{e.name}(" + ", ".join(to_text(a) for a in e.args) + ")"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# structural walks

def children(e: Expr) -> Iterator[Expr]:
    if isinstance(e, SetLit):
        yield from e.items
    elif isinstance(e, Not):
        yield e.operand
    elif isinstance(e, BinOp):
        yield e.left
        yield e.right
    elif isinstance(e, Membership):
        yield e.item
        yield e.collection
    elif isinstance(e, Apply):
        yield e.target
        yield e.key
    elif isinstance(e, FieldAccess):
        yield e.target
    elif isinstance(e, MethodCall):
        yield e.target
        yield from e.args


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    for c in children(e):
        yield from walk(c)


def variable_refs(e: Expr) -> Iterator[VarRef]:
    for node in walk(e):
        if isinstance(node, VarRef):
            yield node


def has_old_refs(e: Expr) -> bool:
    return any(r.old for r in variable_refs(e))


# ---------------------------------------------------------------------------
# named constraints

class ConstraintKind(enum.Enum):
    INV = "inv"
    PRE = "pre"
    POST = "post"


@dataclass(frozen=True)
class ParamDecl:
    """Typed operation parameter; ``mode`` keeps an optional ``in`` marker."""

    name: str
    domain: Domain
    mode: Optional[str] = None


@dataclass(frozen=True)
class ConstraintContext:
    """Owning contract plus the operation signature the constraint annotates."""

    contract: Optional[str] = None
    operation: Optional[str] = None
    params: tuple[ParamDecl, ...] = ()


@dataclass(frozen=True)
class NamedConstraint:
    name: str
    kind: ConstraintKind
    body: Expr
    context: ConstraintContext = field(default_factory=ConstraintContext)

    def __post_init__(self) -> None:
        if self.kind is not ConstraintKind.POST and has_old_refs(self.body):
            raise ValueError(
                f"constraint {self.name}: old-state references are only legal in postconditions"
            )

    def param_domains(self) -> dict[str, Domain]:
        return {p.name: p.domain for p in self.context.params}

    def free_variable_paths(self) -> set[str]:
        """Dotted paths of referenced variables, operation parameters excluded."""
        params = {p.name for p in self.context.params}
        out = set()
        for r in variable_refs(self.body):
            if r.path[0] not in params:
                out.add(r.dotted)
        return out


# ---------------------------------------------------------------------------
# sort inference

class SortError(ValueError):
    """An expression is ill-sorted; carries the offending subexpression text."""

    def __init__(self, message: str, expr: Expr):
        self.expr_text = to_text(expr)
        super().__init__(f"{message} in `{self.expr_text}`")


class UnknownVariable(ValueError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"unknown variable: {path}")


@dataclass
class SortScope:
    """Resolution environment for sort inference.

    ``decls`` maps declared variable names (dotted paths allowed) to domains;
    ``params`` holds operation parameters; ``open_world`` lets undeclared
    variables type as opaque (used by the CLI evaluator).
    """

    decls: Mapping[str, Domain]
    params: Mapping[str, Domain] = field(default_factory=dict)
    open_world: bool = False

    def sort_of_path(self, path: tuple[str, ...]) -> Sort:
        if path[0] in self.params:
            dom = self.params[path[0]]
            for seg in path[1:]:
                from .domains import RecordDomain  # local, avoids import cycle at module load

                if isinstance(dom, OpaqueDomain):
                    return OPAQUE
                if not isinstance(dom, RecordDomain) or dom.field_domain(seg) is None:
                    raise UnknownVariable(".".join(path))
                dom = dom.field_domain(seg)
            return dom.sort()
        try:
            hit = resolve_path(dict(self.decls), path)
        except ValueError:
            hit = None
        if hit is not None:
            return hit[1].sort()
        if self.open_world:
            return OPAQUE
        raise UnknownVariable(".".join(path))


def _require(cond: bool, message: str, e: Expr) -> None:
    if not cond:
        raise SortError(message, e)


def infer_sort(e: Expr, scope: SortScope) -> Sort:
    """Sort of an expression, raising SortError / UnknownVariable on bad input."""
    if isinstance(e, BoolLit):
        return BOOL
    if isinstance(e, IntLit):
        return INT
    if isinstance(e, EnumLit):
        return ENUM
    if isinstance(e, SetLit):
        elem: Sort = OPAQUE
        for item in e.items:
            s = infer_sort(item, scope)
            elem = s if elem.tag == "opaque" else elem
            _require(sorts_compatible(elem, s), "mixed element sorts in set literal", e)
        return Sort("set", elem=elem)
    if isinstance(e, VarRef):
        return scope.sort_of_path(e.path)
    if isinstance(e, Not):
        _require(infer_sort(e.operand, scope).tag in ("bool", "opaque"), "not needs a boolean", e)
        return BOOL
    if isinstance(e, BinOp):
        ls, rs = infer_sort(e.left, scope), infer_sort(e.right, scope)
        if e.op in ("and", "or", "implies"):
            _require(ls.tag in ("bool", "opaque"), f"{e.op} needs boolean operands", e)
            _require(rs.tag in ("bool", "opaque"), f"{e.op} needs boolean operands", e)
            return BOOL
        if e.op in ("=", "<>"):
            _require(sorts_compatible(ls, rs), f"cannot compare {ls} with {rs}", e)
            return BOOL
        if e.op in ("<", "<=", ">", ">="):
            _require(ls.tag in ("int", "opaque") and rs.tag in ("int", "opaque"),
                     f"{e.op} needs integer operands", e)
            return BOOL
        # + -
        _require(ls.tag in ("int", "opaque") and rs.tag in ("int", "opaque"),
                 f"{e.op} needs integer operands", e)
        return INT
    if isinstance(e, Membership):
        item = infer_sort(e.item, scope)
        coll = infer_sort(e.collection, scope)
        _require(coll.tag in ("set", "opaque"), "in set needs a set on the right", e)
        if coll.tag == "set":
            _require(sorts_compatible(item, coll.elem), "member sort does not fit the set", e)
        return BOOL
    if isinstance(e, Apply):
        t = infer_sort(e.target, scope)
        k = infer_sort(e.key, scope)
        if t.tag == "map":
            _require(sorts_compatible(k, t.key), "map applied to a key of the wrong sort", e)
            return t.value
        if t.tag == "seq":
            _require(k.tag in ("int", "opaque"), "sequence index must be an integer", e)
            return t.elem
        _require(t.tag == "opaque", "application target is neither map nor sequence", e)
        return OPAQUE
    if isinstance(e, FieldAccess):
        t = infer_sort(e.target, scope)
        if t.tag == "record":
            for n, s in t.fields or ():
                if n == e.name:
                    return s
            raise SortError(f"record has no field {e.name!r}", e)
        _require(t.tag == "opaque", "field access on a non-record", e)
        return OPAQUE
    if isinstance(e, MethodCall):
        t = infer_sort(e.target, scope)
        name = e.name
        if name == "notEmpty":
            _require(not e.args, "notEmpty takes no arguments", e)
            return BOOL
        if name == "size":
            _require(t.tag in ("seq", "set", "map", "opaque"), "size needs a collection", e)
            _require(not e.args, "size takes no arguments", e)
            return INT
        if name == "lastItem":
            _require(t.tag in ("seq", "opaque"), "lastItem needs a sequence", e)
            _require(not e.args, "lastItem takes no arguments", e)
            return t.elem if t.tag == "seq" else OPAQUE
        if name == "domain":
            _require(t.tag in ("map", "opaque"), "domain needs a map", e)
            _require(not e.args, "domain takes no arguments", e)
            return Sort("set", elem=t.key if t.tag == "map" else OPAQUE)
        if name == "range":
            _require(t.tag in ("map", "opaque"), "range needs a map", e)
            _require(not e.args, "range takes no arguments", e)
            return Sort("set", elem=t.value if t.tag == "map" else OPAQUE)
        if name == "front":
            _require(t.tag in ("seq", "opaque"), "front needs a sequence", e)
            _require(len(e.args) == 1, "front takes one argument", e)
            _require(infer_sort(e.args[0], scope).tag in ("int", "opaque"),
                     "front length must be an integer", e)
            return t if t.tag == "seq" else OPAQUE
        raise SortError(f"unknown method {name!r}", e)
    raise TypeError(f"not an expression node: {e!r}")


def check_constraint_sorts(c: NamedConstraint, decls: Mapping[str, Domain]) -> Sort:
    """Infer the body sort of a named constraint and require it to be boolean."""
    scope = SortScope(decls=decls, params=c.param_domains())
    s = infer_sort(c.body, scope)
    if s.tag not in ("bool", "opaque"):
        raise SortError("constraint body must be boolean", c.body)
    return s


def decls_mapping(decls) -> dict[str, Domain]:
    """Normalize a decl collection (VariableDecl iterable or mapping) to a dict."""
    if isinstance(decls, Mapping):
        out = {}
        for k, v in decls.items():
            out[k] = v.domain if isinstance(v, VariableDecl) else v
        return out
    return {d.name: d.domain for d in decls}
