"""Evaluation and simplification of constraint expressions.

Logic is two-valued with explicit evaluation errors. The boolean connectives
are symmetric ("parallel"): a conjunction is false as soon as either operand
is false, even if the other one errors, and dually for disjunction and for
implication. This makes evaluation order-insensitive, which the simplifier
relies on when it sorts commutative operands and applies annihilators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .domains import Domain, OpaqueDomain, RecordDomain, Value, resolve_path
from .exprs import (
    Apply,
    BinOp,
    BoolLit,
    ConstraintKind,
    EnumLit,
    Expr,
    FieldAccess,
    IntLit,
    Membership,
    MethodCall,
    NamedConstraint,
    Not,
    SetLit,
    VarRef,
    to_text,
)


class EvalError(Exception):
    """A constraint could not be evaluated under the given valuation."""


class UndefinedApplication(EvalError):
    """Map applied outside its domain, or a sequence indexed out of range."""


class MissingVariable(EvalError):
    """The valuation does not cover a referenced variable."""


@dataclass
class Valuation:
    """Variable assignment; ``old`` carries the pre-state for postconditions.

    Keys are dotted variable paths. A key may bind a declared variable or a
    sub-path of a record-valued one (``myCS.s``); lookup prefers the longest
    bound prefix and navigates the remaining segments through record values.
    """

    values: Mapping[str, Value] = field(default_factory=dict)
    old: Optional[Mapping[str, Value]] = None

    def lookup(self, path: tuple[str, ...], old: bool) -> Value:
        table = self.old if old else self.values
        if table is None:
            raise EvalError("old-state reference evaluated without an old-state map")
        for cut in range(len(path), 0, -1):
            key = ".".join(path[:cut])
            if key in table:
                v = table[key]
                for seg in path[cut:]:
                    if not isinstance(v, dict) or seg not in v:
                        raise EvalError(f"value of {key!r} has no field {seg!r}")
                    v = v[seg]
                return v
        marker = "@pre" if old else ""
        raise MissingVariable(f"unbound variable: {'.'.join(path)}{marker}")

    def check_against(self, decls: Mapping[str, Domain]) -> list[str]:
        """Domain-membership problems for every binding, empty when clean."""
        problems = []
        tables = [("", self.values)] + ([("@pre ", self.old)] if self.old else [])
        for prefix, table in tables:
            for key, v in table.items():
                path = tuple(key.split("."))
                try:
                    hit = resolve_path(dict(decls), path)
                except ValueError as exc:
                    problems.append(f"{prefix}{key}: {exc}")
                    continue
                if hit is None:
                    problems.append(f"{prefix}{key}: not a declared variable")
                elif not hit[1].contains(v):
                    problems.append(f"{prefix}{key}: value {v!r} outside {hit[1].text()}")
        return problems


def _values_equal(a: Value, b: Value) -> bool:
    # bool is an int in Python; keep the sorts apart
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if isinstance(a, frozenset) != isinstance(b, frozenset):
        return False
    return a == b


def _as_bool(e: Expr, v: Value) -> bool:
    if isinstance(v, bool):
        return v
    raise EvalError(f"expected a boolean from `{to_text(e)}`, got {v!r}")


def _as_int(e: Expr, v: Value) -> int:
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    raise EvalError(f"expected an integer from `{to_text(e)}`, got {v!r}")


def _try_bool(e: Expr, val: Valuation) -> tuple[Optional[bool], Optional[EvalError]]:
    try:
        return _as_bool(e, evaluate(e, val)), None
    except EvalError as exc:
        return None, exc


def evaluate(e: Expr, val: Valuation) -> Value:
    """Value of an expression under a valuation; raises EvalError subclasses."""
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, EnumLit):
        return e.name
    if isinstance(e, SetLit):
        return frozenset(evaluate(x, val) for x in e.items)
    if isinstance(e, VarRef):
        return val.lookup(e.path, e.old)
    if isinstance(e, Not):
        return not _as_bool(e.operand, evaluate(e.operand, val))
    if isinstance(e, BinOp):
        return _eval_binop(e, val)
    if isinstance(e, Membership):
        coll = evaluate(e.collection, val)
        if not isinstance(coll, frozenset):
            raise EvalError(f"`{to_text(e.collection)}` is not a set")
        item = evaluate(e.item, val)
        return any(_values_equal(item, x) for x in coll)
    if isinstance(e, Apply):
        target = evaluate(e.target, val)
        key = evaluate(e.key, val)
        if isinstance(target, dict):
            for k, x in target.items():
                if _values_equal(k, key):
                    return x
            raise UndefinedApplication(f"key {key!r} outside the domain of `{to_text(e.target)}`")
        if isinstance(target, tuple):
            i = _as_int(e.key, key)
            if 1 <= i <= len(target):
                return target[i - 1]
            raise UndefinedApplication(f"index {i} outside the sequence `{to_text(e.target)}`")
        raise EvalError(f"`{to_text(e.target)}` is neither a map nor a sequence")
    if isinstance(e, FieldAccess):
        target = evaluate(e.target, val)
        if isinstance(target, dict) and e.name in target:
            return target[e.name]
        raise EvalError(f"`{to_text(e.target)}` has no field {e.name!r}")
    if isinstance(e, MethodCall):
        return _eval_method(e, val)
    raise TypeError(f"not an expression node: {e!r}")


def _eval_binop(e: BinOp, val: Valuation) -> Value:
    op = e.op
    if op == "and":
        lv, le = _try_bool(e.left, val)
        rv, re_ = _try_bool(e.right, val)
        if lv is False or rv is False:
            return False
        if le:
            raise le
        if re_:
            raise re_
        return True
    if op == "or":
        lv, le = _try_bool(e.left, val)
        rv, re_ = _try_bool(e.right, val)
        if lv is True or rv is True:
            return True
        if le:
            raise le
        if re_:
            raise re_
        return False
    if op == "implies":
        lv, le = _try_bool(e.left, val)
        rv, re_ = _try_bool(e.right, val)
        if lv is False or rv is True:
            return True
        if le:
            raise le
        if re_:
            raise re_
        return rv  # lv is True here
    if op in ("=", "<>"):
        lv = evaluate(e.left, val)
        rv = evaluate(e.right, val)
        eq = _values_equal(lv, rv)
        return eq if op == "=" else not eq
    lv = _as_int(e.left, evaluate(e.left, val))
    rv = _as_int(e.right, evaluate(e.right, val))
    if op == "<":
        return lv < rv
    if op == "<=":
        return lv <= rv
    if op == ">":
        return lv > rv
    if op == ">=":
        return lv >= rv
    if op == "+":
        return lv + rv
    if op == "-":
        return lv - rv
    raise TypeError(f"unknown operator {op!r}")


def _eval_method(e: MethodCall, val: Valuation) -> Value:
    if e.name == "notEmpty":
        # Arrow operations wrap scalars as singletons; an undefined
        # application yields the empty collection, hence false.
        try:
            v = evaluate(e.target, val)
        except UndefinedApplication:
            return False
        if isinstance(v, (tuple, frozenset)):
            return len(v) > 0
        if isinstance(v, dict):
            return len(v) > 0
        return True
    v = evaluate(e.target, val)
    if e.name == "size":
        if isinstance(v, (tuple, frozenset, dict)):
            return len(v)
        raise EvalError(f"size of a non-collection `{to_text(e.target)}`")
    if e.name == "lastItem":
        if isinstance(v, tuple):
            if v:
                return v[-1]
            raise UndefinedApplication(f"lastItem of the empty sequence `{to_text(e.target)}`")
        raise EvalError(f"lastItem of a non-sequence `{to_text(e.target)}`")
    if e.name == "domain":
        if isinstance(v, dict):
            return frozenset(v.keys())
        raise EvalError(f"domain of a non-map `{to_text(e.target)}`")
    if e.name == "range":
        if isinstance(v, dict):
            try:
                return frozenset(v.values())
            except TypeError:
                raise EvalError(
                    f"range of `{to_text(e.target)}` holds unhashable values"
                ) from None
        raise EvalError(f"range of a non-map `{to_text(e.target)}`")
    if e.name == "front":
        if not isinstance(v, tuple):
            raise EvalError(f"front of a non-sequence `{to_text(e.target)}`")
        k = _as_int(e.args[0], evaluate(e.args[0], val))
        if k < 0:
            raise EvalError("front with a negative length")
        return v[: min(k, len(v))]
    raise EvalError(f"unknown method {e.name!r}")


def eval_constraint(c: NamedConstraint, val: Valuation) -> bool:
    """Truth of a named constraint. Postconditions may read the old state."""
    if c.kind is ConstraintKind.POST and val.old is None and _needs_old(c.body):
        raise EvalError(f"postcondition {c.name} needs an old-state map")
    return _as_bool(c.body, evaluate(c.body, val))


def _needs_old(e: Expr) -> bool:
    from .exprs import has_old_refs

    return has_old_refs(e)


# ---------------------------------------------------------------------------
# simplification

def simplify(e: Expr, *, reflexivity: bool = False) -> Expr:
    """Semantics-preserving rewrite to a canonical form.

    Constant folding, conjunction/disjunction identities and annihilators,
    double negation removal, implication unfolding against literals, and
    sorting of commutative operands by their printed form. Idempotent. With
    ``reflexivity`` enabled, ``x = x`` additionally folds to true (off by
    default: it is not error-preserving for expressions that can fail).
    """
    if isinstance(e, Not):
        s = simplify(e.operand, reflexivity=reflexivity)
        if isinstance(s, BoolLit):
            return BoolLit(not s.value)
        if isinstance(s, Not):
            return s.operand
        return Not(s)
    if isinstance(e, BinOp):
        return _simplify_binop(e, reflexivity)
    if isinstance(e, SetLit):
        return SetLit(tuple(simplify(x, reflexivity=reflexivity) for x in e.items))
    if isinstance(e, Membership):
        return Membership(
            simplify(e.item, reflexivity=reflexivity),
            simplify(e.collection, reflexivity=reflexivity),
        )
    if isinstance(e, Apply):
        return Apply(
            simplify(e.target, reflexivity=reflexivity),
            simplify(e.key, reflexivity=reflexivity),
        )
    if isinstance(e, FieldAccess):
        return FieldAccess(simplify(e.target, reflexivity=reflexivity), e.name)
    if isinstance(e, MethodCall):
        return MethodCall(
            simplify(e.target, reflexivity=reflexivity),
            e.name,
            tuple(simplify(a, reflexivity=reflexivity) for a in e.args),
        )
    return e


def _sorted_pair(left: Expr, right: Expr) -> tuple[Expr, Expr]:
    if to_text(right) < to_text(left):
        return right, left
    return left, right


_LITERALS = (BoolLit, IntLit, EnumLit)


def _simplify_binop(e: BinOp, reflexivity: bool) -> Expr:
    l = simplify(e.left, reflexivity=reflexivity)
    r = simplify(e.right, reflexivity=reflexivity)
    op = e.op
    if op == "and":
        if BoolLit(False) in (l, r):
            return BoolLit(False)
        if l == BoolLit(True):
            return r
        if r == BoolLit(True):
            return l
        l, r = _sorted_pair(l, r)
        return BinOp("and", l, r)
    if op == "or":
        if BoolLit(True) in (l, r):
            return BoolLit(True)
        if l == BoolLit(False):
            return r
        if r == BoolLit(False):
            return l
        l, r = _sorted_pair(l, r)
        return BinOp("or", l, r)
    if op == "implies":
        if l == BoolLit(False) or r == BoolLit(True):
            return BoolLit(True)
        if l == BoolLit(True):
            return r
        if r == BoolLit(False):
            if isinstance(l, Not):
                return l.operand
            return Not(l)
        return BinOp("implies", l, r)
    if op in ("=", "<>"):
        if type(l) is type(r) and isinstance(l, _LITERALS):
            eq = l == r
            return BoolLit(eq if op == "=" else not eq)
        if reflexivity and op == "=" and l == r:
            return BoolLit(True)
        return BinOp(op, l, r)
    if isinstance(l, IntLit) and isinstance(r, IntLit):
        a, b = l.value, r.value
        if op == "<":
            return BoolLit(a < b)
        if op == "<=":
            return BoolLit(a <= b)
        if op == ">":
            return BoolLit(a > b)
        if op == ">=":
            return BoolLit(a >= b)
        if op == "+":
            return IntLit(a + b)
        if op == "-":
            return IntLit(a - b)
    return BinOp(op, l, r)
