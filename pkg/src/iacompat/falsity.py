"""Deciding whether a constraint is equivalent to false.

Three tiers: syntactic simplification, then exhaustive enumeration over the
declared finite domains under a valuation budget, then Unknown. Unknown is
the conservative outcome for opaque or unbounded domains and for blown
budgets; callers treat it as "possibly satisfiable".

For postconditions the relation ranges over pairs of states: every variable
referenced with an old-state marker is enumerated twice, once for the old
assignment and once for the new one. Evaluation errors count as not-true.
"""
from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass
from typing import Mapping, Optional

from .domains import Domain, VariableDecl, resolve_path
from .evaluate import EvalError, Valuation, evaluate, simplify
from .exprs import (
    BoolLit,
    Expr,
    NamedConstraint,
    decls_mapping,
    variable_refs,
)

ENUM_BUDGET_ENV = "IACOMPAT_ENUM_BUDGET"
DEFAULT_ENUM_BUDGET = 10**6


def default_budget() -> int:
    raw = os.environ.get(ENUM_BUDGET_ENV)
    if raw is None:
        return DEFAULT_ENUM_BUDGET
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_ENUM_BUDGET
    return value if value > 0 else DEFAULT_ENUM_BUDGET


class Verdict(enum.Enum):
    FALSE = "false"
    SATISFIABLE = "satisfiable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class FalsityResult:
    verdict: Verdict
    witness: Optional[Valuation] = None  # satisfying valuation when SATISFIABLE
    explored: int = 0


def falsity(
    expr: Expr,
    decls,
    *,
    params: Optional[Mapping[str, Domain]] = None,
    budget: Optional[int] = None,
) -> FalsityResult:
    """Verdict for a bare boolean expression over the given declarations."""
    budget = default_budget() if budget is None else budget
    table = dict(decls_mapping(decls))
    if params:
        table.update(params)

    s = simplify(expr)
    if s == BoolLit(False):
        return FalsityResult(Verdict.FALSE)
    if s == BoolLit(True):
        return FalsityResult(Verdict.SATISFIABLE, witness=Valuation({}, old=None))

    # collect the declared variables behind every free reference
    cur_vars: dict[str, Domain] = {}
    old_vars: dict[str, Domain] = {}
    any_old = False
    for ref in variable_refs(s):
        hit = _resolve(table, ref.path)
        if hit is None:
            raise EvalError(f"free variable {'.'.join(ref.path)} does not resolve against the declarations")
        name, _ = hit
        # enumerate the declared variable's own domain, not the leaf the
        # path points at: the valuation binds whole variables
        dom = table[name]
        if ref.old:
            any_old = True
            old_vars[name] = dom
        else:
            cur_vars[name] = dom

    total = 1
    for dom in itertools.chain(cur_vars.values(), old_vars.values()):
        n = dom.count()
        if n is None:
            return FalsityResult(Verdict.UNKNOWN)
        total *= n
        if total > budget:
            return FalsityResult(Verdict.UNKNOWN)

    cur_names = sorted(cur_vars)
    old_names = sorted(old_vars)
    cur_pools = [list(cur_vars[n].values()) for n in cur_names]
    old_pools = [list(old_vars[n].values()) for n in old_names]

    explored = 0
    for cur_combo in itertools.product(*cur_pools):
        for old_combo in itertools.product(*old_pools):
            explored += 1
            val = Valuation(
                values=dict(zip(cur_names, cur_combo)),
                old=dict(zip(old_names, old_combo)) if any_old else None,
            )
            try:
                if evaluate(s, val) is True:
                    return FalsityResult(Verdict.SATISFIABLE, witness=val, explored=explored)
            except EvalError:
                pass  # not-true outcome
    return FalsityResult(Verdict.FALSE, explored=explored)


def _resolve(table: Mapping[str, Domain], path: tuple[str, ...]):
    try:
        return resolve_path(dict(table), path)
    except ValueError:
        return None


def constraint_falsity(
    c: NamedConstraint,
    variables,
    *,
    budget: Optional[int] = None,
) -> FalsityResult:
    """Falsity of a named constraint; operation parameters enumerate too."""
    return falsity(c.body, variables, params=c.param_domains(), budget=budget)
