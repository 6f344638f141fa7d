"""Interface automata with constraint-annotated transitions.

An automaton partitions its alphabet into input, output and hidden actions
and may attach named pre/postconditions to transitions. Two automata are
composable when their alphabets do not clash (no shared inputs, no shared
outputs, hidden actions private to each side); their synchronized product
pairs states, synchronizes the shared input/output actions, interleaves the
rest, and conjoins the guards of synchronized steps.

Collections are stored as tuples in declaration order. Transition tuples may
repeat a declaration (a contract listing is free to state the same step
twice); every algorithm here applies set semantics regardless. The product
construction visits reachable state pairs only, which is a worst case of
O(|transitions1| * |transitions2|) work; membership in the larger full grid
is never materialized.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .domains import VariableDecl, is_identifier
from .exprs import (
    BinOp,
    ConstraintContext,
    NamedConstraint,
    ParamDecl,
)


@dataclass(frozen=True, order=True)
class ActionLabel:
    """Action name with an optional namespace, printed ``namespace::name``."""

    name: str
    namespace: Optional[str] = None

    def __post_init__(self) -> None:
        if not is_identifier(self.name):
            raise ValueError(f"action name is not an identifier: {self.name!r}")
        if self.namespace is not None and not is_identifier(self.namespace):
            raise ValueError(f"namespace is not an identifier: {self.namespace!r}")

    def __str__(self) -> str:
        return self.name if self.namespace is None else f"{self.namespace}::{self.name}"

    @property
    def sort_key(self) -> tuple[str, str]:
        return (self.namespace or "", self.name)


class ActionClass(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    HIDDEN = "hidden"

    @property
    def decoration(self) -> str:
        return {"input": "?", "output": "!", "hidden": ";"}[self.value]


@dataclass(frozen=True)
class Transition:
    """One step: source, optional named pre, action, optional named post, target."""

    source: str
    pre: Optional[str]
    action: ActionLabel
    post: Optional[str]
    target: str


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    location: Optional[str] = None

    def __str__(self) -> str:
        where = f" ({self.location})" if self.location else ""
        return f"{self.code}: {self.message}{where}"


def _label_tuple(labels: Iterable[ActionLabel]) -> tuple[ActionLabel, ...]:
    out: list[ActionLabel] = []
    for l in labels:
        if l not in out:
            out.append(l)
    return tuple(out)


@dataclass(frozen=True)
class InterfaceAutomaton:
    """Immutable automaton value. Structural equality; never hash one."""

    name: str
    states: tuple[str, ...]
    initials: tuple[str, ...]
    inputs: tuple[ActionLabel, ...]
    outputs: tuple[ActionLabel, ...]
    hidden: tuple[ActionLabel, ...]
    variables: Mapping[str, VariableDecl] = field(default_factory=dict)
    preconditions: Mapping[str, NamedConstraint] = field(default_factory=dict)
    postconditions: Mapping[str, NamedConstraint] = field(default_factory=dict)
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self) -> None:
        if not is_identifier(self.name):
            raise ValueError(f"automaton name is not an identifier: {self.name!r}")
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "initials", tuple(self.initials))
        object.__setattr__(self, "inputs", _label_tuple(self.inputs))
        object.__setattr__(self, "outputs", _label_tuple(self.outputs))
        object.__setattr__(self, "hidden", _label_tuple(self.hidden))
        object.__setattr__(self, "variables", dict(self.variables))
        object.__setattr__(self, "preconditions", dict(self.preconditions))
        object.__setattr__(self, "postconditions", dict(self.postconditions))
        object.__setattr__(self, "transitions", tuple(self.transitions))

    @property
    def alphabet(self) -> tuple[ActionLabel, ...]:
        return self.inputs + self.outputs + self.hidden

    def action_class(self, label: ActionLabel) -> Optional[ActionClass]:
        if label in self.inputs:
            return ActionClass.INPUT
        if label in self.outputs:
            return ActionClass.OUTPUT
        if label in self.hidden:
            return ActionClass.HIDDEN
        return None

    def outgoing(self, state: str) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.source == state)

    def is_empty(self) -> bool:
        return not self.states


EMPTY_AUTOMATON_NAME = "empty"


def empty_automaton(name: str = EMPTY_AUTOMATON_NAME) -> InterfaceAutomaton:
    """The canonical empty automaton produced by pruning everything away."""
    return InterfaceAutomaton(name=name, states=(), initials=(), inputs=(), outputs=(), hidden=())


# ---------------------------------------------------------------------------
# validation

def validate(a: InterfaceAutomaton) -> list[Diagnostic]:
    """Structural well-formedness diagnostics; empty means the automaton is sound."""
    diags: list[Diagnostic] = []
    states = set(a.states)

    if not a.initials and not a.is_empty():
        diags.append(Diagnostic("initial-empty", "initial set empty"))
    for s in a.initials:
        if s not in states:
            diags.append(Diagnostic("initial-unknown", f"initial state is not a state: {s}"))

    ins, outs, hid = set(a.inputs), set(a.outputs), set(a.hidden)
    for overlap in (ins & outs) | (ins & hid) | (outs & hid):
        diags.append(Diagnostic("alphabet-overlap", f"alphabets not disjoint: {overlap}"))

    alphabet = ins | outs | hid
    for i, t in enumerate(a.transitions):
        where = f"transition {i + 1}: {t.source} -[{t.action}]-> {t.target}"
        if t.source not in states:
            diags.append(Diagnostic("transition-source", f"unknown source state {t.source!r}", where))
        if t.target not in states:
            diags.append(Diagnostic("transition-target", f"unknown target state {t.target!r}", where))
        if t.action not in alphabet:
            diags.append(Diagnostic("transition-action", f"undeclared action {t.action}", where))
        if t.pre is not None and t.pre not in a.preconditions:
            diags.append(Diagnostic("transition-pre", f"unknown precondition {t.pre!r}", where))
        if t.post is not None and t.post not in a.postconditions:
            diags.append(Diagnostic("transition-post", f"unknown postcondition {t.post!r}", where))

    for reg, which in ((a.preconditions, "precondition"), (a.postconditions, "postcondition")):
        for name, c in reg.items():
            for path in sorted(c.free_variable_paths()):
                head = path.split(".")
                if not _path_declared(a.variables, head):
                    diags.append(
                        Diagnostic(
                            "constraint-variable",
                            f"{which} {name} references undeclared variable {path}",
                        )
                    )
    return diags


def _path_declared(variables: Mapping[str, VariableDecl], path: list[str]) -> bool:
    from .domains import resolve_path

    table = {n: d.domain for n, d in variables.items()}
    try:
        return resolve_path(table, tuple(path)) is not None
    except ValueError:
        return False


def enabled_actions(a: InterfaceAutomaton, state: str, cls: ActionClass) -> set[ActionLabel]:
    """Actions of the given class labelling transitions out of ``state``."""
    if state not in a.states:
        raise ValueError(f"state not found: {state}")
    return {t.action for t in a.transitions if t.source == state and a.action_class(t.action) is cls}


# ---------------------------------------------------------------------------
# composability

CLAUSE_NAMES = ("input_input", "output_output", "hidden1_sigma2", "sigma1_hidden2")


@dataclass(frozen=True)
class ClauseConflict:
    clause: str
    actions: tuple[ActionLabel, ...]


@dataclass(frozen=True)
class ComposabilityReport:
    ok: bool
    conflicts: tuple[ClauseConflict, ...] = ()

    def conflict_actions(self) -> set[ActionLabel]:
        out: set[ActionLabel] = set()
        for c in self.conflicts:
            out.update(c.actions)
        return out


class NotComposableError(ValueError):
    def __init__(self, report: ComposabilityReport):
        self.report = report
        labels = ", ".join(str(x) for x in sorted(report.conflict_actions(), key=lambda l: l.sort_key))
        super().__init__(f"not composable (conflicting actions: {labels})")


def composable(a1: InterfaceAutomaton, a2: InterfaceAutomaton) -> ComposabilityReport:
    """Alphabet-level compatibility of the pair, clause by clause."""
    s1 = set(a1.alphabet)
    s2 = set(a2.alphabet)
    checks = (
        ("input_input", set(a1.inputs) & set(a2.inputs)),
        ("output_output", set(a1.outputs) & set(a2.outputs)),
        ("hidden1_sigma2", set(a1.hidden) & s2),
        ("sigma1_hidden2", s1 & set(a2.hidden)),
    )
    conflicts = tuple(
        ClauseConflict(name, tuple(sorted(bad, key=lambda l: l.sort_key)))
        for name, bad in checks
        if bad
    )
    return ComposabilityReport(ok=not conflicts, conflicts=conflicts)


def shared(a1: InterfaceAutomaton, a2: InterfaceAutomaton) -> set[ActionLabel]:
    """Actions the pair synchronizes on: inputs of one that are outputs of the other."""
    report = composable(a1, a2)
    if not report.ok:
        raise NotComposableError(report)
    return (set(a1.inputs) & set(a2.outputs)) | (set(a2.inputs) & set(a1.outputs))


def qualify_hidden(a: InterfaceAutomaton) -> InterfaceAutomaton:
    """Prefix every hidden action with the automaton's name as a namespace.

    Gives internal actions a private namespace so that two components using
    the same internal operation name (``init`` being the classic case) become
    composable. Inputs and outputs are left untouched.
    """
    mapping = {h: ActionLabel(h.name, a.name) for h in a.hidden}
    new_transitions = tuple(
        replace(t, action=mapping.get(t.action, t.action)) for t in a.transitions
    )
    return replace(
        a,
        hidden=tuple(mapping[h] for h in a.hidden),
        transitions=new_transitions,
    )


# ---------------------------------------------------------------------------
# synchronized product

@dataclass(frozen=True)
class ProductResult:
    automaton: InterfaceAutomaton
    pair_of: Mapping[str, tuple[str, str]]
    shared_actions: tuple[ActionLabel, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pair_of", dict(self.pair_of))


def _merge_variables(a1: InterfaceAutomaton, a2: InterfaceAutomaton) -> dict[str, VariableDecl]:
    merged = dict(a1.variables)
    for name, decl in a2.variables.items():
        if name in merged and merged[name].domain != decl.domain:
            raise ValueError(f"variable {name!r} declared with different domains in both operands")
        merged[name] = decl
    return merged


def _merge_params(p1: tuple[ParamDecl, ...], p2: tuple[ParamDecl, ...]) -> tuple[ParamDecl, ...]:
    merged: list[ParamDecl] = list(p1)
    names = {p.name: p for p in p1}
    for p in p2:
        if p.name in names:
            if names[p.name].domain != p.domain:
                raise ValueError(f"parameter {p.name!r} declared with different domains")
            continue
        merged.append(p)
        names[p.name] = p
    return tuple(merged)


def conjoin_constraints(c1: NamedConstraint, c2: NamedConstraint, contract: str) -> NamedConstraint:
    """Canonical conjunction of two same-kind constraints, sorted by name."""
    first, second = sorted((c1, c2), key=lambda c: c.name)
    ops = [c.context.operation for c in (first, second) if c.context.operation]
    return NamedConstraint(
        name=f"{first.name}_and_{second.name}",
        kind=first.kind,
        body=BinOp("and", first.body, second.body),
        context=ConstraintContext(
            contract=contract,
            operation="_and_".join(ops) if ops else None,
            params=_merge_params(first.context.params, second.context.params),
        ),
    )


def _merge_registry(
    r1: Mapping[str, NamedConstraint],
    r2: Mapping[str, NamedConstraint],
    contract: str,
) -> dict[str, NamedConstraint]:
    merged = dict(r1)
    for name, c in r2.items():
        if name in merged and merged[name].body != c.body:
            raise ValueError(f"constraint name {name!r} bound to different bodies in both operands")
        merged.setdefault(name, c)
    for c1 in r1.values():
        for c2 in r2.values():
            conj = conjoin_constraints(c1, c2, contract)
            if conj.name in merged and merged[conj.name].body != conj.body:
                raise ValueError(f"conjunction name {conj.name!r} collides with an existing constraint")
            merged.setdefault(conj.name, conj)
    return merged


def _conj_name(n1: Optional[str], n2: Optional[str]) -> Optional[str]:
    """Name of the conjunction of two optional constraint references.

    A missing side is the constant true, which conjunction absorbs.
    """
    if n1 is None:
        return n2
    if n2 is None:
        return n1
    a, b = sorted((n1, n2))
    return f"{a}_and_{b}"


def product(a1: InterfaceAutomaton, a2: InterfaceAutomaton) -> ProductResult:
    """Synchronized product over the reachable pair states.

    Non-shared actions interleave and keep their guards; a shared action
    fires one transition from each side in the same step, and the step's
    pre/post are the (canonically sorted) conjunctions of both sides'.
    """
    report = composable(a1, a2)
    if not report.ok:
        raise NotComposableError(report)
    shared_set = shared(a1, a2)

    name = f"{a1.name}_x_{a2.name}"
    inputs = tuple(l for l in _label_tuple(a1.inputs + a2.inputs) if l not in shared_set)
    outputs = tuple(l for l in _label_tuple(a1.outputs + a2.outputs) if l not in shared_set)
    hidden = _label_tuple(
        a1.hidden + a2.hidden + tuple(sorted(shared_set, key=lambda l: l.sort_key))
    )

    variables = _merge_variables(a1, a2)
    pre_reg = _merge_registry(a1.preconditions, a2.preconditions, name)
    post_reg = _merge_registry(a1.postconditions, a2.postconditions, name)

    out1: dict[str, list[Transition]] = {}
    for t in a1.transitions:
        out1.setdefault(t.source, []).append(t)
    out2: dict[str, list[Transition]] = {}
    for t in a2.transitions:
        out2.setdefault(t.source, []).append(t)

    pair_id: dict[tuple[str, str], str] = {}
    pair_of: dict[str, tuple[str, str]] = {}
    order: list[str] = []

    def intern(pair: tuple[str, str]) -> str:
        if pair in pair_id:
            return pair_id[pair]
        base = f"{pair[0]}__{pair[1]}"
        pid = base
        n = 2
        while pid in pair_of:  # distinct pair collided on the joined name
            pid = f"{base}_{n}"
            n += 1
        pair_id[pair] = pid
        pair_of[pid] = pair
        order.append(pid)
        return pid

    initial_pairs = [(i1, i2) for i1 in a1.initials for i2 in a2.initials]
    initials = tuple(dict.fromkeys(intern(p) for p in initial_pairs))

    transitions: list[Transition] = []
    seen_steps: set[Transition] = set()

    def emit(src: str, pre: Optional[str], action: ActionLabel, post: Optional[str], dst: str) -> None:
        t = Transition(src, pre, action, post, dst)
        if t not in seen_steps:
            seen_steps.add(t)
            transitions.append(t)

    worklist = list(dict.fromkeys(initial_pairs))
    visited: set[tuple[str, str]] = set(worklist)
    while worklist:
        s1, s2 = worklist.pop(0)
        pid = intern((s1, s2))
        for t in out1.get(s1, ()):
            if t.action not in shared_set:
                nxt = (t.target, s2)
                emit(pid, t.pre, t.action, t.post, intern(nxt))
                if nxt not in visited:
                    visited.add(nxt)
                    worklist.append(nxt)
            else:
                for u in out2.get(s2, ()):
                    if u.action != t.action:
                        continue
                    nxt = (t.target, u.target)
                    emit(
                        pid,
                        _conj_name(t.pre, u.pre),
                        t.action,
                        _conj_name(t.post, u.post),
                        intern(nxt),
                    )
                    if nxt not in visited:
                        visited.add(nxt)
                        worklist.append(nxt)
        for u in out2.get(s2, ()):
            if u.action in shared_set:
                continue  # synchronized above
            nxt = (s1, u.target)
            emit(pid, u.pre, u.action, u.post, intern(nxt))
            if nxt not in visited:
                visited.add(nxt)
                worklist.append(nxt)

    automaton = InterfaceAutomaton(
        name=name,
        states=tuple(order),
        initials=initials,
        inputs=inputs,
        outputs=outputs,
        hidden=hidden,
        variables=variables,
        preconditions=pre_reg,
        postconditions=post_reg,
        transitions=tuple(transitions),
    )
    return ProductResult(
        automaton=automaton,
        pair_of=pair_of,
        shared_actions=tuple(sorted(shared_set, key=lambda l: l.sort_key)),
    )
