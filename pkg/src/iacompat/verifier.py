"""Compatibility verification over synchronized products.

The pipeline: check composability, build the product, collect illegal states,
close them backwards into the bad set, prune, and read the verdict off the
surviving initial states. A pair state is illegal when one side can emit a
shared action the other side cannot receive there, or when it has outgoing
transitions and every one of them is disabled because a guard is equivalent
to false. The backward closure follows output and hidden steps only: a
helpful environment can steer inputs away from trouble, so input steps do
not propagate badness.

The closure is a single breadth-first sweep over the reversed product graph,
linear in states plus transitions; building the product itself is the
quadratic part. ``OpCounter`` exposes the closure's elementary operation
count for measurement.
"""
from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from .automata import (
    ActionClass,
    ActionLabel,
    ComposabilityReport,
    InterfaceAutomaton,
    ProductResult,
    Transition,
    composable,
    empty_automaton,
    enabled_actions,
    product,
    qualify_hidden,
    validate,
)
from .domains import Domain, VariableDecl
from .exprs import NamedConstraint
from .falsity import Verdict, constraint_falsity, default_budget


@dataclass(frozen=True)
class UnreceivedOutput:
    """A shared action one side offers as output where the other side cannot take it."""

    action: ActionLabel
    sender: str  # "left" | "right"


@dataclass(frozen=True)
class AllGuardsFalse:
    """Every outgoing transition is disabled by a pre or post equivalent to false."""

    transitions: tuple[Transition, ...]


IllegalReason = object  # UnreceivedOutput | AllGuardsFalse


@dataclass(frozen=True)
class IllegalStateSet:
    states: frozenset[str]
    reasons: Mapping[str, tuple[IllegalReason, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "reasons", dict(self.reasons))


@dataclass
class OpCounter:
    """Tally of elementary closure operations (index builds, dequeues, scans)."""

    ops: int = 0

    def tick(self, n: int = 1) -> None:
        self.ops += n


def illegal_states(
    prod: ProductResult,
    a1: InterfaceAutomaton,
    a2: InterfaceAutomaton,
    decls: Optional[Mapping[str, VariableDecl]] = None,
    *,
    strict_deadlock: bool = False,
    budget: Optional[int] = None,
) -> IllegalStateSet:
    """Illegal product states with the reasons that condemn them.

    ``decls`` defaults to the product's merged variable declarations.
    ``strict_deadlock`` extends the all-guards-false clause to states with no
    outgoing transitions (the vacuous reading); by default deadlocks are not
    illegal. A falsity verdict of Unknown never disables a transition.
    """
    auto = prod.automaton
    variables = dict(decls) if decls is not None else dict(auto.variables)
    budget = default_budget() if budget is None else budget
    shared_set = set(prod.shared_actions)

    verdict_cache: dict[str, Verdict] = {}

    def is_false(name: Optional[str], registry: Mapping[str, NamedConstraint]) -> bool:
        if name is None:
            return False
        if name not in verdict_cache:
            verdict_cache[name] = constraint_falsity(
                registry[name], variables, budget=budget
            ).verdict
        return verdict_cache[name] is Verdict.FALSE

    outgoing: dict[str, list[Transition]] = {s: [] for s in auto.states}
    for t in auto.transitions:
        outgoing[t.source].append(t)

    reasons: dict[str, list[IllegalReason]] = {}

    for pid in auto.states:
        s1, s2 = prod.pair_of[pid]
        for action in sorted(shared_set, key=lambda l: l.sort_key):
            if action in enabled_actions(a1, s1, ActionClass.OUTPUT) and action not in enabled_actions(
                a2, s2, ActionClass.INPUT
            ):
                reasons.setdefault(pid, []).append(UnreceivedOutput(action, "left"))
            if action in enabled_actions(a2, s2, ActionClass.OUTPUT) and action not in enabled_actions(
                a1, s1, ActionClass.INPUT
            ):
                reasons.setdefault(pid, []).append(UnreceivedOutput(action, "right"))

        out = outgoing[pid]
        if out or strict_deadlock:
            disabled = [
                t
                for t in out
                if is_false(t.pre, auto.preconditions) or is_false(t.post, auto.postconditions)
            ]
            if len(disabled) == len(out) and (out or strict_deadlock):
                if out:
                    reasons.setdefault(pid, []).append(AllGuardsFalse(tuple(disabled)))
                else:  # strict deadlock reading: no step at all
                    reasons.setdefault(pid, []).append(AllGuardsFalse(()))

    return IllegalStateSet(
        states=frozenset(reasons),
        reasons={k: tuple(v) for k, v in reasons.items()},
    )


def bad_states(
    prod: ProductResult,
    illegal: IllegalStateSet,
    *,
    counter: Optional[OpCounter] = None,
) -> frozenset[str]:
    """Backward closure of the illegal set along output and hidden steps.

    A state is bad when the component pair can reach an illegal state on its
    own (outputs and internal actions); the environment controls inputs, so
    those edges do not spread badness.
    """
    tick = counter.tick if counter is not None else (lambda n=1: None)
    auto = prod.automaton
    autonomous = {ActionClass.OUTPUT, ActionClass.HIDDEN}
    classes = {l: auto.action_class(l) for l in auto.alphabet}

    reverse: dict[str, list[str]] = {}
    for t in auto.transitions:
        tick()
        if classes.get(t.action) in autonomous:
            reverse.setdefault(t.target, []).append(t.source)

    bad = set(illegal.states)
    queue = deque(sorted(bad))
    while queue:
        s = queue.popleft()
        tick()
        for p in reverse.get(s, ()):
            tick()
            if p not in bad:
                bad.add(p)
                queue.append(p)
    return frozenset(bad)


def prune(prod: ProductResult, remove: frozenset[str]) -> InterfaceAutomaton:
    """Remove the given states, then keep only what the initials still reach.

    Returns the canonical empty automaton when nothing survives.
    """
    auto = prod.automaton
    kept = [s for s in auto.states if s not in remove]
    initials = [s for s in auto.initials if s not in remove]
    if not initials:
        return empty_automaton(auto.name)

    out: dict[str, list[Transition]] = {s: [] for s in kept}
    for t in auto.transitions:
        if t.source not in remove and t.target not in remove:
            out[t.source].append(t)

    reachable: set[str] = set(initials)
    queue = deque(initials)
    while queue:
        s = queue.popleft()
        for t in out[s]:
            if t.target not in reachable:
                reachable.add(t.target)
                queue.append(t.target)

    return replace(
        auto,
        states=tuple(s for s in auto.states if s in reachable),
        initials=tuple(initials),
        transitions=tuple(
            t for t in auto.transitions
            if t.source in reachable and t.target in reachable
        ),
    )


# ---------------------------------------------------------------------------
# witness traces

@dataclass(frozen=True)
class Trace:
    """Alternating path: states[0] -steps[0]-> states[1] -> ... """

    states: tuple[str, ...]
    steps: tuple[Transition, ...]


def shortest_witness(prod: ProductResult, illegal: IllegalStateSet) -> Optional[Trace]:
    """Shortest output/hidden path from an initial state into the illegal set.

    Computed on the unpruned product. None when no initial state can reach
    an illegal state autonomously.
    """
    auto = prod.automaton
    autonomous = {ActionClass.OUTPUT, ActionClass.HIDDEN}
    targets = illegal.states

    parent: dict[str, tuple[str, Transition]] = {}
    seen = set(auto.initials)
    queue = deque(auto.initials)
    found: Optional[str] = None
    for s in auto.initials:
        if s in targets:
            found = s
            break
    while queue and found is None:
        s = queue.popleft()
        for t in auto.transitions:
            if t.source != s or auto.action_class(t.action) not in autonomous:
                continue
            if t.target in seen:
                continue
            seen.add(t.target)
            parent[t.target] = (s, t)
            if t.target in targets:
                found = t.target
                break
            queue.append(t.target)
    if found is None:
        return None
    states = [found]
    steps: list[Transition] = []
    while states[0] in parent:
        prev, step = parent[states[0]]
        states.insert(0, prev)
        steps.insert(0, step)
    return Trace(states=tuple(states), steps=tuple(steps))


# ---------------------------------------------------------------------------
# the full check

class CompatVerdict(enum.Enum):
    COMPATIBLE = "compatible"
    INCOMPATIBLE = "incompatible"


class IncompatibilityCause(enum.Enum):
    NOT_COMPOSABLE = "not_composable"
    EMPTY_AFTER_PRUNING = "empty_after_pruning"


@dataclass(frozen=True)
class CompatOptions:
    qualify_hidden: bool = False
    strict_deadlock: bool = False
    enum_budget: Optional[int] = None  # None picks up the environment default


@dataclass(frozen=True)
class CompatReport:
    left: str
    right: str
    options: CompatOptions
    composability: ComposabilityReport
    shared: tuple[ActionLabel, ...] = ()
    product: Optional[ProductResult] = None
    illegal: Optional[IllegalStateSet] = None
    bad: Optional[frozenset[str]] = None
    pruned: Optional[InterfaceAutomaton] = None
    verdict: CompatVerdict = CompatVerdict.INCOMPATIBLE
    cause: Optional[IncompatibilityCause] = None
    witness: Optional[Trace] = None


class InvalidAutomaton(ValueError):
    def __init__(self, name: str, diagnostics):
        self.diagnostics = list(diagnostics)
        listing = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"automaton {name} fails validation: {listing}")


def check_compatibility(
    a1: InterfaceAutomaton,
    a2: InterfaceAutomaton,
    options: Optional[CompatOptions] = None,
) -> CompatReport:
    """Run the full pairwise check and report every intermediate artifact."""
    options = options or CompatOptions()
    for a in (a1, a2):
        diags = validate(a)
        if diags:
            raise InvalidAutomaton(a.name, diags)

    if options.qualify_hidden:
        a1 = qualify_hidden(a1)
        a2 = qualify_hidden(a2)

    comp = composable(a1, a2)
    if not comp.ok:
        return CompatReport(
            left=a1.name,
            right=a2.name,
            options=options,
            composability=comp,
            verdict=CompatVerdict.INCOMPATIBLE,
            cause=IncompatibilityCause.NOT_COMPOSABLE,
        )

    prod = product(a1, a2)
    illegal = illegal_states(
        prod, a1, a2, strict_deadlock=options.strict_deadlock, budget=options.enum_budget
    )
    bad = bad_states(prod, illegal)
    pruned = prune(prod, bad)

    if pruned.initials:
        verdict, cause, witness = CompatVerdict.COMPATIBLE, None, None
    else:
        verdict = CompatVerdict.INCOMPATIBLE
        cause = IncompatibilityCause.EMPTY_AFTER_PRUNING
        witness = shortest_witness(prod, illegal)

    return CompatReport(
        left=a1.name,
        right=a2.name,
        options=options,
        composability=comp,
        shared=prod.shared_actions,
        product=prod,
        illegal=illegal,
        bad=bad,
        pruned=pruned,
        verdict=verdict,
        cause=cause,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# structured report serialization

REPORT_SCHEMA = "compat-report@1"


def _labels(labels) -> list[str]:
    return sorted(str(l) for l in labels)


def _automaton_summary(a: InterfaceAutomaton) -> dict:
    return {
        "name": a.name,
        "states": len(a.states),
        "transitions": len(a.transitions),
        "initials": sorted(a.initials),
        "inputs": _labels(a.inputs),
        "outputs": _labels(a.outputs),
        "hidden": _labels(a.hidden),
    }


def report_to_dict(report: CompatReport) -> dict:
    """JSON-ready view of a report; the layout is versioned by ``schema``."""
    illegal = None
    if report.illegal is not None:
        illegal = []
        for pid in sorted(report.illegal.states):
            entries = []
            for reason in report.illegal.reasons[pid]:
                if isinstance(reason, UnreceivedOutput):
                    entries.append(
                        {
                            "kind": "unreceived_output",
                            "action": str(reason.action),
                            "sender": reason.sender,
                        }
                    )
                else:
                    entries.append(
                        {
                            "kind": "all_guards_false",
                            "disabled": len(reason.transitions),
                        }
                    )
            pair = report.product.pair_of[pid] if report.product else None
            illegal.append({"state": pid, "pair": list(pair) if pair else None, "reasons": entries})

    witness = None
    if report.witness is not None:
        witness = {
            "states": list(report.witness.states),
            "actions": [str(t.action) for t in report.witness.steps],
        }

    return {
        "schema": REPORT_SCHEMA,
        "left": report.left,
        "right": report.right,
        "options": {
            "qualify_hidden": report.options.qualify_hidden,
            "strict_deadlock": report.options.strict_deadlock,
            "enum_budget": report.options.enum_budget
            if report.options.enum_budget is not None
            else default_budget(),
        },
        "composable": {
            "ok": report.composability.ok,
            "conflicts": [
                {"clause": c.clause, "actions": _labels(c.actions)}
                for c in report.composability.conflicts
            ],
        },
        "shared": _labels(report.shared),
        "product": _automaton_summary(report.product.automaton) if report.product else None,
        "illegal": illegal,
        "bad": sorted(report.bad) if report.bad is not None else None,
        "pruned": _automaton_summary(report.pruned) if report.pruned is not None else None,
        "verdict": report.verdict.value,
        "cause": report.cause.value if report.cause else None,
        "witness": witness,
    }


def report_to_json(report: CompatReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
