"""Brute-force reference implementations used to cross-check the engine.

Everything here is written the slow, obvious way on purpose: full-grid
products, per-state definition tests, fixpoint loops. The only piece of the
engine that is reused is the leaf expression evaluator; enumeration, domain
resolution, illegality, closure, and pruning are all re-derived
independently so a shared bug cannot hide.
"""

from __future__ import annotations

import itertools

from iacompat import (
    ActionClass,
    Apply,
    BinOp,
    EvalError,
    FieldAccess,
    Membership,
    MethodCall,
    Not,
    SetLit,
    Valuation,
    VarRef,
    evaluate,
)


# ---------------------------------------------------------------------------
# constraint falsity, by direct enumeration


def collect_paths(expr, into):
    """All (dotted path, is_old) variable references under expr."""
    if isinstance(expr, VarRef):
        into.add((".".join(expr.path), expr.old))
    elif isinstance(expr, Not):
        collect_paths(expr.operand, into)
    elif isinstance(expr, BinOp):
        collect_paths(expr.left, into)
        collect_paths(expr.right, into)
    elif isinstance(expr, Membership):
        collect_paths(expr.item, into)
        collect_paths(expr.collection, into)
    elif isinstance(expr, Apply):
        collect_paths(expr.target, into)
        collect_paths(expr.key, into)
    elif isinstance(expr, FieldAccess):
        collect_paths(expr.target, into)
    elif isinstance(expr, MethodCall):
        collect_paths(expr.target, into)
        for a in expr.args:
            collect_paths(a, into)
    elif isinstance(expr, SetLit):
        for item in expr.items:
            collect_paths(item, into)


def _own_resolve(decl_map, dotted):
    # longest declared prefix wins; the remainder navigates record fields
    parts = dotted.split(".")
    for cut in range(len(parts), 0, -1):
        prefix = ".".join(parts[:cut])
        if prefix in decl_map:
            dom = decl_map[prefix]
            for fieldname in parts[cut:]:
                dom = dom.field_domain(fieldname)
            return prefix, dom
    raise KeyError(dotted)


def oracle_falsity(expr, decls, params=()):
    """True iff no enumerated valuation satisfies expr.

    Returns None when some referenced variable is not finitely enumerable
    (the engine's Unknown tier).
    """
    decl_map = {d.name: d.domain for d in decls}
    for p in params:
        decl_map[p.name] = p.domain
    paths = set()
    collect_paths(expr, paths)
    roots_cur, roots_old = set(), set()
    for dotted, old in paths:
        root, _ = _own_resolve(decl_map, dotted)
        (roots_old if old else roots_cur).add(root)
    roots_cur |= roots_old  # old roots also need a current value
    names = sorted(roots_cur)
    domains = [decl_map[n] for n in names]
    if any(not d.is_enumerable() for d in domains):
        return None
    old_names = sorted(roots_old)
    old_domains = [decl_map[n] for n in old_names]
    for cur in itertools.product(*(tuple(d.values()) for d in domains)):
        base = dict(zip(names, cur))
        for old in itertools.product(*(tuple(d.values()) for d in old_domains)):
            val = Valuation(values=base, old=dict(zip(old_names, old)) if old_names else None)
            try:
                if evaluate(expr, val) is True:
                    return False
            except EvalError:
                pass
    return True


# ---------------------------------------------------------------------------
# full-grid product and per-state definition tests


def _tclass(auto, label):
    if label in auto.inputs:
        return ActionClass.INPUT
    if label in auto.outputs:
        return ActionClass.OUTPUT
    return ActionClass.HIDDEN


def oracle_shared(a1, a2):
    return (set(a1.inputs) & set(a2.outputs)) | (set(a2.inputs) & set(a1.outputs))


def _nameset(name):
    return frozenset() if name is None else frozenset([name])


def grid_product(a1, a2):
    """All of S1 x S2, no reachability restriction.

    Transitions are (src_pair, pre_names, action, post_names, tgt_pair);
    pre/post are frozensets of operand constraint names, i.e. the
    conjunction with the operand order forgotten.
    """
    shared = oracle_shared(a1, a2)
    states = [(s1, s2) for s1 in a1.states for s2 in a2.states]
    initials = [(s1, s2) for s1 in a1.initials for s2 in a2.initials]
    trans = set()
    for (s1, s2) in states:
        for t in a1.transitions:
            if t.source != s1 or t.action in shared:
                continue
            trans.add(((s1, s2), _nameset(t.pre), t.action, _nameset(t.post), (t.target, s2)))
        for t in a2.transitions:
            if t.source != s2 or t.action in shared:
                continue
            trans.add(((s1, s2), _nameset(t.pre), t.action, _nameset(t.post), (s1, t.target)))
        for t in a1.transitions:
            if t.source != s1 or t.action not in shared:
                continue
            for u in a2.transitions:
                if u.source != s2 or u.action != t.action:
                    continue
                pre = _nameset(t.pre) | _nameset(u.pre)
                post = _nameset(t.post) | _nameset(u.post)
                trans.add(((s1, s2), pre, t.action, post, (t.target, u.target)))
    return states, initials, sorted(trans, key=_tkey)


def _tkey(item):
    (src, pre, action, post, tgt) = item
    return (src, sorted(pre), action.sort_key, sorted(post), tgt)


def _enabled(auto, state, label, cls):
    if _tclass(auto, label) is not cls:
        return False
    return any(t.source == state and t.action == label for t in auto.transitions)


def oracle_illegal(a1, a2, grid, *, falsity_of, strict_deadlock=False):
    """Per-pair direct test of the two illegal-state clauses.

    falsity_of(name, kind) decides `the constraint of this name is
    unsatisfiable`; the caller chooses how.
    """
    states, _, trans = grid
    shared = oracle_shared(a1, a2)
    illegal = set()
    for (s1, s2) in states:
        hit = False
        for label in shared:
            if _enabled(a1, s1, label, ActionClass.OUTPUT) and not _enabled(a2, s2, label, ActionClass.INPUT):
                hit = True
            if _enabled(a2, s2, label, ActionClass.OUTPUT) and not _enabled(a1, s1, label, ActionClass.INPUT):
                hit = True
        if not hit:
            out = [t for t in trans if t[0] == (s1, s2)]

            def dead(t):
                pre_false = any(falsity_of(n, "pre") for n in t[1])
                post_false = any(falsity_of(n, "post") for n in t[3])
                return pre_false or post_false

            if out:
                hit = all(dead(t) for t in out)
            elif strict_deadlock:
                hit = True
        if hit:
            illegal.add((s1, s2))
    return illegal


def oracle_bad(a1, a2, grid, illegal):
    """Naive fixpoint: rescan every transition until nothing changes."""
    _, _, trans = grid
    shared = oracle_shared(a1, a2)

    def autonomous(label):
        # in the product, shared actions are hidden; others keep the class
        # given by whichever operand owns them
        if label in shared:
            return True
        cls = _tclass(a1, label) if label in a1.alphabet else _tclass(a2, label)
        return cls in (ActionClass.OUTPUT, ActionClass.HIDDEN)

    bad = set(illegal)
    changed = True
    while changed:
        changed = False
        for (src, _pre, label, _post, tgt) in trans:
            if src not in bad and tgt in bad and autonomous(label):
                bad.add(src)
                changed = True
    return bad


def constraint_falsity_table(a1, a2):
    """falsity_of(name, kind) callback built from both registries."""
    decls = list({**a1.variables, **a2.variables}.values())
    table = {}
    for auto in (a1, a2):
        for reg in (auto.preconditions, auto.postconditions):
            for name, c in reg.items():
                if name in table:
                    continue
                params = c.context.params if c.context else ()
                verdict = oracle_falsity(c.body, decls, params)
                table[name] = bool(verdict)  # None (not enumerable) -> satisfiable

    def falsity_of(name, _kind):
        return table.get(name, False)

    return falsity_of


def oracle_verdict(a1, a2, *, strict_deadlock=False):
    """Compatible iff some initial pair survives bad-state removal."""
    falsity_of = constraint_falsity_table(a1, a2)
    grid = grid_product(a1, a2)
    illegal = oracle_illegal(a1, a2, grid, falsity_of=falsity_of,
                             strict_deadlock=strict_deadlock)
    bad = oracle_bad(a1, a2, grid, illegal)
    _, initials, _ = grid
    compatible = any(i not in bad for i in initials)
    return compatible, grid, illegal, bad


# ---------------------------------------------------------------------------
# reachability, for prune cross-checks


def oracle_reachable(initials, edges, removed=frozenset()):
    """filter-then-BFS over (source, target) pairs."""
    keep_init = [s for s in initials if s not in removed]
    adj = {}
    for (src, tgt) in edges:
        if src in removed or tgt in removed:
            continue
        adj.setdefault(src, []).append(tgt)
    seen = set(keep_init)
    work = list(keep_init)
    while work:
        s = work.pop()
        for t in adj.get(s, ()):
            if t not in seen:
                seen.add(t)
                work.append(t)
    return seen


def interleaving_size(a1, a2):
    """Reachable product size for a no-shared pair, by independent BFS."""
    out1 = {}
    for t in a1.transitions:
        out1.setdefault(t.source, []).append(t)
    out2 = {}
    for t in a2.transitions:
        out2.setdefault(t.source, []).append(t)
    work = [(s1, s2) for s1 in a1.initials for s2 in a2.initials]
    seen = set(work)
    emitted = set()
    while work:
        (s1, s2) = work.pop()
        for t in out1.get(s1, ()):
            emitted.add(((s1, s2), t.pre, t.action, t.post, (t.target, s2)))
            if (t.target, s2) not in seen:
                seen.add((t.target, s2))
                work.append((t.target, s2))
        for t in out2.get(s2, ()):
            emitted.add(((s1, s2), t.pre, t.action, t.post, (s1, t.target)))
            if (s1, t.target) not in seen:
                seen.add((s1, t.target))
                work.append((s1, t.target))
    return len(seen), len(emitted)
