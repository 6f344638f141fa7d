"""Constraint dialect: parsing, sorts, evaluation, simplification, falsity."""

import os

import pytest
from hypothesis import given, settings, strategies as st

import iacompat as ia
from oracles import oracle_falsity
from randgen import rand_domain, rand_expr, rand_valuation

import random


CLAIM = ia.EnumDomain(("undecided", "leader", "follower", "off"))
LE_ID = ia.EnumDomain(("dev1", "dev2"))
DATA = ia.RecordDomain((("c", CLAIM), ("s", ia.IntRangeDomain(0, 10))))
TYPE_ENV = {"Claim": CLAIM, "LE_Id": LE_ID, "DATA": DATA, "MSG": ia.OpaqueDomain()}

LD_DECLS = {
    "id": ia.VariableDecl("id", LE_ID),
    "mem": ia.VariableDecl("mem", ia.MapDomain(LE_ID, DATA)),
    "highest_strength": ia.VariableDecl("highest_strength", ia.IntRangeDomain(0, 10)),
    "highest_strength_id": ia.VariableDecl("highest_strength_id", LE_ID),
    "otherLeaders": ia.VariableDecl("otherLeaders", ia.OpaqueDomain()),
    "myCS": ia.VariableDecl("myCS", DATA),
    "isLeader": ia.VariableDecl("isLeader", ia.BoolDomain()),
    "newc": ia.VariableDecl("newc", CLAIM),
}
TL_DECLS = {
    "queue": ia.VariableDecl("queue", ia.SeqDomain(ia.OpaqueDomain())),
    "devOn": ia.VariableDecl("devOn", ia.MapDomain(LE_ID, ia.BoolDomain())),
    "node_ids": ia.VariableDecl("node_ids", ia.OpaqueDomain()),
}

# the full named constraint set of the shipped case-study fixtures, in the
# one-line qualified spelling
CASE_STUDY_CONSTRAINTS = {
    "LDPreCC": (
        "context LE_Device::changeClaim(newClaim : Claim) pre LDPreCC: "
        "(myCS.c = <off> implies newc = <undecided>) "
        "and (myCS.c = <undecided> implies (newc = <leader> or newc = <follower>)) "
        "and (myCS.c = <leader> implies newc = <undecided>) "
        "and (myCS.c = <follower> implies newc = <undecided>)",
        LD_DECLS,
    ),
    "LDPreW": (
        "context LE_Device::write(n : LE_Id, dat : DATA) pre LDPreW: n in set dom mem",
        LD_DECLS,
    ),
    "LDPreIS": (
        "context LE_Device::incStrength() pre LDPreIS: myCS.s < 10",
        LD_DECLS,
    ),
    "LDPostCC": (
        "context LE_Device::changeClaim(newClaim : Claim) post LDPostCC: myCS.c = newClaim",
        LD_DECLS,
    ),
    "LDPostW": (
        "context LE_Device::write(n : LE_Id, dat : DATA) post LDPostW: "
        "mem(n) = dat or mem(n).c = <off>",
        LD_DECLS,
    ),
    "LDPostIS": (
        "context LE_Device::incStrength() post LDPostIS: myCS.s = myCS~.s + 1",
        LD_DECLS,
    ),
    "TLPreGNM": (
        "context TransportLayer::getNextMsg() pre TLPreGNM: queue->notEmpty",
        TL_DECLS,
    ),
    "TLPreSDOF": (
        "context TransportLayer::setDeviceOff(in devId : LE_Id) pre TLPreSDOF: "
        "devOn[devId]->notEmpty",
        TL_DECLS,
    ),
    "TLPreSDON": (
        "context TransportLayer::setDeviceOn(in devId : LE_Id) pre TLPreSDON: "
        "devOn[devId]->notEmpty",
        TL_DECLS,
    ),
    # doubled `context` keyword as sometimes written; the parser tolerates it
    "TLPostI": (
        "context context TransportLayer::Init() post TLPostI: "
        "devOn.domain() = node_ids and devOn.range = {false} and queue.size() = 0",
        TL_DECLS,
    ),
    "TLPostATQ": (
        "context context TransportLayer::addToQueue(m : MSG) post TLPostATQ: "
        "queue.size() = queue@pre.size() + 1 and queue.lastItem() = m "
        "and queue@pre = queue(1,...,queue.size())",
        TL_DECLS,
    ),
}


def parse_case(name):
    text, decls = CASE_STUDY_CONSTRAINTS[name]
    return ia.parse_constraint(text, decls, type_env=TYPE_ENV)


# ---------------------------------------------------------------------------
# parsing


@pytest.mark.parametrize("name", sorted(CASE_STUDY_CONSTRAINTS))
def test_case_study_constraint_parses(name):
    c = parse_case(name)
    assert c.name == name
    assert c.kind is (ia.ConstraintKind.PRE if "Pre" in name else ia.ConstraintKind.POST)


def test_pre_is_shape():
    c = parse_case("LDPreIS")
    assert c.context.contract == "LE_Device"
    assert c.context.operation == "incStrength"
    assert c.context.params == ()
    assert ia.to_text(c.body) == "myCS.s < 10"


def test_post_is_carries_old_reference():
    c = parse_case("LDPostIS")
    # the old-mark prints at the end of the dotted path
    assert ia.to_text(c.body) == "myCS.s = myCS.s@pre + 1"
    refs = {(r.dotted, r.old) for r in ia.variable_refs(c.body)}
    assert ("myCS.s", True) in refs and ("myCS.s", False) in refs


def test_spaced_contract_name_tolerated():
    c = ia.parse_constraint("context LE Device::incStrength() pre LDPreIS: myCS.s < 10",
                            LD_DECLS, type_env=TYPE_ENV)
    assert c.context.contract == "LE Device"


def test_param_modes_and_domains():
    c = parse_case("TLPreSDOF")
    (p,) = c.context.params
    assert (p.name, p.mode) == ("devId", "in")
    assert p.domain == LE_ID


def test_unnamed_constraint_gets_stable_name():
    c = ia.parse_constraint("pre : true")
    assert c.name == "pre_unnamed"


def test_old_reference_rejected_outside_post():
    with pytest.raises(ValueError):
        ia.parse_constraint("pre P: myCS.s = myCS~.s", LD_DECLS)
    with pytest.raises(ValueError):
        ia.parse_constraint("inv I: queue@pre.size() = 0", TL_DECLS)


def test_unknown_variable_is_a_sort_error():
    with pytest.raises(ia.UnknownVariable):
        ia.parse_constraint("pre P: nosuch < 10", LD_DECLS)


def test_sort_mismatch_rejected():
    with pytest.raises(ia.SortError):
        ia.parse_constraint("pre P: myCS.s and true", LD_DECLS)
    with pytest.raises(ia.SortError):
        ia.parse_constraint("pre P: queue->notEmpty + 1", TL_DECLS)


def test_parse_error_carries_position():
    with pytest.raises(ia.ParseError) as exc:
        ia.parse_expression("1 +", source="snippet")
    assert "snippet:1:" in str(exc.value)


def test_round_trip_all_case_study_bodies():
    for name in CASE_STUDY_CONSTRAINTS:
        text, decls = CASE_STUDY_CONSTRAINTS[name]
        c = ia.parse_constraint(text, decls, type_env=TYPE_ENV)
        printed = ia.to_text(c.body)
        again = ia.parse_expression(printed, decls, params=dict(c.param_domains()),
                                    source=name)
        assert ia.to_text(again) == printed


def test_slice_is_front_sugar():
    e = ia.parse_expression("queue(1,...,queue.size())", TL_DECLS)
    assert ia.to_text(e) == "queue.front(queue.size())"


def test_bare_builtin_without_parens():
    e = ia.parse_expression("devOn.range = {false}", TL_DECLS)
    assert isinstance(e.left, ia.MethodCall) and e.left.name == "range"


def test_membership_desugars_to_domain_call():
    c = parse_case("LDPreW")
    assert isinstance(c.body, ia.Membership)
    assert isinstance(c.body.collection, ia.MethodCall)
    assert c.body.collection.name == "domain"


# ---------------------------------------------------------------------------
# evaluation


def test_pre_is_boundary():
    c = parse_case("LDPreIS")
    for s in range(10):
        assert ia.eval_constraint(c, ia.Valuation({"myCS.s": s})) is True
    assert ia.eval_constraint(c, ia.Valuation({"myCS.s": 10})) is False


def test_pre_cc_truth_table_spot():
    c = parse_case("LDPreCC")
    assert ia.eval_constraint(c, ia.Valuation({"myCS.c": "off", "newc": "undecided"})) is True
    assert ia.eval_constraint(c, ia.Valuation({"myCS.c": "off", "newc": "leader"})) is False
    assert ia.eval_constraint(c, ia.Valuation({"myCS.c": "undecided", "newc": "follower"})) is True


def test_post_is_requires_old_state():
    c = parse_case("LDPostIS")
    ok = ia.Valuation({"myCS": {"c": "off", "s": 5}}, old={"myCS": {"c": "off", "s": 4}})
    assert ia.eval_constraint(c, ok) is True
    wrong = ia.Valuation({"myCS": {"c": "off", "s": 6}}, old={"myCS": {"c": "off", "s": 4}})
    assert ia.eval_constraint(c, wrong) is False
    with pytest.raises(ia.EvalError):
        ia.eval_constraint(c, ia.Valuation({"myCS": {"c": "off", "s": 5}}))


def test_map_application_and_membership():
    c = parse_case("LDPreW")
    val = ia.Valuation({"mem": {"dev1": {"c": "off", "s": 0}}, "n": "dev1"})
    assert ia.eval_constraint(c, val) is True
    val2 = ia.Valuation({"mem": {"dev1": {"c": "off", "s": 0}}, "n": "dev2"})
    assert ia.eval_constraint(c, val2) is False


def test_apply_miss_is_absorbed_by_or():
    c = parse_case("LDPostW")
    # mem(n) raises on a missing key; `or` still decides when the other
    # disjunct is true
    val = ia.Valuation({"mem": {}, "n": "dev1", "dat": {"c": "off", "s": 0}})
    with pytest.raises(ia.EvalError):
        ia.eval_constraint(c, val)
    hit = ia.Valuation({"mem": {"dev1": {"c": "off", "s": 3}}, "n": "dev1",
                        "dat": {"c": "off", "s": 3}})
    assert ia.eval_constraint(c, hit) is True


def test_not_empty_semantics():
    assert ia.evaluate(ia.parse_expression("queue->notEmpty", TL_DECLS),
                       ia.Valuation({"queue": ()})) is False
    assert ia.evaluate(ia.parse_expression("queue->notEmpty", TL_DECLS),
                       ia.Valuation({"queue": ("m1",)})) is True
    # failed map application under ->notEmpty reads as empty
    e = ia.parse_expression("devOn[devId]->notEmpty", TL_DECLS,
                            params={"devId": LE_ID})
    assert ia.evaluate(e, ia.Valuation({"devOn": {}, "devId": "dev1"})) is False
    assert ia.evaluate(e, ia.Valuation({"devOn": {"dev1": True}, "devId": "dev1"})) is True


def test_cross_sort_equality_is_false():
    e = ia.parse_expression("x = y", {"x": ia.VariableDecl("x", ia.BoolDomain()),
                                      "y": ia.VariableDecl("y", ia.OpaqueDomain())})
    assert ia.evaluate(e, ia.Valuation({"x": True, "y": 1})) is False


def test_parallel_conjunction_absorbs_errors():
    decls = {"x": ia.VariableDecl("x", ia.BoolDomain())}
    e = ia.parse_expression("x and missing", decls, open_world=True)
    # false wins even though the right side is unbound
    assert ia.evaluate(e, ia.Valuation({"x": False})) is False
    with pytest.raises(ia.EvalError):
        ia.evaluate(e, ia.Valuation({"x": True}))
    e2 = ia.parse_expression("missing or x", decls, open_world=True)
    assert ia.evaluate(e2, ia.Valuation({"x": True})) is True


def test_constant_fold_example():
    e = ia.parse_expression("true and false")
    assert ia.evaluate(e, ia.Valuation()) is False


# ---------------------------------------------------------------------------
# simplification


def test_simplify_identity_elimination():
    e = ia.parse_expression("(myCS.s < 10) and true", LD_DECLS)
    assert ia.to_text(ia.simplify(e)) == "myCS.s < 10"


def test_simplify_annihilator():
    e = ia.parse_expression("false and (myCS.s < 10)", LD_DECLS)
    assert ia.to_text(ia.simplify(e)) == "false"


def test_simplify_commutative_canonical_order():
    decls = {"p": ia.VariableDecl("p", ia.BoolDomain()),
             "q": ia.VariableDecl("q", ia.BoolDomain())}
    a = ia.simplify(ia.parse_expression("p and q", decls))
    b = ia.simplify(ia.parse_expression("q and p", decls))
    assert ia.to_text(a) == ia.to_text(b)


def test_simplify_implication_folds():
    assert ia.to_text(ia.simplify(ia.parse_expression("false implies x",
        {"x": ia.VariableDecl("x", ia.BoolDomain())}))) == "true"
    assert ia.to_text(ia.simplify(ia.parse_expression("true implies x",
        {"x": ia.VariableDecl("x", ia.BoolDomain())}))) == "x"


def test_reflexivity_opt_in():
    decls = {"x": ia.VariableDecl("x", ia.OpaqueDomain())}
    e = ia.parse_expression("x = x", decls)
    assert ia.to_text(ia.simplify(e)) == "x = x"
    assert ia.to_text(ia.simplify(e, reflexivity=True)) == "true"


# ---------------------------------------------------------------------------
# falsity verdicts


def test_falsity_satisfiable_with_witness():
    e = ia.parse_expression("myCS.s < 10", LD_DECLS)
    res = ia.falsity(e, LD_DECLS)
    assert res.verdict is ia.Verdict.SATISFIABLE
    assert res.witness is not None
    assert ia.evaluate(e, res.witness) is True


def test_falsity_false_by_enumeration():
    e = ia.parse_expression("myCS.s < 0", LD_DECLS)
    res = ia.falsity(e, LD_DECLS)
    assert res.verdict is ia.Verdict.FALSE
    assert oracle_falsity(e, list(LD_DECLS.values())) is True


def test_falsity_unknown_on_opaque():
    decls = {"x": ia.VariableDecl("x", ia.OpaqueDomain())}
    e = ia.parse_expression("x = x", decls)
    assert ia.falsity(e, decls).verdict is ia.Verdict.UNKNOWN


def test_falsity_budget_forces_unknown():
    e = ia.parse_expression("myCS.s < 0", LD_DECLS)
    res = ia.falsity(e, LD_DECLS, budget=3)
    assert res.verdict is ia.Verdict.UNKNOWN


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("IACOMPAT_ENUM_BUDGET", "7")
    assert ia.default_budget() == 7
    monkeypatch.setenv("IACOMPAT_ENUM_BUDGET", "not-a-number")
    assert ia.default_budget() == 10**6
    monkeypatch.delenv("IACOMPAT_ENUM_BUDGET")
    assert ia.default_budget() == 10**6


def test_constraint_falsity_uses_param_domains():
    c = parse_case("TLPreSDOF")
    res = ia.constraint_falsity(c, TL_DECLS)
    assert res.verdict is ia.Verdict.SATISFIABLE


def test_case_study_constraints_never_unsatisfiable():
    # none of the shipped constraints may disable a transition outright
    for name in CASE_STUDY_CONSTRAINTS:
        c = parse_case(name)
        decls = CASE_STUDY_CONSTRAINTS[name][1]
        res = ia.constraint_falsity(c, decls)
        assert res.verdict is not ia.Verdict.FALSE, name


def test_simplify_preserves_falsity_example():
    e = ia.parse_expression("(myCS.s < 0) and true", LD_DECLS)
    assert ia.falsity(e, LD_DECLS).verdict is ia.Verdict.FALSE


# ---------------------------------------------------------------------------
# property tests


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_simplifier_soundness(seed):
    rng = random.Random(seed)
    decls = [ia.VariableDecl(f"v{i}", rand_domain(rng)) for i in range(rng.randint(0, 2))]
    expr = rand_expr(rng, decls, depth=3)
    simple = ia.simplify(expr)
    for _ in range(20):
        val = rand_valuation(rng, decls, drop=0.1 if rng.random() < 0.3 else 0.0)
        try:
            want = ia.evaluate(expr, val)
        except ia.EvalError:
            with pytest.raises(ia.EvalError):
                ia.evaluate(simple, val)
            continue
        assert ia.evaluate(simple, val) == want


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_falsity_matches_enumeration_oracle(seed):
    rng = random.Random(seed)
    decls = [ia.VariableDecl(f"v{i}", rand_domain(rng)) for i in range(rng.randint(0, 2))]
    expr = rand_expr(rng, decls, depth=3)
    res = ia.falsity(expr, decls)
    want = oracle_falsity(expr, decls)
    if res.verdict is ia.Verdict.FALSE:
        assert want is True
        assert res.witness is None
    elif res.verdict is ia.Verdict.SATISFIABLE:
        assert want is False
        if res.witness is not None:
            assert ia.evaluate(expr, res.witness) is True


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_expression_print_parse_round_trip(seed):
    rng = random.Random(seed)
    decls = [ia.VariableDecl(f"v{i}", rand_domain(rng)) for i in range(rng.randint(0, 2))]
    expr = rand_expr(rng, decls, depth=3)
    text = ia.to_text(expr)
    again = ia.parse_expression(text, {d.name: d for d in decls})
    assert ia.to_text(again) == text
