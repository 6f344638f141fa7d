"""Document parsing, canonical printing, diagnostics, and DOT export."""

import pytest

import iacompat as ia


def _ld_doc():
    return ia.load_fixture("le_device.ia")


def _tl_doc():
    return ia.load_fixture("transport_layer.ia")


# ---------------------------------------------------------------------------
# fixture fidelity


def test_le_device_fixture_counts():
    a = _ld_doc().automaton("LE_Device")
    assert len(a.states) == 6
    assert a.initials == ("Off",)
    assert len(a.inputs) == 1
    assert len(a.outputs) == 1
    assert len(a.hidden) == 13
    assert len(a.transitions) == 14


def test_transport_layer_fixture_counts():
    a = _tl_doc().automaton("TransportLayer")
    assert len(a.states) == 10
    assert a.initials == ("Init",)
    assert len(a.inputs) == 1
    assert len(a.outputs) == 1
    assert len(a.hidden) == 8
    assert len(a.transitions) == 16


def test_transport_layer_keeps_duplicate_declaration():
    a = _tl_doc().automaton("TransportLayer")
    triples = [(t.source, t.action.name, t.target) for t in a.transitions]
    assert triples.count(("AddToQueue", "ready", "Ready")) == 2
    assert len(set(a.transitions)) == 15  # as a set, one collapses


def test_fixture_registries():
    ld = _ld_doc().automaton("LE_Device")
    assert set(ld.preconditions) == {"LDPreCC", "LDPreW", "LDPreIS"}
    assert set(ld.postconditions) == {"LDPostCC", "LDPostW", "LDPostIS"}
    tl = _tl_doc().automaton("TransportLayer")
    assert set(tl.preconditions) == {"TLPreGNM", "TLPreSDOF", "TLPreSDON"}
    assert set(tl.postconditions) == {"TLPostI", "TLPostATQ"}


def test_fixture_variables():
    ld = _ld_doc().automaton("LE_Device")
    assert set(ld.variables) == {
        "id", "mem", "highest_strength", "highest_strength_id",
        "otherLeaders", "myCS", "isLeader", "newc",
    }
    tl = _tl_doc().automaton("TransportLayer")
    assert set(tl.variables) == {"queue", "devOn", "node_ids"}
    assert tl.variables["devOn"].domain.text() == "map enum { dev1, dev2 } to bool"


def test_fixture_invariant_slots():
    doc = _ld_doc()
    invs = [c for c in doc.constraints if c.kind is ia.ConstraintKind.INV]
    assert sorted(c.name for c in invs) == ["LDInvMem1", "LDInvMem2", "LDInvMem3"]
    assert all(ia.to_text(c.body) == "true" for c in invs)


def test_fixture_documents_are_clean():
    for name in ia.FIXTURE_NAMES:
        assert ia.document_diagnostics(ia.load_fixture(name)) == []


# ---------------------------------------------------------------------------
# parsing details


def test_empty_document():
    doc = ia.parse_document("", source="empty")
    assert doc.automata == ()
    assert ia.document_diagnostics(doc) == []


def test_two_contracts_preserved_in_order():
    text = """
    contract First { states A; initial A; inputs; outputs; hidden; transitions { } }
    contract Second { states B; initial B; inputs; outputs; hidden; transitions { } }
    """
    doc = ia.parse_document(text)
    assert [a.name for a in doc.automata] == ["First", "Second"]
    with pytest.raises(ValueError):
        doc.automaton()  # ambiguous without a name
    assert doc.automaton("Second").states == ("B",)


def test_type_alias_desugars():
    text = """
    type Small = int[0..2];
    contract C {
      states A; initial A; inputs; outputs; hidden;
      var x : Small;
      transitions { }
    }
    """
    doc = ia.parse_document(text)
    assert doc.automaton("C").variables["x"].domain == ia.IntRangeDomain(0, 2)


def test_parse_error_positions():
    cases = [
        ("contract C { states A, A; }", "duplicate state"),
        ("contract C { states A; initial B; inputs; outputs; hidden; }", "not a state"),
        ("contract C { states A; initial A; inputs; outputs; hidden; "
         "transitions { A -[go]-> A; } }", "go"),
        ("contract C { states A; inputs; outputs; hidden; "
         "transitions { A -[x pre P]-> A; } }", ""),
        ("contract C { states A; initial A; inputs; inputs; outputs; hidden; }",
         "inputs"),
    ]
    for text, needle in cases:
        with pytest.raises(ia.ParseError) as exc:
            ia.parse_document(text, source="case.ia")
        msg = str(exc.value)
        assert msg.startswith("case.ia:"), msg
        assert needle.lower() in msg.lower()


def test_missing_mandatory_section():
    with pytest.raises(ia.ParseError) as exc:
        ia.parse_document("contract C { states A; initial A; inputs; outputs; }")
    assert "hidden" in str(exc.value)


def test_duplicate_contract_rejected():
    text = ("contract C { states; inputs; outputs; hidden; }"
            "contract C { states; inputs; outputs; hidden; }")
    with pytest.raises(ia.ParseError):
        ia.parse_document(text)


def test_constraint_sort_checked_in_document():
    text = """
    contract C {
      states A; initial A; inputs; outputs; hidden go;
      var x : bool;
      context C::go() { pre P: x + 1 = 2; }
      transitions { }
    }
    """
    with pytest.raises(ia.ParseError) as exc:
        ia.parse_document(text)
    assert "P" in str(exc.value)


def test_old_reference_in_pre_rejected_at_parse():
    text = """
    contract C {
      states A; initial A; inputs; outputs; hidden go;
      var x : int[0..3];
      context C::go() { pre P: x~ = 1; }
      transitions { }
    }
    """
    with pytest.raises(ia.ParseError):
        ia.parse_document(text)


def test_validation_diagnostics_carry_location():
    doc = ia.parse_document(
        "contract C { states A; inputs go; outputs; hidden go; transitions { } }",
        source="diag.ia")
    diags = ia.document_diagnostics(doc)
    assert diags
    assert any("alphabets not disjoint: go" in d.message for d in diags)
    assert all(d.location for d in diags)


# ---------------------------------------------------------------------------
# printing


def _roundtrip(doc):
    text = ia.print_document(doc)
    doc2 = ia.parse_document(text, source="printed")
    return text, doc2


def test_fixture_round_trips():
    for name in ia.FIXTURE_NAMES:
        doc = ia.load_fixture(name)
        text, doc2 = _roundtrip(doc)
        assert ia.print_document(doc2) == text
        for x, y in zip(doc.automata, doc2.automata):
            assert x.name == y.name
            assert x.states == y.states
            assert x.initials == y.initials
            assert (x.inputs, x.outputs, x.hidden) == (y.inputs, y.outputs, y.hidden)
            assert [(t.source, t.pre, t.action, t.post, t.target) for t in x.transitions] \
                == [(t.source, t.pre, t.action, t.post, t.target) for t in y.transitions]
            assert {n: ia.to_text(c.body) for n, c in x.preconditions.items()} \
                == {n: ia.to_text(c.body) for n, c in y.preconditions.items()}
            assert {n: ia.to_text(c.body) for n, c in x.postconditions.items()} \
                == {n: ia.to_text(c.body) for n, c in y.postconditions.items()}


def test_product_document_round_trips():
    ld = ia.qualify_hidden(ia.load_fixture("le_device.ia").automaton("LE_Device"))
    tl = ia.qualify_hidden(ia.load_fixture("transport_layer.ia").automaton("TransportLayer"))
    prod = ia.product(ld, tl)
    doc = ia.document_from_automaton(prod.automaton)
    text, doc2 = _roundtrip(doc)
    assert ia.print_document(doc2) == text
    again = doc2.automaton(prod.automaton.name)
    assert again.states == prod.automaton.states
    assert len(again.transitions) == len(prod.automaton.transitions)
    assert set(again.preconditions) == set(prod.automaton.preconditions)


def test_unnamed_constraint_prints_with_generated_name():
    text = """
    contract C {
      states A; initial A; inputs; outputs; hidden go;
      var x : int[0..3];
      context C::go() { pre : x < 3; }
      transitions { A -[go pre pre_unnamed_1]-> A; }
    }
    """
    doc = ia.parse_document(text)
    printed = ia.print_document(doc)
    assert "pre_unnamed_1" in printed
    ia.parse_document(printed)  # still parses


def test_empty_automaton_prints_and_reparses():
    doc = ia.document_from_automaton(ia.empty_automaton())
    text, doc2 = _roundtrip(doc)
    assert doc2.automaton("empty").is_empty()


# ---------------------------------------------------------------------------
# DOT export


def test_dot_fixture_edge():
    dot = ia.export_dot(_ld_doc().automaton("LE_Device"))
    assert 'Off -> OnReady [label="turnOn;"];' in dot
    assert 'OnReady -> OnUpdate [label="receiveMessages?"];' in dot
    assert 'OnFollower -> OnFollower [label="sendMessages!"];' in dot
    assert dot.startswith("digraph LE_Device {")


def test_dot_single_state_no_edges():
    a = ia.InterfaceAutomaton(name="One", states=("s",), initials=("s",),
                              inputs=(), outputs=(), hidden=())
    dot = ia.export_dot(a)
    assert dot.count("->") == 1  # only the initial-state marker arrow
    assert "s;" in dot


def test_dot_product_marks_shared_hidden():
    ld = ia.qualify_hidden(ia.load_fixture("le_device.ia").automaton("LE_Device"))
    tl = ia.qualify_hidden(ia.load_fixture("transport_layer.ia").automaton("TransportLayer"))
    prod = ia.product(ld, tl)
    dot = ia.export_dot(prod)
    assert 'label="sendMessages;' in dot
    assert "sendMessages!" not in dot


def test_dot_deterministic():
    a = _tl_doc().automaton("TransportLayer")
    assert ia.export_dot(a) == ia.export_dot(a)


def test_dot_quotes_nonidentifier_names():
    prod_state = "A b"  # contains a space
    a = ia.InterfaceAutomaton(name="Odd", states=(prod_state,), initials=(prod_state,),
                              inputs=(), outputs=(), hidden=())
    dot = ia.export_dot(a)
    assert '"A b"' in dot
