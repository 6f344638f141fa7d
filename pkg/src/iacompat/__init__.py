"""Contract compatibility checking over extended interface automata.

Model constituent-system contracts as interface automata whose transitions
carry named pre/postconditions over typed variables, then verify pairwise
compatibility: composability of the alphabets, the synchronized product,
illegal states (unreceivable shared outputs, or guards equivalent to false),
the backward bad-state closure under a helpful environment, and pruning.
"""
from .automata import (
    ActionClass,
    ActionLabel,
    ClauseConflict,
    ComposabilityReport,
    InterfaceAutomaton,
    NotComposableError,
    ProductResult,
    Transition,
    composable,
    conjoin_constraints,
    empty_automaton,
    enabled_actions,
    product,
    qualify_hidden,
    shared,
    validate,
)
from .docformat import (
    ContractDocument,
    DocumentMeta,
    document_diagnostics,
    document_from_automaton,
    export_dot,
    parse_document,
    print_document,
)
from .domains import (
    BoolDomain,
    Domain,
    EnumDomain,
    IntRangeDomain,
    MapDomain,
    OpaqueDomain,
    RecordDomain,
    SeqDomain,
    VariableDecl,
)
from .evaluate import (
    EvalError,
    MissingVariable,
    UndefinedApplication,
    Valuation,
    eval_constraint,
    evaluate,
    simplify,
)
from .expr_parse import parse_constraint, parse_expression
from .exprs import (
    Apply,
    BinOp,
    BoolLit,
    ConstraintContext,
    ConstraintKind,
    EnumLit,
    Expr,
    FieldAccess,
    IntLit,
    Membership,
    MethodCall,
    NamedConstraint,
    Not,
    ParamDecl,
    SetLit,
    SortError,
    UnknownVariable,
    VarRef,
    to_text,
    variable_refs,
    walk,
)
from .falsity import FalsityResult, Verdict, constraint_falsity, default_budget, falsity
from .fixtures import FIXTURE_NAMES, fixture_text, load_fixture
from .lexer import ParseError
from .verifier import (
    AllGuardsFalse,
    CompatOptions,
    CompatReport,
    CompatVerdict,
    IllegalStateSet,
    IncompatibilityCause,
    InvalidAutomaton,
    OpCounter,
    Trace,
    UnreceivedOutput,
    bad_states,
    check_compatibility,
    illegal_states,
    prune,
    report_to_dict,
    report_to_json,
    shortest_witness,
)

__version__ = "0.1.0"

__all__ = [
    "ActionClass",
    "ActionLabel",
    "AllGuardsFalse",
    "Apply",
    "BinOp",
    "BoolDomain",
    "BoolLit",
    "ClauseConflict",
    "CompatOptions",
    "CompatReport",
    "CompatVerdict",
    "ComposabilityReport",
    "ConstraintContext",
    "ConstraintKind",
    "ContractDocument",
    "Domain",
    "DocumentMeta",
    "EnumDomain",
    "EnumLit",
    "EvalError",
    "Expr",
    "FIXTURE_NAMES",
    "FalsityResult",
    "FieldAccess",
    "IllegalStateSet",
    "IncompatibilityCause",
    "IntLit",
    "IntRangeDomain",
    "InterfaceAutomaton",
    "InvalidAutomaton",
    "MapDomain",
    "Membership",
    "MethodCall",
    "MissingVariable",
    "NamedConstraint",
    "Not",
    "NotComposableError",
    "OpCounter",
    "OpaqueDomain",
    "ParamDecl",
    "ParseError",
    "ProductResult",
    "RecordDomain",
    "SeqDomain",
    "SetLit",
    "SortError",
    "Trace",
    "Transition",
    "UndefinedApplication",
    "UnknownVariable",
    "UnreceivedOutput",
    "Valuation",
    "VarRef",
    "VariableDecl",
    "Verdict",
    "bad_states",
    "check_compatibility",
    "composable",
    "conjoin_constraints",
    "constraint_falsity",
    "default_budget",
    "document_diagnostics",
    "document_from_automaton",
    "empty_automaton",
    "enabled_actions",
    "eval_constraint",
    "evaluate",
    "export_dot",
    "falsity",
    "fixture_text",
    "illegal_states",
    "load_fixture",
    "parse_constraint",
    "parse_document",
    "parse_expression",
    "print_document",
    "product",
    "prune",
    "qualify_hidden",
    "report_to_dict",
    "report_to_json",
    "shared",
    "shortest_witness",
    "simplify",
    "to_text",
    "validate",
    "variable_refs",
    "walk",
]
