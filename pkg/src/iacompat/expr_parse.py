"""Parser for the constraint dialect and for domain descriptors.

Operator precedence, loosest first: ``implies`` (right associative), ``or``,
``and``, ``not``, comparisons together with ``in set`` membership, ``+``/``-``,
then postfix application/field/method suffixes.

Reserved words inside expressions: ``and or implies not in set dom true false``.
Everything else, including the document keywords, stays usable as a name.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Optional, Union

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
from .exprs import (
    BUILTIN_METHODS,
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
    SortScope,
    UnknownVariable,
    VarRef,
    decls_mapping,
    infer_sort,
)
from .lexer import ParseError, Token, TokenStream, tokenize

_EXPR_RESERVED = frozenset(
    ["and", "or", "implies", "not", "in", "set", "dom", "true", "false"]
)

_CMP_OPS = ("=", "<>", "<", "<=", ">", ">=")

DeclsArg = Union[Mapping[str, Domain], Iterable[VariableDecl], None]


# ---------------------------------------------------------------------------
# expression grammar

def _parse_implies(ts: TokenStream) -> Expr:
    left = _parse_or(ts)
    if ts.accept_word("implies"):
        right = _parse_implies(ts)  # right associative
        return BinOp("implies", left, right)
    return left


def _parse_or(ts: TokenStream) -> Expr:
    e = _parse_and(ts)
    while ts.accept_word("or"):
        e = BinOp("or", e, _parse_and(ts))
    return e


def _parse_and(ts: TokenStream) -> Expr:
    e = _parse_not(ts)
    while ts.accept_word("and"):
        e = BinOp("and", e, _parse_not(ts))
    return e


def _parse_not(ts: TokenStream) -> Expr:
    if ts.accept_word("not"):
        return Not(_parse_not(ts))
    return _parse_comparison(ts)


def _parse_comparison(ts: TokenStream) -> Expr:
    left = _parse_additive(ts)
    if ts.peek_word("in"):
        mark = ts.pos
        ts.advance()
        if not ts.accept_word("set"):
            ts.pos = mark  # the word was something else, e.g. a parameter mode
            return left
        return Membership(left, _parse_set_expr(ts))
    for op in _CMP_OPS:
        if ts.peek("punct", op):
            ts.advance()
            return BinOp(op, left, _parse_additive(ts))
    return left


def _parse_set_expr(ts: TokenStream) -> Expr:
    if ts.accept_word("dom"):
        return MethodCall(_parse_postfix(ts), "domain")
    return _parse_additive(ts)


def _parse_additive(ts: TokenStream) -> Expr:
    e = _parse_postfix(ts)
    while True:
        if ts.peek("punct", "+"):
            ts.advance()
            e = BinOp("+", e, _parse_postfix(ts))
        elif ts.peek("punct", "-"):
            ts.advance()
            e = BinOp("-", e, _parse_postfix(ts))
        else:
            return e


def _parse_postfix(ts: TokenStream) -> Expr:
    e = _parse_primary(ts)
    while True:
        if ts.peek("punct", "("):
            ts.advance()
            first = _parse_implies(ts)
            if ts.accept("punct", ","):
                # sequence prefix slice: m(1,...,k) is sugar for m.front(k)
                ts.expect("punct", "...", what="'...'")
                ts.expect("punct", ",")
                hi = _parse_implies(ts)
                ts.expect("punct", ")")
                if first != IntLit(1):
                    raise ts.error("sequence slices must start at 1")
                e = MethodCall(e, "front", (hi,))
            else:
                ts.expect("punct", ")")
                e = Apply(e, first)
        elif ts.peek("punct", "["):
            ts.advance()
            key = _parse_implies(ts)
            ts.expect("punct", "]")
            e = Apply(e, key)
        elif ts.peek("punct", "."):
            ts.advance()
            name = ts.expect("ident", what="a member name").text
            if name in BUILTIN_METHODS:
                e = MethodCall(e, name, _parse_optional_args(ts))
            else:
                e = FieldAccess(e, name)
        elif ts.peek("punct", "->"):
            ts.advance()
            name = ts.expect("ident", what="a collection operation").text
            if name not in BUILTIN_METHODS:
                raise ts.error(f"unknown arrow operation {name!r}")
            e = MethodCall(e, name, _parse_optional_args(ts))
        else:
            return e


def _parse_optional_args(ts: TokenStream) -> tuple[Expr, ...]:
    if not ts.accept("punct", "("):
        return ()
    if ts.accept("punct", ")"):
        return ()
    args = [_parse_implies(ts)]
    while ts.accept("punct", ","):
        args.append(_parse_implies(ts))
    ts.expect("punct", ")")
    return tuple(args)


def _parse_primary(ts: TokenStream) -> Expr:
    t = ts.current
    if t.kind == "int":
        ts.advance()
        return IntLit(int(t.text))
    if t.kind == "enumlit":
        ts.advance()
        return EnumLit(t.text)
    if ts.peek("punct", "-"):
        ts.advance()
        num = ts.expect("int", what="an integer literal")
        return IntLit(-int(num.text))
    if ts.peek("punct", "("):
        ts.advance()
        e = _parse_implies(ts)
        ts.expect("punct", ")")
        return e
    if ts.peek("punct", "{"):
        ts.advance()
        items: list[Expr] = []
        if not ts.peek("punct", "}"):
            items.append(_parse_implies(ts))
            while ts.accept("punct", ","):
                items.append(_parse_implies(ts))
        ts.expect("punct", "}")
        return SetLit(tuple(items))
    if t.kind == "ident":
        if t.text == "true":
            ts.advance()
            return BoolLit(True)
        if t.text == "false":
            ts.advance()
            return BoolLit(False)
        if t.text in _EXPR_RESERVED:
            raise ts.error(f"{t.text!r} cannot start an expression")
        return _parse_path(ts)
    raise ts.error(f"expected an expression, found {t.text or 'end of input'!r}")


def _parse_path(ts: TokenStream) -> VarRef:
    """Dotted variable path with an optional old-state marker after a segment.

    A dotted suffix naming a collection built-in belongs to the postfix layer,
    not to the path: ``devOn.range`` is a method call on the variable ``devOn``.
    """
    parts = [ts.expect("ident").text]
    old = False
    while True:
        if not old and ts.peek("oldmark"):
            ts.advance()
            old = True
            continue
        if ts.peek("punct", "."):
            nxt = ts.tokens[ts.pos + 1]
            if nxt.kind == "ident" and nxt.text not in BUILTIN_METHODS:
                ts.advance()
                parts.append(ts.advance().text)
                continue
        break
    return VarRef(tuple(parts), old)


# ---------------------------------------------------------------------------
# entry points

def parse_expression(
    text: str,
    decls: DeclsArg = None,
    *,
    params: Optional[Mapping[str, Domain]] = None,
    open_world: bool = False,
    check_sorts: bool = True,
    source: str = "<string>",
) -> Expr:
    """Parse a bare expression. With ``open_world`` unknown variables type as opaque."""
    ts = TokenStream(tokenize(text, source), source)
    e = _parse_implies(ts)
    if ts.current.kind != "eof":
        raise ts.error(f"unexpected trailing input {ts.current.text!r}")
    if check_sorts:
        scope = SortScope(
            decls=decls_mapping(decls or {}),
            params=dict(params or {}),
            open_world=open_world or decls is None,
        )
        infer_sort(e, scope)
    return e


def expression_from_tokens(ts: TokenStream) -> Expr:
    """Parse one expression from an existing stream (document parser hook)."""
    return _parse_implies(ts)


_KINDS = {"pre": ConstraintKind.PRE, "post": ConstraintKind.POST, "inv": ConstraintKind.INV}


def parse_constraint(
    text: str,
    decls: DeclsArg = None,
    *,
    type_env: Optional[Mapping[str, Domain]] = None,
    default_contract: Optional[str] = None,
    source: str = "<string>",
) -> NamedConstraint:
    """Parse ``[context Name::op(params)] pre|post|inv [NAME]: body``.

    The context contract name may contain spaces (word sequence up to ``::`` or
    the kind keyword). Unknown parameter types fall back to opaque here; the
    document parser resolves them against its alias table instead.
    """
    ts = TokenStream(tokenize(text, source), source)
    contract = default_contract
    operation = None
    params: tuple[ParamDecl, ...] = ()
    if ts.peek_word("context"):
        ts.advance()
        while ts.accept_word("context"):
            pass  # tolerate a doubled keyword
        words = [ts.expect("ident", what="a contract name").text]
        while ts.current.kind == "ident" and ts.current.text not in _KINDS and not ts.peek("punct", "::"):
            if ts.tokens[ts.pos].text in _KINDS:
                break
            words.append(ts.advance().text)
        contract = " ".join(words)
        if ts.accept("punct", "::"):
            operation = ts.expect("ident", what="an operation name").text
            params = parse_param_list(ts, type_env or {}, strict_types=False)
    kind_tok = ts.expect("ident", what="'pre', 'post' or 'inv'")
    if kind_tok.text not in _KINDS:
        raise ParseError(
            f"expected 'pre', 'post' or 'inv', found {kind_tok.text!r}",
            kind_tok.line, kind_tok.col, source,
        )
    kind = _KINDS[kind_tok.text]
    name = ""
    if ts.current.kind == "ident":
        name = ts.advance().text
    ts.expect("punct", ":")
    body = _parse_implies(ts)
    if ts.current.kind != "eof":
        raise ts.error(f"unexpected trailing input {ts.current.text!r}")
    ctx = ConstraintContext(contract=contract, operation=operation, params=params)
    c = NamedConstraint(name=name or f"{kind.value}_unnamed", kind=kind, body=body, context=ctx)
    if decls is not None:
        scope = SortScope(decls=decls_mapping(decls), params=c.param_domains())
        infer_sort(body, scope)
    return c


def parse_param_list(
    ts: TokenStream,
    type_env: Mapping[str, Domain],
    *,
    strict_types: bool,
) -> tuple[ParamDecl, ...]:
    """Parse ``( [in] name : domain, ... )`` including the parentheses."""
    ts.expect("punct", "(")
    params: list[ParamDecl] = []
    if not ts.peek("punct", ")"):
        while True:
            mode = None
            if ts.peek_word("in") or ts.peek_word("out"):
                mode = ts.advance().text
            pname = ts.expect("ident", what="a parameter name").text
            ts.expect("punct", ":")
            dom = parse_domain(ts, type_env, strict_types=strict_types)
            params.append(ParamDecl(pname, dom, mode))
            if not ts.accept("punct", ","):
                break
    ts.expect("punct", ")")
    return tuple(params)


# ---------------------------------------------------------------------------
# domain descriptors

def parse_domain(
    ts: TokenStream,
    type_env: Mapping[str, Domain],
    *,
    strict_types: bool = True,
) -> Domain:
    t = ts.current
    if ts.accept_word("bool"):
        return BoolDomain()
    if ts.accept_word("opaque"):
        return OpaqueDomain()
    if ts.accept_word("int"):
        ts.expect("punct", "[")
        lo = _parse_signed_int(ts)
        ts.expect("punct", "..")
        hi = _parse_signed_int(ts)
        ts.expect("punct", "]")
        try:
            return IntRangeDomain(lo, hi)
        except ValueError as exc:
            raise ParseError(str(exc), t.line, t.col, ts.source) from None
    if ts.accept_word("enum"):
        ts.expect("punct", "{")
        lits = [ts.expect("ident", what="an enum literal").text]
        while ts.accept("punct", ","):
            lits.append(ts.expect("ident", what="an enum literal").text)
        ts.expect("punct", "}")
        try:
            return EnumDomain(tuple(lits))
        except ValueError as exc:
            raise ParseError(str(exc), t.line, t.col, ts.source) from None
    if ts.accept_word("seq"):
        ts.expect_word("of")
        elem = parse_domain(ts, type_env, strict_types=strict_types)
        max_len = None
        if ts.accept_word("maxlen"):
            max_len = int(ts.expect("int", what="a length bound").text)
        return SeqDomain(elem, max_len)
    if ts.accept_word("map"):
        key = parse_domain(ts, type_env, strict_types=strict_types)
        ts.expect_word("to")
        value = parse_domain(ts, type_env, strict_types=strict_types)
        return MapDomain(key, value)
    if ts.accept_word("record"):
        ts.expect("punct", "{")
        fields: list[tuple[str, Domain]] = []
        while True:
            fname = ts.expect("ident", what="a field name").text
            ts.expect("punct", ":")
            fields.append((fname, parse_domain(ts, type_env, strict_types=strict_types)))
            if not ts.accept("punct", ","):
                break
        ts.expect("punct", "}")
        try:
            return RecordDomain(tuple(fields))
        except ValueError as exc:
            raise ParseError(str(exc), t.line, t.col, ts.source) from None
    if t.kind == "ident":
        ts.advance()
        if t.text in type_env:
            return type_env[t.text]
        if strict_types:
            raise ParseError(f"unknown type name {t.text!r}", t.line, t.col, ts.source)
        return OpaqueDomain()
    raise ts.error(f"expected a domain, found {t.text or 'end of input'!r}")


def _parse_signed_int(ts: TokenStream) -> int:
    if ts.accept("punct", "-"):
        return -int(ts.expect("int").text)
    return int(ts.expect("int", what="an integer").text)
