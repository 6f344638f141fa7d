"""Tokenizer shared by the constraint parser and the contract document parser.

Keywords are contextual: the lexer only distinguishes identifiers, integers,
strings, enum literals like ``<off>``, punctuation, and the two old-state
markers (``~`` and ``@pre``). ``//`` starts a line comment. The unicode arrow
is folded into ``->``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, source: str = "<string>"):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        super().__init__(f"{source}:{line}:{col}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str  # ident int string enumlit punct oldmark eof
    text: str
    line: int
    col: int


_ENUMLIT = re.compile(r"<[A-Za-z_][A-Za-z0-9_]*>")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")
_STRING = re.compile(r'"[^"\n]*"')

# longest first so maximal munch works with a plain loop
_PUNCTS = (
    "...", "->", "::", "<=", ">=", "<>", "..",
    "(", ")", "[", "]", "{", "}", ",", ";", ":",
    "=", "<", ">", "+", "-", ".",
)


def tokenize(text: str, source: str = "<string>") -> list[Token]:
    text = text.replace("→", "->")
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if ch == "~":
            toks.append(Token("oldmark", "~", line, col))
            i += 1
            col += 1
            continue
        if ch == "@":
            if text.startswith("@pre", i):
                toks.append(Token("oldmark", "@pre", line, col))
                i += 4
                col += 4
                continue
            raise ParseError("stray '@' (did you mean '@pre'?)", line, col, source)
        if ch == "<":
            m = _ENUMLIT.match(text, i)
            if m:
                toks.append(Token("enumlit", m.group(0)[1:-1], line, col))
                col += m.end() - i
                i = m.end()
                continue
        if ch == '"':
            m = _STRING.match(text, i)
            if not m:
                raise ParseError("unterminated string literal", line, col, source)
            toks.append(Token("string", m.group(0)[1:-1], line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            toks.append(Token("ident", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _INT.match(text, i)
        if m:
            toks.append(Token("int", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        for p in _PUNCTS:
            if text.startswith(p, i):
                toks.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col, source)
    toks.append(Token("eof", "", line, col))
    return toks


class TokenStream:
    """Cursor over a token list with the usual peek/expect helpers."""

    def __init__(self, tokens: list[Token], source: str = "<string>"):
        self.tokens = tokens
        self.pos = 0
        self.source = source

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, kind: str, text: str | None = None) -> bool:
        t = self.current
        return t.kind == kind and (text is None or t.text == text)

    def peek_word(self, word: str) -> bool:
        return self.peek("ident", word)

    def advance(self) -> Token:
        t = self.current
        if t.kind != "eof":
            self.pos += 1
        return t

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.peek(kind, text):
            return self.advance()
        return None

    def accept_word(self, word: str) -> bool:
        return self.accept("ident", word) is not None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        if self.peek(kind, text):
            return self.advance()
        t = self.current
        wanted = what or (text if text is not None else kind)
        found = t.text if t.kind != "eof" else "end of input"
        raise ParseError(f"expected {wanted}, found {found!r}", t.line, t.col, self.source)

    def expect_word(self, word: str) -> Token:
        return self.expect("ident", word, what=f"'{word}'")

    def error(self, message: str) -> ParseError:
        t = self.current
        return ParseError(message, t.line, t.col, self.source)
