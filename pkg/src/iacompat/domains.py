"""Value domains for contract variables.

A domain describes the set of values a variable may take. Domains drive three
things: sort inference over constraint expressions, membership checking of
valuations, and exhaustive enumeration in the falsity oracle. Enumeration is
only available for bounded domains; an ``opaque`` domain (or an unbounded
sequence) deliberately has no value set, which downstream analyses treat
conservatively.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Any, Iterator, Optional

Value = Any  # bool | int | str (enum literal) | tuple | dict | frozenset

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_PATH = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*\Z")


def is_identifier(text: str) -> bool:
    return bool(_IDENT.match(text))


def is_variable_path(text: str) -> bool:
    """Variable names are dotted identifier paths, e.g. ``myCS.s``."""
    return bool(_PATH.match(text))


# ---------------------------------------------------------------------------
# sorts (static types of expressions)

@dataclass(frozen=True)
class Sort:
    """Structural type of an expression: a tag plus optional components."""

    tag: str  # bool | int | enum | opaque | seq | set | map | record
    elem: Optional["Sort"] = None                     # seq, set
    key: Optional["Sort"] = None                      # map
    value: Optional["Sort"] = None                    # map
    fields: Optional[tuple[tuple[str, "Sort"], ...]] = None  # record

    def __str__(self) -> str:
        if self.tag == "seq":
            return f"seq of {self.elem}"
        if self.tag == "set":
            return f"set of {self.elem}"
        if self.tag == "map":
            return f"map {self.key} to {self.value}"
        if self.tag == "record":
            inner = ", ".join(f"{n} : {s}" for n, s in self.fields or ())
            return f"record {{ {inner} }}"
        return self.tag


BOOL = Sort("bool")
INT = Sort("int")
ENUM = Sort("enum")
OPAQUE = Sort("opaque")


def sorts_compatible(a: Sort, b: Sort) -> bool:
    """Whether two sorts may meet in an equality or membership test.

    Opaque acts as a wildcard; containers are compared component-wise.
    """
    if a.tag == "opaque" or b.tag == "opaque":
        return True
    if a.tag != b.tag:
        return False
    if a.tag in ("seq", "set"):
        return sorts_compatible(a.elem, b.elem)
    if a.tag == "map":
        return sorts_compatible(a.key, b.key) and sorts_compatible(a.value, b.value)
    if a.tag == "record":
        an = dict(a.fields or ())
        bn = dict(b.fields or ())
        if an.keys() != bn.keys():
            return False
        return all(sorts_compatible(an[k], bn[k]) for k in an)
    return True


# ---------------------------------------------------------------------------
# domains

class Domain:
    """Base class; concrete domains are frozen dataclasses below."""

    def sort(self) -> Sort:
        raise NotImplementedError

    def count(self) -> Optional[int]:
        """Number of values, or None when the domain is not enumerable."""
        return None

    def is_enumerable(self) -> bool:
        return self.count() is not None

    def values(self) -> Iterator[Value]:
        """Deterministic enumeration of every value of a bounded domain."""
        raise ValueError(f"domain {self.text()} is not enumerable")

    def contains(self, v: Value) -> bool:
        raise NotImplementedError

    def text(self) -> str:
        """Canonical concrete syntax of the domain."""
        raise NotImplementedError


@dataclass(frozen=True)
class BoolDomain(Domain):
    def sort(self) -> Sort:
        return BOOL

    def count(self) -> Optional[int]:
        return 2

    def values(self) -> Iterator[Value]:
        yield False
        yield True

    def contains(self, v: Value) -> bool:
        return isinstance(v, bool)

    def text(self) -> str:
        return "bool"


@dataclass(frozen=True)
class IntRangeDomain(Domain):
    lower: int
    upper: int

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"empty integer range [{self.lower}..{self.upper}]")

    def sort(self) -> Sort:
        return INT

    def count(self) -> Optional[int]:
        return self.upper - self.lower + 1

    def values(self) -> Iterator[Value]:
        return iter(range(self.lower, self.upper + 1))

    def contains(self, v: Value) -> bool:
        return isinstance(v, int) and not isinstance(v, bool) and self.lower <= v <= self.upper

    def text(self) -> str:
        return f"int[{self.lower}..{self.upper}]"


@dataclass(frozen=True)
class EnumDomain(Domain):
    literals: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.literals:
            raise ValueError("enum domain needs at least one literal")
        for lit in self.literals:
            if not is_identifier(lit):
                raise ValueError(f"enum literal is not an identifier: {lit!r}")
        if len(set(self.literals)) != len(self.literals):
            raise ValueError("enum domain repeats a literal")

    def sort(self) -> Sort:
        return ENUM

    def count(self) -> Optional[int]:
        return len(self.literals)

    def values(self) -> Iterator[Value]:
        return iter(self.literals)

    def contains(self, v: Value) -> bool:
        return isinstance(v, str) and v in self.literals

    def text(self) -> str:
        return "enum { " + ", ".join(self.literals) + " }"


@dataclass(frozen=True)
class SeqDomain(Domain):
    """Sequences over an element domain; bounded only when max_len is given."""

    element: Domain
    max_len: Optional[int] = None

    def __post_init__(self) -> None:
        if self.max_len is not None and self.max_len < 0:
            raise ValueError("sequence bound must be non-negative")

    def sort(self) -> Sort:
        return Sort("seq", elem=self.element.sort())

    def count(self) -> Optional[int]:
        if self.max_len is None:
            return None
        n = self.element.count()
        if n is None:
            return None
        return sum(n ** k for k in range(self.max_len + 1))

    def values(self) -> Iterator[Value]:
        if self.count() is None:
            return super().values()
        elems = list(self.element.values())
        for k in range(self.max_len + 1):
            for tup in itertools.product(elems, repeat=k):
                yield tup

    def contains(self, v: Value) -> bool:
        if not isinstance(v, tuple):
            return False
        if self.max_len is not None and len(v) > self.max_len:
            return False
        return all(self.element.contains(x) for x in v)

    def text(self) -> str:
        base = f"seq of {self.element.text()}"
        return base if self.max_len is None else f"{base} maxlen {self.max_len}"


@dataclass(frozen=True)
class MapDomain(Domain):
    """Partial maps: every key of the key domain is either absent or mapped."""

    key: Domain
    value: Domain

    def sort(self) -> Sort:
        return Sort("map", key=self.key.sort(), value=self.value.sort())

    def count(self) -> Optional[int]:
        kn, vn = self.key.count(), self.value.count()
        if kn is None or vn is None:
            return None
        return (vn + 1) ** kn

    def values(self) -> Iterator[Value]:
        if self.count() is None:
            return super().values()
        keys = list(self.key.values())
        vals = list(self.value.values())
        choices = [None] + vals  # None marks an absent key
        for combo in itertools.product(choices, repeat=len(keys)):
            yield {k: v for k, v in zip(keys, combo) if v is not None}

    def contains(self, v: Value) -> bool:
        if not isinstance(v, dict):
            return False
        return all(self.key.contains(k) and self.value.contains(x) for k, x in v.items())

    def text(self) -> str:
        return f"map {self.key.text()} to {self.value.text()}"


@dataclass(frozen=True)
class RecordDomain(Domain):
    fields: tuple[tuple[str, Domain], ...]

    def __post_init__(self) -> None:
        names = [n for n, _ in self.fields]
        if len(set(names)) != len(names):
            raise ValueError("record domain repeats a field name")
        for n in names:
            if not is_identifier(n):
                raise ValueError(f"record field is not an identifier: {n!r}")

    def sort(self) -> Sort:
        return Sort("record", fields=tuple((n, d.sort()) for n, d in self.fields))

    def count(self) -> Optional[int]:
        total = 1
        for _, d in self.fields:
            n = d.count()
            if n is None:
                return None
            total *= n
        return total

    def values(self) -> Iterator[Value]:
        if self.count() is None:
            return super().values()
        names = [n for n, _ in self.fields]
        pools = [list(d.values()) for _, d in self.fields]
        for combo in itertools.product(*pools):
            yield dict(zip(names, combo))

    def contains(self, v: Value) -> bool:
        if not isinstance(v, dict):
            return False
        if set(v.keys()) != {n for n, _ in self.fields}:
            return False
        return all(d.contains(v[n]) for n, d in self.fields)

    def text(self) -> str:
        inner = ", ".join(f"{n} : {d.text()}" for n, d in self.fields)
        return "record { " + inner + " }"

    def field_domain(self, name: str) -> Optional[Domain]:
        for n, d in self.fields:
            if n == name:
                return d
        return None


@dataclass(frozen=True)
class OpaqueDomain(Domain):
    """A domain with no known structure. Never enumerable."""

    def sort(self) -> Sort:
        return OPAQUE

    def contains(self, v: Value) -> bool:
        return True

    def text(self) -> str:
        return "opaque"


@dataclass(frozen=True)
class VariableDecl:
    """A declared contract variable. Names are dotted identifier paths."""

    name: str
    domain: Domain

    def __post_init__(self) -> None:
        if not is_variable_path(self.name):
            raise ValueError(f"variable name is not a dotted identifier path: {self.name!r}")


def resolve_path(decls: dict[str, Domain], path: tuple[str, ...]) -> Optional[tuple[str, Domain]]:
    """Longest declared prefix of a dotted path, navigating record fields after it.

    Returns (declared name, domain of the full path) or None when the head does
    not resolve. A missing record field raises ValueError: the prefix resolved,
    so silence would hide a genuine typo.
    """
    for cut in range(len(path), 0, -1):
        declared = ".".join(path[:cut])
        if declared in decls:
            dom = decls[declared]
            for seg in path[cut:]:
                if isinstance(dom, OpaqueDomain):
                    return declared, dom
                if not isinstance(dom, RecordDomain):
                    raise ValueError(f"{declared} has no field {seg!r}")
                nxt = dom.field_domain(seg)
                if nxt is None:
                    raise ValueError(f"{declared} has no field {seg!r}")
                dom = nxt
            return declared, dom
    return None
