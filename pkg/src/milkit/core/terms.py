"""Ground object-level terms.

Terms use plain Python values where possible so they hash and compare
cheaply inside the fixpoint loops:

* symbols are ``str``
* integers are ``int``
* lists are ``tuple`` (``[]`` is the empty tuple)
* compound terms are :class:`Struct`

Rule variables are :class:`Var` instances and never occur in ground atoms.
"""
from __future__ import annotations

import re
from functools import lru_cache
from typing import Union

_PLAIN_SYMBOL = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


class Struct:
    """A compound term ``functor(arg1, ..., argN)`` with a cached hash."""

    __slots__ = ("functor", "args", "_hash")

    def __init__(self, functor: str, args: tuple):
        self.functor = functor
        self.args = tuple(args)
        self._hash = hash((functor, self.args))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Struct)
            and self._hash == other._hash
            and self.functor == other.functor
            and self.args == other.args
        )

    def __repr__(self):
        return format_term(self)


class Var:
    """A first-order rule variable."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __hash__(self):
        return hash(("$var", self.name))

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __repr__(self):
        return self.name


Term = Union[str, int, tuple, Struct]


def is_ground_term(t) -> bool:
    if isinstance(t, bool):
        return False
    if isinstance(t, (str, int)):
        return True
    if isinstance(t, tuple):
        return all(is_ground_term(x) for x in t)
    if isinstance(t, Struct):
        return all(is_ground_term(x) for x in t.args)
    return False


@lru_cache(maxsize=1 << 18)
def term_key(t):
    """Total order key: integers < symbols < lists < compounds."""
    if isinstance(t, int):
        return (0, t)
    if isinstance(t, str):
        return (1, t)
    if isinstance(t, tuple):
        return (2, len(t), tuple(term_key(x) for x in t))
    if isinstance(t, Struct):
        return (3, t.functor, len(t.args), tuple(term_key(x) for x in t.args))
    raise TypeError(f"not a ground term: {t!r}")


def compare_terms(a, b) -> int:
    ka, kb = term_key(a), term_key(b)
    return (ka > kb) - (ka < kb)


def atom_key(atom):
    """Order key for a ground atom ``(pred, *args)``."""
    return (atom[0],) + tuple(term_key(x) for x in atom[1:])


def format_symbol(name: str) -> str:
    if _PLAIN_SYMBOL.match(name):
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def format_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, bool):
        raise TypeError("booleans are not terms")
    if isinstance(t, int):
        return str(t)
    if isinstance(t, str):
        return format_symbol(t)
    if isinstance(t, tuple):
        return "[" + ",".join(format_term(x) for x in t) + "]"
    if isinstance(t, Struct):
        return format_symbol(t.functor) + "(" + ",".join(format_term(x) for x in t.args) + ")"
    raise TypeError(f"not a term: {t!r}")


def format_atom(atom) -> str:
    pred, *args = atom
    return f"{format_symbol(pred)}({','.join(format_term(a) for a in args)})"


def term_symbols(t, out=None) -> set:
    """All symbols (not functors) occurring in ``t``."""
    if out is None:
        out = set()
    if isinstance(t, str):
        out.add(t)
    elif isinstance(t, tuple):
        for x in t:
            term_symbols(x, out)
    elif isinstance(t, Struct):
        for x in t.args:
            term_symbols(x, out)
    return out
