"""Background knowledge: explicit facts, intensional rules and built-ins.

Built-in predicates enumerate extensional BK on demand in the forward
direction only: a binary built-in maps its first argument to the finite set
of second arguments, a unary built-in is a test.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable

from .core.model import MilError, ResourceError, StrategyError
from .core.terms import Struct, term_key


@dataclass(frozen=True)
class BuiltinBinary:
    name: str
    forward: Callable

    arity = 2


@dataclass(frozen=True)
class BuiltinUnary:
    name: str
    test: Callable

    arity = 1


REGISTRY: dict = {}


def register(b):
    key = f"{b.name}/{b.arity}"
    if key in REGISTRY:
        raise MilError(f"built-in {key} registered twice")
    REGISTRY[key] = b
    return b


def binary(name):
    def deco(fn):
        register(BuiltinBinary(name, fn))
        return fn
    return deco


def unary(name):
    def deco(fn):
        register(BuiltinUnary(name, fn))
        return fn
    return deco


def lookup(key: str):
    try:
        return REGISTRY[key]
    except KeyError:
        raise MilError(f"unknown builtin {key}") from None


# -- string transformation ----------------------------------------------------

@binary("remove")
def _remove(t):
    if isinstance(t, tuple) and t:
        return (t[1:],)
    return ()


@binary("switch")
def _switch(t):
    if isinstance(t, tuple) and len(t) >= 2:
        return ((t[1], t[0]) + t[2:],)
    return ()


def _first_is(letter):
    def test(t):
        return isinstance(t, tuple) and len(t) > 0 and t[0] == letter
    return test


register(BuiltinUnary("firstA", _first_is("a")))
register(BuiltinUnary("firstB", _first_is("b")))
register(BuiltinUnary("firstC", _first_is("c")))


# -- east-west trains ---------------------------------------------------------
# A car is car(Shape, Length, Wall, Roof, Wheels, load(LoadShape, Count)).

CAR_ATTRIBUTES = {
    "shape": ("rectangle", "u_shaped", "bucket", "hexagon", "ellipse"),
    "length": ("short", "long"),
    "wall": ("single", "double"),
    "roof": ("none", "flat", "jagged", "peaked", "arc"),
    "wheels": (2, 3),
    "load": ("circle", "hexagon", "rectangle", "triangle", "utriangle", "diamond"),
    "loads": (1, 2, 3),
}
_ATTR_POS = {"shape": 0, "length": 1, "wall": 2, "roof": 3, "wheels": 4}


def car(shape, length, wall, roof, wheels, load_shape, count) -> Struct:
    return Struct("car", (shape, length, wall, roof, wheels, Struct("load", (load_shape, count))))


def _leading_car(t):
    if isinstance(t, tuple) and t and isinstance(t[0], Struct) and t[0].functor == "car":
        return t[0]
    return None


def _car_test(pred):
    def test(t):
        c = _leading_car(t)
        return c is not None and pred(c)
    return test


def _plural(shape):
    return shape + "s"


def train_testers() -> dict:
    """The 50 unary train predicates, generated from the attribute table.

    25 single attribute/value tests, 18 ``load_<n>_<shape>s`` tests,
    ``closed``/``open``, the four length/roof combinations such as
    ``short_closed``, and ``no_car``.
    """
    out = {}
    for attr, values in CAR_ATTRIBUTES.items():
        for v in values:
            name = f"{attr}_{v}"
            if attr in _ATTR_POS:
                i = _ATTR_POS[attr]
                out[name] = _car_test(lambda c, i=i, v=v: c.args[i] == v)
            elif attr == "load":
                out[name] = _car_test(lambda c, v=v: c.args[5].args[0] == v)
            else:
                out[name] = _car_test(lambda c, v=v: c.args[5].args[1] == v)
    for n in (1, 2, 3):
        for s in CAR_ATTRIBUTES["load"]:
            out[f"load_{n}_{_plural(s)}"] = _car_test(
                lambda c, n=n, s=s: c.args[5].args == (s, n))
    out["closed"] = _car_test(lambda c: c.args[3] != "none")
    out["open"] = _car_test(lambda c: c.args[3] == "none")
    out["short_closed"] = _car_test(lambda c: c.args[1] == "short" and c.args[3] != "none")
    out["long_closed"] = _car_test(lambda c: c.args[1] == "long" and c.args[3] != "none")
    out["short_open"] = _car_test(lambda c: c.args[1] == "short" and c.args[3] == "none")
    out["long_open"] = _car_test(lambda c: c.args[1] == "long" and c.args[3] == "none")
    out["no_car"] = lambda t: t == ()
    return out


@binary("removeCar")
def _remove_car(t):
    if _leading_car(t) is not None:
        return (t[1:],)
    return ()


TRAIN_TESTERS = train_testers()
for _name, _fn in TRAIN_TESTERS.items():
    register(BuiltinUnary(_name, _fn))


# -- robot waiter -------------------------------------------------------------
# A state is [robot_pos(X), end(Y), places([place(I, Drink, cup(up, Content)), ...])].

def waiter_state(pos: int, end: int, places) -> tuple:
    return (
        Struct("robot_pos", (pos,)),
        Struct("end", (end,)),
        Struct("places", (tuple(places),)),
    )


def place(i: int, drink: str, content: str = "empty") -> Struct:
    return Struct("place", (i, drink, Struct("cup", ("up", content))))


def _unpack_state(t):
    if not (isinstance(t, tuple) and len(t) >= 2):
        return None
    rp, end = t[0], t[1]
    if not (isinstance(rp, Struct) and rp.functor == "robot_pos" and len(rp.args) == 1):
        return None
    if not (isinstance(end, Struct) and end.functor == "end" and len(end.args) == 1):
        return None
    return rp.args[0], end.args[0]


def _places(t):
    if len(t) == 3 and isinstance(t[2], Struct) and t[2].functor == "places":
        return t[2].args[0]
    return None


@binary("move_right")
def _move_right(t):
    u = _unpack_state(t)
    if u is None:
        return ()
    x, y = u
    if isinstance(x, int) and isinstance(y, int) and x < y:
        return ((Struct("robot_pos", (x + 1,)),) + t[1:],)
    return ()


def _pour(drink):
    def pour(t):
        u = _unpack_state(t)
        places = _places(t) if u is not None else None
        if places is None:
            return ()
        x = u[0]
        for i, p in enumerate(places):
            if p.args[0] == x and p.args[2] == Struct("cup", ("up", "empty")):
                filled = Struct("place", (x, p.args[1], Struct("cup", ("up", drink))))
                new_places = places[:i] + (filled,) + places[i + 1:]
                return ((t[0], t[1], Struct("places", (new_places,))),)
        return ()
    return pour


register(BuiltinBinary("pour_tea", _pour("tea")))
register(BuiltinBinary("pour_coffee", _pour("coffee")))


def _wants(drink):
    def test(t):
        u = _unpack_state(t)
        places = _places(t) if u is not None else None
        if places is None:
            return False
        return any(p.args[0] == u[0] and p.args[1] == drink for p in places)
    return test


register(BuiltinUnary("wants_tea", _wants("tea")))
register(BuiltinUnary("wants_coffee", _wants("coffee")))


@unary("at_end")
def _at_end(t):
    u = _unpack_state(t)
    return u is not None and u[0] == u[1]


# -- knowledge base -----------------------------------------------------------

class BkBase:
    """Explicit facts, built-ins and intensional rules of one problem."""

    def __init__(self, facts=(), builtins=(), rules=()):
        self.facts2 = defaultdict(lambda: defaultdict(set))
        self.facts1 = defaultdict(set)
        for atom in facts:
            if len(atom) == 3:
                self.facts2[atom[0]][atom[1]].add(atom[2])
            elif len(atom) == 2:
                self.facts1[atom[0]].add(atom[1])
            else:
                raise MilError(f"BK atoms must be unary or binary: {atom}")
        self.builtins2 = {}
        self.builtins1 = {}
        for key in builtins:
            b = lookup(key)
            (self.builtins2 if b.arity == 2 else self.builtins1)[b.name] = b
        clash = (set(self.builtins2) | set(self.builtins1)) & (set(self.facts2) | set(self.facts1))
        if clash:
            raise MilError(f"builtin names overlap explicit facts: {sorted(clash)}")
        self.rules = tuple(rules)
        self.rule_binary = {r.head.pred for r in self.rules if len(r.head.args) == 2}
        self.rule_unary = {r.head.pred for r in self.rules if len(r.head.args) == 1}

    @classmethod
    def from_problem(cls, problem):
        return cls(problem.facts, problem.builtins, problem.rules)

    @property
    def binary_preds(self) -> tuple:
        return tuple(sorted(set(self.facts2) | set(self.builtins2) | self.rule_binary))

    @property
    def unary_preds(self) -> tuple:
        return tuple(sorted(set(self.facts1) | set(self.builtins1) | self.rule_unary))

    @property
    def extensional(self) -> bool:
        return not self.rules

    def eval_binary(self, pred: str, first) -> frozenset:
        if pred in self.builtins2:
            return frozenset(self.builtins2[pred].forward(first))
        if pred in self.facts2:
            return frozenset(self.facts2[pred].get(first, ()))
        if pred in self.rule_binary:
            raise StrategyError(f"{pred} is defined by intensional rules")
        raise MilError(f"unknown binary BK predicate {pred!r}")

    def eval_unary(self, pred: str, t) -> bool:
        if pred in self.builtins1:
            return bool(self.builtins1[pred].test(t))
        if pred in self.facts1:
            return t in self.facts1[pred]
        if pred in self.rule_unary:
            raise StrategyError(f"{pred} is defined by intensional rules")
        raise MilError(f"unknown unary BK predicate {pred!r}")

    def successors(self, t):
        """All ``(pred, z)`` with ``pred(t, z)`` in the extensional BK."""
        out = []
        for p in sorted(set(self.facts2) | set(self.builtins2)):
            for z in self.eval_binary(p, t):
                out.append((p, z))
        return out

    def explicit_atoms(self):
        for p, m in self.facts2.items():
            for a, bs in m.items():
                for b in bs:
                    yield (p, a, b)
        for p, ts in self.facts1.items():
            for a in ts:
                yield (p, a)


def reachable_terms(bk: BkBase, seeds, cap: int = 100_000) -> frozenset:
    """Least superset of ``seeds`` closed under extensional BK successors."""
    seen = set(seeds)
    frontier = sorted(seen, key=term_key)
    while frontier:
        nxt = []
        for t in frontier:
            for _, z in bk.successors(t):
                if z not in seen:
                    seen.add(z)
                    if len(seen) > cap:
                        raise ResourceError(f"universe exceeds {cap} terms")
                    nxt.append(z)
        frontier = nxt
    return frozenset(seen)


def all_lists(alphabet, max_len: int):
    out = [()]
    layer = [()]
    for _ in range(max_len):
        layer = [l + (a,) for l in layer for a in alphabet]
        out.extend(layer)
    return out


def general_universe(problem, bk: BkBase, cap: int = 100_000) -> frozenset:
    """Object terms for the general strategy: every term in facts, examples and
    universe declarations, closed under built-in successors."""
    seeds = set(problem.universe)
    for alphabet, n in problem.list_universes:
        seeds.update(all_lists(alphabet, n))
    for atom in problem.facts:
        seeds.update(atom[1:])
    for e in problem.examples:
        seeds.update(e[1:])
    return reachable_terms(bk, seeds, cap)


def bk_closure(bk: BkBase, deduced, universe, cap: int = 1_000_000):
    """All BK atoms over ``universe`` entailed by facts, built-ins and
    intensional rules together with the ``deduced`` binary atoms.

    Returns ``(binary_atoms, unary_atoms)`` as frozensets.
    """
    from .deduce import Store, saturate

    universe = frozenset(universe)
    store = Store()
    for atom in bk.explicit_atoms():
        store.add(atom)
    for t in sorted(universe, key=term_key):
        for p, b in bk.builtins2.items():
            for z in b.forward(t):
                if z in universe:
                    store.add((p, t, z))
        for p, b in bk.builtins1.items():
            if b.test(t):
                store.add((p, t))
        if store.size > cap:
            raise ResourceError(f"BK import exceeds {cap} atoms")
    for atom in deduced:
        store.add(tuple(atom))
    saturate(store, bk.rules, list(store.atoms()), cap)
    return store.binary_atoms(), store.unary_atoms()
