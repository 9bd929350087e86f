"""MIL problem, meta-rule and hypothesis types."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .terms import Var, atom_key, format_atom, format_symbol, format_term


class MilError(Exception):
    """Base class for engine errors."""


class ResourceError(MilError):
    """A configured size cap was exceeded."""


class StrategyError(MilError):
    """A strategy was applied to a problem outside its class."""


class Lit(NamedTuple):
    """A (possibly non-ground) literal; args are terms or :class:`Var`."""

    pred: str
    args: tuple

    def __str__(self):
        return f"{format_symbol(self.pred)}({','.join(format_term(a) for a in self.args)})"


class Rule(NamedTuple):
    """A first-order definite rule with unary/binary literals."""

    head: Lit
    body: tuple

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head}:-{','.join(str(b) for b in self.body)}."

    def variables(self):
        seen = []
        for lit in (self.head,) + tuple(self.body):
            for a in lit.args:
                if isinstance(a, Var) and a not in seen:
                    seen.append(a)
        return seen


@dataclass(frozen=True)
class MetaRule:
    """A second-order template ``P(x,y) <- Q1(..), ..., R1(..), ...``.

    ``head`` is ``(slot, x, y)``. ``body`` keeps the declared literal order;
    each entry is ``(slot, var)`` or ``(slot, var, var)``. ``order`` holds
    ``(head_slot, body_slot)`` pairs: the predicate bound to the head slot
    must precede the one bound to the body slot.
    """

    id: str
    head: tuple
    body: tuple
    order: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if len(self.head) != 3:
            raise MilError(f"meta-rule {self.id}: head must be binary")
        if not self.body:
            raise MilError(f"meta-rule {self.id}: empty body")
        for lit in self.body:
            if len(lit) not in (2, 3):
                raise MilError(f"meta-rule {self.id}: body literals must be unary or binary")
        body_vars = {v for lit in self.body for v in lit[1:]}
        _, x, y = self.head
        if x not in body_vars or y not in body_vars:
            raise MilError(f"meta-rule {self.id}: head variables must occur in the body")
        slots = self.slots
        for p, q in self.order:
            if p != self.head[0] or q not in slots:
                raise MilError(f"meta-rule {self.id}: bad ordering constraint {p}>{q}")
        for lit in self.body:
            if len(lit) == 2 and lit[0] == self.head[0]:
                raise MilError(f"meta-rule {self.id}: head slot used in a unary literal")
        kinds = {}
        for lit in self.body:
            arity = len(lit) - 1
            if kinds.setdefault(lit[0], arity) != arity:
                raise MilError(f"meta-rule {self.id}: slot {lit[0]} used with two arities")

    @property
    def slots(self) -> tuple:
        """Distinct higher-order slots, head slot first, then body order."""
        out = [self.head[0]]
        for lit in self.body:
            if lit[0] not in out:
                out.append(lit[0])
        return tuple(out)

    @property
    def binary_body(self) -> tuple:
        return tuple(lit for lit in self.body if len(lit) == 3)

    @property
    def unary_body(self) -> tuple:
        return tuple(lit for lit in self.body if len(lit) == 2)

    def slot_arity(self, slot: str) -> int:
        if slot == self.head[0]:
            return 2
        for lit in self.body:
            if lit[0] == slot:
                return len(lit) - 1
        raise KeyError(slot)

    def __str__(self):
        def lit(l):
            return f"{l[0]}({','.join(l[1:])})"

        text = f"{lit(self.head)} :- {', '.join(lit(b) for b in self.body)}"
        if self.order:
            text += " with " + ", ".join(f"{p}>{q}" for p, q in sorted(self.order))
        return text


def is_forward_chained(r: MetaRule) -> bool:
    """True iff the binary body literals chain the head's first argument to
    its second, in order, and every unary literal tests a chain variable."""
    _, x, y = r.head
    chain = [x]
    for _, a, b in r.binary_body:
        if a != chain[-1] or b in chain:
            return False
        chain.append(b)
    if len(chain) < 2 or chain[-1] != y:
        return False
    return all(v in chain for _, v in r.unary_body)


def _mr(id, head, body, order=()):
    return MetaRule(id, head, tuple(body), frozenset(order))


# Fig. 1 meta-rules with the ordering constraints of the benchmark encodings,
# plus identity and inverse.
LIBRARY = {
    "ident": _mr("ident", ("P", "A", "B"), [("Q", "A", "B")], [("P", "Q")]),
    "precon": _mr("precon", ("P", "A", "B"), [("Q", "A"), ("R", "A", "B")], [("P", "R")]),
    "postcon": _mr("postcon", ("P", "A", "B"), [("Q", "A", "B"), ("R", "B")], [("P", "Q")]),
    "chain": _mr("chain", ("P", "A", "B"), [("Q", "A", "C"), ("R", "C", "B")], [("P", "Q"), ("P", "R")]),
    "tailrec": _mr("tailrec", ("P", "A", "B"), [("Q", "A", "C"), ("P", "C", "B")], [("P", "Q")]),
    "inverse": _mr("inverse", ("P", "A", "B"), [("Q", "B", "A")], [("P", "Q")]),
}

FIG1 = ("precon", "postcon", "chain", "tailrec")


def library(*names) -> tuple:
    return tuple(LIBRARY[n] for n in names)


class MetaSub(NamedTuple):
    """A meta-rule id plus the predicates bound to its slots (slot order)."""

    rule_id: str
    preds: tuple

    @property
    def head(self) -> str:
        return self.preds[0]

    def assignment(self, rule: MetaRule) -> dict:
        return dict(zip(rule.slots, self.preds))


def instantiate(rule: MetaRule, sub: MetaSub) -> Rule:
    """First-order rule for ``sub``; variables named A, B, C, ... in order of
    first appearance."""
    if sub.rule_id != rule.id:
        raise MilError(f"meta-substitution for {sub.rule_id} applied to {rule.id}")
    if len(sub.preds) != len(rule.slots):
        raise MilError(f"meta-substitution {sub} does not assign every slot of {rule.id}")
    assign = sub.assignment(rule)
    names = {}

    def v(name):
        if name not in names:
            names[name] = Var(_var_name(len(names)))
        return names[name]

    head = Lit(assign[rule.head[0]], (v(rule.head[1]), v(rule.head[2])))
    body = tuple(Lit(assign[l[0]], tuple(v(a) for a in l[1:])) for l in rule.body)
    return Rule(head, body)


def _var_name(i: int) -> str:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if i < 26:
        return letters[i]
    return letters[i % 26] + str(i // 26)


def induced_program(hypothesis, rules) -> list:
    """One first-order rule per meta-substitution, in the given order."""
    by_id = rules if isinstance(rules, dict) else {r.id: r for r in rules}
    out = []
    for sub in hypothesis:
        if sub.rule_id not in by_id:
            raise MilError(f"unknown meta-rule id {sub.rule_id!r}")
        out.append(instantiate(by_id[sub.rule_id], sub))
    return out


@dataclass(frozen=True)
class MilProblem:
    """A MIL problem ``(B, E+, E-, R)`` plus search settings.

    ``facts`` holds ground atoms ``(p, a)`` / ``(p, a, b)``; ``rules`` are
    intensional BK rules; ``builtins`` are registry keys ``name/arity``.
    ``universe`` and ``list_universes`` declare extra object terms for the
    general strategy (``list_universes`` entries are ``(alphabet, max_len)``).
    """

    facts: tuple = ()
    rules: tuple = ()
    builtins: tuple = ()
    pos: tuple = ()
    neg: tuple = ()
    metarules: tuple = ()
    max_skolems: Optional[int] = None
    functional: bool = False
    universe: tuple = ()
    list_universes: tuple = ()

    @property
    def examples(self) -> tuple:
        return self.pos + self.neg

    @property
    def example_preds(self) -> tuple:
        seen = []
        for e in self.examples:
            if e[0] not in seen:
                seen.append(e[0])
        return tuple(seen)

    def metarule(self, rule_id: str) -> MetaRule:
        for r in self.metarules:
            if r.id == rule_id:
                return r
        raise MilError(f"unknown meta-rule id {rule_id!r}")

    @property
    def metarule_index(self) -> dict:
        return {r.id: i for i, r in enumerate(self.metarules)}

    def is_forward_chained(self) -> bool:
        return all(is_forward_chained(r) for r in self.metarules)

    def predicate_names(self) -> set:
        names = {a[0] for a in self.facts} | {e[0] for e in self.examples}
        for r in self.rules:
            names.add(r.head.pred)
            names.update(l.pred for l in r.body)
        names.update(b.split("/")[0] for b in self.builtins)
        return names


def make_problem(facts=(), pos=(), neg=(), metarules=(), **kw) -> MilProblem:
    """Build a problem with deduplicated, canonically ordered atom sets."""
    return MilProblem(
        facts=_dedup_sorted(facts),
        pos=_dedup(pos),
        neg=_dedup(neg),
        metarules=tuple(metarules),
        **kw,
    )


def _dedup(atoms) -> tuple:
    seen = set()
    out = []
    for a in atoms:
        a = tuple(a)
        if a not in seen:
            seen.add(a)
            out.append(a)
    return tuple(out)


def _dedup_sorted(atoms) -> tuple:
    return tuple(sorted(_dedup(atoms), key=atom_key))


def skolem_prefix(problem: MilProblem) -> str:
    taken = problem.predicate_names()
    for prefix in ("p", "inv", "sk", "q_inv"):
        if not any(n.startswith(prefix) and n[len(prefix):].isdigit() for n in taken):
            return prefix
    raise MilError("cannot choose a fresh invented-predicate prefix")


def skolem_names(problem: MilProblem, k: int) -> tuple:
    prefix = skolem_prefix(problem)
    return tuple(f"{prefix}{i}" for i in range(1, k + 1))


def format_example(atom) -> str:
    return format_atom(atom)
