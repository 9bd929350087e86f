"""Problem-file DSL, hypothesis printing and hypothesis parsing.

A problem file is a sequence of '.'-terminated statements; '%' starts a
comment.  Directives::

    #metarule chain.                         library meta-rule
    #metarule id: P(A,B) :- Q(A,C), R(C,B) with P>Q.
    #builtin remove/2.
    #skolems 2.
    #functional.
    #universe a, b, [a,b].
    #universe_lists [a,b,c] 5.

Statements::

    fact m(ann,bob).
    rule r(X,Y) :- q(X,Y).
    pos a(sue,bob).
    neg a(bob,tim).
"""
from __future__ import annotations

import re
from itertools import permutations

from .model import (
    LIBRARY,
    Lit,
    MetaRule,
    MetaSub,
    MilError,
    MilProblem,
    Rule,
    instantiate,
    make_problem,
    skolem_prefix,
)
from .terms import Struct, Var, atom_key, format_atom, format_term, term_key


class ParseError(MilError):
    def __init__(self, msg: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<neck>:-)
  | (?P<int>-?\d+)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<punct>[()\[\],.:>/#|])
    """,
    re.VERBOSE,
)


class Tok:
    __slots__ = ("kind", "text", "line")

    def __init__(self, kind, text, line):
        self.kind = kind
        self.text = text
        self.line = line

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.line}"


def tokenize(text: str) -> list:
    out = []
    line = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"syntax error near {text[pos:pos + 12]!r}", line)
        kind = m.lastgroup
        s = m.group()
        pos = m.end()
        if kind == "nl":
            line += 1
        elif kind in ("ws", "comment"):
            continue
        elif kind == "quoted":
            body = s[1:-1]
            out.append(Tok("name", re.sub(r"\\(.)", r"\1", body), line))
        else:
            out.append(Tok(kind, s, line))
    return out


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    @property
    def line(self):
        if self.i < len(self.toks):
            return self.toks[self.i].line
        return self.toks[-1].line if self.toks else 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text, k=0) -> bool:
        t = self.peek(k)
        return t is not None and t.kind == "punct" and t.text == text

    def take(self, kind=None, text=None) -> Tok:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.line)
        if (kind and t.kind != kind) or (text and t.text != text):
            want = text or kind
            raise ParseError(f"syntax error: expected {want!r}, got {t.text!r}", t.line)
        self.i += 1
        return t

    def expect(self, text):
        t = self.peek()
        if t is None or t.text != text or t.kind not in ("punct", "neck"):
            got = t.text if t else "end of input"
            raise ParseError(f"syntax error: expected {text!r}, got {got!r}", self.line)
        self.i += 1

    def done(self) -> bool:
        return self.i >= len(self.toks)

    # terms

    def term(self, allow_vars=False):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.line)
        if t.kind == "int":
            self.i += 1
            return int(t.text)
        if t.kind == "var":
            if not allow_vars:
                raise ParseError(f"variable {t.text} in a ground term", t.line)
            self.i += 1
            return Var(t.text)
        if t.kind == "name":
            self.i += 1
            if self.at("("):
                return Struct(t.text, self.args(allow_vars))
            return t.text
        if self.at("["):
            self.i += 1
            items = []
            if not self.at("]"):
                items.append(self.term(allow_vars))
                while self.at(","):
                    self.i += 1
                    items.append(self.term(allow_vars))
            if self.at("|"):
                raise ParseError("open list tails are not supported", self.line)
            self.expect("]")
            return tuple(items)
        raise ParseError(f"syntax error: unexpected {t.text!r}", t.line)

    def args(self, allow_vars=False) -> tuple:
        self.expect("(")
        out = [self.term(allow_vars)]
        while self.at(","):
            self.i += 1
            out.append(self.term(allow_vars))
        self.expect(")")
        return tuple(out)

    def atom(self, allow_vars=False):
        t = self.take("name")
        if not self.at("("):
            raise ParseError(f"atom {t.text} needs arguments", t.line)
        return (t.text,) + self.args(allow_vars)

    def lit(self) -> Lit:
        a = self.atom(allow_vars=True)
        return Lit(a[0], a[1:])


def _meta_lit(p: _Parser):
    slot = p.take("var").text
    p.expect("(")
    vs = [p.take("var").text]
    while p.at(","):
        p.i += 1
        vs.append(p.take("var").text)
    p.expect(")")
    return (slot, *vs)


def _parse_metarule(p: _Parser, line: int) -> MetaRule:
    rid = p.take("name").text
    if p.at("."):
        p.i += 1
        if rid not in LIBRARY:
            raise ParseError(f"unknown library meta-rule {rid!r}", line)
        return LIBRARY[rid]
    p.expect(":")
    head = _meta_lit(p)
    p.expect(":-")
    body = [_meta_lit(p)]
    while p.at(","):
        p.i += 1
        body.append(_meta_lit(p))
    order = []
    t = p.peek()
    if t is not None and t.kind == "name" and t.text == "with":
        p.i += 1
        while True:
            a = p.take("var").text
            p.expect(">")
            b = p.take("var").text
            order.append((a, b))
            if not p.at(","):
                break
            p.i += 1
    p.expect(".")
    try:
        return MetaRule(rid, head, tuple(body), frozenset(order))
    except MilError as e:
        raise ParseError(str(e), line) from None


def parse_problem(text: str) -> MilProblem:
    """Parse the problem DSL. Raises :class:`ParseError` on any error."""
    from ..bk import lookup

    p = _Parser(tokenize(text))
    facts, rules, builtins, pos, neg, metarules = [], [], [], [], [], []
    skolems = None
    functional = False
    universe, list_universes = [], []
    while not p.done():
        line = p.line
        if p.at("#"):
            p.i += 1
            d = p.take("name")
            if d.text == "metarule":
                r = _parse_metarule(p, line)
                if any(m.id == r.id for m in metarules):
                    raise ParseError(f"duplicate meta-rule id {r.id!r}", line)
                metarules.append(r)
                continue
            if d.text == "builtin":
                name = p.take("name").text
                p.expect("/")
                arity = int(p.take("int").text)
                key = f"{name}/{arity}"
                try:
                    b = lookup(key)
                except MilError as e:
                    raise ParseError(str(e), line) from None
                if b.arity != arity:
                    raise ParseError(f"unknown builtin {key}", line)
                if key not in builtins:
                    builtins.append(key)
            elif d.text == "skolems":
                skolems = int(p.take("int").text)
                if skolems < 0:
                    raise ParseError("#skolems must be non-negative", line)
            elif d.text == "functional":
                functional = True
            elif d.text == "universe":
                universe.append(p.term())
                while p.at(","):
                    p.i += 1
                    universe.append(p.term())
            elif d.text == "universe_lists":
                alphabet = p.term()
                if not isinstance(alphabet, tuple):
                    raise ParseError("#universe_lists needs a list alphabet", line)
                n = int(p.take("int").text)
                list_universes.append((alphabet, n))
            else:
                raise ParseError(f"unknown directive #{d.text}", line)
            p.expect(".")
            continue
        kw = p.take("name")
        if kw.text == "fact":
            a = p.atom()
            if len(a) not in (2, 3):
                raise ParseError("facts must be unary or binary", line)
            facts.append(a)
        elif kw.text in ("pos", "neg"):
            a = p.atom()
            if len(a) != 3:
                raise ParseError(f"non-binary example {format_atom(a)}", line)
            (pos if kw.text == "pos" else neg).append(a)
        elif kw.text == "rule":
            head = p.lit()
            p.expect(":-")
            body = [p.lit()]
            while p.at(","):
                p.i += 1
                body.append(p.lit())
            rule = Rule(head, tuple(body))
            _check_bk_rule(rule, line)
            rules.append(rule)
        else:
            raise ParseError(f"syntax error: unknown statement {kw.text!r}", line)
        p.expect(".")
    if not pos:
        raise ParseError("no positive examples")
    if not metarules:
        raise ParseError("no meta-rules declared")
    return make_problem(
        facts=facts, pos=pos, neg=neg, metarules=metarules,
        rules=tuple(rules), builtins=tuple(builtins), max_skolems=skolems,
        functional=functional, universe=tuple(universe),
        list_universes=tuple(list_universes),
    )


def _check_bk_rule(rule: Rule, line: int):
    for lit in (rule.head,) + rule.body:
        if len(lit.args) not in (1, 2):
            raise ParseError("BK rules may only use unary and binary literals", line)
    body_vars = {a for l in rule.body for a in l.args if isinstance(a, Var)}
    for a in rule.head.args:
        if isinstance(a, Var) and a not in body_vars:
            raise ParseError(f"head variable {a} does not occur in the body", line)


def _format_metarule(r: MetaRule) -> str:
    if LIBRARY.get(r.id) == r:
        return f"#metarule {r.id}."
    return f"#metarule {r.id}: {r}."


def format_problem(problem: MilProblem) -> str:
    """Render a problem in the DSL; ``parse_problem`` inverts it."""
    lines = [_format_metarule(r) for r in problem.metarules]
    lines += [f"#builtin {b}." for b in problem.builtins]
    if problem.max_skolems is not None:
        lines.append(f"#skolems {problem.max_skolems}.")
    if problem.functional:
        lines.append("#functional.")
    if problem.universe:
        lines.append("#universe " + ", ".join(format_term(t) for t in problem.universe) + ".")
    for alphabet, n in problem.list_universes:
        lines.append(f"#universe_lists {format_term(alphabet)} {n}.")
    lines += [f"fact {format_atom(a)}." for a in problem.facts]
    lines += [f"rule {r}" for r in problem.rules]
    lines += [f"pos {format_atom(a)}." for a in problem.pos]
    lines += [f"neg {format_atom(a)}." for a in problem.neg]
    return "\n".join(lines) + "\n"


# -- hypotheses -----------------------------------------------------------------

def skolem_index(name: str, prefix: str):
    rest = name[len(prefix):]
    if name.startswith(prefix) and rest.isdigit():
        return int(rest)
    return None


def invented_preds(hypothesis, problem: MilProblem) -> list:
    """Head predicates of ``hypothesis`` that do not occur in the problem."""
    known = problem.predicate_names()
    return sorted({s.head for s in hypothesis} - known, key=_pred_key)


def _pred_key(name):
    m = re.match(r"(.*?)(\d+)\Z", name)
    if m:
        return (m.group(1), int(m.group(2)), name)
    return (name, -1, name)


def head_rank(problem: MilProblem, pred: str) -> tuple:
    ex = problem.example_preds
    if pred in ex:
        return (0, ex.index(pred), "")
    i = skolem_index(pred, skolem_prefix(problem))
    if i is not None:
        return (1, i, "")
    return (2, 0, pred)


def sort_hypothesis(hypothesis, problem: MilProblem) -> list:
    idx = problem.metarule_index
    return sorted(
        hypothesis,
        key=lambda s: (head_rank(problem, s.head), idx.get(s.rule_id, len(idx)), s.preds),
    )


def rename(hypothesis, mapping: dict) -> frozenset:
    return frozenset(
        MetaSub(s.rule_id, tuple(mapping.get(p, p) for p in s.preds)) for s in hypothesis
    )


def print_hypothesis(hypothesis, problem: MilProblem, names=None) -> str:
    """One Prolog-like rule per line in canonical order.  ``names`` optionally
    renames predicates (e.g. invented ones) for display."""
    names = names or {}
    lines = []
    for sub in sort_hypothesis(hypothesis, problem):
        rule = instantiate(problem.metarule(sub.rule_id), sub)
        rule = Rule(
            Lit(names.get(rule.head.pred, rule.head.pred), rule.head.args),
            tuple(Lit(names.get(l.pred, l.pred), l.args) for l in rule.body),
        )
        lines.append(str(rule))
    return "".join(line + "\n" for line in lines)


def metagol_names(hypothesis, problem: MilProblem) -> dict:
    """Display names ``<target>_<i>`` for invented predicates."""
    target = problem.example_preds[0]
    return {p: f"{target}_{i}" for i, p in enumerate(invented_preds(hypothesis, problem), 1)}


def _match_rule(rule: Rule, mr: MetaRule):
    if len(rule.body) != len(mr.body):
        return None
    pairs = [(mr.head, rule.head)] + list(zip(mr.body, rule.body))
    slot_of, var_of, used = {}, {}, set()
    for ml, lit in pairs:
        if len(ml) - 1 != len(lit.args):
            return None
        if slot_of.setdefault(ml[0], lit.pred) != lit.pred:
            return None
        for mv, a in zip(ml[1:], lit.args):
            if not isinstance(a, Var):
                return None
            if mv in var_of:
                if var_of[mv] != a:
                    return None
            elif a in used:
                return None
            else:
                var_of[mv] = a
                used.add(a)
    return MetaSub(mr.id, tuple(slot_of[s] for s in mr.slots))


def parse_hypothesis(text: str, problem: MilProblem) -> frozenset:
    """Parse a rule list and map each rule to a meta-substitution of one of
    the problem's meta-rules (first match in declaration order)."""
    p = _Parser(tokenize(text))
    subs = []
    while not p.done():
        line = p.line
        head = p.lit()
        if len(head.args) != 2:
            raise ParseError("hypothesis rules must have binary heads", line)
        p.expect(":-")
        body = [p.lit()]
        while p.at(","):
            p.i += 1
            body.append(p.lit())
        p.expect(".")
        rule = Rule(head, tuple(body))
        for mr in problem.metarules:
            sub = _match_rule(rule, mr)
            if sub is not None:
                subs.append(sub)
                break
        else:
            raise ParseError(f"rule {rule} matches no meta-rule", line)
    return frozenset(subs)


def canonical_renaming(hypothesis, problem: MilProblem) -> frozenset:
    """Rename invented predicates to p1..pk choosing the lexicographically
    least printed form; equal results mean equal modulo renaming."""
    inv = invented_preds(hypothesis, problem)
    prefix = skolem_prefix(problem)
    fresh = [f"{prefix}{i}" for i in range(1, len(inv) + 1)]
    best = None
    for perm in permutations(fresh):
        h = rename(hypothesis, dict(zip(inv, perm)))
        key = sorted((s.rule_id, s.preds) for s in h)
        if best is None or key < best[0]:
            best = (key, h)
    return best[1] if best else frozenset()


def canonical_program(hypothesis, problem: MilProblem) -> tuple:
    """Sorted rule texts of the induced program under the least renaming of
    invented predicates.  Meta-rules with the same instance (chain and
    tailrec, say) give the same text."""
    inv = invented_preds(hypothesis, problem)
    prefix = skolem_prefix(problem)
    fresh = [f"{prefix}{i}" for i in range(1, len(inv) + 1)]
    best = None
    for perm in permutations(fresh):
        h = rename(hypothesis, dict(zip(inv, perm)))
        key = tuple(sorted({str(instantiate(problem.metarule(s.rule_id), s)) for s in h}))
        if best is None or key < best:
            best = key
    return best or ()


def same_modulo_renaming(h1, h2, problem: MilProblem) -> bool:
    """Equal induced programs up to renaming of invented predicates."""
    return canonical_program(h1, problem) == canonical_program(h2, problem)


def sorted_atoms(atoms) -> list:
    return sorted(atoms, key=atom_key)


__all__ = [
    "ParseError", "tokenize", "parse_problem", "format_problem", "print_hypothesis",
    "parse_hypothesis", "canonical_renaming", "same_modulo_renaming", "invented_preds",
    "metagol_names", "sort_hypothesis", "head_rank", "rename", "term_key",
]
