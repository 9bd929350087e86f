"""Seeded instance generators for the three benchmark families."""
from __future__ import annotations

import random

from ..bk import TRAIN_TESTERS, place, waiter_state
from ..core.model import MilError, library, make_problem, FIG1
from .trains import EASTBOUND, WESTBOUND, train_term

B1_BUILTINS = ("remove/2", "switch/2", "firstA/1", "firstB/1", "firstC/1")
B2_BUILTINS = ("removeCar/2",) + tuple(f"{n}/1" for n in sorted(TRAIN_TESTERS))
B3_BUILTINS = ("move_right/2", "pour_tea/2", "pour_coffee/2",
               "wants_tea/1", "wants_coffee/1", "at_end/1")


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def gen_b1(n: int, seed=0, max_skolems=None):
    """One positive and one negative ``p([c|X],[c])`` with random a/b
    bodies ``X`` of length ``n``."""
    if n < 1:
        raise MilError("b1 size must be at least 1")
    rng = _rng(seed)
    if n == 1:
        x = rng.choice("ab")
        y = "b" if x == "a" else "a"
    else:
        x = "".join(rng.choice("ab") for _ in range(n))
        y = x
        while y == x:
            y = "".join(rng.choice("ab") for _ in range(n))
    pos = ("p", ("c",) + tuple(x), ("c",))
    neg = ("p", ("c",) + tuple(y), ("c",))
    return make_problem(pos=[pos], neg=[neg], metarules=library(*FIG1),
                        builtins=B1_BUILTINS, max_skolems=max_skolems)


def gen_b2(n: int, seed=0, max_skolems=None):
    """``n/2`` eastbound trains as positives and ``n/2`` westbound ones as
    negatives, each example mapping a train to the empty train."""
    if n % 2 or not 4 <= n <= 20:
        raise MilError("b2 size must be even and between 4 and 20")
    rng = _rng(seed)
    east = rng.sample(range(len(EASTBOUND)), n // 2)
    west = rng.sample(range(len(WESTBOUND)), n // 2)
    pos = [("east", train_term(EASTBOUND[i]), ()) for i in sorted(east)]
    neg = [("east", train_term(WESTBOUND[i]), ()) for i in sorted(west)]
    return make_problem(pos=pos, neg=neg, metarules=library(*FIG1),
                        builtins=B2_BUILTINS, max_skolems=max_skolems)


def b3_instance(customers) -> tuple:
    """Initial and goal state for a table of customers (a drink per seat)."""
    c = len(customers)
    start = waiter_state(1, c + 1, [place(i, d) for i, d in enumerate(customers, 1)])
    goal = waiter_state(c + 1, c + 1, [place(i, d, d) for i, d in enumerate(customers, 1)])
    return start, goal


def gen_b3(k: int, seed=0, max_customers: int = 10, max_skolems=None):
    """``k`` positives, each with 1..max_customers customers wanting tea
    or coffee; solutions must be functional."""
    if not 1 <= k <= 8:
        raise MilError("b3 size must be between 1 and 8")
    rng = _rng(seed)
    pos = []
    seen = set()
    while len(pos) < k:
        c = rng.randint(1, max_customers)
        drinks = tuple(rng.choice(("tea", "coffee")) for _ in range(c))
        if drinks in seen and len(seen) < 2 ** (max_customers + 1) - 2:
            continue
        seen.add(drinks)
        start, goal = b3_instance(drinks)
        pos.append(("robot", start, goal))
    return make_problem(pos=pos, metarules=library(*FIG1), builtins=B3_BUILTINS,
                        functional=True, max_skolems=max_skolems)


GENERATORS = {"b1": gen_b1, "b2": gen_b2, "b3": gen_b3}


def generate(family: str, size: int, seed=0, **kw):
    try:
        gen = GENERATORS[family]
    except KeyError:
        raise MilError(f"unknown benchmark family {family!r}") from None
    return gen(size, seed, **kw)
