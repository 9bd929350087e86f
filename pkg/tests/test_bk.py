import pytest

from milkit.bk import TRAIN_TESTERS, BkBase, all_lists, car, lookup, place, waiter_state
from milkit.bench.generators import b3_instance
from milkit.core.model import MilError


def test_string_builtins():
    assert lookup("remove/2").forward(("a", "b")) == (("b",),)
    assert lookup("remove/2").forward(()) == ()
    assert lookup("switch/2").forward(("a", "b", "c")) == (("b", "a", "c"),)
    assert lookup("switch/2").forward(("a",)) == ()
    assert lookup("firstA/1").test(("a", "b"))
    assert not lookup("firstA/1").test(("b", "a"))
    assert not lookup("firstC/1").test(())


def test_unknown_builtin():
    with pytest.raises(MilError):
        lookup("nosuch/2")


def test_fifty_train_testers():
    assert len(TRAIN_TESTERS) == 50
    short_closed = car("rectangle", "short", "single", "flat", 2, "circle", 1)
    long_open = car("bucket", "long", "double", "none", 3, "triangle", 2)
    train = (short_closed, long_open)
    assert TRAIN_TESTERS["short_closed"](train)
    assert not TRAIN_TESTERS["short_closed"](train[1:])
    assert TRAIN_TESTERS["open"](train[1:])
    assert TRAIN_TESTERS["load_2_triangles"](train[1:])
    assert TRAIN_TESTERS["wheels_3"](train[1:])
    assert TRAIN_TESTERS["no_car"](())
    assert not TRAIN_TESTERS["no_car"](train)
    assert lookup("removeCar/2").forward(train) == ((long_open,),)


def test_waiter_builtins():
    start, goal = b3_instance(("tea", "coffee"))
    assert lookup("wants_tea/1").test(start)
    assert not lookup("wants_coffee/1").test(start)
    assert not lookup("pour_coffee/2").forward(start) == ()  # any empty cup can be filled
    (s1,) = lookup("pour_tea/2").forward(start)
    assert lookup("pour_tea/2").forward(s1) == ()
    (s2,) = lookup("move_right/2").forward(s1)
    assert lookup("wants_coffee/1").test(s2)
    (s3,) = lookup("pour_coffee/2").forward(s2)
    (s4,) = lookup("move_right/2").forward(s3)
    assert s4 == goal
    assert lookup("at_end/1").test(goal)
    assert lookup("move_right/2").forward(goal) == ()


def test_waiter_state_shape():
    s = waiter_state(1, 2, [place(1, "tea")])
    assert str(s[0]) == "robot_pos(1)"
    assert s[2].args[0][0].args[2].args == ("up", "empty")


def test_bkbase():
    bk = BkBase(facts=[("m", "ann", "bob"), ("f", "john", "bob"), ("tall", "ann")],
                builtins=["remove/2", "firstA/1"])
    assert bk.binary_preds == ("f", "m", "remove")
    assert bk.unary_preds == ("firstA", "tall")
    assert bk.extensional
    assert bk.eval_binary("m", "ann") == {"bob"}
    assert bk.eval_unary("tall", "ann")
    assert bk.successors(("a",)) == [("remove", ())]
    with pytest.raises(MilError):
        bk.eval_binary("nosuch", "ann")


def test_builtin_fact_clash():
    with pytest.raises(MilError):
        BkBase(facts=[("remove", "a", "b")], builtins=["remove/2"])


def test_all_lists():
    ls = all_lists(("a", "b"), 2)
    assert len(ls) == 1 + 2 + 4
    assert () in ls and ("b", "a") in ls
