from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hwdsl import signal as S
from hwdsl.always import Variable, compile, if_, state_machine, switch, when
from hwdsl.circuit import Circuit
from hwdsl.cyclesim import Simulator
from hwdsl.errors import AlwaysError, WidthError
from hwdsl.signal import Builder, RegSpec


def test_last_assignment_wins():
    with Builder():
        a = S.input_("a", 4)
        c = S.input_("c", 1)
        v = Variable.wire(S.zero(4))
        compile([v.assign(1), when(c, [v.assign(a), v.assign(a + 1)])])
        circ = Circuit.create("c", [a, c], {"y": v.value})
    sim = Simulator(circ)
    sim.poke_all({"a": 5, "c": 0})
    assert sim.peek("y").value == 1
    sim.poke("c", 1)
    assert sim.peek("y").value == 6


def test_wire_default_and_register_hold():
    with Builder():
        clock = S.input_("clock", 1)
        go = S.input_("go", 1)
        w = Variable.wire(S.of_int(4, 9))
        r = Variable.reg(RegSpec(clock), 4)
        compile([when(go, [w.assign(2), r.assign(r.value + 1)])])
        circ = Circuit.create("c", [clock, go], {"w": w.value, "r": r.value})
    sim = Simulator(circ)
    assert sim.peek("w").value == 9
    for go, expect in [(1, 1), (0, 1), (1, 2)]:
        sim.poke("go", go)
        sim.cycle()
        assert sim.peek("r").value == expect


def test_reads_see_current_not_pending_value():
    with Builder():
        clock = S.input_("clock", 1)
        r = Variable.reg(RegSpec(clock), 4)
        seen = Variable.wire(S.zero(4))
        compile([r.assign(r.value + 3), seen.assign(r.value)])
        circ = Circuit.create("c", [clock], {"seen": seen.value, "r": r.value})
    sim = Simulator(circ)
    sim.cycle()
    assert sim.peek("r").value == 3 and sim.peek("seen").value == 3
    sim.cycle()
    assert sim.peek("seen").value == 6


def test_switch_default_and_range_checks():
    with Builder():
        sel = S.input_("sel", 2)
        v = Variable.wire(S.zero(4))
        stmts = [switch(sel, [(0, [v.assign(10)]), (2, [v.assign(12)])], [v.assign(15)])]
        compile(stmts)
        circ = Circuit.create("c", [sel], {"y": v.value})
        with pytest.raises(WidthError):
            switch(sel, [(4, [])])
        with pytest.raises(AlwaysError):
            switch(sel, [(1, []), (1, [])])
        with pytest.raises(AlwaysError):
            compile([v.assign(1)])
    sim = Simulator(circ)
    got = []
    for s in range(4):
        sim.poke("sel", s)
        got.append(sim.peek("y").value)
    assert got == [10, 15, 12, 15]


def test_state_machine_encoding_and_coverage():
    with Builder():
        clock = S.input_("clock", 1)
        sm = state_machine(["A", "B", "C"], RegSpec(clock))
        assert sm.width == 2
        assert sm.code("C") == 2
        with pytest.raises(AlwaysError):
            sm.switch([("A", []), ("B", [])])
        with pytest.raises(AlwaysError):
            sm.code("D")
        with pytest.raises(AlwaysError):
            state_machine(["A"], RegSpec(clock))
        compile([sm.switch([("A", [sm.set_next("B")]), ("B", [sm.set_next("C")])], default=[sm.set_next("A")])])
        circ = Circuit.create("c", [clock], {"s": sm.current})
    sim = Simulator(circ)
    seq = []
    for _ in range(5):
        seq.append(sim.peek("s").value)
        sim.cycle()
    assert seq == [0, 1, 2, 0, 1]


def _programs(depth: int = 3):
    assign = st.tuples(st.just("assign"), st.integers(0, 15))
    if depth == 0:
        return st.lists(assign, max_size=3)
    inner = _programs(depth - 1)
    branch = st.tuples(st.just("if"), st.integers(0, 3), inner, inner)
    return st.lists(st.one_of(assign, branch), max_size=3)


def _interpret(program, bits, value):
    for stmt in program:
        if stmt[0] == "assign":
            value = stmt[1]
        else:
            _, cond, then, else_ = stmt
            value = _interpret(then if bits[cond] else else_, bits, value)
    return value


def _lower(program, c, v):
    out = []
    for stmt in program:
        if stmt[0] == "assign":
            out.append(v.assign(stmt[1]))
        else:
            _, cond, then, else_ = stmt
            out.append(if_(c[cond], _lower(then, c, v), _lower(else_, c, v)))
    return out


@given(_programs(), st.integers(0, 15))
def test_nested_programs_match_python_semantics(program, default):
    """Random nested guarded assignments against a direct interpretation."""
    with Builder():
        c = [S.input_(f"c{i}", 1) for i in range(4)]
        v = Variable.wire(S.of_int(4, default))
        compile(_lower(program, c, v))
        if not v.compiled:
            return
        circ = Circuit.create("p", c, {"y": v.value})
    sim = Simulator(circ)
    for pattern in range(16):
        bits = [(pattern >> i) & 1 for i in range(4)]
        sim.poke_all({f"c{i}": b for i, b in enumerate(bits)})
        assert sim.peek("y").value == _interpret(program, bits, default)
