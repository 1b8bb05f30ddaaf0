from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hwdsl import signal as S
from hwdsl.bitvec import BitVec
from hwdsl.circuit import Circuit
from hwdsl.cyclesim import Simulator, simulate
from hwdsl.errors import SimulationError, UnknownSignal, WidthError
from hwdsl.signal import Builder, RegSpec
from randcirc import all_envs, random_comb


def _reg_circuit(**spec_kw):
    with Builder():
        clock = S.input_("clock", 1)
        clear = S.input_("clear", 1)
        en = S.input_("en", 1)
        d = S.input_("d", 4)
        q = S.reg(RegSpec(clock, clear=clear, enable=en, clear_to=5, **spec_kw), d)
        return Circuit.create("r", [clock, clear, en, d], {"q": q})


def test_clear_wins_over_enable_and_is_synchronous():
    sim = Simulator(_reg_circuit(initial=2))
    assert sim.peek("q").value == 2
    trace = []
    for clear, en, d in [(0, 1, 7), (0, 0, 9), (1, 0, 9), (1, 1, 9), (0, 1, 3)]:
        sim.poke_all({"clear": clear, "en": en, "d": d})
        assert sim.peek("q").value == trace[-1] if trace else True
        sim.cycle()
        trace.append(sim.peek("q").value)
    assert trace == [7, 7, 5, 5, 3]


def test_peek_is_post_edge_and_before_edge_is_pre_edge():
    with Builder():
        clock = S.input_("clock", 1)
        d = S.input_("d", 4)
        c = Circuit.create("p", [clock, d], {"q": S.reg(RegSpec(clock), d), "comb": d + 1})
    sim = Simulator(c)
    sim.poke("d", 3)
    assert sim.peek("comb").value == 4
    sim.cycle()
    assert sim.peek("q").value == 3
    assert sim.peek("q", before_edge=True).value == 0
    assert sim.peek("comb", before_edge=True).value == 4
    sim.poke("d", 8)
    assert sim.peek("comb").value == 9
    assert sim.outputs["q"].value.value == 3


def test_poke_checks():
    sim = Simulator(_reg_circuit())
    with pytest.raises(WidthError):
        sim.poke("d", 16)
    with pytest.raises(WidthError):
        sim.poke("d", BitVec(3, 1))
    with pytest.raises(SimulationError):
        sim.poke("clock", 1)
    with pytest.raises(UnknownSignal):
        sim.poke("nope", 1)
    with pytest.raises(UnknownSignal):
        sim.peek("d", before_edge=True)
    sim.poke("d", -1)
    assert sim.peek("d").value == 15


def test_two_clocks_rejected():
    with Builder():
        c1 = S.input_("c1", 1)
        c2 = S.input_("c2", 1)
        d = S.input_("d", 1)
        circ = Circuit.create("x", [c1, c2, d], {"a": S.reg(RegSpec(c1), d), "b": S.reg(RegSpec(c2), d)})
    with pytest.raises(SimulationError):
        Simulator(circ)


def test_memory_write_then_async_read():
    with Builder():
        clock = S.input_("clock", 1)
        we = S.input_("we", 1)
        wa = S.input_("wa", 2)
        wd = S.input_("wd", 8)
        ra = S.input_("ra", 2)
        mem = S.memory(3, S.WritePort(clock, we, wa, wd))
        c = Circuit.create("m", [clock, we, wa, wd, ra], {"rd": mem.read_async(ra)})
    sim = Simulator(c)
    sim.poke_all({"we": 1, "wa": 1, "wd": 0xAB, "ra": 1})
    assert sim.peek("rd").value == 0
    sim.cycle()
    assert sim.peek("rd").value == 0xAB
    sim.poke_all({"wa": 3, "wd": 0x11, "ra": 3})
    sim.cycle()
    assert sim.peek("rd").value == 0


def test_state_snapshot_and_reset():
    sim = Simulator(_reg_circuit(initial=2))
    sim.poke_all({"en": 1, "d": 9})
    sim.cycle()
    snap = sim.state()
    sim.poke("d", 1)
    sim.cycle()
    assert sim.peek("q").value == 1
    sim.set_state(snap)
    assert sim.peek("q").value == 9
    sim.reset()
    assert sim.peek("q").value == 2 and sim.cycle_count == 0
    assert snap == type(snap)((9,), ()) and hash(snap) == hash(type(snap)((9,), ()))


def test_simulate_helper_returns_pre_edge_outputs():
    with Builder():
        clock = S.input_("clock", 1)
        d = S.input_("d", 4)
        c = Circuit.create("p", [clock, d], {"q": S.reg(RegSpec(clock), d)})
    rows = simulate(c, [{"d": 1}, {"d": 2}, {"d": 3}])
    assert [r["q"].value for r in rows] == [0, 1, 2]


def test_internal_names_need_store_all():
    with Builder():
        a = S.input_("a", 4)
        mid = (a + 1).named("mid")
        c = Circuit.create("p", [a], {"y": mid ^ a})
    sim = Simulator(c, store_all=True)
    sim.poke("a", 6)
    assert sim.peek("mid").value == 7
    assert "mid" in sim.signal_names()


@given(st.integers(0, 10_000))
def test_random_circuits_match_bitvec_reference(seed):
    c, ref = random_comb(random.Random(seed), n_inputs=2, width=3, n_ops=8)
    sim = Simulator(c)
    for env in all_envs(2, 3):
        sim.poke_all(env)
        for name, want in ref(env).items():
            assert sim.peek(name) == want


def test_deep_register_pipeline():
    with Builder():
        clock = S.input_("clock", 1)
        d = S.input_("d", 8)
        x = d
        for _ in range(200):
            x = S.reg(RegSpec(clock), (x + 1) ^ S.of_int(8, 0x5A))
        c = Circuit.create("pipe", [clock, d], {"q": x})
    sim = Simulator(c)
    for k in range(300):
        sim.poke("d", k & 255)
        sim.cycle()
    # After the edge of cycle k, stage j holds f^j(d of cycle k - j + 1).
    v = 300 - 200
    for _ in range(200):
        v = ((v + 1) & 255) ^ 0x5A
    assert sim.peek("q").value == v
