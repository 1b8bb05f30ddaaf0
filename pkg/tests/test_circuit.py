from __future__ import annotations

import warnings

import pytest

from hwdsl import signal as S
from hwdsl.circuit import Circuit, DanglingSignalWarning, import_circuit, instantiate, stats
from hwdsl.cyclesim import Simulator
from hwdsl.errors import (
    CombinationalLoop, DuplicatePortName, FloatingWire, IllegalName, PortError, PortWidthMismatch,
)
from hwdsl.signal import Builder, Op, RegSpec


def _inc(width: int = 4) -> Circuit:
    with Builder():
        a = S.input_("a", width)
        return Circuit.create("inc", [a], {"y": a + 1})


def test_floating_wire_is_reported():
    with Builder():
        w = S.wire(4).named("dangling")
        with pytest.raises(FloatingWire, match="dangling"):
            Circuit.create("c", None, {"y": w + 1})


def test_combinational_loop_through_wire():
    with Builder():
        a = S.input_("a", 4)
        w = S.wire(4)
        w <<= w + a
        with pytest.raises(CombinationalLoop):
            Circuit.create("c", None, {"y": w})


def test_loop_through_register_is_fine():
    with Builder():
        clock = S.input_("clock", 1)
        w = S.wire(4)
        w <<= S.reg(RegSpec(clock), w + 1)
        c = Circuit.create("c", None, {"y": w})
    assert c.sequential and not c.is_combinational()
    assert [p.name for p in c.clock_ports()] == ["clock"]


def test_port_name_rules():
    with Builder():
        a = S.input_("a", 4)
        with pytest.raises(DuplicatePortName):
            Circuit.create("c", [a], {"a": a + 1})
        with pytest.raises(IllegalName):
            Circuit.create("c", [a], {"output": a + 1})
        with pytest.raises(IllegalName):
            Circuit.create("c", [a], {"2y": a + 1})
        with pytest.raises(IllegalName):
            Circuit.create("module", [a], {"y": a + 1})
        with pytest.raises(PortError):
            Circuit.create("c", [a], {})


def test_undeclared_input_rejected():
    with Builder():
        a = S.input_("a", 4)
        b = S.input_("b", 4)
        with pytest.raises(PortError):
            Circuit.create("c", [a], {"y": a + b})


def test_inputs_inferred_in_creation_order():
    with Builder():
        b = S.input_("b", 2)
        a = S.input_("a", 2)
        c = Circuit.create("c", None, {"y": a ^ b})
    assert [p.name for p in c.inputs] == ["b", "a"]


def test_dangling_logic_warns():
    with Builder():
        a = S.input_("a", 4)
        spare = S.wire(4).named("unused")
        spare <<= a + 3
        with warnings.catch_warnings(record=True) as got:
            warnings.simplefilter("always")
            Circuit.create("c", [a], {"y": a})
    assert any(issubclass(w.category, DanglingSignalWarning) for w in got)


def test_instance_width_mismatch_and_missing_ports():
    inc = _inc(4)
    with Builder():
        x = S.input_("x", 3)
        with pytest.raises(PortWidthMismatch):
            instantiate(inc, "u0", {"a": x})
        with pytest.raises(PortError):
            instantiate(inc, "u0", {})
        with pytest.raises(PortError):
            instantiate(inc, "u0", {"a": S.uresize(x, 4), "b": x})


def test_hierarchy_flattens_with_prefixed_names():
    inc = _inc(4)
    with Builder():
        x = S.input_("x", 4)
        y1 = instantiate(inc, "first", {"a": x})["y"]
        y2 = instantiate(inc, "second", {"a": y1})["y"]
        top = Circuit.create("top", [x], {"z": y2})
        with pytest.raises(DuplicatePortName):
            instantiate(inc, "first", {"a": x})
    flat = top.flatten()
    assert not flat.instances
    assert "first$y" in flat.internal_names()
    sim = Simulator(top)
    sim.poke("x", 14)
    assert sim.peek("z").value == 0


def test_import_circuit_inlines():
    inc = _inc(4)
    with Builder() as b:
        x = S.input_("x", 4)
        y = import_circuit(b, inc, {"a": x}, prefix="u")["y"]
        c = Circuit.create("c", [x], {"z": y})
    assert all(n.op is not Op.INST_OUT for n in c.nodes.values())


def test_schedule_is_deterministic_and_topological():
    def build():
        with Builder():
            a = S.input_("a", 4)
            b = S.input_("b", 4)
            return Circuit.create("c", [a, b], {"y": (a + b) ^ (a - b), "z": a & b})

    c1, c2 = build(), build()
    assert c1.schedule == c2.schedule
    pos = {u: i for i, u in enumerate(c1.schedule)}
    for u in c1.schedule:
        for d in c1.nodes[u].comb_deps():
            assert pos[d] < pos[u]


def test_stats_oracle():
    with Builder():
        clock = S.input_("clock", 1)
        a = S.input_("a", 4)
        r = S.reg(RegSpec(clock), (a + 1) * a)
        c = Circuit.create("c", [clock, a], {"y": r})
    s = stats(c)
    assert s.registers == 1
    assert s.register_bits == 8
    assert s.max_depth == 2
    assert s.node_counts["add"] == 1
    assert s.to_dict()["name"] == "c"
