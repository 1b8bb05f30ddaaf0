from __future__ import annotations

import json

import pytest

from hwdsl import signal as S
from hwdsl.circuit import Circuit
from hwdsl.cyclesim import Simulator
from hwdsl.errors import SpecMismatch, WidthError
from hwdsl.interface import Array, Nested, ScalarType, WithValid, interface, mux_bundle, priority_select
from hwdsl.signal import Builder

Rect = interface("rectangle", length=10, width=6)
Control = interface("control", clock=1, clear=1)


def test_flattened_port_names():
    spec = interface("adder_i", control=Nested(Control), inputs=Array(4, 2))
    assert spec.port_widths() == [("clock", 1), ("clear", 1), ("inputs0", 4), ("inputs1", 4)]
    assert spec.total_width == 10
    prefixed = interface("top", s=Nested(Rect, prefix="my_"))
    assert prefixed.port_names() == ["my_length", "my_width"]


def test_collisions_and_bad_fields():
    with pytest.raises(ValueError):
        interface("x", a=Nested(Rect), b=Nested(Rect))
    with pytest.raises(ValueError):
        interface("x", a=0)
    with pytest.raises(TypeError):
        interface("x", a=True)


def test_flat_list_roundtrip_and_map():
    b = Rect.of_flat_list([3, 5])
    assert b.length == 3 and b.as_dict() == {"length": 3, "width": 5}
    assert b.map(lambda v: v * 2).to_flat_list() == [6, 10]
    assert b.map2(Rect.of_flat_list([1, 1]), lambda x, y: x + y).width == 6
    with pytest.raises(SpecMismatch):
        Rect.of_flat_list([1])
    with pytest.raises(SpecMismatch):
        Rect.of_flat_list([1, 2, 3])
    with pytest.raises(AttributeError):
        b.length = 4


def test_json_document():
    doc = json.loads(interface("p", a=2, v=Array(Nested(Rect), 2)).to_json())
    assert interface("p", a=2, v=Array(Nested(Rect), 2)).port_names() == [
        "a", "v0_length", "v0_width", "v1_length", "v1_width"]
    assert doc == {
        "name": "p",
        "fields": [
            {"name": "a", "bits": 2},
            {"name": "v", "array": {"interface": {"name": "rectangle", "fields": [
                {"name": "length", "bits": 10}, {"name": "width", "bits": 6}]}}, "length": 2},
        ],
    }


def test_bundle_width_check():
    with Builder():
        b = Rect.of_flat_list([S.input_("length", 10), S.input_("width", 5)])
        with pytest.raises(WidthError):
            b.check_widths()


def test_priority_select_picks_first_valid():
    pair = interface("pair", a=4, b=4)
    with Builder():
        vs = [S.input_(f"v{i}", 1) for i in range(3)]
        items = [WithValid(v, pair.consts([i + 1, 10 + i])) for i, v in enumerate(vs)]
        out = priority_select(items)
        c = Circuit.create("ps", vs, {"valid": out.valid, "a": out.value.a, "b": out.value.b})
    sim = Simulator(c)
    for bits, expect in [((0, 0, 0), (0, 3, 12)), ((0, 1, 1), (1, 2, 11)), ((1, 1, 0), (1, 1, 10))]:
        sim.poke_all({f"v{i}": x for i, x in enumerate(bits)})
        assert (sim.peek("valid").value, sim.peek("a").value, sim.peek("b").value) == expect


def test_mux_bundle():
    with Builder():
        sel = S.input_("sel", 1)
        out = mux_bundle(sel, [Rect.consts([1, 2]), Rect.consts([3, 4])])
        c = Circuit.create("m", [sel], out)
    sim = Simulator(c)
    sim.poke("sel", 1)
    assert sim.peek("length").value == 3 and sim.peek("width").value == 4


def test_scalar_types_do_not_mix():
    price = ScalarType("price_in_usd", 32)
    weight = ScalarType("weight", 32)
    with Builder():
        p = price.input()
        w = weight.input()
        with pytest.raises(SpecMismatch):
            price.min(p, w)
        with pytest.raises(SpecMismatch):
            price.is_gte_zero(Rect.of_flat_list([p.signal, w.signal]))
        with pytest.raises(WidthError):
            price.of_signal(S.input_("narrow", 8))
        assert price.max(p, price.of_int(7)).width == 32
