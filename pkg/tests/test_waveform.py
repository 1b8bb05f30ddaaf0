from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hwdsl import signal as S
from hwdsl.circuit import Circuit
from hwdsl.cyclesim import Simulator
from hwdsl.errors import GoldenMissing
from hwdsl.signal import Builder, RegSpec
from hwdsl.waveform import (
    RenderConfig, TraceSignal, WaveTrace, attach, expect, expect_text, export_vcd, parse_vcd, render,
    vcd_identifier,
)


def _trace() -> WaveTrace:
    return WaveTrace("t", [
        TraceSignal("clock", 1, "input", 0, True, [0] * 5),
        TraceSignal("valid", 1, "input", 1, False, [0, 1, 1, 0, 1]),
        TraceSignal("a_very_long_name", 8, "output", 2, False, [0, 0x12, 0x12, 0xFF, 3]),
    ])


def test_default_render_is_frozen():
    assert render(_trace()) == (
        "clock      ┌┐┌┐┌┐┌┐┌┐\n"
        "           ┘└┘└┘└┘└┘└\n"
        "valid       ┌───┐ ┌──\n"
        "           ─┘   └─┘\n"
        "           ─┬───┬─┬──\n"
        "a_very_lo… 0│12 │.│3\n"
        "           ─┴───┴─┴──\n"
    )


def test_wide_cycles():
    assert render(_trace(), RenderConfig(wave_width=3)).splitlines()[2:6] == [
        "valid         ┌───────┐   ┌────",
        "           ───┘       └───┘",
        "           ───┬───────┬───┬────",
        "a_very_lo… 0  │12     │ff │3",
    ]


def test_binary_radix_truncates_with_dot():
    assert render(_trace(), RenderConfig(radix="bin", wave_width=2)).splitlines()[5] == \
        "a_very_lo… 0.│0001.│1.│00."


def test_window_and_reset_marker():
    t = _trace()
    t.resets.append(3)
    assert render(t, RenderConfig(start_cycle=1, display_width=20, name_width=6)) == (
        "clock  ┌┐┌┐┌┐┌┐\n"
        "       ┘└┘└┘└┘└\n"
        "valid  ───┐ ┌──\n"
        "          └─┘\n"
        "       ───┬─┬──\n"
        "a_ver… 12 │.│3\n"
        "       ───┴─┴──\n"
        "~reset     R\n"
    )


def test_display_limits():
    out = render(_trace(), RenderConfig(display_height=3))
    assert len(out.splitlines()) == 3
    for line in render(_trace(), RenderConfig(display_width=15)).splitlines():
        assert len(line) <= 15


def test_config_validation():
    for kw in ({"wave_width": 0}, {"radix": "oct"}, {"name_width": 1}, {"display_width": 5},
               {"start_cycle": -1}):
        with pytest.raises(ValueError):
            RenderConfig(**kw)
    with pytest.raises(ValueError):
        render(WaveTrace("e", []))


def test_vcd_identifiers():
    assert [vcd_identifier(i) for i in (0, 1, 93, 94, 95)] == ["!", '"', "~", "!!", '"!']
    ids = [vcd_identifier(i) for i in range(20_000)]
    assert len(set(ids)) == len(ids)
    assert all(33 <= ord(c) <= 126 for i in ids for c in i)


def test_vcd_text_oracle():
    t = WaveTrace("m", [TraceSignal("clock", 1, "input", 0, True, [0, 0, 0]),
                        TraceSignal("b", 1, "input", 1, False, [1, 1, 0]),
                        TraceSignal("v", 4, "output", 2, False, [0, 5, 5])])
    assert export_vcd(t) == (
        "$timescale 1ns $end\n$scope module m $end\n"
        "$var wire 1 ! b $end\n$var wire 4 \" v $end\n"
        "$upscope $end\n$enddefinitions $end\n"
        "#0\n1!\nb0 \"\n#1\nb101 \"\n#2\n0!\n#3\n"
    )


@given(st.lists(st.tuples(st.integers(1, 12), st.data()), min_size=1, max_size=5), st.integers(1, 15))
def test_vcd_roundtrip(shapes, n):
    signals = []
    for k, (w, data) in enumerate(shapes):
        samples = data.draw(st.lists(st.integers(0, (1 << w) - 1), min_size=n, max_size=n))
        signals.append(TraceSignal(f"s{k}", w, "input", k, False, samples))
    t = WaveTrace("r", signals)
    back = parse_vcd(export_vcd(t))
    assert back == {s.name: (s.width, s.samples) for s in signals}


def _counter_sim():
    with Builder():
        clock = S.input_("clock", 1)
        x = S.reg_fb(RegSpec(clock), 3, lambda x: x + 1)
        return Simulator(Circuit.create("cnt", [clock], {"x": x}))


def test_attach_samples_pre_edge_and_marks_resets():
    sim = _counter_sim()
    trace = attach(sim)
    sim.run(3)
    sim.reset()
    sim.run(2)
    assert trace.names() == ["clock", "x"]
    assert trace.signal("x").samples == [0, 1, 2, 0, 1]
    assert trace.resets == [3]
    assert "~reset" in render(trace)
    assert trace.matrix() == {"x": [0, 1, 2, 0, 1]}


def test_golden_update_then_match_then_diff(tmp_path, monkeypatch):
    monkeypatch.delenv("GOLDEN_UPDATE", raising=False)
    path = tmp_path / "goldens" / "cnt.txt"
    sim = _counter_sim()
    trace = attach(sim)
    sim.run(4)
    with pytest.raises(GoldenMissing):
        expect(trace, None, path)
    assert expect(trace, None, path, update=True).updated
    assert expect(trace, None, path).ok
    bad = expect_text(render(trace).replace("3", "4"), path)
    assert not bad.ok and bad.diff.startswith("---")
    monkeypatch.setenv("GOLDEN_UPDATE", "1")
    assert expect_text("changed\n", path).updated
    monkeypatch.delenv("GOLDEN_UPDATE")
    assert path.read_text() == "changed\n"
