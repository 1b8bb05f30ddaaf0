"""Trace capture, ASCII waveform rendering, golden-file expects and VCD.

Rendering grammar (every cycle is ``wave_width + 1`` characters wide; the
last character of a cycle is its transition slot, showing the edge into the
next cycle):

* the clock is two rows of pulses, ``┌┐`` over ``┘└``;
* other 1-bit signals are two rows, a top rail (``─`` when high) and a bottom
  rail (``─`` when low), joined by ``┐└`` / ``┌┘`` at transitions;
* buses are three rows: ``─`` rails with ``┬``/``┴`` at transitions, and a
  value row where each stable segment shows its value left-aligned, cut
  with ``.`` when it does not fit, and segments are separated by ``│``.

Names longer than the name column end in ``…``. Output is clipped to
``display_width`` columns and ``display_height`` lines.
"""

from __future__ import annotations

import difflib
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from .bitvec import BitVec
from .cyclesim import Simulator
from .errors import GoldenMissing

Radix = Literal["hex", "dec", "bin"]
GOLDEN_ENV = "GOLDEN_UPDATE"


@dataclass
class TraceSignal:
    name: str
    width: int
    kind: str  # "input" | "output" | "internal"
    uid: int
    is_clock: bool = False
    samples: list[int] = field(default_factory=list)

    def bitvecs(self) -> list[BitVec]:
        return [BitVec(self.width, v) for v in self.samples]


@dataclass
class WaveTrace:
    name: str
    signals: list[TraceSignal]
    resets: list[int] = field(default_factory=list)

    @property
    def cycles(self) -> int:
        return len(self.signals[0].samples) if self.signals else 0

    def signal(self, name: str) -> TraceSignal:
        for s in self.signals:
            if s.name == name:
                return s
        raise KeyError(name)

    def names(self) -> list[str]:
        return [s.name for s in self.signals]

    def matrix(self) -> dict[str, list[int]]:
        return {s.name: list(s.samples) for s in self.signals if not s.is_clock}

    def sample(self, sim: Simulator) -> None:
        for s in self.signals:
            s.samples.append(0 if s.is_clock else sim.raw_value(s.uid))

    def mark_reset(self, _sim: Simulator | None = None) -> None:
        self.resets.append(self.cycles)


def attach(sim: Simulator, *, trace_all: bool = False) -> WaveTrace:
    """Record ports (and every named internal if ``trace_all``) once per cycle.

    Samples are taken in the pre-edge phase of :meth:`Simulator.cycle`.
    """
    flat = sim.flat
    clocks = flat.clock_uids()
    signals: list[TraceSignal] = []
    for kind, ports in (("input", flat.inputs), ("output", flat.outputs)):
        for p in sorted(ports, key=lambda p: p.name):
            signals.append(TraceSignal(p.name, p.width, kind, p.uid, p.uid in clocks))
    if trace_all:
        for n, uid in sorted(flat.internal_names().items()):
            signals.append(TraceSignal(n, flat.nodes[uid].width, "internal", uid))
    trace = WaveTrace(flat.name, signals)
    sim.add_sampler(trace.sample)
    sim.add_reset_hook(trace.mark_reset)
    return trace


# --------------------------------------------------------------------------
# rendering


@dataclass(frozen=True)
class RenderConfig:
    wave_width: int = 1
    display_width: int = 80
    display_height: int | None = None
    radix: Radix = "hex"
    start_cycle: int = 0
    name_width: int = 10

    def __post_init__(self) -> None:
        if self.wave_width < 1:
            raise ValueError("wave_width must be >= 1")
        if self.radix not in ("hex", "dec", "bin"):
            raise ValueError(f"radix must be hex, dec or bin, got {self.radix!r}")
        if self.name_width < 2:
            raise ValueError("name_width must be >= 2")
        if self.display_width < self.name_width + 1 + 2 * (self.wave_width + 1):
            raise ValueError("display_width must fit the name column and two cycles")
        if self.start_cycle < 0:
            raise ValueError("start_cycle must be >= 0")

    @property
    def cycle_chars(self) -> int:
        return self.wave_width + 1


def format_value(value: int, width: int, radix: Radix) -> str:
    if radix == "hex":
        return format(value, "x")
    if radix == "dec":
        return str(value)
    return format(value, f"0{width}b")


def _label(name: str, width: int) -> str:
    if len(name) > width:
        return name[: width - 1] + "…"
    return name.ljust(width)


def _clock_rows(n: int, cw: int) -> tuple[str, str]:
    top = ("┌" + "─" * (cw - 2) + "┐") if cw > 1 else "┐"
    bot = ("┘" + " " * (cw - 2) + "└") if cw > 1 else "└"
    return top * n, bot * n


def _bit_rows(vals: list[int], nxt: int | None, cw: int) -> tuple[str, str]:
    top: list[str] = []
    bot: list[str] = []
    for i, v in enumerate(vals):
        top.append(("─" if v else " ") * (cw - 1))
        bot.append((" " if v else "─") * (cw - 1))
        after = vals[i + 1] if i + 1 < len(vals) else (nxt if nxt is not None else v)
        if after == v:
            top.append("─" if v else " ")
            bot.append(" " if v else "─")
        elif v:
            top.append("┐")
            bot.append("└")
        else:
            top.append("┌")
            bot.append("┘")
    return "".join(top), "".join(bot)


def _bus_rows(vals: list[int], nxt: int | None, width: int, cw: int,
              radix: Radix) -> tuple[str, str, str]:
    top: list[str] = []
    mid: list[str] = []
    bot: list[str] = []
    i = 0
    while i < len(vals):
        j = i
        while j + 1 < len(vals) and vals[j + 1] == vals[i]:
            j += 1
        span = (j - i + 1) * cw
        after = vals[j + 1] if j + 1 < len(vals) else nxt
        edge = after is not None and after != vals[i]
        text_span = span - 1 if edge else span
        text = format_value(vals[i], width, radix)
        if len(text) > text_span:
            text = text[: text_span - 1] + "." if text_span > 1 else "."[:text_span]
        mid.append(text.ljust(text_span) + ("│" if edge else ""))
        top.append("─" * text_span + ("┬" if edge else ""))
        bot.append("─" * text_span + ("┴" if edge else ""))
        i = j + 1
    return "".join(top), "".join(mid), "".join(bot)


def render(trace: WaveTrace, config: RenderConfig | None = None) -> str:
    """Deterministic text picture of ``trace``; a pure function of its arguments."""
    config = config or RenderConfig()
    if not trace.signals or trace.cycles == 0:
        raise ValueError("cannot render an empty trace")
    cw = config.cycle_chars
    start = config.start_cycle
    avail = config.display_width - config.name_width - 1
    n = max(0, min(trace.cycles - start, avail // cw))
    stop = start + n
    lines: list[str] = []
    blank = " " * config.name_width

    def row(label: str, body: str) -> None:
        lines.append((label + " " + body).rstrip()[: config.display_width])

    for s in trace.signals:
        vals = s.samples[start:stop]
        nxt = s.samples[stop] if stop < trace.cycles else None
        label = _label(s.name, config.name_width)
        if s.is_clock:
            top, bot = _clock_rows(n, cw)
            row(label, top)
            row(blank, bot)
        elif s.width == 1:
            top, bot = _bit_rows(vals, nxt, cw)
            row(label, top)
            row(blank, bot)
        else:
            top, mid, bot = _bus_rows(vals, nxt, s.width, cw, config.radix)
            row(blank, top)
            row(label, mid)
            row(blank, bot)
    marks = [r - start for r in trace.resets if start <= r < stop and r > 0]
    if marks:
        body = [" "] * (n * cw)
        for m in marks:
            body[m * cw] = "R"
        row(_label("~reset", config.name_width), "".join(body))
    if config.display_height is not None:
        lines = lines[: config.display_height]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# golden files


@dataclass(frozen=True)
class ExpectResult:
    ok: bool
    diff: str = ""
    updated: bool = False

    def __bool__(self) -> bool:
        return self.ok


def update_requested(flag: bool | None = None) -> bool:
    return bool(flag) or os.environ.get(GOLDEN_ENV, "") == "1"


def expect_text(actual: str, path: str | Path, *, update: bool | None = None) -> ExpectResult:
    """Byte-exact comparison of ``actual`` against a golden file.

    In update mode (``update=True`` or ``GOLDEN_UPDATE=1``) the golden is
    rewritten and the check passes.
    """
    path = Path(path)
    if update_requested(update):
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(actual, encoding="utf-8", newline="\n")
        return ExpectResult(True, updated=True)
    if not path.exists():
        raise GoldenMissing(f"golden file {path} is missing; rerun with {GOLDEN_ENV}=1 to create it")
    expected = path.read_text(encoding="utf-8")
    if expected == actual:
        return ExpectResult(True)
    diff = "".join(difflib.unified_diff(
        expected.splitlines(keepends=True), actual.splitlines(keepends=True),
        fromfile=str(path), tofile="actual",
    ))
    return ExpectResult(False, diff)


def expect(trace: WaveTrace, config: RenderConfig | None, path: str | Path, *,
           update: bool | None = None) -> ExpectResult:
    return expect_text(render(trace, config), path, update=update)


# --------------------------------------------------------------------------
# VCD

_ID_FIRST, _ID_BASE = 33, 94


def vcd_identifier(i: int) -> str:
    """Compact printable identifier: ``!``, ``"``, ... then two characters."""
    chars = []
    while True:
        chars.append(chr(_ID_FIRST + i % _ID_BASE))
        i = i // _ID_BASE - 1
        if i < 0:
            break
    return "".join(chars)


def _vcd_value(v: int, width: int, ident: str) -> str:
    if width == 1:
        return f"{v}{ident}"
    return f"b{v:b} {ident}"


def export_vcd(trace: WaveTrace) -> str:
    """VCD text with one 1ns timestep per cycle; the clock is implicit and omitted."""
    sigs = [s for s in trace.signals if not s.is_clock]
    if not sigs:
        raise ValueError("cannot export a trace with no signals")
    ids = [vcd_identifier(i) for i in range(len(sigs))]
    out = ["$timescale 1ns $end", f"$scope module {trace.name} $end"]
    for s, ident in zip(sigs, ids):
        out.append(f"$var wire {s.width} {ident} {s.name} $end")
    out += ["$upscope $end", "$enddefinitions $end"]
    prev: list[int | None] = [None] * len(sigs)
    for t in range(trace.cycles):
        changes = []
        for k, (s, ident) in enumerate(zip(sigs, ids)):
            v = s.samples[t]
            if v != prev[k]:
                changes.append(_vcd_value(v, s.width, ident))
                prev[k] = v
        if changes or t == 0:
            out.append(f"#{t}")
            out.extend(changes)
    out.append(f"#{trace.cycles}")
    return "\n".join(out) + "\n"


def parse_vcd(text: str) -> dict[str, tuple[int, list[int]]]:
    """Read back the subset written by :func:`export_vcd`: name -> (width, samples)."""
    by_id: dict[str, tuple[str, int]] = {}
    order: list[str] = []
    tokens = text.split()
    i = 0
    while i < len(tokens) and tokens[i] != "$enddefinitions":
        if tokens[i] == "$var":
            _kind, width, ident, name = tokens[i + 1: i + 5]
            by_id[ident] = (name, int(width))
            order.append(ident)
            i += 6
        else:
            i += 1
    i += 2
    current: dict[str, int] = {}
    samples: dict[str, list[int]] = {ident: [] for ident in order}
    time = None
    while i < len(tokens):
        tok = tokens[i]
        if tok.startswith("#"):
            t = int(tok[1:])
            if time is not None:
                for _ in range(t - time):
                    for ident in order:
                        samples[ident].append(current[ident])
            time = t
            i += 1
        elif tok.startswith("b"):
            current[tokens[i + 1]] = int(tok[1:], 2)
            i += 2
        else:
            current[tok[1:]] = int(tok[0])
            i += 1
    return {by_id[ident][0]: (by_id[ident][1], samples[ident]) for ident in order}
