"""Registry of example circuits, each paired with a plain software model.

A model is stepped once per clock edge with the same input dict that is
poked into the simulator and returns the values the outputs show during
that cycle (before the edge), then advances its own state. Comparing the
two on seeded random stimulus is the main correctness oracle for the
examples; :func:`run_model_vs_sim` does exactly that.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import random
import types
import typing
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator

from . import signal as S
from .always import Variable, compile, if_, state_machine, when
from .bitvec import BitVec, ceil_log2, mask
from .circuit import Circuit, instantiate
from .cyclesim import Simulator
from .errors import ParameterError, UnknownExample
from .interface import Array, Nested, ScalarType, interface
from .signal import Builder, RegSpec

Inputs = dict[str, int]
_UNIONS = (typing.Union, types.UnionType)


class Model(typing.Protocol):
    def step(self, inputs: Inputs) -> Inputs: ...


@dataclass
class ExampleEntry:
    name: str
    summary: str
    config_type: type
    build: Callable[[Any], Circuit]
    model: Callable[[Any], Model]
    stimulus: Callable[[Any, random.Random], Inputs]
    testbench: Callable[[Any], Iterator[Inputs]] | None = None

    def default_config(self) -> Any:
        return self.config_type()

    def config(self, **overrides: Any) -> Any:
        return dataclasses.replace(self.default_config(), **overrides)

    def circuit(self, config: Any | None = None) -> Circuit:
        return self.build(config if config is not None else self.default_config())

    def stimuli(self, config: Any) -> Iterator[Inputs]:
        """Deterministic default input sequence (used by ``sim`` without a script)."""
        if self.testbench is not None:
            yield from self.testbench(config)
            return
        rng = random.Random(0)
        while True:
            yield self.stimulus(config, rng)

    def schema(self) -> list[tuple[str, str, Any]]:
        hints = typing.get_type_hints(self.config_type)
        return [(f.name, _type_name(hints[f.name]), getattr(self.default_config(), f.name))
                for f in dataclasses.fields(self.config_type)]


def _type_name(t: Any) -> str:
    if typing.get_origin(t) is tuple:
        return "int list"
    if typing.get_origin(t) in _UNIONS:
        inner = [a for a in typing.get_args(t) if a is not type(None)]
        return f"{_type_name(inner[0])} (optional)"
    return getattr(t, "__name__", str(t))


def _rand_inputs(circuit_ports: list[tuple[str, int]], rng: random.Random) -> Inputs:
    return {n: rng.getrandbits(w) for n, w in circuit_ports}


# --------------------------------------------------------------------------
# counter


@dataclass(frozen=True)
class CounterConfig:
    count_to: int = 100
    width: int | None = None

    def __post_init__(self) -> None:
        if self.count_to < 1:
            raise ParameterError("count_to must be >= 1")
        if self.width is not None and self.width < ceil_log2(self.count_to + 1):
            raise ParameterError(f"width {self.width} cannot hold count_to={self.count_to}")

    @property
    def bits(self) -> int:
        return self.width if self.width is not None else max(1, ceil_log2(self.count_to + 1))


def build_counter(cfg: CounterConfig) -> Circuit:
    with Builder():
        clock = S.input_("clock", 1)
        spec = RegSpec(clock)
        w = cfg.bits
        x = S.wire(w)
        x <<= S.reg(spec, S.mux2(x.eq(cfg.count_to), S.zero(w), x + 1))
        return Circuit.create("counter", [clock], {"x": x})


class CounterModel:
    def __init__(self, cfg: CounterConfig) -> None:
        self.n = cfg.count_to
        self.x = 0

    def step(self, inputs: Inputs) -> Inputs:
        out = {"x": self.x}
        self.x = 0 if self.x == self.n else self.x + 1
        return out


# --------------------------------------------------------------------------
# rectangle area and the price scalar


Rectangle = interface("rectangle", length=10, width=6)


@dataclass(frozen=True)
class RectangleConfig:
    pass


def build_rectangle_area(_cfg: RectangleConfig) -> Circuit:
    with Builder():
        clock = S.input_("clock", 1)
        rect = Rectangle.inputs()
        area = S.reg(RegSpec(clock), rect.length * rect.width)
        return Circuit.create("rectangle_area", [clock, *rect.to_flat_list()], {"area": area})


class RectangleModel:
    def __init__(self, _cfg: RectangleConfig) -> None:
        self.area = 0

    def step(self, inputs: Inputs) -> Inputs:
        out = {"area": self.area}
        self.area = inputs["length"] * inputs["width"]
        return out


PriceInUsd = ScalarType("price_in_usd", 32)


@dataclass(frozen=True)
class PriceConfig:
    pass


def cap_price_at_zero(x):
    """Unsigned comparison, so every price passes through unchanged."""
    return PriceInUsd.mux2(PriceInUsd.is_gte_zero(x), x, PriceInUsd.of_int(0))


def build_price_clamp(_cfg: PriceConfig) -> Circuit:
    with Builder():
        a = PriceInUsd.input("price_a")
        b = PriceInUsd.input("price_b")
        outs = {
            "capped": cap_price_at_zero(a).signal,
            "cheapest": PriceInUsd.min(a, b).signal,
            "dearest": PriceInUsd.max(a, b).signal,
        }
        return Circuit.create("price_clamp", [a.signal, b.signal], outs)


class PriceModel:
    def __init__(self, _cfg: PriceConfig) -> None:
        pass

    def step(self, inputs: Inputs) -> Inputs:
        a, b = inputs["price_a"], inputs["price_b"]
        return {"capped": a, "cheapest": min(a, b), "dearest": max(a, b)}


# --------------------------------------------------------------------------
# accumulating adder state machine


class AdderState(enum.Enum):
    IDLE = "Idle"
    ADDING = "Adding"


Control = interface("control", clock=1, clear=1)


@dataclass(frozen=True)
class AdderFsmConfig:
    bits: int = 4
    n_inputs: int = 2

    def __post_init__(self) -> None:
        if self.bits < 1 or self.n_inputs < 1:
            raise ParameterError("bits and n_inputs must be >= 1")


def adder_interface(cfg: AdderFsmConfig):
    return interface("adder_i", control=Nested(Control), inputs=Array(cfg.bits, cfg.n_inputs))


def build_adder_fsm(cfg: AdderFsmConfig) -> Circuit:
    with Builder():
        i = adder_interface(cfg).inputs()
        spec = RegSpec(i.control.clock, clear=i.control.clear)
        sm = state_machine(AdderState, spec)
        output = Variable.reg(spec, cfg.bits)
        inputs = i.inputs
        any_input = S.concat_lsb(inputs)
        compile([
            sm.switch([
                (AdderState.IDLE, [
                    when(any_input.neq(0), [sm.set_next(AdderState.ADDING)]),
                ]),
                (AdderState.ADDING, [
                    if_(any_input.eq(0), [sm.set_next(AdderState.IDLE)], [
                        output.assign(output.value + S.tree(2, lambda xs: S.reduce(S.add, xs), inputs)),
                    ]),
                ]),
            ]),
        ])
        return Circuit.create("adder_fsm", i, {"output_": output.value})


def build_adder_fsm_manual(cfg: AdderFsmConfig) -> Circuit:
    """The same machine with explicit muxes and registers, as a reference."""
    with Builder():
        i = adder_interface(cfg).inputs()
        spec = RegSpec(i.control.clock, clear=i.control.clear)
        inputs = i.inputs
        idle = S.zero(1)
        adding = S.one(1)
        zero_in = S.concat_lsb(inputs).eq(0)
        total = S.reduce(S.add, inputs)
        state = S.wire(1)
        acc = S.wire(cfg.bits)
        is_adding = state.eq(adding)
        state <<= S.reg(spec, S.mux2(is_adding,
                                     S.mux2(zero_in, idle, state),
                                     S.mux2(zero_in, state, adding))).named("state")
        acc <<= S.reg(spec, S.mux2(is_adding & ~zero_in, acc + total, acc))
        return Circuit.create("adder_fsm_manual", i, {"output_": acc})


class AdderFsmModel:
    def __init__(self, cfg: AdderFsmConfig) -> None:
        self.cfg = cfg
        self.adding = False
        self.acc = 0

    def step(self, inputs: Inputs) -> Inputs:
        out = {"output_": self.acc}
        values = [inputs[f"inputs{k}"] for k in range(self.cfg.n_inputs)]
        if inputs.get("clear", 0):
            self.adding, self.acc = False, 0
        elif not self.adding:
            self.adding = any(values)
        elif not any(values):
            self.adding = False
        else:
            self.acc = (self.acc + sum(values)) & mask(self.cfg.bits)
        return out


def adder_stimulus(cfg: AdderFsmConfig, rng: random.Random) -> Inputs:
    quiet = rng.random() < 0.3
    d = {"clear": int(rng.random() < 0.05)}
    for k in range(cfg.n_inputs):
        d[f"inputs{k}"] = 0 if quiet else rng.getrandbits(cfg.bits)
    return d


def adder_testbench(cfg: AdderFsmConfig) -> Iterator[Inputs]:
    """inputs0=1 for a cycle, then inputs1=2 as well for two cycles, then zeros."""
    def step(values: list[int]) -> Inputs:
        d = {"clear": 0}
        for k in range(cfg.n_inputs):
            d[f"inputs{k}"] = values[k] & mask(cfg.bits) if k < len(values) else 0
        return d

    yield step([1, 0])
    yield step([1, 2])
    yield step([1, 2])
    while True:
        yield step([0, 0])


# --------------------------------------------------------------------------
# adders


@dataclass(frozen=True)
class TreeAdderConfig:
    n: int = 4
    bits: int = 3

    def __post_init__(self) -> None:
        if self.n < 1 or self.bits < 1:
            raise ParameterError("n and bits must be >= 1")


def _adder_inputs(cfg: TreeAdderConfig) -> list[S.Signal]:
    return [S.input_(f"x{k}", cfg.bits) for k in range(cfg.n)]


def build_tree_adder(cfg: TreeAdderConfig) -> Circuit:
    with Builder():
        xs = _adder_inputs(cfg)
        return Circuit.create("tree_adder", xs, {"sum": S.tree_op(S.add, xs)})


def build_fold_adder(cfg: TreeAdderConfig) -> Circuit:
    with Builder():
        xs = _adder_inputs(cfg)
        return Circuit.create("fold_adder", xs, {"sum": S.reduce(S.add, xs)})


class SumModel:
    def __init__(self, cfg: TreeAdderConfig) -> None:
        self.cfg = cfg

    def step(self, inputs: Inputs) -> Inputs:
        return {"sum": sum(inputs[f"x{k}"] for k in range(self.cfg.n)) & mask(self.cfg.bits)}


@dataclass(frozen=True)
class BinaryOpConfig:
    width: int = 4


def _binary_op(name: str, f: Callable[[S.Signal, S.Signal], S.Signal]) -> Callable[[BinaryOpConfig], Circuit]:
    def build(cfg: BinaryOpConfig) -> Circuit:
        with Builder():
            a = S.input_("a", cfg.width)
            b = S.input_("b", cfg.width)
            return Circuit.create(name, [a, b], {"y": f(a, b)})
    return build


class BinaryOpModel:
    def __init__(self, cfg: BinaryOpConfig, f: Callable[[int, int], int]) -> None:
        self.w = cfg.width
        self.f = f

    def step(self, inputs: Inputs) -> Inputs:
        return {"y": self.f(inputs["a"], inputs["b"]) & mask(self.w)}


# --------------------------------------------------------------------------
# LFSR


@dataclass(frozen=True)
class LfsrConfig:
    width: int = 7
    taps: tuple[int, ...] = (1, 2, 3)
    seed: int = 1

    def __post_init__(self) -> None:
        if self.width < 2:
            raise ParameterError("width must be >= 2")
        if not self.taps or any(not 0 <= t < self.width for t in self.taps):
            raise ParameterError(f"taps must be bit indices below {self.width}")
        if not 0 <= self.seed < (1 << self.width):
            raise ParameterError(f"seed must fit in {self.width} bits")


def xor_lfsr(spec: RegSpec, width: int, taps: tuple[int, ...]) -> S.Signal:
    def f(x: S.Signal) -> S.Signal:
        input_bit = S.reduce(S.xor_, [x[i] for i in taps]).named("input_bit")
        return S.lsbs(x) @ input_bit
    return S.reg_fb(spec, width, f)


def build_lfsr(cfg: LfsrConfig) -> Circuit:
    with Builder():
        clock = S.input_("clock", 1)
        x = xor_lfsr(RegSpec(clock, initial=cfg.seed), cfg.width, cfg.taps)
        return Circuit.create("lfsr", [clock], {"x": x})


class LfsrModel:
    def __init__(self, cfg: LfsrConfig) -> None:
        self.cfg = cfg
        self.x = cfg.seed

    def step(self, inputs: Inputs) -> Inputs:
        out = {"x": self.x}
        bit = 0
        for t in self.cfg.taps:
            bit ^= (self.x >> t) & 1
        self.x = ((self.x << 1) | bit) & mask(self.cfg.width)
        return out


# --------------------------------------------------------------------------
# ROMs


@dataclass(frozen=True)
class RomSquareConfig:
    address_bits: int = 4


def build_rom_square(cfg: RomSquareConfig) -> Circuit:
    with Builder():
        clock = S.input_("clock", 1)
        addr = S.input_("read_address", cfg.address_bits)
        size = 1 << cfg.address_bits
        w = 2 * cfg.address_bits
        q = S.rom(lambda i: BitVec.of_int(w, i * i), size, addr, RegSpec(clock))
        return Circuit.create("rom_square", [clock, addr], {"q": q})


class RegisteredTableModel:
    def __init__(self, table: list[int]) -> None:
        self.table = table
        self.q = 0

    def step(self, inputs: Inputs) -> Inputs:
        out = {"q": self.q}
        a = inputs["read_address"]
        self.q = self.table[a] if a < len(self.table) else self.table[-1]
        return out


@dataclass(frozen=True)
class SineRomConfig:
    size: int = 256
    scale: int = 1 << 15

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ParameterError("size must be >= 2")


def sine_table(cfg: SineRomConfig) -> list[int]:
    """One period, rounded to integers, as 32-bit two's complement."""
    return [round(math.sin(2 * math.pi * i / cfg.size) * cfg.scale) & mask(32) for i in range(cfg.size)]


def build_sine_rom(cfg: SineRomConfig) -> Circuit:
    table = sine_table(cfg)
    with Builder():
        clock = S.input_("clock", 1)
        addr = S.input_("read_address", max(1, ceil_log2(cfg.size)))
        q = S.rom(lambda i: BitVec(32, table[i]), cfg.size, addr, RegSpec(clock))
        return Circuit.create("sine_rom", [clock, addr], {"q": q})


# --------------------------------------------------------------------------
# RAM


@dataclass(frozen=True)
class RamConfig:
    size: int = 16
    data_bits: int = 8

    def __post_init__(self) -> None:
        if self.size < 1 or self.data_bits < 1:
            raise ParameterError("size and data_bits must be >= 1")


def build_ram(cfg: RamConfig) -> Circuit:
    from .bitvec import address_bits

    aw = address_bits(cfg.size)
    with Builder():
        clock = S.input_("clock", 1)
        we = S.input_("write_enable", 1)
        wa = S.input_("write_address", aw)
        wd = S.input_("write_data", cfg.data_bits)
        ra = S.input_("read_address", aw)
        mem = S.memory(cfg.size, S.WritePort(clock, we, wa, wd))
        mem.signal.named("mem")
        return Circuit.create("ram", [clock, we, wa, wd, ra], {"read_data": mem.read_async(ra)})


class RamModel:
    def __init__(self, cfg: RamConfig) -> None:
        self.mem = [0] * cfg.size

    def step(self, inputs: Inputs) -> Inputs:
        ra = inputs["read_address"]
        out = {"read_data": self.mem[ra] if ra < len(self.mem) else 0}
        wa = inputs["write_address"]
        if inputs["write_enable"] and wa < len(self.mem):
            self.mem[wa] = inputs["write_data"]
        return out


# --------------------------------------------------------------------------
# pipelined stages


@dataclass(frozen=True)
class PipelineConfig:
    x_bits: int = 16


def build_pipelined_square_plus_one(cfg: PipelineConfig) -> Circuit:
    stage0 = interface("stage0", x=cfg.x_bits)
    stage1 = interface("stage1", y=2 * cfg.x_bits)
    stage2 = interface("stage2", z=2 * cfg.x_bits)
    with Builder():
        clock = S.input_("clock", 1)
        spec = RegSpec(clock)
        s0 = stage0.inputs()
        s1 = stage1.of_flat_list([s0.x * s0.x]).map(lambda s: S.reg(spec, s))
        s2 = stage2.of_flat_list([s1.y + 1]).map(lambda s: S.reg(spec, s))
        s1.y.named("y")
        return Circuit.create("pipelined_square_plus_one", [clock, s0.x], s2)


class PipelineModel:
    def __init__(self, cfg: PipelineConfig) -> None:
        self.w = 2 * cfg.x_bits
        self.y = 0
        self.z = 0

    def step(self, inputs: Inputs) -> Inputs:
        out = {"z": self.z}
        self.z = (self.y + 1) & mask(self.w)
        self.y = inputs["x"] * inputs["x"]
        return out


# --------------------------------------------------------------------------
# registered stream feeding a sub-module


@dataclass(frozen=True)
class StreamConfig:
    data_bits: int = 8


def stream_interface(cfg: StreamConfig):
    return interface("stream", tvalid=1, tdata=cfg.data_bits, tlast=1)


def build_foo(cfg: StreamConfig) -> Circuit:
    with Builder():
        s = stream_interface(cfg).inputs()
        data = S.mux2(s.tvalid, s.tdata, S.zero(cfg.data_bits))
        return Circuit.create("foo", s, {"data": data, "last": s.tvalid & s.tlast})


def build_stream_register_stage(cfg: StreamConfig) -> Circuit:
    foo = build_foo(cfg)
    top = interface("top", my_stream=Nested(stream_interface(cfg), prefix="my_stream_"))
    with Builder():
        clock = S.input_("clock", 1)
        i = top.inputs()
        spec = RegSpec(clock)
        regd = i.my_stream.map(lambda s: S.reg(spec, s))
        for (fname, _), r in zip(stream_interface(cfg).port_widths(), regd.to_flat_list()):
            r.named(f"my_stream_{fname}_r")
        outs = instantiate(foo, "foo", regd)
        return Circuit.create("stream_register_stage", [clock, *i.to_flat_list()], outs)


class StreamModel:
    def __init__(self, cfg: StreamConfig) -> None:
        self.r = {"tvalid": 0, "tdata": 0, "tlast": 0}

    def step(self, inputs: Inputs) -> Inputs:
        r = self.r
        out = {"data": r["tdata"] if r["tvalid"] else 0, "last": r["tvalid"] & r["tlast"]}
        self.r = {k: inputs[f"my_stream_{k}"] for k in r}
        return out


# --------------------------------------------------------------------------
# elaboration-time modular inverse


@dataclass(frozen=True)
class InverseConfig:
    modulus: int = 97
    c: int = 5

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise ParameterError("modulus must be >= 2")
        if math.gcd(self.c, self.modulus) != 1:
            raise ParameterError(f"c={self.c} has no inverse modulo {self.modulus}")


def elaboration_inverse(c: int, modulus: int) -> int:
    """``c`` to the power -1 mod ``modulus``, computed while the circuit is built."""
    return pow(c, -1, modulus)


def build_inverse_constant(cfg: InverseConfig) -> Circuit:
    w = max(1, ceil_log2(cfg.modulus))
    c_inv = elaboration_inverse(cfg.c % cfg.modulus, cfg.modulus)
    with Builder():
        x = S.input_("x", w)
        k = S.of_int(w, c_inv).named("c_inv_const")
        outs = {"c_inv": k, "scaled": x * k}
        return Circuit.create("inverse_constant", [x], outs)


class InverseModel:
    def __init__(self, cfg: InverseConfig) -> None:
        self.k = _egcd_inverse(cfg.c % cfg.modulus, cfg.modulus)

    def step(self, inputs: Inputs) -> Inputs:
        return {"c_inv": self.k, "scaled": inputs["x"] * self.k}


def _egcd_inverse(a: int, m: int) -> int:
    old_r, r, old_s, s = a, m, 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    return old_s % m


# --------------------------------------------------------------------------
# registry


def _cached_stimulus(build: Callable[[Any], Circuit]) -> Callable[[Any, random.Random], Inputs]:
    cache: dict[Any, list[tuple[str, int]]] = {}

    def stim(cfg: Any, rng: random.Random) -> Inputs:
        if cfg not in cache:
            c = build(cfg)
            clocks = c.flatten().clock_uids()
            cache[cfg] = [(p.name, p.width) for p in c.inputs if p.uid not in clocks]
        return _rand_inputs(cache[cfg], rng)
    return stim


def _ram_stimulus(cfg: RamConfig, rng: random.Random) -> Inputs:
    from .bitvec import address_bits

    aw = address_bits(cfg.size)
    return {"write_enable": rng.getrandbits(1), "write_address": rng.getrandbits(aw),
            "write_data": rng.getrandbits(cfg.data_bits), "read_address": rng.getrandbits(aw)}


def _stream_stimulus(cfg: StreamConfig, rng: random.Random) -> Inputs:
    return {"my_stream_tvalid": rng.getrandbits(1), "my_stream_tdata": rng.getrandbits(cfg.data_bits),
            "my_stream_tlast": rng.getrandbits(1)}


def _inverse_stimulus(cfg: InverseConfig, rng: random.Random) -> Inputs:
    return {"x": rng.getrandbits(max(1, ceil_log2(cfg.modulus)))}


def _no_inputs(_cfg: Any, _rng: random.Random) -> Inputs:
    return {}


_REGISTRY: list[ExampleEntry] = [
    ExampleEntry("counter", "wrap-around counter to count_to", CounterConfig, build_counter,
                 CounterModel, _no_inputs),
    ExampleEntry("rectangle_area", "registered length * width of a rectangle bundle",
                 RectangleConfig, build_rectangle_area, RectangleModel,
                 lambda cfg, rng: {"length": rng.getrandbits(10), "width": rng.getrandbits(6)}),
    ExampleEntry("price_clamp", "price scalar type: cap at zero, min and max", PriceConfig,
                 build_price_clamp, PriceModel,
                 lambda cfg, rng: {"price_a": rng.getrandbits(32), "price_b": rng.getrandbits(32)}),
    ExampleEntry("adder_fsm", "accumulating adder state machine (always DSL)", AdderFsmConfig,
                 build_adder_fsm, AdderFsmModel, adder_stimulus, adder_testbench),
    ExampleEntry("adder_fsm_manual", "the adder state machine with explicit muxes and registers",
                 AdderFsmConfig, build_adder_fsm_manual, AdderFsmModel, adder_stimulus,
                 adder_testbench),
    ExampleEntry("tree_adder", "balanced tree of adders", TreeAdderConfig, build_tree_adder,
                 SumModel, _cached_stimulus(build_tree_adder)),
    ExampleEntry("fold_adder", "linear chain of adders", TreeAdderConfig, build_fold_adder,
                 SumModel, _cached_stimulus(build_fold_adder)),
    ExampleEntry("adder", "a + b", BinaryOpConfig, _binary_op("adder", S.add),
                 lambda cfg: BinaryOpModel(cfg, lambda a, b: a + b),
                 _cached_stimulus(_binary_op("adder", S.add))),
    ExampleEntry("adder_swapped", "b + a", BinaryOpConfig, _binary_op("adder_swapped", lambda a, b: b + a),
                 lambda cfg: BinaryOpModel(cfg, lambda a, b: b + a),
                 _cached_stimulus(_binary_op("adder", S.add))),
    ExampleEntry("subtractor", "a - b", BinaryOpConfig, _binary_op("subtractor", S.sub),
                 lambda cfg: BinaryOpModel(cfg, lambda a, b: a - b),
                 _cached_stimulus(_binary_op("subtractor", S.sub))),
    ExampleEntry("lfsr", "xor linear feedback shift register", LfsrConfig, build_lfsr, LfsrModel,
                 _no_inputs),
    ExampleEntry("rom_square", "registered ROM of i*i", RomSquareConfig, build_rom_square,
                 lambda cfg: RegisteredTableModel([i * i for i in range(1 << cfg.address_bits)]),
                 lambda cfg, rng: {"read_address": rng.getrandbits(cfg.address_bits)}),
    ExampleEntry("sine_rom", "registered ROM of one sine period", SineRomConfig, build_sine_rom,
                 lambda cfg: RegisteredTableModel(sine_table(cfg)),
                 lambda cfg, rng: {"read_address": rng.getrandbits(max(1, ceil_log2(cfg.size)))}),
    ExampleEntry("ram", "one write port, one asynchronous read port", RamConfig, build_ram,
                 RamModel, _ram_stimulus),
    ExampleEntry("pipelined_square_plus_one", "x*x then +1, one register per stage",
                 PipelineConfig, build_pipelined_square_plus_one, PipelineModel,
                 lambda cfg, rng: {"x": rng.getrandbits(cfg.x_bits)}),
    ExampleEntry("stream_register_stage", "registered stream bundle feeding sub-module foo",
                 StreamConfig, build_stream_register_stage, StreamModel, _stream_stimulus),
    ExampleEntry("inverse_constant", "modular inverse computed at elaboration time",
                 InverseConfig, build_inverse_constant, InverseModel, _inverse_stimulus),
]


def registry() -> list[ExampleEntry]:
    return list(_REGISTRY)


def lookup(name: str) -> ExampleEntry:
    for e in _REGISTRY:
        if e.name == name:
            return e
    raise UnknownExample(f"unknown example {name!r}; choose from {[e.name for e in _REGISTRY]}")


def parse_overrides(entry: ExampleEntry, items: list[str]) -> Any:
    """Turn ``key=value`` strings into a validated config for ``entry``."""
    hints = typing.get_type_hints(entry.config_type)
    values: dict[str, Any] = {}
    for item in items:
        if "=" not in item:
            raise ParameterError(f"expected key=value, got {item!r}")
        key, raw = item.split("=", 1)
        if key not in hints:
            raise ParameterError(f"{entry.name} has no parameter {key!r}")
        values[key] = _parse_value(key, raw, hints[key])
    try:
        return entry.config(**values)
    except (TypeError, ValueError) as exc:
        raise ParameterError(str(exc)) from exc


def _parse_value(key: str, raw: str, t: Any) -> Any:
    origin = typing.get_origin(t)
    try:
        if origin in _UNIONS:
            if raw.lower() in ("none", ""):
                return None
            inner = [a for a in typing.get_args(t) if a is not type(None)][0]
            return _parse_value(key, raw, inner)
        if origin is tuple:
            return tuple(int(x, 0) for x in raw.split(",") if x)
        if t is bool:
            if raw.lower() in ("1", "true", "yes"):
                return True
            if raw.lower() in ("0", "false", "no"):
                return False
            raise ValueError(raw)
        if t is int:
            return int(raw, 0)
        return t(raw)
    except ValueError:
        raise ParameterError(f"{key}: cannot read {raw!r} as {_type_name(t)}") from None


# --------------------------------------------------------------------------
# model vs simulation


@dataclass
class Mismatch:
    cycle: int
    output: str
    model: int
    sim: int


@dataclass
class ModelReport:
    example: str
    cycles: int
    mismatches: list[Mismatch] = field(default_factory=list)
    stimulus: list[Inputs] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def poke_script(self) -> str:
        """Stimulus up to the first mismatch, replayable with ``hwdsl sim --script``."""
        stop = self.mismatches[0].cycle + 1 if self.mismatches else len(self.stimulus)
        lines = []
        for step in self.stimulus[:stop]:
            lines += [f"poke {k} {v}" for k, v in step.items()]
            lines.append("cycle")
        return "\n".join(lines) + "\n"


def run_model_vs_sim(entry: ExampleEntry | str, n_cycles: int = 1000, seed: int = 0,
                     config: Any | None = None, *, stop_at_first: bool = True) -> ModelReport:
    """Drive model and simulator with the same seeded stimulus; compare every output."""
    if isinstance(entry, str):
        entry = lookup(entry)
    cfg = config if config is not None else entry.default_config()
    sim = Simulator(entry.build(cfg))
    model = entry.model(cfg)
    rng = random.Random(seed)
    report = ModelReport(entry.name, n_cycles)
    outs = [p.name for p in sim.flat.outputs]
    for t in range(n_cycles):
        inputs = entry.stimulus(cfg, rng)
        report.stimulus.append(inputs)
        sim.poke_all(inputs)
        sim.cycle()
        expected = model.step(inputs)
        for name in outs:
            got = sim.peek(name, before_edge=True).to_int()
            if got != expected[name]:
                report.mismatches.append(Mismatch(t, name, expected[name], got))
        if report.mismatches and stop_at_first:
            break
    return report


__all__ = [
    "ExampleEntry", "Model", "ModelReport", "Mismatch", "registry", "lookup", "parse_overrides",
    "run_model_vs_sim", "elaboration_inverse", "xor_lfsr", "cap_price_at_zero", "sine_table",
    "AdderState", "adder_interface",
]
