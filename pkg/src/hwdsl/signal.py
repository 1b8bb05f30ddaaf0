"""Signal-graph IR and the combinators that build it.

Every combinator appends one node to a :class:`Builder` and returns a
:class:`Signal` handle. Widths are checked when the node is created, so a
graph that exists is always well-typed; the only back edges are wire drivers.

    with Builder():
        clock = input_("clock", 1)
        spec = RegSpec(clock)
        x = wire(7)
        x <<= reg(spec, mux2(x.eq_int(100), zero(7), x + 1))
"""

from __future__ import annotations

import contextvars
import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .bitvec import BitVec, address_bits, mask
from .errors import (
    CrossBuilderError,
    EmptyOperands,
    IndexRangeError,
    InvalidWidth,
    MultipleDrivers,
    NoActiveBuilder,
    NotAWire,
    WidthError,
)


class Op(enum.Enum):
    INPUT = "input"
    CONST = "const"
    WIRE = "wire"
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    MULS = "mul_signed"
    AND = "and"
    OR = "or"
    XOR = "xor"
    NOT = "not"
    EQ = "eq"
    LT = "lt"
    LTS = "lt_signed"
    MUX = "mux"
    CAT = "cat"
    SELECT = "select"
    REG = "reg"
    MEM = "memory"
    MEM_READ = "mem_read"
    INST_OUT = "instance_output"


SEQUENTIAL_OPS = frozenset({Op.REG, Op.MEM})
SOURCE_OPS = frozenset({Op.INPUT, Op.CONST, Op.REG, Op.MEM})


@dataclass(frozen=True)
class RegInfo:
    """Resolved register configuration stored on a REG node (uids, not Signals)."""

    clock: int
    clear: int | None
    enable: int | None
    clear_to: BitVec
    initial: BitVec


@dataclass(frozen=True)
class InstanceRef:
    index: int
    port: str


@dataclass(slots=True)
class Node:
    uid: int
    op: Op
    width: int
    args: tuple[int, ...] = ()
    value: BitVec | None = None
    port_name: str | None = None
    lo: int = 0
    reg: RegInfo | None = None
    size: int = 0
    inst: InstanceRef | None = None
    comb_args: tuple[int, ...] = ()
    names: list[str] = field(default_factory=list)

    @property
    def name(self) -> str | None:
        if self.port_name is not None:
            return self.port_name
        return self.names[0] if self.names else None

    def comb_deps(self) -> tuple[int, ...]:
        """Operands that must be evaluated before this node within one cycle."""
        op = self.op
        if op in SOURCE_OPS:
            return ()
        if op is Op.MEM_READ:
            return self.args[1:]
        if op is Op.INST_OUT:
            return self.comb_args
        return self.args


@dataclass
class Instance:
    name: str
    circuit: Any
    inputs: dict[str, int]
    outputs: dict[str, int] = field(default_factory=dict)


_active: contextvars.ContextVar[tuple[Builder, ...]] = contextvars.ContextVar(
    "hwdsl_builders", default=()
)


class Builder:
    """Append-only node store. Use as a context manager to make it current."""

    def __init__(self) -> None:
        self.nodes: list[Node] = []
        self.instances: list[Instance] = []
        self._token: contextvars.Token | None = None

    def __enter__(self) -> Builder:
        self._token = _active.set(_active.get() + (self,))
        return self

    def __exit__(self, *exc: object) -> None:
        assert self._token is not None
        _active.reset(self._token)
        self._token = None

    @staticmethod
    def current() -> Builder:
        stack = _active.get()
        if not stack:
            raise NoActiveBuilder("no active Builder; use `with Builder(): ...`")
        return stack[-1]

    def node(self, uid: int) -> Node:
        return self.nodes[uid]

    def add(self, op: Op, width: int, args: Sequence[int] = (), **kw: Any) -> Signal:
        if not isinstance(width, int) or width < 1:
            raise InvalidWidth(f"{op.value}: width must be >= 1, got {width!r}")
        uid = len(self.nodes)
        for a in args:
            assert 0 <= a < uid, "operands must precede the node"
        self.nodes.append(Node(uid, op, width, tuple(args), **kw))
        return Signal(self, uid)

    def input(self, name: str, width: int) -> Signal:
        if not name:
            raise ValueError("input name must be non-empty")
        return self.add(Op.INPUT, width, port_name=name)

    def const(self, value: BitVec) -> Signal:
        return self.add(Op.CONST, value.width, value=value)

    def wire(self, width: int) -> Signal:
        return self.add(Op.WIRE, width)


class Signal:
    """Handle to one node of a builder's graph."""

    __slots__ = ("builder", "uid")

    def __init__(self, builder: Builder, uid: int) -> None:
        self.builder = builder
        self.uid = uid

    @property
    def node(self) -> Node:
        return self.builder.nodes[self.uid]

    @property
    def width(self) -> int:
        return self.builder.nodes[self.uid].width

    @property
    def op(self) -> Op:
        return self.node.op

    @property
    def name(self) -> str | None:
        return self.node.name

    def __repr__(self) -> str:
        label = self.name or f"_{self.uid}"
        return f"<Signal {label} {self.op.value} w={self.width}>"

    def __bool__(self) -> bool:
        raise TypeError("a Signal has no truth value at elaboration time; use mux2")

    def __len__(self) -> int:
        return self.width

    def named(self, name_: str) -> Signal:
        return name(self, name_)

    # wire driving: `w <<= driver`
    def __ilshift__(self, driver: Signal) -> Signal:
        assign(self, driver)
        return self

    # arithmetic / logic; ints are sized to this signal's width
    def __add__(self, other: Signal | int) -> Signal:
        return add(self, other)

    def __radd__(self, other: int) -> Signal:
        return add(self, other)

    def __sub__(self, other: Signal | int) -> Signal:
        return sub(self, other)

    def __rsub__(self, other: int) -> Signal:
        return sub(_lift(other, self), self)

    def __mul__(self, other: Signal | int) -> Signal:
        return mul(self, other)

    def __rmul__(self, other: int) -> Signal:
        return mul(_lift(other, self), self)

    def __and__(self, other: Signal | int) -> Signal:
        return and_(self, other)

    __rand__ = __and__

    def __or__(self, other: Signal | int) -> Signal:
        return or_(self, other)

    __ror__ = __or__

    def __xor__(self, other: Signal | int) -> Signal:
        return xor_(self, other)

    __rxor__ = __xor__

    def __invert__(self) -> Signal:
        return not_(self)

    def __matmul__(self, other: Signal) -> Signal:
        return cat(self, other)

    def __getitem__(self, i: int) -> Signal:
        if not isinstance(i, int):
            raise TypeError("index with an int; use .select(hi, lo) for ranges")
        return bit(self, i)

    def eq(self, other: Signal | int) -> Signal:
        return eq(self, other)

    def neq(self, other: Signal | int) -> Signal:
        return neq(self, other)

    def lt(self, other: Signal | int) -> Signal:
        return lt(self, other)

    def gt(self, other: Signal | int) -> Signal:
        return gt(self, other)

    def lte(self, other: Signal | int) -> Signal:
        return lte(self, other)

    def gte(self, other: Signal | int) -> Signal:
        return gte(self, other)

    def slt(self, other: Signal | int) -> Signal:
        return slt(self, other)

    def sgt(self, other: Signal | int) -> Signal:
        return sgt(self, other)

    def slte(self, other: Signal | int) -> Signal:
        return slte(self, other)

    def sgte(self, other: Signal | int) -> Signal:
        return sgte(self, other)

    # Spellings that make an integer right operand explicit
    eq_int = eq
    neq_int = neq
    gt_int = gt
    gte_int = gte
    lt_int = lt
    lte_int = lte
    add_int = __add__
    sub_int = __sub__

    def select(self, hi: int, lo: int) -> Signal:
        return select(self, hi, lo)

    def bit(self, i: int) -> Signal:
        return bit(self, i)

    def lsbs(self) -> Signal:
        return lsbs(self)

    def msbs(self) -> Signal:
        return msbs(self)

    def msb(self) -> Signal:
        return msb(self)

    def lsb(self) -> Signal:
        return bit(self, 0)

    def uresize(self, width: int) -> Signal:
        return uresize(self, width)

    def sresize(self, width: int) -> Signal:
        return sresize(self, width)

    def bits(self) -> list[Signal]:
        """Single-bit selects, least significant first."""
        return bits_lsb_first(self)


# --------------------------------------------------------------------------
# helpers


def _builder_of(*signals: Signal) -> Builder:
    b = signals[0].builder
    for s in signals[1:]:
        if s.builder is not b:
            raise CrossBuilderError("signals from different builders cannot be combined")
    return b


def _check_signal(x: object, what: str) -> Signal:
    if not isinstance(x, Signal):
        raise TypeError(f"{what}: expected Signal, got {type(x).__name__}")
    return x


def fits(value: int, width: int) -> bool:
    """Literal fits ``width`` bits as unsigned or two's complement."""
    return -(1 << (width - 1)) <= value < (1 << width)


def _lift(x: Signal | int | BitVec, like: Signal) -> Signal:
    if isinstance(x, Signal):
        return x
    if isinstance(x, BitVec):
        return like.builder.const(x)
    if isinstance(x, int) and not isinstance(x, bool):
        if not fits(x, like.width):
            raise WidthError(f"literal {x} does not fit in {like.width} bits")
        return like.builder.const(BitVec.of_int(like.width, x))
    raise TypeError(f"cannot use {type(x).__name__} as a signal operand")


def _binary(op: Op, a: Signal | int, b: Signal | int, *, out_width: int | None = None) -> Signal:
    if not isinstance(a, Signal):
        if not isinstance(b, Signal):
            raise TypeError(f"{op.value}: at least one operand must be a Signal")
        a = _lift(a, b)
    b = _lift(b, a)
    builder = _builder_of(a, b)
    if op not in (Op.MUL, Op.MULS) and a.width != b.width:
        raise WidthError(f"{op.value}: operand widths differ ({a.width} vs {b.width})")
    if out_width is None:
        out_width = a.width
    return builder.add(op, out_width, (a.uid, b.uid))


# --------------------------------------------------------------------------
# leaves


def input_(name_: str, width: int) -> Signal:
    return Builder.current().input(name_, width)


def const(value: BitVec) -> Signal:
    if not isinstance(value, BitVec):
        raise TypeError("const expects a BitVec; use of_int(width, v) for integers")
    return Builder.current().const(value)


def of_int(width: int, v: int) -> Signal:
    return const(BitVec.of_int(width, v))


def zero(width: int) -> Signal:
    return of_int(width, 0)


def one(width: int) -> Signal:
    return of_int(width, 1)


def ones(width: int) -> Signal:
    return of_int(width, -1)


def vdd() -> Signal:
    return of_int(1, 1)


def gnd() -> Signal:
    return of_int(1, 0)


def wire(width: int) -> Signal:
    return Builder.current().wire(width)


def assign(target: Signal, driver: Signal) -> None:
    """Give a wire its single driver."""
    _check_signal(target, "assign")
    _check_signal(driver, "assign")
    _builder_of(target, driver)
    node = target.node
    if node.op is not Op.WIRE:
        raise NotAWire(f"cannot assign to a {node.op.value} node (_{target.uid})")
    if node.args:
        raise MultipleDrivers(target.uid, node.name)
    if node.width != driver.width:
        raise WidthError(f"assign: wire width {node.width} driven by width {driver.width}")
    node.args = (driver.uid,)


def name(signal: Signal, name_: str) -> Signal:
    """Attach a naming hint; semantics are unchanged."""
    _check_signal(signal, "name")
    if not isinstance(name_, str) or not name_:
        raise ValueError("signal names must be non-empty strings")
    signal.node.names.append(name_)
    return signal


# --------------------------------------------------------------------------
# operators


def add(a: Signal | int, b: Signal | int) -> Signal:
    return _binary(Op.ADD, a, b)


def sub(a: Signal | int, b: Signal | int) -> Signal:
    return _binary(Op.SUB, a, b)


def mul(a: Signal, b: Signal | int) -> Signal:
    if isinstance(a, Signal) and not isinstance(b, Signal):
        b = _lift(b, a)
    _check_signal(a, "mul")
    return _binary(Op.MUL, a, b, out_width=a.width + b.width)


def mul_signed(a: Signal, b: Signal | int) -> Signal:
    if isinstance(a, Signal) and not isinstance(b, Signal):
        b = _lift(b, a)
    _check_signal(a, "mul_signed")
    return _binary(Op.MULS, a, b, out_width=a.width + b.width)


def and_(a: Signal | int, b: Signal | int) -> Signal:
    return _binary(Op.AND, a, b)


def or_(a: Signal | int, b: Signal | int) -> Signal:
    return _binary(Op.OR, a, b)


def xor_(a: Signal | int, b: Signal | int) -> Signal:
    return _binary(Op.XOR, a, b)


def not_(a: Signal) -> Signal:
    _check_signal(a, "not")
    return a.builder.add(Op.NOT, a.width, (a.uid,))


def eq(a: Signal | int, b: Signal | int) -> Signal:
    return _binary(Op.EQ, a, b, out_width=1)


def neq(a: Signal | int, b: Signal | int) -> Signal:
    return not_(eq(a, b))


def lt(a: Signal | int, b: Signal | int) -> Signal:
    return _binary(Op.LT, a, b, out_width=1)


def gt(a: Signal | int, b: Signal | int) -> Signal:
    if not isinstance(b, Signal):
        b = _lift(b, a)
    return lt(b, a)


def lte(a: Signal | int, b: Signal | int) -> Signal:
    return not_(gt(a, b))


def gte(a: Signal | int, b: Signal | int) -> Signal:
    return not_(lt(a, b))


def slt(a: Signal | int, b: Signal | int) -> Signal:
    return _binary(Op.LTS, a, b, out_width=1)


def sgt(a: Signal | int, b: Signal | int) -> Signal:
    if not isinstance(b, Signal):
        b = _lift(b, a)
    return slt(b, a)


def slte(a: Signal | int, b: Signal | int) -> Signal:
    return not_(sgt(a, b))


def sgte(a: Signal | int, b: Signal | int) -> Signal:
    return not_(slt(a, b))


# --------------------------------------------------------------------------
# structure


def select(a: Signal, hi: int, lo: int) -> Signal:
    _check_signal(a, "select")
    if not 0 <= lo <= hi < a.width:
        raise IndexRangeError(f"select [{hi}:{lo}] out of range for width {a.width}")
    if lo == 0 and hi == a.width - 1:
        return a
    return a.builder.add(Op.SELECT, hi - lo + 1, (a.uid,), lo=lo)


def bit(a: Signal, i: int) -> Signal:
    return select(a, i, i)


def lsbs(a: Signal) -> Signal:
    return select(a, a.width - 2, 0)


def msbs(a: Signal) -> Signal:
    return select(a, a.width - 1, 1)


def msb(a: Signal) -> Signal:
    return bit(a, a.width - 1)


def bits_lsb_first(a: Signal) -> list[Signal]:
    return [bit(a, i) for i in range(a.width)]


def concat_msb(parts: Sequence[Signal]) -> Signal:
    if not parts:
        raise EmptyOperands("concat of an empty list")
    for p in parts:
        _check_signal(p, "concat")
    builder = _builder_of(*parts)
    if len(parts) == 1:
        return parts[0]
    return builder.add(Op.CAT, sum(p.width for p in parts), tuple(p.uid for p in parts))


def concat_lsb(parts: Sequence[Signal]) -> Signal:
    return concat_msb(list(reversed(parts)))


def cat(a: Signal, b: Signal) -> Signal:
    """``a`` lands in the most significant bits."""
    return concat_msb([a, b])


def repeat(a: Signal, n: int) -> Signal:
    if n < 1:
        raise InvalidWidth(f"repeat count must be >= 1, got {n}")
    return concat_msb([a] * n)


def uresize(a: Signal, width: int) -> Signal:
    _check_signal(a, "uresize")
    if width < 1:
        raise InvalidWidth(f"uresize to width {width}")
    if width == a.width:
        return a
    if width < a.width:
        return select(a, width - 1, 0)
    return cat(a.builder.const(BitVec.zero(width - a.width)), a)


def sresize(a: Signal, width: int) -> Signal:
    _check_signal(a, "sresize")
    if width < 1:
        raise InvalidWidth(f"sresize to width {width}")
    if width <= a.width:
        return uresize(a, width)
    return cat(repeat(msb(a), width - a.width), a)


def reduce_or(a: Signal) -> Signal:
    """1-bit OR of every bit of ``a``."""
    return tree_op(or_, bits_lsb_first(a)) if a.width > 1 else a


def reduce_and(a: Signal) -> Signal:
    return tree_op(and_, bits_lsb_first(a)) if a.width > 1 else a


# --------------------------------------------------------------------------
# multiplexers


def mux(sel: Signal, cases: Sequence[Signal | int]) -> Signal:
    """Index ``cases`` by unsigned ``sel``; out-of-range selects pick the last case."""
    _check_signal(sel, "mux select")
    cases = list(cases)
    if len(cases) < 2:
        raise EmptyOperands(f"mux needs at least 2 cases, got {len(cases)}")
    template = next((c for c in cases if isinstance(c, Signal)), None)
    if template is None:
        raise TypeError("mux needs at least one Signal case to infer the width")
    cases = [_lift(c, template) for c in cases]
    if len(cases) > (1 << sel.width):
        raise WidthError(f"mux: {len(cases)} cases cannot be addressed by a {sel.width}-bit select")
    widths = {c.width for c in cases}
    if len(widths) != 1:
        raise WidthError(f"mux: case widths differ {sorted(widths)}")
    builder = _builder_of(sel, *cases)
    return builder.add(Op.MUX, template.width, (sel.uid, *(c.uid for c in cases)))


def mux2(sel: Signal, on_true: Signal | int, on_false: Signal | int) -> Signal:
    _check_signal(sel, "mux2 select")
    if sel.width != 1:
        raise WidthError(f"mux2 select must be 1 bit, got {sel.width}")
    return mux(sel, [on_false, on_true])


# --------------------------------------------------------------------------
# registers


@dataclass
class RegSpec:
    """Clock/clear/enable configuration shared by registers.

    ``clear`` is synchronous and wins over ``enable``. ``clear_to`` and
    ``initial`` default to zero.
    """

    clock: Signal
    clear: Signal | None = None
    clear_to: BitVec | int | None = None
    enable: Signal | None = None
    initial: BitVec | int | None = None

    def with_enable(self, enable: Signal) -> RegSpec:
        return RegSpec(self.clock, self.clear, self.clear_to, enable, self.initial)

    def with_initial(self, initial: BitVec | int) -> RegSpec:
        return RegSpec(self.clock, self.clear, self.clear_to, self.enable, initial)


def _resolve_value(v: BitVec | int | None, width: int, what: str) -> BitVec:
    if v is None:
        return BitVec.zero(width)
    if isinstance(v, BitVec):
        if v.width != width:
            raise WidthError(f"register {what} has width {v.width}, register is {width} bits")
        return v
    if not fits(v, width):
        raise WidthError(f"register {what} {v} does not fit in {width} bits")
    return BitVec.of_int(width, v)


def _one_bit(s: Signal | None, what: str) -> None:
    if s is not None:
        _check_signal(s, what)
        if s.width != 1:
            raise WidthError(f"{what} must be 1 bit, got {s.width}")


def reg(spec: RegSpec, d: Signal, *, enable: Signal | None = None) -> Signal:
    _check_signal(d, "reg")
    enable = enable if enable is not None else spec.enable
    _one_bit(spec.clock, "clock")
    _one_bit(spec.clear, "clear")
    _one_bit(enable, "enable")
    present = [s for s in (spec.clock, spec.clear, enable) if s is not None]
    builder = _builder_of(d, *present)
    info = RegInfo(
        clock=spec.clock.uid,
        clear=spec.clear.uid if spec.clear is not None else None,
        enable=enable.uid if enable is not None else None,
        clear_to=_resolve_value(spec.clear_to, d.width, "clear_to"),
        initial=_resolve_value(spec.initial, d.width, "initial"),
    )
    args = (d.uid, *(s.uid for s in present))
    return builder.add(Op.REG, d.width, args, reg=info)


def reg_fb(spec: RegSpec, width: int, f: Callable[[Signal], Signal], *,
           enable: Signal | None = None) -> Signal:
    """Register whose next value is ``f`` applied to its own output."""
    w = spec.clock.builder.wire(width)
    d = f(w)
    _check_signal(d, "reg_fb")
    if d.width != width:
        raise WidthError(f"reg_fb: f returned width {d.width}, expected {width}")
    q = reg(spec, d, enable=enable)
    assign(w, q)
    return q


def pipeline(spec: RegSpec, d: Signal, n: int) -> Signal:
    for _ in range(n):
        d = reg(spec, d)
    return d


# --------------------------------------------------------------------------
# memories


@dataclass
class WritePort:
    clock: Signal
    enable: Signal
    address: Signal
    data: Signal


class Memory:
    """A RAM with one synchronous write port and any number of read ports."""

    def __init__(self, signal: Signal, size: int) -> None:
        self.signal = signal
        self.size = size

    @property
    def width(self) -> int:
        return self.signal.width

    @property
    def address_width(self) -> int:
        return address_bits(self.size)

    def read_async(self, address: Signal) -> Signal:
        _check_signal(address, "read address")
        if address.width != self.address_width:
            raise WidthError(
                f"read address is {address.width} bits, memory of {self.size} needs {self.address_width}"
            )
        builder = _builder_of(self.signal, address)
        return builder.add(Op.MEM_READ, self.width, (self.signal.uid, address.uid))

    def read_sync(self, spec: RegSpec, address: Signal) -> Signal:
        return reg(spec, self.read_async(address))


def memory(size: int, write: WritePort) -> Memory:
    if size < 1:
        raise ValueError(f"memory size must be >= 1, got {size}")
    _one_bit(write.clock, "memory write clock")
    _one_bit(write.enable, "memory write enable")
    _check_signal(write.address, "memory write address")
    _check_signal(write.data, "memory write data")
    if write.address.width != address_bits(size):
        raise WidthError(
            f"write address is {write.address.width} bits, memory of {size} needs {address_bits(size)}"
        )
    builder = _builder_of(write.clock, write.enable, write.address, write.data)
    args = (write.clock.uid, write.enable.uid, write.address.uid, write.data.uid)
    sig = builder.add(Op.MEM, write.data.width, args, size=size)
    return Memory(sig, size)


def rom(f: Callable[[int], BitVec], size: int, read_address: Signal, spec: RegSpec) -> Signal:
    """Registered lookup table ``f(read_address)``: one cycle of latency."""
    if size < 1:
        raise ValueError(f"rom size must be >= 1, got {size}")
    values = [f(i) for i in range(size)]
    if len({v.width for v in values}) != 1:
        raise WidthError("rom: f returned values of differing widths")
    builder = _builder_of(read_address, spec.clock)
    table = [builder.const(v) for v in values]
    if size == 1:
        return reg(spec, table[0])
    return reg(spec, mux(read_address, table))


# --------------------------------------------------------------------------
# reductions


def reduce(f: Callable[[Signal, Signal], Signal], xs: Iterable[Signal]) -> Signal:
    """Left fold; raises on an empty list."""
    xs = list(xs)
    if not xs:
        raise EmptyOperands("reduce of an empty list")
    acc = xs[0]
    for x in xs[1:]:
        acc = f(acc, x)
    return acc


def tree(arity: int, f: Callable[[list[Signal]], Signal], xs: Iterable[Signal]) -> Signal:
    """Apply ``f`` to chunks of ``arity`` until a single signal remains."""
    if arity < 2:
        raise ValueError(f"tree arity must be >= 2, got {arity}")
    xs = list(xs)
    if not xs:
        raise EmptyOperands("tree of an empty list")
    while len(xs) > 1:
        xs = [f(xs[i:i + arity]) if len(xs[i:i + arity]) > 1 else xs[i]
              for i in range(0, len(xs), arity)]
    return xs[0]


def tree_op(op: Callable[[Signal, Signal], Signal], xs: Iterable[Signal]) -> Signal:
    """Balanced binary reduction by pairing neighbours."""
    return tree(2, lambda chunk: reduce(op, chunk), xs)


__all__ = [
    "Builder", "Signal", "Node", "Op", "RegSpec", "RegInfo", "WritePort", "Memory",
    "Instance", "InstanceRef",
    "input_", "const", "of_int", "zero", "one", "ones", "vdd", "gnd", "wire", "assign", "name",
    "add", "sub", "mul", "mul_signed", "and_", "or_", "xor_", "not_",
    "eq", "neq", "lt", "gt", "lte", "gte", "slt", "sgt", "slte", "sgte",
    "select", "bit", "lsbs", "msbs", "msb", "bits_lsb_first", "concat_msb", "concat_lsb", "cat",
    "repeat", "uresize", "sresize", "reduce_or", "reduce_and",
    "mux", "mux2", "reg", "reg_fb", "pipeline", "memory", "rom", "reduce", "tree", "tree_op",
    "fits", "mask",
]
