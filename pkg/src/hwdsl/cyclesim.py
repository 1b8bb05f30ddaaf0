"""Levelized, cycle-accurate, two-state simulator.

The circuit is flattened and its topological schedule is turned into one
straight-line Python function (values held in locals as masked ints). One call
to :meth:`Simulator.cycle` is one rising clock edge:

1. evaluate the combinational schedule from the current inputs and state,
2. sample attached traces and latch the pre-edge output values,
3. compute every register next-value and memory write from phase-1 values,
4. commit them all.

Peeks are lazily refreshed after the edge, so ``peek`` reports the values
the circuit settles to with the new state and the current inputs. The
pre-edge output values are available with ``peek(name, before_edge=True)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .bitvec import BitVec, mask
from .circuit import Circuit
from .errors import SimulationError, UnknownSignal, WidthError
from .signal import Op


@dataclass(frozen=True)
class PortHandle:
    name: str
    width: int
    direction: str
    sim: "Simulator"

    def poke(self, value: BitVec | int) -> None:
        if self.direction != "input":
            raise SimulationError(f"cannot poke output port {self.name!r}")
        self.sim.poke(self.name, value)

    def peek(self, before_edge: bool = False) -> BitVec:
        return self.sim.peek(self.name, before_edge=before_edge)

    @property
    def value(self) -> BitVec:
        return self.peek()


@dataclass(frozen=True)
class SimState:
    """Register and memory contents; enough to restore a simulator exactly."""

    registers: tuple[int, ...]
    memories: tuple[tuple[int, ...], ...]


class Simulator:
    def __init__(self, circuit: Circuit, *, store_all: bool = False) -> None:
        self.circuit = circuit
        flat = circuit.flatten()
        self.flat = flat
        clocks = flat.clock_uids()
        if len(clocks) > 1:
            names = sorted(flat.nodes[c].name or f"_{c}" for c in clocks)
            raise SimulationError(f"more than one clock source {names}; a simulator has one clock")
        for c in clocks:
            if flat.nodes[c].op is not Op.INPUT:
                raise SimulationError("register clocks must come straight from an input port")
        self._clock_uids = clocks

        self._index = {uid: i for i, uid in enumerate(flat.nodes)}
        self._names = flat.signal_names()
        self._regs = [self._index[u] for u in flat.sequential if flat.nodes[u].op is Op.REG]
        self._reg_init = [flat.nodes[u].reg.initial.value for u in flat.sequential
                          if flat.nodes[u].op is Op.REG]
        self._mem_uids = [u for u in flat.sequential if flat.nodes[u].op is Op.MEM]
        self._mem_sizes = [flat.nodes[u].size for u in self._mem_uids]

        self._in_ports = {p.name: p for p in flat.inputs if p.uid not in clocks}
        self._clock_names = {p.name for p in flat.inputs if p.uid in clocks}
        self._out_ports = {p.name: p for p in flat.outputs}
        self._out_order = [p.name for p in flat.outputs]

        observable = {self._index[u] for u in self._names.values()}
        if store_all:
            observable = set(self._index.values())
        self._observable = observable
        self._comb_fn, self._step_fn, self.source = _compile(flat, self._index, observable,
                                                             self._mem_uids)
        self._samplers: list[Callable[[Simulator], None]] = []
        self._reset_hooks: list[Callable[[Simulator], None]] = []
        self.values: list[int] = [0] * len(self._index)
        self.memories: list[list[int]] = []
        self._before: list[int] = [0] * len(self._out_order)
        self.cycle_count = 0
        self._stale = True
        self.reset()

    # -- ports --------------------------------------------------------------

    @property
    def inputs(self) -> dict[str, PortHandle]:
        return {n: PortHandle(n, p.width, "input", self) for n, p in self._in_ports.items()}

    @property
    def outputs(self) -> dict[str, PortHandle]:
        return {n: PortHandle(n, p.width, "output", self) for n, p in self._out_ports.items()}

    @property
    def clock_names(self) -> set[str]:
        return set(self._clock_names)

    def signal_names(self) -> list[str]:
        return list(self._names)

    def width_of(self, name: str) -> int:
        return self.flat.nodes[self._uid_of(name)].width

    def _uid_of(self, name: str) -> int:
        try:
            return self._names[name]
        except KeyError:
            raise UnknownSignal(f"no signal named {name!r}") from None

    # -- poke / peek --------------------------------------------------------

    def poke(self, name: str, value: BitVec | int) -> None:
        if name in self._clock_names:
            raise SimulationError(f"{name!r} is the clock; it is driven by cycle()")
        port = self._in_ports.get(name)
        if port is None:
            raise UnknownSignal(f"no input port named {name!r}")
        if isinstance(value, BitVec):
            if value.width != port.width:
                raise WidthError(f"poke {name!r}: port is {port.width} bits, value is {value.width}")
            v = value.value
        elif isinstance(value, int) and not isinstance(value, bool):
            if not -(1 << (port.width - 1)) <= value < (1 << port.width):
                raise WidthError(f"poke {name!r}: {value} does not fit in {port.width} bits")
            v = value & mask(port.width)
        else:
            raise TypeError(f"poke {name!r}: expected BitVec or int, got {type(value).__name__}")
        self.values[self._index[port.uid]] = v
        self._stale = True

    def poke_all(self, values: dict[str, BitVec | int]) -> None:
        for k, v in values.items():
            self.poke(k, v)

    def peek(self, name: str, *, before_edge: bool = False) -> BitVec:
        if before_edge:
            try:
                i = self._out_order.index(name)
            except ValueError:
                raise UnknownSignal(f"pre-edge values are kept for output ports only, not {name!r}") from None
            return BitVec(self._out_ports[name].width, self._before[i])
        uid = self._uid_of(name)
        return BitVec(self.flat.nodes[uid].width, self.peek_int_uid(uid))

    def peek_named(self, name: str) -> BitVec:
        return self.peek(name)

    def peek_int_uid(self, uid: int) -> int:
        i = self._index[uid]
        if i not in self._observable:
            raise UnknownSignal(f"_{uid} is not observable; create the simulator with store_all=True")
        self.settle()
        return self.values[i]

    def peek_outputs(self, *, before_edge: bool = False) -> dict[str, BitVec]:
        return {n: self.peek(n, before_edge=before_edge) for n in self._out_order}

    def settle(self) -> None:
        """Re-evaluate combinational logic after pokes without a clock edge."""
        if self._stale:
            self._comb_fn(self.values, self.memories)
            self._stale = False

    # -- time ---------------------------------------------------------------

    def cycle(self) -> None:
        sample = self._run_samplers if self._samplers else None
        self._step_fn(self.values, self.memories, self._before, sample)
        self.cycle_count += 1
        self._stale = True

    def run(self, n: int) -> None:
        for _ in range(n):
            self.cycle()

    def _run_samplers(self) -> None:
        for s in self._samplers:
            s(self)

    def add_sampler(self, fn: Callable[[Simulator], None]) -> None:
        self._samplers.append(fn)

    def add_reset_hook(self, fn: Callable[[Simulator], None]) -> None:
        self._reset_hooks.append(fn)

    def raw_value(self, uid: int) -> int:
        """Value stored for ``uid`` by the last evaluation (no refresh)."""
        return self.values[self._index[uid]]

    def reset(self) -> None:
        """Back to power-on: initial register values, zeroed memories and inputs."""
        self.values = [0] * len(self._index)
        for i, v in zip(self._regs, self._reg_init):
            self.values[i] = v
        self.memories = [[0] * size for size in self._mem_sizes]
        self._before = [0] * len(self._out_order)
        self.cycle_count = 0
        self._stale = True
        for hook in self._reset_hooks:
            hook(self)

    # -- state snapshots ------------------------------------------------------

    def state(self) -> SimState:
        return SimState(tuple(self.values[i] for i in self._regs),
                        tuple(tuple(m) for m in self.memories))

    def set_state(self, state: SimState) -> None:
        for i, v in zip(self._regs, state.registers):
            self.values[i] = v
        self.memories = [list(m) for m in state.memories]
        self._stale = True


def _compile(flat: Circuit, index: dict[int, int], observable: set[int],
             mem_uids: list[int]) -> tuple[Callable, Callable, str]:
    nodes = flat.nodes
    consts: dict[str, object] = {}
    mem_slot = {u: k for k, u in enumerate(mem_uids)}

    def n(uid: int) -> str:
        return f"n{index[uid]}"

    loads: list[str] = []
    body: list[str] = []
    for uid in flat.schedule:
        node = nodes[uid]
        op, w, a = node.op, node.width, node.args
        me = n(uid)
        if op is Op.INPUT or op is Op.REG:
            loads.append(f"{me} = v[{index[uid]}]")
            continue
        if op is Op.MEM:
            continue
        m = mask(w)
        if op is Op.CONST:
            expr = str(node.value.value)
        elif op is Op.WIRE:
            expr = n(a[0])
        elif op is Op.ADD:
            expr = f"({n(a[0])} + {n(a[1])}) & {m}"
        elif op is Op.SUB:
            expr = f"({n(a[0])} - {n(a[1])}) & {m}"
        elif op is Op.MUL:
            expr = f"{n(a[0])} * {n(a[1])}"
        elif op is Op.MULS:
            ha = 1 << (nodes[a[0]].width - 1)
            hb = 1 << (nodes[a[1]].width - 1)
            expr = f"((({n(a[0])} ^ {ha}) - {ha}) * (({n(a[1])} ^ {hb}) - {hb})) & {m}"
        elif op is Op.AND:
            expr = f"{n(a[0])} & {n(a[1])}"
        elif op is Op.OR:
            expr = f"{n(a[0])} | {n(a[1])}"
        elif op is Op.XOR:
            expr = f"{n(a[0])} ^ {n(a[1])}"
        elif op is Op.NOT:
            expr = f"{n(a[0])} ^ {m}"
        elif op is Op.EQ:
            expr = f"1 if {n(a[0])} == {n(a[1])} else 0"
        elif op is Op.LT:
            expr = f"1 if {n(a[0])} < {n(a[1])} else 0"
        elif op is Op.LTS:
            h = 1 << (nodes[a[0]].width - 1)
            expr = f"1 if ({n(a[0])} ^ {h}) < ({n(a[1])} ^ {h}) else 0"
        elif op is Op.MUX:
            sel, cases = a[0], a[1:]
            if len(cases) == 2:
                expr = f"{n(cases[1])} if {n(sel)} else {n(cases[0])}"
            else:
                if all(nodes[c].op is Op.CONST for c in cases):
                    tname = f"T{index[uid]}"
                    consts[tname] = tuple(nodes[c].value.value for c in cases)
                    table = tname
                else:
                    table = "(" + ", ".join(n(c) for c in cases) + ",)"
                if len(cases) == 1 << nodes[sel].width:
                    expr = f"{table}[{n(sel)}]"
                else:
                    expr = f"{table}[{n(sel)}] if {n(sel)} < {len(cases)} else {n(cases[-1])}"
        elif op is Op.CAT:
            parts = []
            shift = w
            for p in a:
                shift -= nodes[p].width
                parts.append(f"({n(p)} << {shift})" if shift else n(p))
            expr = " | ".join(parts)
        elif op is Op.SELECT:
            expr = f"({n(a[0])} >> {node.lo}) & {m}" if node.lo else f"{n(a[0])} & {m}"
        elif op is Op.MEM_READ:
            mem = nodes[a[0]]
            k = mem_slot[a[0]]
            if (1 << nodes[a[1]].width) == mem.size:
                expr = f"m{k}[{n(a[1])}]"
            else:
                expr = f"m{k}[{n(a[1])}] if {n(a[1])} < {mem.size} else 0"
        else:
            raise SimulationError(f"cannot simulate {op.value} nodes (flatten first)")
        body.append(f"{me} = {expr}")

    mem_loads = [f"m{k} = mems[{k}]" for k in range(len(mem_uids))]
    stores = [f"v[{index[u]}] = {n(u)}" for u in flat.schedule
              if index[u] in observable and nodes[u].op not in (Op.INPUT, Op.REG, Op.MEM)]
    before = [f"vb[{j}] = {n(p.uid)}" for j, p in enumerate(flat.outputs)]

    nexts: list[str] = []
    commits: list[str] = []
    for uid in flat.sequential:
        node = nodes[uid]
        if node.op is Op.REG:
            r = node.reg
            d = n(node.args[0])
            expr = d
            if r.enable is not None:
                expr = f"{d} if {n(r.enable)} else {n(uid)}"
            if r.clear is not None:
                expr = f"{r.clear_to.value} if {n(r.clear)} else ({expr})"
            nexts.append(f"q{index[uid]} = {expr}")
            commits.append(f"v[{index[uid]}] = q{index[uid]}")
        else:
            k = mem_slot[uid]
            _clk, we, wa, wd = node.args
            guard = "" if (1 << nodes[wa].width) == node.size else f" and {n(wa)} < {node.size}"
            commits.append(f"if {n(we)}{guard}: m{k}[{n(wa)}] = {n(wd)}")

    def block(lines: Iterable[str]) -> str:
        return "".join(f"    {line}\n" for line in lines)

    comb_src = ("def comb(v, mems):\n" + block(mem_loads + loads + body + stores) + "    return None\n")
    step_src = ("def step(v, mems, vb, sample):\n"
                + block(mem_loads + loads + body + stores + before)
                + "    if sample is not None:\n        sample()\n"
                + block(nexts + commits) + "    return None\n")
    source = comb_src + "\n" + step_src
    namespace: dict[str, object] = dict(consts)
    exec(compile(source, f"<cyclesim {flat.name}>", "exec"), namespace)
    return namespace["comb"], namespace["step"], source


def simulate(circuit: Circuit, stimulus: Iterable[dict[str, int | BitVec]],
             *, before_edge: bool = True) -> list[dict[str, BitVec]]:
    """Run one cycle per stimulus dict; returns the output values of each cycle."""
    sim = Simulator(circuit)
    out = []
    for pokes in stimulus:
        sim.poke_all(pokes)
        sim.cycle()
        out.append(sim.peek_outputs(before_edge=before_edge))
    return out
