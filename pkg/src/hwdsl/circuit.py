"""Close a signal graph over named ports into a validated :class:`Circuit`.

Elaboration checks that every wire in the output fan-in has a driver, that
there is no combinational cycle, that port names are legal and unique and
that instance port widths match. The result carries a deterministic
topological schedule used by the simulator and the RTL generator.
"""

from __future__ import annotations

import dataclasses
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .errors import (
    CombinationalLoop,
    CrossBuilderError,
    DuplicatePortName,
    FloatingWire,
    IllegalName,
    PortError,
    PortWidthMismatch,
)
from .interface import Bundle, InterfaceSpec, spec_of_ports
from .naming import Namer, is_legal_identifier
from .signal import Builder, Instance, InstanceRef, Node, Op, RegInfo, Signal

LOGIC_OPS = frozenset({
    Op.ADD, Op.SUB, Op.MUL, Op.MULS, Op.AND, Op.OR, Op.XOR, Op.NOT,
    Op.EQ, Op.LT, Op.LTS, Op.MUX, Op.MEM_READ,
})


class DanglingSignalWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Port:
    name: str
    uid: int
    width: int


PortsLike = Bundle | Mapping[str, Signal] | Sequence[Signal] | None


def _port_items(ports: PortsLike, what: str) -> list[tuple[str, Signal]]:
    if ports is None:
        return []
    if isinstance(ports, Bundle):
        return ports.named()
    if isinstance(ports, Mapping):
        return list(ports.items())
    items = []
    for s in ports:
        if not isinstance(s, Signal) or s.name is None:
            raise PortError(f"{what} given as a sequence must be named signals")
        items.append((s.name, s))
    return items


def _check_name(name: str, what: str) -> None:
    if not isinstance(name, str) or not is_legal_identifier(name):
        raise IllegalName(f"{what} name {name!r} is not a legal identifier")


@dataclass
class Circuit:
    name: str
    inputs: list[Port]
    outputs: list[Port]
    nodes: dict[int, Node]
    schedule: list[int]
    sequential: list[int]
    instances: list[Instance] = field(default_factory=list)
    comb_inputs: dict[str, frozenset[str]] = field(default_factory=dict)

    # -- construction -------------------------------------------------------

    @classmethod
    def create(cls, name: str, inputs: PortsLike, outputs: PortsLike) -> Circuit:
        """Validate and freeze the graph feeding ``outputs``.

        ``inputs`` may be ``None``, in which case every input reached from the
        outputs becomes a port, ordered by creation.
        """
        _check_name(name, "circuit")
        out_items = _port_items(outputs, "outputs")
        if not out_items:
            raise PortError(f"circuit {name!r} has no outputs")
        in_items = _port_items(inputs, "inputs")
        signals = [s for _, s in out_items + in_items]
        builder = signals[0].builder
        if any(s.builder is not builder for s in signals):
            raise CrossBuilderError("circuit ports come from different builders")
        nodes = builder.nodes

        seen_names: set[str] = set()
        for pname, _ in in_items + out_items:
            _check_name(pname, "port")
            if pname in seen_names:
                raise DuplicatePortName(f"circuit {name!r}: duplicate port name {pname!r}")
            seen_names.add(pname)

        for pname, s in in_items:
            node = nodes[s.uid]
            if node.op is not Op.INPUT:
                raise PortError(f"input port {pname!r} is a {node.op.value} node, not an input")
            if node.port_name != pname:
                raise PortError(f"input port {pname!r} is bound to input {node.port_name!r}")

        reachable = _fanin(nodes, [s.uid for s in signals])
        for uid in reachable:
            node = nodes[uid]
            if node.op is Op.WIRE and not node.args:
                raise FloatingWire(uid, node.name)

        used_inputs = sorted(u for u in reachable if nodes[u].op is Op.INPUT)
        if inputs is None:
            in_items = [(nodes[u].port_name, Signal(builder, u)) for u in used_inputs]
            for pname, _ in in_items:
                _check_name(pname, "port")
                if pname in seen_names:
                    raise DuplicatePortName(f"circuit {name!r}: duplicate port name {pname!r}")
                seen_names.add(pname)
        else:
            declared = {s.uid for _, s in in_items}
            undeclared = [nodes[u].port_name for u in used_inputs if u not in declared]
            if undeclared:
                raise PortError(f"circuit {name!r}: inputs used but not declared: {undeclared}")

        snapshot = {u: _copy_node(nodes[u]) for u in sorted(reachable)}
        schedule = _schedule(snapshot)
        sequential = [u for u in schedule if snapshot[u].op in (Op.REG, Op.MEM)]

        inst_ids = sorted({n.inst.index for n in snapshot.values() if n.inst is not None})
        instances = [builder.instances[i] for i in inst_ids]

        _warn_dangling(builder, reachable)

        circuit = cls(
            name=name,
            inputs=[Port(p, s.uid, s.width) for p, s in in_items],
            outputs=[Port(p, s.uid, s.width) for p, s in out_items],
            nodes=snapshot,
            schedule=schedule,
            sequential=sequential,
            instances=instances,
        )
        circuit.comb_inputs = _comb_inputs(circuit)
        return circuit

    # -- queries ------------------------------------------------------------

    def node(self, uid: int) -> Node:
        return self.nodes[uid]

    def input_port(self, name: str) -> Port:
        for p in self.inputs:
            if p.name == name:
                return p
        raise KeyError(name)

    def output_port(self, name: str) -> Port:
        for p in self.outputs:
            if p.name == name:
                return p
        raise KeyError(name)

    @property
    def subcircuits(self) -> dict[str, Circuit]:
        return {inst.name: inst.circuit for inst in self.instances}

    @property
    def input_spec(self) -> InterfaceSpec:
        return spec_of_ports(f"{self.name}_i", [(p.name, p.width) for p in self.inputs])

    @property
    def output_spec(self) -> InterfaceSpec:
        return spec_of_ports(f"{self.name}_o", [(p.name, p.width) for p in self.outputs])

    def clock_uids(self) -> set[int]:
        """Inputs that drive register or memory clocks."""
        clocks = set()
        for n in self.nodes.values():
            if n.op is Op.REG:
                clocks.add(n.reg.clock)
            elif n.op is Op.MEM:
                clocks.add(n.args[0])
        return clocks

    def clock_ports(self) -> list[Port]:
        clocks = self.clock_uids()
        for inst in self.instances:
            sub_clocks = {p.name for p in inst.circuit.clock_ports()}
            clocks.update(uid for pname, uid in inst.inputs.items() if pname in sub_clocks)
        return [p for p in self.inputs if p.uid in clocks]

    def signal_names(self) -> dict[str, int]:
        """Unique display name for every port and named internal node.

        Ports keep their names; internal hints are uniquified with ``_0``,
        ``_1``... suffixes in uid order.
        """
        namer = Namer()
        table: dict[str, int] = {}
        port_uids = set()
        for p in self.inputs + self.outputs:
            table[namer.claim(p.name)] = p.uid
            port_uids.add(p.uid)
        for uid, node in self.nodes.items():
            if uid in port_uids or node.op is Op.INPUT:
                continue
            for hint in node.names:
                table[namer.claim(hint)] = uid
        return table

    def internal_names(self) -> dict[str, int]:
        ports = {p.name for p in self.inputs + self.outputs}
        return {n: u for n, u in self.signal_names().items() if n not in ports}

    def is_combinational(self) -> bool:
        return not self.sequential and all(
            inst.circuit.is_combinational() for inst in self.instances
        )

    def flatten(self) -> Circuit:
        """Inline every instance; hierarchical names become ``inst$signal``."""
        if not self.instances:
            return self
        with Builder() as b:
            ins = {p.name: b.input(p.name, p.width) for p in self.inputs}
            outs = import_circuit(b, self, ins)
        return Circuit.create(self.name, list(ins.values()), outs)

    def stats(self) -> Stats:
        return stats(self)


def _copy_node(n: Node) -> Node:
    return dataclasses.replace(n, names=list(n.names))


def _fanin(nodes: list[Node], roots: Sequence[int]) -> set[int]:
    seen: set[int] = set()
    stack = list(roots)
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        node = nodes[u]
        stack.extend(node.args)
        if node.reg is not None:
            stack.append(node.reg.clock)
    return seen


def _schedule(nodes: dict[int, Node]) -> list[int]:
    """Deterministic DFS post-order over combinational dependencies."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(nodes, WHITE)
    order: list[int] = []
    for root in nodes:
        if color[root] != WHITE:
            continue
        color[root] = GREY
        stack = [(root, iter(nodes[root].comb_deps()))]
        while stack:
            uid, deps = stack[-1]
            for d in deps:
                if color[d] == WHITE:
                    color[d] = GREY
                    stack.append((d, iter(nodes[d].comb_deps())))
                    break
                if color[d] == GREY:
                    path = [u for u, _ in stack]
                    cycle = path[path.index(d):] + [d]
                    names = {u: n.name for u, n in nodes.items() if n.name}
                    raise CombinationalLoop(cycle, names)
            else:
                stack.pop()
                color[uid] = BLACK
                order.append(uid)
    return order


def _comb_inputs(circuit: Circuit) -> dict[str, frozenset[str]]:
    """For each output, the input ports with a purely combinational path to it."""
    in_name = {p.uid: p.name for p in circuit.inputs}
    memo: dict[int, frozenset[str]] = {}
    for uid in circuit.schedule:
        node = circuit.nodes[uid]
        if node.op is Op.INPUT:
            memo[uid] = frozenset({in_name[uid]}) if uid in in_name else frozenset()
            continue
        acc: set[str] = set()
        for d in node.comb_deps():
            acc |= memo[d]
        memo[uid] = frozenset(acc)
    return {p.name: memo[p.uid] for p in circuit.outputs}


def _warn_dangling(builder: Builder, reachable: set[int]) -> None:
    for node in builder.nodes:
        if node.op is Op.WIRE and node.names and node.uid not in reachable:
            warnings.warn(
                f"named wire {node.names[0]!r} (_{node.uid}) is not in any output's fan-in; pruned",
                DanglingSignalWarning,
                stacklevel=3,
            )


# --------------------------------------------------------------------------
# hierarchy


def instantiate(circuit: Circuit, instance: str, inputs: Mapping[str, Signal] | Bundle,
                builder: Builder | None = None) -> dict[str, Signal]:
    """Instantiate ``circuit`` as a named sub-module; returns its output signals."""
    _check_name(instance, "instance")
    items = dict(_port_items(inputs, "instance inputs"))
    if builder is None:
        builder = next(iter(items.values())).builder if items else Builder.current()
    if any(i.name == instance for i in builder.instances):
        raise DuplicatePortName(f"instance name {instance!r} already used in this builder")
    expected = {p.name: p for p in circuit.inputs}
    unknown = sorted(set(items) - set(expected))
    if unknown:
        raise PortError(f"instance {instance!r}: unknown ports {unknown}")
    for p in circuit.inputs:
        if p.name not in items:
            raise PortError(f"instance {instance!r}: input port {p.name!r} not connected")
        s = items[p.name]
        if s.builder is not builder:
            raise CrossBuilderError(f"instance {instance!r}: port {p.name!r} from another builder")
        if s.width != p.width:
            raise PortWidthMismatch(instance, p.name, p.width, s.width)

    index = len(builder.instances)
    inst = Instance(instance, circuit, {p.name: items[p.name].uid for p in circuit.inputs})
    builder.instances.append(inst)
    all_args = tuple(inst.inputs[p.name] for p in circuit.inputs)
    outs: dict[str, Signal] = {}
    for p in circuit.outputs:
        comb = tuple(inst.inputs[n] for n in sorted(circuit.comb_inputs[p.name]))
        sig = builder.add(Op.INST_OUT, p.width, all_args, inst=InstanceRef(index, p.name),
                          comb_args=comb)
        sig.node.names.append(f"{instance}${p.name}")
        inst.outputs[p.name] = sig.uid
        outs[p.name] = sig
    return outs


def import_circuit(builder: Builder, circuit: Circuit, inputs: Mapping[str, Signal],
                   prefix: str | None = None) -> dict[str, Signal]:
    """Copy ``circuit``'s graph into ``builder`` with instances inlined."""
    mapping: dict[int, Signal] = {}
    in_ports = {p.uid: p for p in circuit.inputs}

    def rename(names: list[str]) -> list[str]:
        return [f"{prefix}${n}" if prefix else n for n in names]

    def m(uid: int) -> int:
        return mapping[uid].uid

    wires: list[tuple[int, int]] = []
    done_instances: dict[int, dict[str, Signal]] = {}
    for uid, node in circuit.nodes.items():
        op = node.op
        if op is Op.INPUT:
            port = in_ports[uid]
            sig = inputs[port.name]
            if sig.width != port.width:
                raise PortWidthMismatch(prefix or circuit.name, port.name, port.width, sig.width)
            mapping[uid] = sig
            continue
        if op is Op.INST_OUT:
            idx = node.inst.index
            inst = next(i for i in circuit.instances if i.circuit is not None
                        and i.outputs.get(node.inst.port) == uid)
            if idx not in done_instances:
                sub_inputs = {pname: mapping[u] for pname, u in inst.inputs.items()}
                sub_prefix = f"{prefix}${inst.name}" if prefix else inst.name
                done_instances[idx] = import_circuit(builder, inst.circuit, sub_inputs, sub_prefix)
            mapping[uid] = done_instances[idx][node.inst.port]
            mapping[uid].node.names.extend(rename(node.names))
            continue
        if op is Op.WIRE:
            sig = builder.wire(node.width)
            wires.append((uid, sig.uid))
        else:
            reg = None
            if node.reg is not None:
                r = node.reg
                reg = RegInfo(
                    clock=m(r.clock),
                    clear=m(r.clear) if r.clear is not None else None,
                    enable=m(r.enable) if r.enable is not None else None,
                    clear_to=r.clear_to,
                    initial=r.initial,
                )
            sig = builder.add(op, node.width, tuple(m(a) for a in node.args), value=node.value,
                              lo=node.lo, reg=reg, size=node.size)
        sig.node.names.extend(rename(node.names))
        mapping[uid] = sig
    for old, new in wires:
        builder.nodes[new].args = (m(circuit.nodes[old].args[0]),)
    return {p.name: mapping[p.uid] for p in circuit.outputs}


# --------------------------------------------------------------------------
# stats


@dataclass
class Stats:
    name: str
    node_counts: dict[str, int]
    registers: int
    register_bits: int
    memories: int
    memory_bits: int
    max_depth: int
    children: dict[str, "Stats"] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "node_counts": dict(self.node_counts),
            "registers": self.registers,
            "register_bits": self.register_bits,
            "memories": self.memories,
            "memory_bits": self.memory_bits,
            "max_depth": self.max_depth,
            "children": {k: v.to_dict() for k, v in self.children.items()},
        }

    def format(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [
            f"{pad}{self.name}",
            f"{pad}  registers      {self.registers} ({self.register_bits} bits)",
            f"{pad}  memories       {self.memories} ({self.memory_bits} bits)",
            f"{pad}  max comb depth {self.max_depth}",
            f"{pad}  nodes:",
        ]
        for k, v in self.node_counts.items():
            lines.append(f"{pad}    {k:<16}{v}")
        for inst, child in self.children.items():
            lines.append(f"{pad}  instance {inst}:")
            lines.append(child.format(indent + 2))
        return "\n".join(lines)


def stats(circuit: Circuit) -> Stats:
    counts = Counter(n.op.value for n in circuit.nodes.values())
    regs = [n for n in circuit.nodes.values() if n.op is Op.REG]
    mems = [n for n in circuit.nodes.values() if n.op is Op.MEM]
    children = {inst.name: stats(inst.circuit) for inst in circuit.instances}
    depth: dict[int, int] = {}
    for uid in circuit.schedule:
        node = circuit.nodes[uid]
        base = max((depth[d] for d in node.comb_deps()), default=0)
        if node.op in LOGIC_OPS:
            base += 1
        elif node.op is Op.INST_OUT:
            base += _child_depth(circuit, node, children)
        depth[uid] = base
    return Stats(
        name=circuit.name,
        node_counts=dict(sorted(counts.items())),
        registers=len(regs),
        register_bits=sum(n.width for n in regs),
        memories=len(mems),
        memory_bits=sum(n.width * n.size for n in mems),
        max_depth=max(depth.values(), default=0),
        children=children,
    )


def _child_depth(circuit: Circuit, node: Node, children: dict[str, Stats]) -> int:
    for inst in circuit.instances:
        if inst.outputs.get(node.inst.port) == node.uid:
            return children[inst.name].max_depth
    return 0
