"""Equivalence checking, bounded model checking and CNF export.

Combinational equivalence is decided by running both circuits on every
input assignment (up to a bound) or on seeded random assignments. Sequential
circuits are compared by co-simulation from reset; the exhaustive mode walks
the reachable product state space breadth first, so it covers *every* input
sequence up to the cycle bound while only enumerating one cycle's inputs at
a time. Every counterexample is replayed on fresh simulators before it is
returned.

For interoperating with real SAT solvers a miter can be Tseitin-encoded to
DIMACS; :func:`brute_force_sat` is a tiny bit-parallel checker used to keep
the encoding honest.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

from .bitvec import BitVec, mask
from .circuit import Circuit, import_circuit
from .cyclesim import Simulator
from .errors import BoundExceeded, InterfaceMismatch, NotCombinational, VerificationError
from .signal import Builder, Op, or_, reduce_or, tree_op, xor_

# --------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Equivalent:
    method: str
    cases: int
    cycles: int = 0

    equivalent = True

    def describe(self) -> str:
        what = f"{self.cases} cases" + (f" over {self.cycles} cycles" if self.cycles else "")
        return f"Equivalent ({self.method}, {what})"


@dataclass(frozen=True)
class NoCounterexampleFound:
    method: str
    trials: int
    cycles: int = 0

    equivalent = True

    def describe(self) -> str:
        return f"NoCounterexampleFound ({self.method}, {self.trials} trials)"


@dataclass(frozen=True)
class Counterexample:
    """Per-cycle input assignments leading to a differing output.

    For combinational checks there is a single cycle.
    """

    method: str
    inputs: tuple[dict[str, BitVec], ...]
    output: str
    cycle: int
    values: tuple[BitVec, BitVec]

    equivalent = False

    @property
    def assignment(self) -> dict[str, BitVec]:
        return self.inputs[-1]

    def describe(self) -> str:
        a, b = self.values
        ins = ", ".join(f"{k}={v.to_int()}" for k, v in self.assignment.items())
        return (f"Counterexample ({self.method}): output {self.output!r} differs at cycle "
                f"{self.cycle}: {a.to_int()} vs {b.to_int()} [{ins}]")

    def to_poke_script(self) -> str:
        """Text replayable with ``hwdsl sim <example> --script FILE``."""
        a, b = self.values
        lines = [f"# {self.output} differs at cycle {self.cycle}: {a.to_int()} vs {b.to_int()}"]
        for step in self.inputs:
            for name, v in step.items():
                lines.append(f"poke {name} {v.to_int()}")
            lines.append("cycle")
        return "\n".join(lines) + "\n"


Verdict = Equivalent | NoCounterexampleFound | Counterexample


# --------------------------------------------------------------------------
# interfaces and replay


def _io(c: Circuit) -> tuple[list[tuple[str, int]], list[tuple[str, int]]]:
    clocks = c.flatten().clock_uids()
    ins = [(p.name, p.width) for p in c.inputs if p.uid not in clocks]
    outs = [(p.name, p.width) for p in c.outputs]
    return ins, outs


def check_interfaces(c1: Circuit, c2: Circuit) -> tuple[list[tuple[str, int]], list[tuple[str, int]]]:
    i1, o1 = _io(c1)
    i2, o2 = _io(c2)
    if i1 != i2:
        raise InterfaceMismatch(f"input ports differ: {i1} vs {i2}")
    if o1 != o2:
        raise InterfaceMismatch(f"output ports differ: {o1} vs {o2}")
    return i1, o1


def _require_combinational(*cs: Circuit) -> None:
    for c in cs:
        if not c.is_combinational():
            raise NotCombinational(f"circuit {c.name!r} has registers or memories")


def replay(c1: Circuit, c2: Circuit, cex: Counterexample) -> tuple[BitVec, BitVec]:
    """Run ``cex`` on fresh simulators; returns the two values of the named output."""
    s1, s2 = Simulator(c1), Simulator(c2)
    for step in cex.inputs:
        for sim in (s1, s2):
            sim.poke_all(step)
            sim.cycle()
    return s1.peek(cex.output, before_edge=True), s2.peek(cex.output, before_edge=True)


def _checked(c1: Circuit, c2: Circuit, cex: Counterexample) -> Counterexample:
    a, b = replay(c1, c2, cex)
    if a == b or (a, b) != cex.values:
        raise VerificationError(f"counterexample does not replay: {cex.describe()}")
    return cex


class _Harness:
    """Fast pokes and pre-edge peeks on a pair of simulators."""

    def __init__(self, c1: Circuit, c2: Circuit, ins: list[tuple[str, int]],
                 outs: list[tuple[str, int]]) -> None:
        self.sims = (Simulator(c1), Simulator(c2))
        self.ins = ins
        self.outs = outs
        self._in_slots = [[s._index[s._in_ports[n].uid] for n, _ in ins] for s in self.sims]
        self._out_slots = [[s._index[s._out_ports[n].uid] for n, _ in outs] for s in self.sims]

    def comb(self, values: Sequence[int]) -> int | None:
        """Index of the first differing output for one input assignment, or None."""
        res = []
        for sim, slots, oslots in zip(self.sims, self._in_slots, self._out_slots):
            for i, v in zip(slots, values):
                sim.values[i] = v
            sim._stale = True
            sim.settle()
            res.append([sim.values[i] for i in oslots])
        for k, (a, b) in enumerate(zip(*res)):
            if a != b:
                return k
        return None

    def step(self, values: Sequence[int]) -> int | None:
        """One clock edge on both; index of the first differing pre-edge output."""
        for sim, slots in zip(self.sims, self._in_slots):
            for i, v in zip(slots, values):
                sim.values[i] = v
            sim._stale = True
            sim.cycle()
        a, b = (sim._before for sim in self.sims)
        for k in range(len(self.outs)):
            if a[k] != b[k]:
                return k
        return None

    def assignment(self, values: Sequence[int]) -> dict[str, BitVec]:
        return {n: BitVec(w, v) for (n, w), v in zip(self.ins, values)}

    def out_values(self, k: int, before: bool) -> tuple[BitVec, BitVec]:
        w = self.outs[k][1]
        if before:
            return tuple(BitVec(w, s._before[k]) for s in self.sims)  # type: ignore[return-value]
        return tuple(BitVec(w, s.values[sl[k]]) for s, sl in zip(self.sims, self._out_slots))  # type: ignore[return-value]


def _assignments(ins: list[tuple[str, int]]):
    return itertools.product(*(range(1 << w) for _, w in ins))


# --------------------------------------------------------------------------
# combinational equivalence


@dataclass
class Miter:
    circuit: Circuit
    left: Circuit
    right: Circuit


def build_miter(c1: Circuit, c2: Circuit) -> Miter:
    """One-output circuit that is 1 exactly when ``c1`` and ``c2`` disagree."""
    _require_combinational(c1, c2)
    ins, outs = check_interfaces(c1, c2)
    with Builder() as b:
        sigs = {n: b.input(n, w) for n, w in ins}
        for p in c1.inputs:
            if p.name not in sigs:
                sigs[p.name] = b.input(p.name, p.width)
        o1 = import_circuit(b, c1, sigs, prefix="left")
        o2 = import_circuit(b, c2, sigs, prefix="right")
        diffs = [reduce_or(xor_(o1[n], o2[n])) for n, _ in outs]
        diff = tree_op(or_, diffs).named("miter")
        used = [s for s in sigs.values()]
    return Miter(Circuit.create("miter", used, {"miter": diff}), c1, c2)


def equiv_exhaustive(c1: Circuit, c2: Circuit, *, max_input_bits: int = 20) -> Verdict:
    _require_combinational(c1, c2)
    ins, outs = check_interfaces(c1, c2)
    total = sum(w for _, w in ins)
    if total > max_input_bits:
        raise BoundExceeded(f"{total} input bits exceed the exhaustive bound of {max_input_bits}")
    h = _Harness(c1, c2, ins, outs)
    n = 0
    for values in _assignments(ins):
        n += 1
        k = h.comb(values)
        if k is not None:
            cex = Counterexample("exhaustive", (h.assignment(values),), outs[k][0], 0,
                                 h.out_values(k, before=False))
            return _checked(c1, c2, cex)
    return Equivalent("exhaustive", n)


def _minimize(h: _Harness, values: list[int], fails: Callable[[list[int]], int | None]) -> list[int]:
    """Greedily clear bits (most significant first) while the mismatch persists."""
    values = list(values)
    for i, (_, w) in enumerate(h.ins):
        for bit in reversed(range(w)):
            if values[i] >> bit & 1:
                trial = list(values)
                trial[i] &= ~(1 << bit)
                if fails(trial) is not None:
                    values = trial
    return values


def equiv_random(c1: Circuit, c2: Circuit, *, n_trials: int = 10_000, seed: int = 0) -> Verdict:
    _require_combinational(c1, c2)
    ins, outs = check_interfaces(c1, c2)
    rng = random.Random(seed)
    h = _Harness(c1, c2, ins, outs)
    for _ in range(n_trials):
        values = [rng.getrandbits(w) for _, w in ins]
        if h.comb(values) is not None:
            values = _minimize(h, values, h.comb)
            k = h.comb(values)
            cex = Counterexample("random", (h.assignment(values),), outs[k][0], 0,
                                 h.out_values(k, before=False))
            return _checked(c1, c2, cex)
    return NoCounterexampleFound("random", n_trials)


# --------------------------------------------------------------------------
# bounded model checking


def bmc(c1: Circuit, c2: Circuit, cycles: int, *,
        strategy: Literal["exhaustive", "random"] = "exhaustive",
        seed: int = 0, trials: int = 1000, max_input_bits: int = 20) -> Verdict:
    """Compare pre-edge outputs of two circuits on input sequences of ``cycles`` steps.

    ``exhaustive`` explores every input sequence (breadth first over the
    reachable pair of states, so equal states are only expanded once); it
    refuses when one cycle's inputs exceed ``max_input_bits``. ``random``
    runs ``trials`` seeded sequences from reset.
    """
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    ins, outs = check_interfaces(c1, c2)
    h = _Harness(c1, c2, ins, outs)
    if strategy == "random":
        return _bmc_random(c1, c2, h, cycles, seed, trials)
    if strategy != "exhaustive":
        raise ValueError(f"unknown strategy {strategy!r}")
    bits = sum(w for _, w in ins)
    if bits > max_input_bits:
        raise BoundExceeded(f"{bits} input bits per cycle exceed the exhaustive bound of {max_input_bits}")
    s1, s2 = h.sims
    start = (s1.state(), s2.state())
    parent: dict[tuple, tuple | None] = {start: None}
    frontier = [start]
    transitions = 0
    all_inputs = list(_assignments(ins))
    for t in range(cycles):
        nxt = []
        for key in frontier:
            for values in all_inputs:
                s1.set_state(key[0])
                s2.set_state(key[1])
                transitions += 1
                k = h.step(values)
                if k is not None:
                    seq = _path(parent, key) + [values]
                    cex = Counterexample("bmc-exhaustive", tuple(h.assignment(v) for v in seq),
                                         outs[k][0], t, h.out_values(k, before=True))
                    return _checked(c1, c2, cex)
                new = (s1.state(), s2.state())
                if new not in parent:
                    parent[new] = (key, values)
                    nxt.append(new)
        frontier = nxt
        if not frontier:
            break
    return Equivalent("bmc-exhaustive", transitions, cycles)


def _path(parent: dict, key: tuple) -> list:
    seq = []
    while parent[key] is not None:
        key, values = parent[key]
        seq.append(values)
    return seq[::-1]


def _bmc_random(c1: Circuit, c2: Circuit, h: _Harness, cycles: int, seed: int,
                trials: int) -> Verdict:
    rng = random.Random(seed)
    for _ in range(trials):
        for s in h.sims:
            s.reset()
        seq = []
        for t in range(cycles):
            values = [rng.getrandbits(w) for _, w in h.ins]
            seq.append(values)
            k = h.step(values)
            if k is not None:
                cex = Counterexample("bmc-random", tuple(h.assignment(v) for v in seq),
                                     h.outs[k][0], t, h.out_values(k, before=True))
                return _checked(c1, c2, cex)
    return NoCounterexampleFound("bmc-random", trials, cycles)


# --------------------------------------------------------------------------
# CNF


@dataclass
class Cnf:
    num_vars: int
    clauses: list[list[int]]
    var_names: dict[int, str] = field(default_factory=dict)
    output: int = 0

    def to_dimacs(self) -> str:
        lines = [f"c var {v} = {n}" for v, n in sorted(self.var_names.items())]
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


class _Tseitin:
    def __init__(self) -> None:
        self.n = 0
        self.clauses: list[list[int]] = []
        self.names: dict[int, str] = {}
        self._true: int | None = None

    def var(self, name: str | None = None) -> int:
        self.n += 1
        if name is not None:
            self.names[self.n] = name
        return self.n

    def true(self) -> int:
        if self._true is None:
            self._true = self.var("1'b1")
            self.clauses.append([self._true])
        return self._true

    def const(self, bit: int) -> int:
        return self.true() if bit else -self.true()

    def _value(self, x: int) -> bool | None:
        """True/False for the constant literals, None for anything else."""
        if self._true is not None and abs(x) == self._true:
            return x > 0
        return None

    def and2(self, a: int, b: int) -> int:
        for x, y in ((a, b), (b, a)):
            v = self._value(x)
            if v is not None:
                return y if v else x
        if a == b:
            return a
        if a == -b:
            return -self.true()
        g = self.var()
        self.clauses += [[-g, a], [-g, b], [g, -a, -b]]
        return g

    def or2(self, a: int, b: int) -> int:
        return -self.and2(-a, -b)

    def xor2(self, a: int, b: int) -> int:
        for x, y in ((a, b), (b, a)):
            v = self._value(x)
            if v is not None:
                return -y if v else y
        if a == b:
            return -self.true()
        if a == -b:
            return self.true()
        g = self.var()
        self.clauses += [[-g, a, b], [-g, -a, -b], [g, -a, b], [g, a, -b]]
        return g

    def mux2(self, s: int, t: int, f: int) -> int:
        v = self._value(s)
        if v is not None:
            return t if v else f
        if t == f:
            return t
        g = self.var()
        self.clauses += [[-s, -t, g], [-s, t, -g], [s, -f, g], [s, f, -g]]
        return g

    def add(self, a: list[int], b: list[int], carry: int) -> list[int]:
        out = []
        for x, y in zip(a, b):
            p = self.xor2(x, y)
            out.append(self.xor2(p, carry))
            carry = self.or2(self.and2(x, y), self.and2(p, carry))
        return out

    def ult(self, a: list[int], b: list[int]) -> int:
        """a < b unsigned: the carry out of a + ~b + 1 is 0."""
        carry = self.true()
        for x, y in zip(a, b):
            p = self.xor2(x, -y)
            carry = self.or2(self.and2(x, -y), self.and2(p, carry))
        return -carry

    def reduce(self, f: Callable[[int, int], int], xs: list[int]) -> int:
        acc = xs[0]
        for x in xs[1:]:
            acc = f(acc, x)
        return acc


def to_cnf(miter: Miter | Circuit) -> Cnf:
    """Tseitin encoding of a one-bit-output combinational circuit, asserted true."""
    c = miter.circuit if isinstance(miter, Miter) else miter
    _require_combinational(c)
    c = c.flatten()
    if len(c.outputs) != 1 or c.outputs[0].width != 1:
        raise VerificationError("CNF export needs a single 1-bit output (build a miter first)")
    names = {u: n for n, u in c.signal_names().items()}
    enc = _Tseitin()
    lits: dict[int, list[int]] = {}
    for uid in c.schedule:
        node = c.nodes[uid]
        op, a, w = node.op, node.args, node.width
        label = names.get(uid, f"_{uid}")
        if op is Op.INPUT:
            bits = [enc.var(f"{label}[{i}]") for i in range(w)]
        elif op is Op.CONST:
            bits = [enc.const(node.value.value >> i & 1) for i in range(w)]
        elif op is Op.WIRE:
            bits = lits[a[0]]
        elif op is Op.SELECT:
            bits = lits[a[0]][node.lo: node.lo + w]
        elif op is Op.CAT:
            bits = [b for part in reversed(a) for b in lits[part]]
        elif op is Op.NOT:
            bits = [-x for x in lits[a[0]]]
        elif op in (Op.AND, Op.OR, Op.XOR):
            f = {Op.AND: enc.and2, Op.OR: enc.or2, Op.XOR: enc.xor2}[op]
            bits = [f(x, y) for x, y in zip(lits[a[0]], lits[a[1]])]
        elif op is Op.ADD:
            bits = enc.add(lits[a[0]], lits[a[1]], -enc.true())
        elif op is Op.SUB:
            bits = enc.add(lits[a[0]], [-y for y in lits[a[1]]], enc.true())
        elif op is Op.EQ:
            same = [-enc.xor2(x, y) for x, y in zip(lits[a[0]], lits[a[1]])]
            bits = [enc.reduce(enc.and2, same)]
        elif op is Op.LT:
            bits = [enc.ult(lits[a[0]], lits[a[1]])]
        elif op is Op.LTS:
            x, y = list(lits[a[0]]), list(lits[a[1]])
            x[-1], y[-1] = -x[-1], -y[-1]
            bits = [enc.ult(x, y)]
        elif op is Op.MUX:
            bits = _mux_bits(enc, lits[a[0]], [lits[x] for x in a[1:]])
        elif op in (Op.MUL, Op.MULS):
            bits = _mul_bits(enc, lits[a[0]], lits[a[1]], w, signed=op is Op.MULS)
        else:
            raise VerificationError(f"cannot encode {op.value} nodes")
        for i, b in enumerate(bits):
            if abs(b) not in enc.names:
                enc.names[abs(b)] = f"{label}[{i}]"
        lits[uid] = bits
    out = lits[c.outputs[0].uid][0]
    enc.clauses.append([out])
    return Cnf(enc.n, enc.clauses, enc.names, out)


def _mux_bits(enc: _Tseitin, sel: list[int], cases: list[list[int]]) -> list[int]:
    padded = cases + [cases[-1]] * ((1 << len(sel)) - len(cases))
    level = padded
    for s in sel:
        level = [[enc.mux2(s, t, f) for f, t in zip(level[i], level[i + 1])]
                 for i in range(0, len(level), 2)]
    return level[0]


def _mul_bits(enc: _Tseitin, a: list[int], b: list[int], w: int, *, signed: bool) -> list[int]:
    if signed:
        a = a + [a[-1]] * (w - len(a))
        b = b + [b[-1]] * (w - len(b))
    else:
        a = a + [-enc.true()] * (w - len(a))
        b = b + [-enc.true()] * (w - len(b))
    acc = [-enc.true()] * w
    for i in range(w):
        row = [-enc.true()] * i + [enc.and2(x, b[i]) for x in a[: w - i]]
        acc = enc.add(acc, row, -enc.true())
    return acc


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    n = None
    clauses: list[list[int]] = []
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            _p, _cnf, v, _c = line.split()
            n = int(v)
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    if n is None:
        raise VerificationError("DIMACS text has no 'p cnf' header")
    return n, clauses


def brute_force_sat(dimacs: str | Cnf, *, max_vars: int = 20) -> dict[int, bool] | None:
    """Satisfying assignment of a small CNF, or None when unsatisfiable.

    All 2^n assignments are checked at once: each variable is a big integer
    whose bit ``k`` is its value in assignment ``k``.
    """
    if isinstance(dimacs, Cnf):
        n, clauses = dimacs.num_vars, dimacs.clauses
    else:
        n, clauses = parse_dimacs(dimacs)
    if n > max_vars:
        raise BoundExceeded(f"{n} variables exceed the brute-force bound of {max_vars}")
    size = 1 << n
    full = mask(size)
    pattern = {}
    for i in range(n):
        half = 1 << i
        block = mask(half) << half
        span = half * 2
        while span < size:
            block |= block << span
            span *= 2
        pattern[i + 1] = block
    sat = full
    for clause in clauses:
        c = 0
        for lit in clause:
            c |= pattern[lit] if lit > 0 else full ^ pattern[-lit]
        sat &= c
        if not sat:
            return None
    k = (sat & -sat).bit_length() - 1
    return {i: bool(k >> (i - 1) & 1) for i in range(1, n + 1)}
