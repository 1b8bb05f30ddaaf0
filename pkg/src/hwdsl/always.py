"""Guarded-assignment DSL in the style of a Verilog ``always`` block.

Variables are either wires (combinational, with a default) or registers
(which hold their value unless assigned). Statement lists compile to mux
trees with non-blocking, last-assignment-wins semantics; there is no
blocking assignment, so every read of ``var.value`` sees the current value.

    foo = Variable.reg(spec, 8)
    compile([foo.assign(mux2(foo.value.eq(0), foo.value, foo.value - 1))])
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence, Union

from .bitvec import ceil_log2
from .errors import AlwaysError, WidthError
from .signal import RegSpec, Signal, _lift, assign, eq, mux2, reg


class Variable:
    """Assignable signal; read through ``.value``."""

    def __init__(self, value: Signal, target: Signal, default: Signal, kind: str) -> None:
        self.value = value
        self._target = target
        self._default = default
        self.kind = kind
        self.compiled = False

    @classmethod
    def wire(cls, default: Signal) -> Variable:
        w = default.builder.wire(default.width)
        return cls(w, w, default, "wire")

    @classmethod
    def reg(cls, spec: RegSpec, width: int, *, enable: Signal | None = None) -> Variable:
        d = spec.clock.builder.wire(width)
        q = reg(spec, d, enable=enable)
        return cls(q, d, q, "reg")

    @property
    def width(self) -> int:
        return self.value.width

    def assign(self, expr: Signal | int) -> Assign:
        return Assign(self, expr)

    def named(self, name: str) -> Variable:
        self.value.named(name)
        return self

    def __repr__(self) -> str:
        return f"<Variable {self.kind} {self.value!r}>"


@dataclass
class Assign:
    var: Variable
    expr: Signal | int


@dataclass
class If:
    cond: Signal
    then: list["Statement"]
    else_: list["Statement"] = field(default_factory=list)


@dataclass
class Switch:
    subject: Signal
    cases: list[tuple[int, list["Statement"]]]
    default: list["Statement"] | None = None


Statement = Union[Assign, If, Switch]


def if_(cond: Signal, then: Sequence[Statement], else_: Sequence[Statement] = ()) -> If:
    return If(cond, list(then), list(else_))


def when(cond: Signal, body: Sequence[Statement]) -> If:
    return If(cond, list(body), [])


def switch(subject: Signal, cases: Sequence[tuple[int, Sequence[Statement]]] | Mapping[int, Sequence[Statement]],
           default: Sequence[Statement] | None = None) -> Switch:
    items = list(cases.items()) if isinstance(cases, Mapping) else list(cases)
    seen: set[int] = set()
    for k, _ in items:
        if not isinstance(k, int) or isinstance(k, bool):
            raise TypeError(f"switch case must be an int constant, got {type(k).__name__}")
        if k in seen:
            raise AlwaysError(f"duplicate switch case {k}")
        if not 0 <= k < (1 << subject.width):
            raise WidthError(f"switch case {k} does not fit the {subject.width}-bit subject")
        seen.add(k)
    return Switch(subject, [(k, list(body)) for k, body in items],
                  list(default) if default is not None else None)


Env = dict[Variable, Signal]


def _run(stmts: Iterable[Statement], env: Env) -> Env:
    for st in stmts:
        if isinstance(st, Assign):
            expr = _lift(st.expr, st.var.value)
            if expr.width != st.var.width:
                raise WidthError(f"assignment of width {expr.width} to variable of width {st.var.width}")
            env[st.var] = expr
        elif isinstance(st, If):
            _check_cond(st.cond)
            env = _merge(st.cond, _run(st.then, dict(env)), _run(st.else_, dict(env)), env)
        elif isinstance(st, Switch):
            env = _run(_switch_to_ifs(st), env)
        else:
            raise TypeError(f"not a statement: {st!r}")
    return env


def _check_cond(cond: Signal) -> None:
    if not isinstance(cond, Signal):
        raise TypeError("condition must be a Signal")
    if cond.width != 1:
        raise WidthError(f"condition must be 1 bit, got {cond.width}")


def _merge(cond: Signal, t: Env, f: Env, base: Env) -> Env:
    out = dict(base)
    for var in list(t) + [v for v in f if v not in t]:
        a = t.get(var, base.get(var, var._default))
        b = f.get(var, base.get(var, var._default))
        out[var] = a if a.uid == b.uid else mux2(cond, a, b)
    return out


def _switch_to_ifs(sw: Switch) -> list[Statement]:
    tail: list[Statement] = list(sw.default or [])
    for k, body in reversed(sw.cases):
        tail = [If(eq(sw.subject, k), body, tail)]
    return tail


def compile(stmts: Sequence[Statement]) -> None:  # noqa: A001 - mirrors the DSL's name
    """Drive every variable assigned in ``stmts`` with its mux tree."""
    env = _run(stmts, {})
    for var, value in env.items():
        if var.compiled:
            raise AlwaysError(f"{var!r} is already driven by an earlier compile")
        var.compiled = True
        assign(var._target, value)


class StateMachine:
    """Binary-encoded state register; codes follow declaration order.

    The register starts in (and clears to) the first state.
    """

    def __init__(self, states: type[enum.Enum] | Sequence[Hashable], spec: RegSpec,
                 *, name: str = "state") -> None:
        self.states = list(states)
        if len(self.states) < 2:
            raise AlwaysError("a state machine needs at least two states")
        if len(set(self.states)) != len(self.states):
            raise AlwaysError("state names must be distinct")
        self._codes = {s: i for i, s in enumerate(self.states)}
        self.width = max(1, ceil_log2(len(self.states)))
        sm_spec = RegSpec(spec.clock, spec.clear, 0, spec.enable, 0)
        self.var = Variable.reg(sm_spec, self.width).named(name)

    @property
    def current(self) -> Signal:
        return self.var.value

    def code(self, state: Hashable) -> int:
        try:
            return self._codes[state]
        except (KeyError, TypeError):
            raise AlwaysError(f"unknown state {state!r}") from None

    def is_(self, state: Hashable) -> Signal:
        return eq(self.current, self.code(state))

    def set_next(self, state: Hashable) -> Assign:
        return self.var.assign(self.code(state))

    def switch(self, cases: Sequence[tuple[Hashable, Sequence[Statement]]] | Mapping,
               default: Sequence[Statement] | None = None) -> Switch:
        items = list(cases.items()) if isinstance(cases, Mapping) else list(cases)
        coded = [(self.code(s), body) for s, body in items]
        covered = {c for c, _ in coded}
        if default is None and len(covered) < len(self.states):
            missing = [s for s in self.states if self._codes[s] not in covered]
            raise AlwaysError(f"state machine switch misses {missing} and has no default")
        return switch(self.current, coded, default)


def state_machine(states: type[enum.Enum] | Sequence[Hashable], spec: RegSpec,
                  *, name: str = "state") -> StateMachine:
    return StateMachine(states, spec, name=name)
