"""A small interpreter for the Verilog subset that :mod:`rtlgen` writes.

It parses ANSI module headers, ``wire``/``reg``/memory declarations,
continuous assigns, ``always @(posedge clk)`` blocks of ``if``/``else`` and
non-blocking assignments, ``always @*`` case blocks and module instances,
then runs them with two-state values. Expression widths follow the Verilog
rules (context-determined operands, self-determined concatenations,
comparisons and ternary conditions; ``$signed`` sign-extension), which is
what makes it useful as an independent check on the emitter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .bitvec import mask

_TOKEN = re.compile(r"""
    (?P<num>\d+'[dhb][0-9a-fA-F_]+) |
    (?P<int>\d+) |
    (?P<id>\$?[A-Za-z_][A-Za-z0-9_$]*) |
    (?P<op><=|==|@\*|[()\[\]{},;:?=<+\-*&|^~@.]) |
    (?P<ws>\s+)
""", re.X)


class VerilogSyntaxError(Exception):
    pass


def _tokenize(text: str) -> list[str]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise VerilogSyntaxError(f"unexpected character {text[pos]!r} at {pos}")
        if m.lastgroup != "ws":
            out.append(m.group())
        pos = m.end()
    return out


def _literal(tok: str) -> tuple[str, int, int]:
    w, rest = tok.split("'")
    base = {"d": 10, "h": 16, "b": 2}[rest[0]]
    return ("lit", int(w), int(rest[1:].replace("_", ""), base))


@dataclass
class Decl:
    width: int
    kind: str
    init: int = 0
    size: int = 0
    direction: str | None = None


@dataclass
class Module:
    name: str
    ports: list[str] = field(default_factory=list)
    decls: dict[str, Decl] = field(default_factory=dict)
    assigns: list[tuple] = field(default_factory=list)
    ff: list[tuple[str, list]] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[str]) -> None:
        self.t = tokens
        self.i = 0

    def peek(self, k: int = 0) -> str | None:
        j = self.i + k
        return self.t[j] if j < len(self.t) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise VerilogSyntaxError("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise VerilogSyntaxError(f"expected {tok!r}, got {got!r}")

    def modules(self) -> dict[str, Module]:
        mods = {}
        while self.peek() is not None:
            m = self.module()
            mods[m.name] = m
        return mods

    def range_width(self) -> int:
        if self.peek() != "[":
            return 1
        self.next()
        hi = int(self.next())
        self.expect(":")
        lo = int(self.next())
        self.expect("]")
        return hi - lo + 1

    def module(self) -> Module:
        self.expect("module")
        m = Module(self.next())
        self.expect("(")
        while self.peek() != ")":
            direction = self.next()
            kind = "wire"
            if self.peek() == "reg":
                self.next()
                kind = "reg"
            w = self.range_width()
            name = self.next()
            m.ports.append(name)
            m.decls[name] = Decl(w, kind, direction=direction)
            if self.peek() == ",":
                self.next()
        self.expect(")")
        self.expect(";")
        while self.peek() != "endmodule":
            self.item(m)
        self.next()
        return m

    def item(self, m: Module) -> None:
        tok = self.next()
        if tok in ("wire", "reg"):
            w = self.range_width()
            name = self.next()
            decl = Decl(w, tok)
            if self.peek() == "[":
                self.next()
                self.expect("0")
                self.expect(":")
                decl.size = int(self.next()) + 1
                self.expect("]")
            if self.peek() == "=":
                self.next()
                decl.init = _literal(self.next())[2]
            self.expect(";")
            m.decls[name] = decl
        elif tok == "initial":
            name = self.next()
            self.expect("=")
            m.decls[name].init = _literal(self.next())[2]
            self.expect(";")
        elif tok == "assign":
            lhs = self.next()
            self.expect("=")
            m.assigns.append(("assign", lhs, self.expr()))
            self.expect(";")
        elif tok == "always":
            if self.peek() == "@*":
                self.next()
                self.expect("begin")
                m.assigns.append(self.case())
                self.expect("end")
            else:
                self.expect("@")
                self.expect("(")
                self.expect("posedge")
                clock = self.next()
                self.expect(")")
                self.expect("begin")
                stmts = []
                while self.peek() != "end":
                    stmts.append(self.stmt())
                self.next()
                m.ff.append((clock, stmts))
        else:
            inst = self.next()
            self.expect("(")
            conns = {}
            while self.peek() != ")":
                self.expect(".")
                port = self.next()
                self.expect("(")
                conns[port] = self.expr()
                self.expect(")")
                if self.peek() == ",":
                    self.next()
            self.expect(")")
            self.expect(";")
            m.assigns.append(("inst", tok, inst, conns))

    def case(self) -> tuple:
        self.expect("case")
        self.expect("(")
        subject = self.expr()
        self.expect(")")
        items: list[tuple[Any, str, tuple]] = []
        while self.peek() != "endcase":
            if self.peek() == "default":
                self.next()
                key = None
            else:
                key = _literal(self.next())[2]
            self.expect(":")
            lhs = self.next()
            self.expect("=")
            items.append((key, lhs, self.expr()))
            self.expect(";")
        self.next()
        return ("case", subject, items)

    def stmt(self) -> tuple:
        if self.peek() == "if":
            self.next()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.stmt()
            other = None
            if self.peek() == "else":
                self.next()
                other = self.stmt()
            return ("if", cond, then, other)
        target = self.next()
        index = None
        if self.peek() == "[":
            self.next()
            index = self.expr()
            self.expect("]")
        self.expect("<=")
        value = self.expr()
        self.expect(";")
        return ("nb", target, index, value)

    # expressions, lowest precedence first
    def expr(self) -> tuple:
        cond = self.binary(0)
        if self.peek() == "?":
            self.next()
            t = self.expr()
            self.expect(":")
            f = self.expr()
            return ("tern", cond, t, f)
        return cond

    _LEVELS = [("|",), ("^",), ("&",), ("==",), ("<",), ("+", "-"), ("*",)]

    def binary(self, level: int) -> tuple:
        if level == len(self._LEVELS):
            return self.unary()
        lhs = self.binary(level + 1)
        while self.peek() in self._LEVELS[level]:
            op = self.next()
            lhs = ("bin", op, lhs, self.binary(level + 1))
        return lhs

    def unary(self) -> tuple:
        if self.peek() == "~":
            self.next()
            return ("not", self.unary())
        return self.primary()

    def primary(self) -> tuple:
        tok = self.next()
        if tok == "(":
            e = self.expr()
            self.expect(")")
            return e
        if tok == "{":
            parts = [self.expr()]
            while self.peek() == ",":
                self.next()
                parts.append(self.expr())
            self.expect("}")
            return ("cat", parts)
        if tok == "$signed":
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return ("signed", e)
        if "'" in tok:
            return _literal(tok)
        if self.peek() == "[":
            self.next()
            if self.peek(1) == ":" and self.peek().isdigit():
                hi = int(self.next())
                self.expect(":")
                lo = int(self.next())
                self.expect("]")
                return ("sel", tok, hi, lo)
            if self.peek().isdigit() and self.peek(1) == "]":
                b = int(self.next())
                self.expect("]")
                return ("sel", tok, b, b)
            idx = self.expr()
            self.expect("]")
            return ("idx", tok, idx)
        return ("id", tok)


def parse_verilog(text: str) -> dict[str, Module]:
    return _Parser(_tokenize(text)).modules()


# --------------------------------------------------------------------------
# evaluation


class _Instance:
    def __init__(self, modules: dict[str, Module], module: Module) -> None:
        self.m = module
        self.env: dict[str, int] = {}
        self.mems: dict[str, list[int]] = {}
        for name, d in module.decls.items():
            if d.size:
                self.mems[name] = [0] * d.size
            else:
                self.env[name] = d.init
        self.children: dict[str, _Instance] = {}
        for item in module.assigns:
            if item[0] == "inst":
                self.children[item[2]] = _Instance(modules, modules[item[1]])

    def width(self, e: tuple) -> int:
        k = e[0]
        if k == "lit":
            return e[1]
        if k == "id":
            return self.m.decls[e[1]].width
        if k == "sel":
            return e[2] - e[3] + 1
        if k == "idx":
            return self.m.decls[e[1]].width
        if k == "cat":
            return sum(self.width(p) for p in e[1])
        if k in ("not", "signed"):
            return self.width(e[1])
        if k == "bin":
            if e[1] in ("==", "<"):
                return 1
            return max(self.width(e[2]), self.width(e[3]))
        if k == "tern":
            return max(self.width(e[2]), self.width(e[3]))
        raise AssertionError(k)

    def signed(self, e: tuple) -> bool:
        k = e[0]
        if k == "signed":
            return True
        if k == "not":
            return self.signed(e[1])
        if k == "bin" and e[1] not in ("==", "<"):
            return self.signed(e[2]) and self.signed(e[3])
        if k == "tern":
            return self.signed(e[2]) and self.signed(e[3])
        return False

    def eval(self, e: tuple, ctx: int, sgn: bool) -> int:
        k = e[0]
        m = mask(ctx)
        if k == "lit":
            return e[2] & m
        if k == "id":
            return self.env[e[1]] & m
        if k == "sel":
            return (self.env[e[1]] >> e[3]) & mask(e[2] - e[3] + 1) & m
        if k == "idx":
            mem = self.mems[e[1]]
            a = self.eval(e[2], self.width(e[2]), False)
            return (mem[a] if a < len(mem) else 0) & m
        if k == "cat":
            v = 0
            for p in e[1]:
                w = self.width(p)
                v = (v << w) | self.eval(p, w, self.signed(p))
            return v & m
        if k == "signed":
            w = self.width(e[1])
            v = self.eval(e[1], w, False)
            if sgn and v >> (w - 1):
                v -= 1 << w
            return v & m
        if k == "not":
            return ~self.eval(e[1], ctx, sgn) & m
        if k == "tern":
            c = self.eval(e[1], self.width(e[1]), self.signed(e[1]))
            return self.eval(e[2] if c else e[3], ctx, sgn)
        if k == "bin":
            op, a, b = e[1], e[2], e[3]
            if op in ("==", "<"):
                w = max(self.width(a), self.width(b))
                s = self.signed(a) and self.signed(b)
                va, vb = self.eval(a, w, s), self.eval(b, w, s)
                if s:
                    va = va - (1 << w) if va >> (w - 1) else va
                    vb = vb - (1 << w) if vb >> (w - 1) else vb
                return int(va == vb if op == "==" else va < vb)
            va, vb = self.eval(a, ctx, sgn), self.eval(b, ctx, sgn)
            r = {"+": va + vb, "-": va - vb, "*": va * vb,
                 "&": va & vb, "|": va | vb, "^": va ^ vb}[op]
            return r & m
        raise AssertionError(k)

    def rhs(self, lhs_width: int, e: tuple) -> int:
        ctx = max(lhs_width, self.width(e))
        return self.eval(e, ctx, self.signed(e)) & mask(lhs_width)

    def settle_once(self) -> bool:
        changed = False

        def put(name: str, v: int) -> None:
            nonlocal changed
            if self.env.get(name) != v:
                self.env[name] = v
                changed = True

        for item in self.m.assigns:
            if item[0] == "assign":
                put(item[1], self.rhs(self.m.decls[item[1]].width, item[2]))
            elif item[0] == "case":
                subject = self.eval(item[1], self.width(item[1]), False)
                for key, lhs, e in item[2]:
                    if key is None or key == subject:
                        put(lhs, self.rhs(self.m.decls[lhs].width, e))
                        break
            else:
                child = self.children[item[2]]
                for port, e in item[3].items():
                    d = child.m.decls[port]
                    if d.direction == "input":
                        child.env[port] = self.rhs(d.width, e)
                child.settle()
                for port, e in item[3].items():
                    if child.m.decls[port].direction == "output":
                        put(e[1], child.env[port])
        return changed

    def settle(self) -> None:
        for _ in range(10_000):
            if not self.settle_once():
                return
        raise RuntimeError("combinational logic did not settle")

    def collect(self, updates: list) -> None:
        def run(st: tuple | None) -> None:
            if st is None:
                return
            if st[0] == "if":
                c = self.eval(st[1], self.width(st[1]), self.signed(st[1]))
                run(st[2] if c else st[3])
                return
            _nb, target, index, value = st
            w = self.m.decls[target].width
            v = self.rhs(w, value)
            if index is None:
                updates.append((self.env, target, v))
            else:
                a = self.eval(index, self.width(index), False)
                mem = self.mems[target]
                if a < len(mem):
                    updates.append((mem, a, v))

        for _clock, stmts in self.m.ff:
            for st in stmts:
                run(st)
        for child in self.children.values():
            child.collect(updates)


class VerilogSim:
    """Cycle-based runner for emitted Verilog with the same phase order as the simulator."""

    def __init__(self, text: str, top: str | None = None) -> None:
        self.modules = parse_verilog(text)
        if top is None:
            top = list(self.modules)[-1]
        self.top = _Instance(self.modules, self.modules[top])
        self.outputs = [p for p in self.top.m.ports if self.top.m.decls[p].direction == "output"]
        self.before: dict[str, int] = {}

    def poke(self, name: str, value: int) -> None:
        self.top.env[name] = value & mask(self.top.m.decls[name].width)

    def peek(self, name: str) -> int:
        self.top.settle()
        return self.top.env[name]

    def cycle(self) -> None:
        self.top.settle()
        self.before = {p: self.top.env[p] for p in self.outputs}
        updates: list = []
        self.top.collect(updates)
        for store, key, v in updates:
            store[key] = v
