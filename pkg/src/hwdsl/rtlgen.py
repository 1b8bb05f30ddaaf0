"""Verilog-2001 emission.

Naming: ports keep their names; a wire is an alias for its driver and lends
its name to an unnamed driver; other nodes use their first naming hint
(legalised) or ``_<uid>``, uniquified per module. Constants and unnamed
single-use expressions are written inline, so a counter comes out as

    x <= (x == 7'd100) ? 7'd0 : (x + 7'd1);

Operands of multiplies and of part-selects are always declared, since
Verilog would otherwise evaluate them at a different width.
"""

from __future__ import annotations

import re
from collections import Counter

from .circuit import Circuit
from .naming import Namer, is_legal_identifier, legalize_name
from .signal import Node, Op

__all__ = ["emit_verilog", "legalize_name", "lint_verilog", "LintError"]

_INLINE_OPS = frozenset({Op.ADD, Op.SUB, Op.AND, Op.OR, Op.XOR, Op.NOT, Op.EQ, Op.LT, Op.LTS,
                         Op.MUX, Op.CAT})
_BIN = {Op.ADD: "+", Op.SUB: "-", Op.AND: "&", Op.OR: "|", Op.XOR: "^", Op.EQ: "==", Op.LT: "<"}
CASE_THRESHOLD = 4


def _range(width: int) -> str:
    return f"[{width - 1}:0] " if width > 1 else ""


def _lit(width: int, value: int) -> str:
    return f"{width}'d{value}"


class _Emitter:
    def __init__(self, circuit: Circuit, module_name: str, child_names: dict[int, str]) -> None:
        self.c = circuit
        self.module_name = module_name
        self.child_names = child_names
        self.nodes = circuit.nodes
        self.names: dict[int, str] = {}
        self.inline: set[int] = set()
        self.kind: dict[int, str] = {}

    # -- analysis -----------------------------------------------------------

    def resolve(self, uid: int) -> int:
        while self.nodes[uid].op is Op.WIRE:
            uid = self.nodes[uid].args[0]
        return uid

    def _users(self) -> tuple[Counter, dict[int, set[str]]]:
        uses: Counter = Counter()
        roles: dict[int, set[str]] = {}

        def use(uid: int, role: str) -> None:
            r = self.resolve(uid)
            uses[r] += 1
            roles.setdefault(r, set()).add(role)

        for node in self.nodes.values():
            op = node.op
            if op in (Op.WIRE, Op.INPUT, Op.CONST):
                continue
            if op is Op.REG:
                use(node.args[0], "reg_d")
                use(node.reg.clock, "clock")
                if node.reg.clear is not None:
                    use(node.reg.clear, "cond")
                if node.reg.enable is not None:
                    use(node.reg.enable, "cond")
            elif op is Op.MEM:
                use(node.args[0], "clock")
                for a in node.args[1:]:
                    use(a, "mem")
            elif op is Op.MEM_READ:
                use(node.args[1], "mem")
            elif op is Op.INST_OUT:
                pass
            elif op in (Op.MUL, Op.MULS, Op.SELECT):
                for a in node.args:
                    use(a, "wide")
            elif op is Op.MUX:
                use(node.args[0], "mux_sel" if len(node.args) > 3 else "cond")
                for a in node.args[1:]:
                    use(a, "expr")
            else:
                for a in node.args:
                    use(a, "expr")
        for inst in self.c.instances:
            for u in inst.inputs.values():
                use(u, "expr")
        for p in self.c.outputs:
            use(p.uid, "port")
        return uses, roles

    def _hints(self) -> dict[int, list[str]]:
        hints: dict[int, list[str]] = {}
        for uid, node in self.nodes.items():
            r = self.resolve(uid)
            if node.op is Op.WIRE:
                hints.setdefault(r, []).extend(node.names)
            else:
                hints.setdefault(r, [])[:0] = node.names
        return hints

    def analyse(self) -> None:
        uses, roles = self._users()
        hints = self._hints()
        namer = Namer()
        for p in self.c.inputs:
            self.names[p.uid] = namer.claim(p.name)
        self.port_alias: dict[str, int] = {}
        for p in self.c.outputs:
            r = self.resolve(p.uid)
            node = self.nodes[r]
            if r in self.names or node.op in (Op.CONST, Op.SELECT):
                self.port_alias[p.name] = r
                namer.claim(p.name)
            else:
                self.names[r] = namer.claim(p.name)
        for uid in sorted(self.nodes):
            node = self.nodes[uid]
            if uid in self.names or node.op is Op.WIRE:
                continue
            named = bool(hints.get(uid))
            if node.op in (Op.CONST, Op.SELECT) and not named:
                self.inline.add(uid)
                continue
            if (node.op in _INLINE_OPS and not named and uses[uid] == 1
                    and roles.get(uid, set()) <= {"expr", "reg_d", "cond"}
                    and not (node.op is Op.MUX and len(node.args) - 1 > CASE_THRESHOLD)):
                self.inline.add(uid)
                continue
            base = legalize_name(hints[uid][0]) if named else legalize_name(None, uid)
            self.names[uid] = namer.claim(base)
        for uid, node in self.nodes.items():
            if uid in self.names and node.op is not Op.INPUT:
                big_mux = node.op is Op.MUX and len(node.args) - 1 > CASE_THRESHOLD
                self.kind[uid] = "reg" if node.op is Op.REG or big_mux else "wire"

    # -- expressions --------------------------------------------------------

    def ref(self, uid: int) -> str:
        uid = self.resolve(uid)
        if uid in self.names:
            return self.names[uid]
        if uid in self.inline:
            node = self.nodes[uid]
            if node.op in (Op.CONST, Op.SELECT):
                return self.expr(uid)
            return f"({self.expr(uid)})"
        raise AssertionError(f"node _{uid} has no name")

    def rhs(self, uid: int) -> str:
        """Like :meth:`ref`, without parentheses around a top-level inline expression."""
        uid = self.resolve(uid)
        if uid in self.inline:
            return self.expr(uid)
        return self.ref(uid)

    def _select(self, node: Node) -> str:
        lo, hi = node.lo, node.lo + node.width - 1
        src = self.resolve(node.args[0])
        s = self.nodes[src]
        while s.op is Op.SELECT and src not in self.names:
            lo, hi = lo + s.lo, hi + s.lo
            src = self.resolve(s.args[0])
            s = self.nodes[src]
        if s.op is Op.CONST and src not in self.names:
            return _lit(node.width, (s.value.value >> lo) & ((1 << node.width) - 1))
        name = self.names[src]
        return f"{name}[{hi}]" if hi == lo else f"{name}[{hi}:{lo}]"

    def expr(self, uid: int) -> str:
        node = self.nodes[uid]
        op, a = node.op, node.args
        if op is Op.CONST:
            return _lit(node.width, node.value.value)
        if op is Op.SELECT:
            return self._select(node)
        if op in _BIN:
            return f"{self.ref(a[0])} {_BIN[op]} {self.ref(a[1])}"
        if op is Op.NOT:
            return f"~{self.ref(a[0])}"
        if op is Op.LTS:
            return f"$signed({self.ref(a[0])}) < $signed({self.ref(a[1])})"
        if op is Op.MUL:
            return f"{self.ref(a[0])} * {self.ref(a[1])}"
        if op is Op.MULS:
            return f"$signed({self.ref(a[0])}) * $signed({self.ref(a[1])})"
        if op is Op.CAT:
            return "{" + ", ".join(self.ref(x) for x in a) + "}"
        if op is Op.MUX:
            sel, cases = a[0], a[1:]
            if len(cases) == 2:
                return f"{self.ref(sel)} ? {self.ref(cases[1])} : {self.ref(cases[0])}"
            sw = self.nodes[self.resolve(sel)].width
            s = self.ref(sel)
            parts = [f"{s} == {_lit(sw, i)} ? {self.ref(c)} : " for i, c in enumerate(cases[:-1])]
            return "".join(parts) + self.ref(cases[-1])
        if op is Op.MEM_READ:
            mem = self.nodes[self.resolve(a[0])]
            addr = self.ref(a[1])
            aw = self.nodes[self.resolve(a[1])].width
            read = f"{self.names[mem.uid]}[{addr}]"
            if (1 << aw) == mem.size:
                return read
            return f"{addr} < {_lit(aw, mem.size)} ? {read} : {_lit(node.width, 0)}"
        raise AssertionError(f"no expression form for {op.value}")

    # -- text ---------------------------------------------------------------

    def emit(self) -> str:
        self.analyse()
        c = self.c
        ports = []
        for p in c.inputs:
            ports.append(f"input {_range(p.width)}{p.name}")
        for p in c.outputs:
            r = self.resolve(p.uid)
            is_reg = p.name not in self.port_alias and self.kind.get(r) == "reg"
            ports.append(f"output {'reg ' if is_reg else ''}{_range(p.width)}{p.name}")
        lines = [f"module {self.module_name} ("]
        lines += [f"  {p}," for p in ports[:-1]] + [f"  {ports[-1]}", ");", ""]

        port_names = {p.name for p in c.inputs + c.outputs}
        decls = []
        for uid in sorted(self.names):
            node = self.nodes[uid]
            name = self.names[uid]
            if node.op is Op.INPUT or name in port_names:
                continue
            if node.op is Op.MEM:
                decls.append(f"  reg {_range(node.width)}{name} [0:{node.size - 1}];")
            else:
                decls.append(f"  {self.kind[uid]} {_range(node.width)}{name};")
        if decls:
            lines += decls + [""]

        body = []
        for uid in c.schedule:
            node = self.nodes[uid]
            if uid not in self.names or node.op in (Op.INPUT, Op.REG, Op.MEM, Op.INST_OUT):
                continue
            if node.op is Op.MUX and len(node.args) - 1 > CASE_THRESHOLD:
                body += self._case_block(uid)
            else:
                body.append(f"  assign {self.names[uid]} = {self.expr(uid)};")
        for p in c.outputs:
            if p.name in self.port_alias:
                body.append(f"  assign {p.name} = {self.rhs(self.port_alias[p.name])};")
        for inst in c.instances:
            body += self._instance(inst)
        for uid in c.sequential:
            node = self.nodes[uid]
            body += self._register(node) if node.op is Op.REG else self._memory(node)
        lines += body
        while lines[-1] == "":
            lines.pop()
        lines += ["endmodule", ""]
        return "\n".join(lines)

    def _case_block(self, uid: int) -> list[str]:
        node = self.nodes[uid]
        sel, cases = node.args[0], node.args[1:]
        sw = self.nodes[self.resolve(sel)].width
        name = self.names[uid]
        out = ["  always @* begin", f"    case ({self.ref(sel)})"]
        for i, cse in enumerate(cases[:-1]):
            out.append(f"      {_lit(sw, i)}: {name} = {self.rhs(cse)};")
        out.append(f"      default: {name} = {self.rhs(cases[-1])};")
        out += ["    endcase", "  end"]
        return out

    def _register(self, node: Node) -> list[str]:
        r = node.reg
        q = self.names[node.uid]
        d = self.rhs(node.args[0])
        out = [f"  initial {q} = {_lit(node.width, r.initial.value)};"] if r.initial.value else []
        out.append(f"  always @(posedge {self.ref(r.clock)}) begin")
        if r.clear is not None:
            out.append(f"    if ({self.ref(r.clear)}) {q} <= {_lit(node.width, r.clear_to.value)};")
            if r.enable is not None:
                out.append(f"    else if ({self.ref(r.enable)}) {q} <= {d};")
            else:
                out.append(f"    else {q} <= {d};")
        elif r.enable is not None:
            out.append(f"    if ({self.ref(r.enable)}) {q} <= {d};")
        else:
            out.append(f"    {q} <= {d};")
        out.append("  end")
        return out

    def _memory(self, node: Node) -> list[str]:
        clk, we, wa, wd = node.args
        m = self.names[node.uid]
        aw = self.nodes[self.resolve(wa)].width
        guard = "" if (1 << aw) == node.size else f" && {self.ref(wa)} < {_lit(aw, node.size)}"
        return [f"  always @(posedge {self.ref(clk)}) begin",
                f"    if ({self.ref(we)}{guard}) {m}[{self.ref(wa)}] <= {self.rhs(wd)};",
                "  end"]

    def _instance(self, inst) -> list[str]:
        mod = self.child_names[id(inst)]
        conns = [f".{p.name}({self.rhs(inst.inputs[p.name])})" for p in inst.circuit.inputs]
        conns += [f".{p.name}({self.ref(inst.outputs[p.name])})" for p in inst.circuit.outputs
                  if p.name in inst.outputs]
        out = [f"  {mod} {legalize_name(inst.name)} ("]
        out += [f"    {x}," for x in conns[:-1]] + [f"    {conns[-1]}", "  );"]
        return out


def emit_verilog(circuit: Circuit, *, hierarchical: bool = False) -> str:
    """Verilog text for ``circuit``: one module, or one per instance when hierarchical."""
    if not hierarchical:
        return _Emitter(circuit.flatten(), circuit.name, {}).emit()
    namer = Namer({circuit.name})
    texts: list[str] = []

    def visit(c: Circuit, module_name: str) -> None:
        child_names: dict[int, str] = {}
        for inst in c.instances:
            child_names[id(inst)] = namer.claim(legalize_name(f"{inst.circuit.name}_{inst.name}"))
        for inst in c.instances:
            visit(inst.circuit, child_names[id(inst)])
        texts.append(_Emitter(c, module_name, child_names).emit())

    visit(circuit, circuit.name)
    return "\n".join(texts)


# --------------------------------------------------------------------------
# lint


class LintError(Exception):
    pass


_DECL = re.compile(r"^\s*(input|output|wire|reg)\b(.*)$")
_IDENT_TOKEN = re.compile(r"(?<![\w$'])([A-Za-z_][A-Za-z0-9_]*)")
_RESERVED_IN_BODY = frozenset({
    "module", "endmodule", "input", "output", "wire", "reg", "assign", "always", "posedge",
    "begin", "end", "if", "else", "case", "endcase", "default", "initial",
})


def lint_verilog(text: str) -> list[str]:
    """Check declare-before-use and single declaration per module.

    Returns a list of problems (empty when clean). Module and instance
    names are exempt from the use check.
    """
    problems: list[str] = []
    modules = set(re.findall(r"^module\s+(\w+)", text, flags=re.M))
    declared: set[str] = set()
    module = None
    inst_line = re.compile(r"^\s*(\w+)\s+(\w+)\s*\($")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = re.sub(r"\d+'[dhb][0-9a-fA-F]+", " ", raw)
        line = re.sub(r"\$signed", " ", line)
        if line.startswith("module "):
            module = line.split()[1]
            declared = set()
            continue
        if module is None:
            continue
        m = inst_line.match(line)
        if m and m.group(1) in modules:
            continue
        conn = re.match(r"^\s*\.(\w+)\((.*)\),?$", line)
        if conn:
            line = conn.group(2)
        d = _DECL.match(line)
        if d:
            rest = d.group(2)
            rest = re.sub(r"\[[^\]]*\]", " ", rest)
            rest = rest.split("=", 1)
            names = [t for t in _IDENT_TOKEN.findall(rest[0]) if t != "reg"]
            for name in names:
                if not is_legal_identifier(name):
                    problems.append(f"{module}:{lineno}: illegal identifier {name!r}")
                if name in declared:
                    problems.append(f"{module}:{lineno}: {name!r} declared twice")
                declared.add(name)
            uses = _IDENT_TOKEN.findall(rest[1]) if len(rest) > 1 else []
        else:
            uses = _IDENT_TOKEN.findall(line)
        for name in uses:
            if name in _RESERVED_IN_BODY or name in modules:
                continue
            if name not in declared:
                problems.append(f"{module}:{lineno}: {name!r} used before declaration")
    return problems
