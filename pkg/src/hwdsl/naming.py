"""Identifier legalisation and uniquification shared by RTL and waveforms."""

from __future__ import annotations

import re

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

VERILOG_KEYWORDS = frozenset("""
always and assign automatic begin buf bufif0 bufif1 case casex casez cell cmos config deassign
default defparam design disable edge else end endcase endconfig endfunction endgenerate
endmodule endprimitive endspecify endtable endtask event for force forever fork function
generate genvar highz0 highz1 if ifnone incdir include initial inout input instance integer
join large liblist library localparam macromodule medium module nand negedge nmos nor
noshowcancelled not notif0 notif1 or output parameter pmos posedge primitive pull0 pull1
pulldown pullup pulsestyle_onevent pulsestyle_ondetect rcmos real realtime reg release repeat
rnmos rpmos rtran rtranif0 rtranif1 scalared showcancelled signed small specify specparam
strong0 strong1 supply0 supply1 table task time tran tranif0 tranif1 tri tri0 tri1 triand
trior trireg unsigned use uwire vectored wait wand weak0 weak1 while wire wor xnor xor
""".split())


def is_legal_identifier(name: str) -> bool:
    return bool(_IDENT.match(name)) and name not in VERILOG_KEYWORDS


def legalize_name(hint: str | None, uid: int | None = None) -> str:
    """Map a naming hint (or a bare uid) onto a legal Verilog identifier."""
    if hint is None:
        if uid is None:
            raise ValueError("legalize_name needs a hint or a uid")
        return f"_{uid}"
    name = re.sub(r"[^A-Za-z0-9_]", "_", hint)
    if not name:
        name = "_"
    if name[0].isdigit():
        name = "_" + name
    if name in VERILOG_KEYWORDS:
        name += "_"
    return name


class Namer:
    """Hands out unique names: the first claim keeps the base, later ones get ``_0``, ``_1``..."""

    def __init__(self, reserved: set[str] | None = None) -> None:
        self.used: set[str] = set(reserved or ())
        self._next: dict[str, int] = {}

    def claim(self, base: str) -> str:
        if base not in self.used:
            self.used.add(base)
            return base
        i = self._next.get(base, 0)
        while f"{base}_{i}" in self.used:
            i += 1
        self._next[base] = i + 1
        name = f"{base}_{i}"
        self.used.add(name)
        return name
