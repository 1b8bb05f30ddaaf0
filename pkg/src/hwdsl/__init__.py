"""A small hardware description DSL embedded in Python.

Circuits are built as width-checked signal graphs, closed into validated
:class:`Circuit` objects, simulated cycle by cycle, drawn as text
waveforms, compared for equivalence and printed as Verilog.
"""

from __future__ import annotations

from .bitvec import BitVec, ceil_log2
from .circuit import Circuit, instantiate, stats
from .cyclesim import Simulator
from .errors import HwError
from .interface import Array, Nested, ScalarType, interface
from .signal import Builder, RegSpec, Signal
from .rtlgen import emit_verilog
from .verify import bmc, equiv_exhaustive, equiv_random, to_cnf
from .waveform import RenderConfig, attach, render

__all__ = [
    "BitVec", "ceil_log2", "Circuit", "instantiate", "stats", "Simulator", "HwError",
    "Array", "Nested", "ScalarType", "interface", "Builder", "RegSpec", "Signal",
    "emit_verilog", "bmc", "equiv_exhaustive", "equiv_random", "to_cnf",
    "RenderConfig", "attach", "render",
]
