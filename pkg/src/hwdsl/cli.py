"""``hwdsl`` command line: registry examples to RTL, simulation, waveforms,
equivalence verdicts, DIMACS and statistics.

Exit status is 0 on success, 1 when a verdict fails (inequivalent circuits,
waveform differs from its golden) and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

from .circuit import Circuit, stats
from .cyclesim import Simulator
from .errors import BoundExceeded, GoldenMissing, HwError, NotCombinational, ParameterError, UnknownExample
from .examples import ExampleEntry, lookup, parse_overrides, registry
from .rtlgen import emit_verilog
from .verify import Counterexample, bmc, build_miter, brute_force_sat, equiv_exhaustive, equiv_random, to_cnf
from .waveform import RenderConfig, attach, expect_text, export_vcd, render

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
GOLDEN_DIR = "goldens"


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# helpers


def _split_overrides(items: Sequence[str]) -> list[str]:
    for item in items:
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
    return list(items)


def _schema_help(entry: ExampleEntry) -> str:
    rows = entry.schema()
    if not rows:
        return f"{entry.name} takes no parameters"
    body = "\n".join(f"  {n}: {t} = {d!r}" for n, t, d in rows)
    return f"parameters of {entry.name}:\n{body}"


def _elaborate(name: str, overrides: Sequence[str], *, partial: bool = False) -> tuple[ExampleEntry, Any, Circuit]:
    entry = lookup(name)
    if partial:
        known = {n for n, _, _ in entry.schema()}
        overrides = [o for o in overrides if o.split("=", 1)[0] in known]
    try:
        cfg = parse_overrides(entry, list(overrides))
    except ParameterError as exc:
        raise UsageError(f"{exc}\n{_schema_help(entry)}") from None
    return entry, cfg, entry.build(cfg)


def _check_shared_overrides(names: Iterable[str], overrides: Sequence[str]) -> None:
    known: set[str] = set()
    for n in names:
        known |= {k for k, _, _ in lookup(n).schema()}
    for o in overrides:
        key = o.split("=", 1)[0]
        if key not in known:
            raise UsageError(f"no example among {list(names)} has a parameter {key!r}")


def parse_poke_script(text: str) -> list[dict[str, int]]:
    """``poke NAME VALUE`` lines accumulate, ``cycle [N]`` closes a step."""
    steps: list[dict[str, int]] = []
    pending: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "poke" and len(words) == 3:
                pending[words[1]] = int(words[2], 0)
            elif words[0] == "cycle" and len(words) <= 2:
                n = int(words[1]) if len(words) == 2 else 1
                for _ in range(n):
                    steps.append(pending)
                    pending = {}
            else:
                raise ValueError
        except ValueError:
            raise UsageError(f"script line {lineno}: cannot parse {raw!r}") from None
    if pending:
        steps.append(pending)
    return steps


def _render_config(args: argparse.Namespace) -> RenderConfig:
    try:
        return RenderConfig(wave_width=args.wave_width, display_width=args.display_width,
                            radix=args.radix, start_cycle=args.start_cycle)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _simulate(entry: ExampleEntry, cfg: Any, circuit: Circuit, cycles: int,
              steps: list[dict[str, int]] | None, trace_all: bool):
    sim = Simulator(circuit, store_all=trace_all)
    trace = attach(sim, trace_all=trace_all)
    stimulus: Iterator[dict[str, int]] = iter(steps) if steps is not None else entry.stimuli(cfg)
    rows = []
    for inputs in itertools.islice(stimulus, cycles):
        try:
            sim.poke_all(inputs)
        except HwError as exc:
            raise UsageError(str(exc)) from None
        sim.cycle()
        rows.append(({k: v for k, v in inputs.items()}, sim.peek_outputs(before_edge=True)))
    return trace, rows


# --------------------------------------------------------------------------
# subcommands


def cmd_list(args: argparse.Namespace) -> int:
    for e in registry():
        params = ", ".join(f"{n}={d!r}" for n, _, d in e.schema())
        print(f"{e.name:<28}{e.summary}" + (f"  [{params}]" if params else ""))
    return EXIT_OK


def cmd_rtl(args: argparse.Namespace) -> int:
    _, _, circuit = _elaborate(args.example, _split_overrides(args.params))
    text = emit_verilog(circuit, hierarchical=args.hierarchical)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        path = Path(args.output or f"{circuit.name}.v")
        path.write_text(text, encoding="utf-8", newline="\n")
        print(f"wrote {path}")
    return EXIT_OK


def cmd_sim(args: argparse.Namespace) -> int:
    entry, cfg, circuit = _elaborate(args.example, _split_overrides(args.params))
    steps = None
    if args.script:
        steps = parse_poke_script(Path(args.script).read_text(encoding="utf-8"))
    cycles = args.cycles if args.cycles is not None else (len(steps) if steps is not None else 16)
    trace, rows = _simulate(entry, cfg, circuit, cycles, steps, args.all)
    if args.vcd:
        Path(args.vcd).write_text(export_vcd(trace), encoding="utf-8", newline="\n")
    if args.wave:
        sys.stdout.write(render(trace, _render_config(args)))
        return EXIT_OK
    for t, (inputs, outputs) in enumerate(rows):
        ins = " ".join(f"{k}={v}" for k, v in sorted(inputs.items()))
        outs = " ".join(f"{k}={_fmt(v.to_int(), v.width, args.radix)}" for k, v in outputs.items())
        print(f"{t:>5}  {ins}{' | ' if ins else ''}{outs}")
    return EXIT_OK


def _fmt(value: int, width: int, radix: str) -> str:
    if radix == "dec":
        return str(value)
    if radix == "bin":
        return format(value, f"0{width}b")
    return format(value, f"0{(width + 3) // 4}x")


def cmd_wave_expect(args: argparse.Namespace) -> int:
    entry, cfg, circuit = _elaborate(args.example, _split_overrides(args.params))
    trace, _ = _simulate(entry, cfg, circuit, args.cycles, None, False)
    path = Path(args.golden_dir) / f"{args.example}.txt"
    try:
        result = expect_text(render(trace, _render_config(args)), path, update=args.update or None)
    except GoldenMissing as exc:
        print(exc, file=sys.stderr)
        return EXIT_FAIL
    if result.updated:
        print(f"updated {path}")
        return EXIT_OK
    if not result.ok:
        sys.stdout.write(result.diff)
        return EXIT_FAIL
    print(f"{path}: ok")
    return EXIT_OK


def cmd_equiv(args: argparse.Namespace) -> int:
    overrides = _split_overrides(args.params)
    _check_shared_overrides([args.left, args.right], overrides)
    _, _, c1 = _elaborate(args.left, overrides, partial=True)
    _, _, c2 = _elaborate(args.right, overrides, partial=True)
    mode = args.mode
    if mode is None:
        mode = "exhaustive" if c1.is_combinational() and c2.is_combinational() else "bmc"
    try:
        if mode == "exhaustive":
            verdict = equiv_exhaustive(c1, c2, max_input_bits=args.max_input_bits)
        elif mode == "random":
            verdict = equiv_random(c1, c2, n_trials=args.trials, seed=args.seed)
        else:
            verdict = bmc(c1, c2, args.cycles, strategy=args.strategy, seed=args.seed,
                          trials=args.trials, max_input_bits=args.max_input_bits)
    except (BoundExceeded, NotCombinational) as exc:
        raise UsageError(str(exc)) from None
    print(verdict.describe())
    if isinstance(verdict, Counterexample):
        sys.stdout.write(verdict.to_poke_script())
        return EXIT_FAIL
    return EXIT_OK


def cmd_cnf(args: argparse.Namespace) -> int:
    overrides = _split_overrides(args.params)
    _check_shared_overrides([args.left, args.right], overrides)
    _, _, c1 = _elaborate(args.left, overrides, partial=True)
    _, _, c2 = _elaborate(args.right, overrides, partial=True)
    try:
        cnf = to_cnf(build_miter(c1, c2))
    except NotCombinational as exc:
        raise UsageError(str(exc)) from None
    text = cnf.to_dimacs()
    Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    print(f"wrote {args.output}: {cnf.num_vars} variables, {len(cnf.clauses)} clauses")
    if args.solve:
        if cnf.num_vars > args.max_vars:
            raise UsageError(f"{cnf.num_vars} variables exceed --max-vars {args.max_vars}")
        model = brute_force_sat(text, max_vars=args.max_vars)
        print("SAT (circuits differ)" if model is not None else "UNSAT (circuits equivalent)")
        return EXIT_FAIL if model is not None else EXIT_OK
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    _, _, circuit = _elaborate(args.example, _split_overrides(args.params))
    s = stats(circuit)
    if args.json:
        print(json.dumps(s.to_dict(), indent=2, sort_keys=True))
    else:
        print(s.format())
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _add_render_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--radix", choices=["hex", "dec", "bin"], default="hex")
    p.add_argument("--wave-width", type=int, default=1, help="characters per cycle, minus one")
    p.add_argument("--display-width", type=int, default=80)
    p.add_argument("--start-cycle", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hwdsl", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list registry examples and their parameters").set_defaults(fn=cmd_list)

    p = sub.add_parser("rtl", help="emit Verilog")
    p.add_argument("example")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--hierarchical", action="store_true", help="one module per instance")
    p.add_argument("-o", "--output", help="output file (default <circuit>.v, '-' for stdout)")
    p.set_defaults(fn=cmd_rtl)

    p = sub.add_parser("sim", help="simulate with the default testbench or a poke script")
    p.add_argument("example")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--cycles", type=int)
    p.add_argument("--wave", action="store_true", help="print an ASCII waveform")
    p.add_argument("--all", action="store_true", help="also trace named internal signals")
    p.add_argument("--vcd", metavar="FILE")
    p.add_argument("--script", metavar="FILE", help="poke script (poke NAME VALUE / cycle)")
    _add_render_flags(p)
    p.set_defaults(fn=cmd_sim)

    p = sub.add_parser("wave-expect", help="compare the waveform against goldens/<example>.txt")
    p.add_argument("example")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--cycles", type=int, default=6)
    p.add_argument("--update", action="store_true", help="rewrite the golden (or set GOLDEN_UPDATE=1)")
    p.add_argument("--golden-dir", default=GOLDEN_DIR)
    _add_render_flags(p)
    p.set_defaults(fn=cmd_wave_expect)

    p = sub.add_parser("equiv", help="check two examples for equivalence")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--mode", choices=["exhaustive", "random", "bmc"])
    p.add_argument("--cycles", type=int, default=8)
    p.add_argument("--strategy", choices=["exhaustive", "random"], default="exhaustive",
                   help="input coverage for --mode bmc")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--max-input-bits", type=int, default=20)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("cnf", help="write the miter of two examples as DIMACS")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--solve", action="store_true", help="decide it with the built-in brute-force solver")
    p.add_argument("--max-vars", type=int, default=20)
    p.set_defaults(fn=cmd_cnf)

    p = sub.add_parser("stats", help="node counts, registers and logic depth")
    p.add_argument("example")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_stats)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UnknownExample as exc:
        print(f"hwdsl: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ParameterError) as exc:
        print(f"hwdsl: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"hwdsl: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
