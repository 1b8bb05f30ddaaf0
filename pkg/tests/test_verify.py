from __future__ import annotations

import random
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hwdsl import signal as S
from hwdsl.circuit import Circuit
from hwdsl.cyclesim import Simulator
from hwdsl.errors import BoundExceeded, InterfaceMismatch, NotCombinational, VerificationError
from hwdsl.examples import adder_interface, lookup
from hwdsl.signal import Builder
from hwdsl.verify import (
    Counterexample, Equivalent, NoCounterexampleFound, bmc, brute_force_sat, build_miter, equiv_exhaustive,
    equiv_random, parse_dimacs, replay, to_cnf,
)
from randcirc import random_comb


def _binop(f, name="c", width=4):
    with Builder():
        a = S.input_("a", width)
        b = S.input_("b", width)
        return Circuit.create(name, [a, b], {"y": f(a, b)})


def test_tree_vs_fold_exhaustive():
    v = equiv_exhaustive(lookup("tree_adder").circuit(), lookup("fold_adder").circuit())
    assert v == Equivalent("exhaustive", 4096)


def test_adder_vs_subtractor_counterexample_oracle():
    v = equiv_exhaustive(_binop(S.add, "add"), _binop(S.sub, "sub"))
    assert isinstance(v, Counterexample)
    assert {k: x.value for k, x in v.assignment.items()} == {"a": 0, "b": 1}
    assert (v.values[0].value, v.values[1].value) == (1, 15)
    assert replay(_binop(S.add, "add"), _binop(S.sub, "sub"), v) == v.values
    assert v.to_poke_script() == "# y differs at cycle 0: 1 vs 15\npoke a 0\npoke b 1\ncycle\n"


def test_interface_and_bound_checks():
    with pytest.raises(InterfaceMismatch):
        equiv_exhaustive(_binop(S.add, width=4), _binop(S.add, width=3))
    with pytest.raises(BoundExceeded):
        equiv_exhaustive(_binop(S.add, width=11), _binop(S.add, width=11))
    with pytest.raises(NotCombinational):
        equiv_exhaustive(lookup("counter").circuit(), lookup("counter").circuit())


def test_random_mode():
    same = equiv_random(_binop(S.add), _binop(lambda a, b: b + a), n_trials=500, seed=1)
    assert same == NoCounterexampleFound("random", 500)
    diff = equiv_random(_binop(S.add), _binop(S.sub), n_trials=500, seed=1)
    assert isinstance(diff, Counterexample)
    a, b = (diff.assignment[k].value for k in ("a", "b"))
    assert (a + b) % 16 != (a - b) % 16


def test_bmc_adder_fsm_against_manual_reference():
    cfg = lookup("adder_fsm").config(bits=2)
    v = bmc(lookup("adder_fsm").build(cfg), lookup("adder_fsm_manual").build(cfg), 8)
    assert v.equivalent and v.cycles == 8


def test_bmc_returns_shortest_counterexample():
    c3 = lookup("counter").build(lookup("counter").config(count_to=3, width=3))
    c4 = lookup("counter").build(lookup("counter").config(count_to=4, width=3))
    assert bmc(c3, c4, 4).equivalent
    v = bmc(c3, c4, 8)
    assert isinstance(v, Counterexample)
    assert v.cycle == 4 and len(v.inputs) == 5
    assert (v.values[0].value, v.values[1].value) == (0, 4)


def test_bmc_random_strategy_finds_divergence_and_replays():
    cfg = lookup("adder_fsm").config(bits=2)
    good = lookup("adder_fsm").build(cfg)
    with Builder():
        i = adder_interface(cfg).inputs()
        spec = S.RegSpec(i.control.clock, clear=i.control.clear)
        acc = S.reg_fb(spec, 2, lambda acc: acc + S.reduce(S.add, i.inputs))
        bad = Circuit.create("bad", i, {"output_": acc})
    v = bmc(good, bad, 6, strategy="random", trials=200, seed=3)
    assert isinstance(v, Counterexample)
    a, b = replay(good, bad, v)
    assert a != b


def test_dimacs_grammar():
    cnf = to_cnf(build_miter(_binop(S.and_, width=1), _binop(lambda a, b: b & a, width=1)))
    text = cnf.to_dimacs()
    lines = text.splitlines()
    header = [ln for ln in lines if ln.startswith("p ")]
    assert header == [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    assert lines.index(header[0]) == sum(1 for ln in lines if ln.startswith("c "))
    for ln in lines[lines.index(header[0]) + 1:]:
        assert ln.endswith(" 0")
        assert all(1 <= abs(int(t)) <= cnf.num_vars for t in ln.split()[:-1])
    assert parse_dimacs(text) == (cnf.num_vars, cnf.clauses)
    assert "c var 1 = a[0]" in lines
    with pytest.raises(VerificationError):
        parse_dimacs("1 2 0\n")


def test_brute_force_sat_oracles():
    assert brute_force_sat("p cnf 1 2\n1 0\n-1 0\n") is None
    assert brute_force_sat("p cnf 2 2\n1 2 0\n-1 0\n") == {1: False, 2: True}
    assert brute_force_sat("p cnf 3 0\n") is not None
    with pytest.raises(BoundExceeded):
        brute_force_sat("p cnf 30 0\n")


def _decode_inputs(cnf, model, widths):
    values = {n: 0 for n in widths}
    for var, name in cnf.var_names.items():
        m = re.fullmatch(r"(\w+)\[(\d+)\]", name)
        if m and m.group(1) in widths and model[var]:
            values[m.group(1)] |= 1 << int(m.group(2))
    return values


@given(st.integers(0, 100_000))
def test_cnf_verdict_agrees_with_exhaustive_check(seed):
    rng = random.Random(seed)
    ops = ("and", "or", "xor", "not", "mux2", "add", "sub", "cmp")
    c1, _ = random_comb(rng, n_inputs=2, width=1, n_ops=2, ops=ops, name="l")
    c2, _ = random_comb(rng, n_inputs=2, width=1, n_ops=2, ops=ops, name="r")
    if [(p.name, p.width) for p in c1.outputs] != [(p.name, p.width) for p in c2.outputs]:
        return
    cnf = to_cnf(build_miter(c1, c2))
    if cnf.num_vars > 20:
        return
    model = brute_force_sat(cnf.to_dimacs())
    verdict = equiv_exhaustive(c1, c2)
    assert (model is None) == verdict.equivalent
    if model is not None:
        env = _decode_inputs(cnf, model, {"i0": 1, "i1": 1})
        s1, s2 = Simulator(c1), Simulator(c2)
        s1.poke_all(env)
        s2.poke_all(env)
        assert s1.peek_outputs() != s2.peek_outputs()


def test_cnf_needs_combinational_single_bit():
    with pytest.raises(NotCombinational):
        to_cnf(build_miter(lookup("counter").circuit(), lookup("counter").circuit()))
    with pytest.raises(VerificationError):
        to_cnf(_binop(S.add, width=2))


def test_cnf_covers_multiply_and_wide_mux():
    cases = [
        (1, lambda a, b: a * b, lambda a, b: b * a),
        (1, lambda a, b: S.mul_signed(a, b), lambda a, b: a * b),
        (2, lambda a, b: (a * b).select(1, 0), lambda a, b: (b * a).select(1, 0)),
        (2, lambda a, b: S.mux(a, [b, ~b, b ^ a]), lambda a, b: S.mux(a, [b, ~b, b ^ a, b ^ a])),
        (2, lambda a, b: S.mux(a, [b, ~b, b ^ a]), lambda a, b: S.mux(a, [b, ~b, b ^ a, b])),
    ]
    for width, f, g in cases:
        c1, c2 = _binop(f, "l", width), _binop(g, "r", width)
        expected = equiv_exhaustive(c1, c2).equivalent
        cnf = to_cnf(build_miter(c1, c2))
        assert (brute_force_sat(cnf, max_vars=24) is None) == expected
