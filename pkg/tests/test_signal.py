from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hwdsl import signal as S
from hwdsl.bitvec import BitVec
from hwdsl.errors import (
    CrossBuilderError, EmptyOperands, IndexRangeError, MultipleDrivers, NoActiveBuilder, NotAWire, WidthError,
)
from hwdsl.signal import Builder, Op, RegSpec


def test_needs_active_builder():
    with pytest.raises(NoActiveBuilder):
        S.input_("a", 1)


def test_resizing_to_different_widths_then_adding_is_an_error():
    with Builder():
        a = S.input_("a", 8)
        b = S.input_("b", 8)
        with pytest.raises(WidthError):
            S.uresize(a, 32) + S.uresize(b, 16)
        assert (S.uresize(a, 32) + S.uresize(b, 32)).width == 32


@given(st.integers(1, 64), st.integers(1, 64))
def test_width_rules(wa, wb):
    with Builder():
        a = S.input_("a", wa)
        b = S.input_("b", wb)
        assert (a * b).width == wa + wb
        assert S.mul_signed(a, b).width == wa + wb
        assert a.eq(a).width == 1
        assert a.lt(a).width == 1
        assert (a @ b).width == wa + wb
        if wa != wb:
            for f in (S.add, S.sub, S.and_, S.or_, S.xor_, S.eq, S.lt):
                with pytest.raises(WidthError):
                    f(a, b)
        else:
            assert (a + b).width == wa


def test_integer_literals_are_lifted_and_checked():
    with Builder():
        a = S.input_("a", 4)
        assert (a + 1).width == 4
        assert (a + -1).width == 4
        with pytest.raises(WidthError):
            a + 16
        with pytest.raises(TypeError):
            a + 1.5


def test_wires_take_exactly_one_driver():
    with Builder():
        a = S.input_("a", 4)
        w = S.wire(4)
        w <<= a
        with pytest.raises(MultipleDrivers):
            S.assign(w, a)
        with pytest.raises(NotAWire):
            S.assign(a, w)
        with pytest.raises(WidthError):
            S.assign(S.wire(3), a)


def test_cross_builder_mixing():
    with Builder():
        a = S.input_("a", 4)
    with Builder():
        b = S.input_("b", 4)
        with pytest.raises(CrossBuilderError):
            a + b


def test_select_and_mux_rules():
    with Builder():
        a = S.input_("a", 8)
        s = S.input_("s", 2)
        assert a.select(3, 0).width == 4
        assert a.select(7, 0) is a
        with pytest.raises(IndexRangeError):
            a.select(8, 0)
        with pytest.raises(WidthError):
            S.mux(s, [a] * 5)
        with pytest.raises(WidthError):
            S.mux2(s, a, a)
        with pytest.raises(EmptyOperands):
            S.mux(s, [a])
        with pytest.raises(WidthError):
            S.mux(s, [a, a.select(3, 0)])


def test_reg_spec_checks():
    with Builder():
        clock = S.input_("clock", 1)
        d = S.input_("d", 4)
        r = S.reg(RegSpec(clock, initial=3), d)
        assert r.op is Op.REG and r.node.reg.initial == BitVec(4, 3)
        with pytest.raises(WidthError):
            S.reg(RegSpec(d), d)
        with pytest.raises(WidthError):
            S.reg(RegSpec(clock, initial=16), d)
        with pytest.raises(WidthError):
            S.reg_fb(RegSpec(clock), 4, lambda x: x @ x)


def test_tree_and_reduce_shapes():
    with Builder():
        xs = [S.input_(f"x{i}", 3) for i in range(5)]
        with pytest.raises(EmptyOperands):
            S.reduce(S.add, [])
        with pytest.raises(ValueError):
            S.tree(1, lambda c: c[0], xs)
        assert S.tree_op(S.add, xs).width == 3
        assert S.concat_lsb(xs).width == 15


def test_names_accumulate_without_changing_semantics():
    with Builder():
        a = S.input_("a", 2)
        b = (a + 1).named("inc").named("also")
        assert b.node.names == ["inc", "also"]
        assert b.name == "inc"
