from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hwdsl.bitvec import BitVec, address_bits, ceil_log2, concat_lsb, concat_msb, of_bits_lsb_first
from hwdsl.errors import EmptyOperands, IndexRangeError, InvalidWidth, WidthError


@st.composite
def bitvecs(draw, width=None):
    w = width if width is not None else draw(st.integers(1, 70))
    return BitVec(w, draw(st.integers(0, (1 << w) - 1)))


@st.composite
def pairs(draw):
    w = draw(st.integers(1, 70))
    return draw(bitvecs(w)), draw(bitvecs(w))


def test_ceil_log2_table():
    assert [ceil_log2(n) for n in (1, 2, 3, 4, 5, 8, 9, 101, 128, 129)] == [0, 1, 2, 2, 3, 3, 4, 7, 7, 8]
    assert address_bits(1) == 1
    assert address_bits(16) == 4
    with pytest.raises(ValueError):
        ceil_log2(0)


def test_text_forms():
    v = BitVec(6, 0b000101)
    assert v.to_binary_string() == "000101"
    assert v.to_hex_string() == "05"
    assert BitVec(13, 0x1abc).to_hex_string() == "1abc"
    assert repr(BitVec(3, 5)) == "3'b101"
    assert BitVec.of_binary_string("1_0010").value == 18


def test_wrapping_and_signed():
    assert BitVec.of_int(4, -1).value == 15
    assert BitVec(4, 0b1000).to_signed_int() == -8
    assert BitVec(4, 9).add(BitVec(4, 9)).value == 2
    assert BitVec(4, 2).sub(BitVec(4, 3)).value == 15
    assert BitVec(4, 15).mul(BitVec(4, 15)) == BitVec(8, 225)
    assert BitVec(4, 15).mul_signed(BitVec(4, 15)) == BitVec(8, 1)
    assert BitVec(4, 0b1000).slt(BitVec(4, 1)).value == 1
    assert BitVec(4, 0b1000).lt(BitVec(4, 1)).value == 0
    assert BitVec(4, 0b1010).sresize(8).value == 0b11111010
    assert BitVec(8, 0xab).uresize(4).value == 0xb


def test_selects_and_concat():
    v = BitVec(8, 0b10110010)
    assert v.select(5, 2) == BitVec(4, 0b1100)
    assert v.lsbs() == BitVec(7, 0b0110010)
    assert v.msbs() == BitVec(7, 0b1011001)
    assert concat_msb([BitVec(2, 0b10), BitVec(3, 0b011)]) == BitVec(5, 0b10011)
    assert concat_lsb([BitVec(2, 0b10), BitVec(3, 0b011)]) == BitVec(5, 0b01110)
    assert of_bits_lsb_first([1, 0, 0, 1]) == BitVec(4, 9)
    with pytest.raises(IndexRangeError):
        v.select(8, 0)
    with pytest.raises(EmptyOperands):
        concat_msb([])


def test_width_errors():
    with pytest.raises(InvalidWidth):
        BitVec(0, 0)
    with pytest.raises(WidthError):
        BitVec(3, 1).add(BitVec(4, 1))


@given(pairs())
def test_add_sub_inverse(p):
    a, b = p
    assert a.add(b).sub(b) == a
    assert a.add(b) == b.add(a)


@given(pairs())
def test_compare_matches_ints(p):
    a, b = p
    assert a.lt(b).value == int(a.value < b.value)
    assert a.slt(b).value == int(a.to_signed_int() < b.to_signed_int())
    assert a.eq(b).width == 1


@given(bitvecs(), bitvecs())
def test_mul_width_is_sum(a, b):
    p = a.mul(b)
    assert p.width == a.width + b.width
    assert p.value == a.value * b.value
    assert a.mul_signed(b).to_signed_int() == a.to_signed_int() * b.to_signed_int()


@given(bitvecs(), bitvecs())
def test_concat_then_select_roundtrip(a, b):
    c = a.cat(b)
    assert c.width == a.width + b.width
    assert c.select(c.width - 1, b.width) == a
    assert c.select(b.width - 1, 0) == b


@given(bitvecs(), st.integers(1, 80))
def test_sresize_preserves_signed_value_when_growing(a, w):
    if w >= a.width:
        assert a.sresize(w).to_signed_int() == a.to_signed_int()
        assert a.uresize(w).value == a.value


@given(bitvecs())
def test_binary_string_roundtrip(a):
    assert BitVec.of_binary_string(a.to_binary_string()) == a
    assert int(a.to_hex_string(), 16) == a.value
