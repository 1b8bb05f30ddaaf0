"""Two-state bit-vector values of arbitrary width.

A :class:`BitVec` is the concrete value domain used for constants, simulator
pokes and peeks, and the verification oracles. Values are stored as a masked,
non-negative Python integer so widths far beyond 64 bits work unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyOperands, IndexRangeError, InvalidWidth, WidthError


def mask(width: int) -> int:
    return (1 << width) - 1


def ceil_log2(n: int) -> int:
    """Smallest ``k`` with ``2**k >= n``. ``ceil_log2(1) == 0``."""
    if n < 1:
        raise ValueError(f"ceil_log2 needs n >= 1, got {n}")
    return (n - 1).bit_length()


def address_bits(size: int) -> int:
    """Address width for a table of ``size`` entries (never below one bit)."""
    return max(1, ceil_log2(size))


def to_signed(value: int, width: int) -> int:
    sign = 1 << (width - 1)
    return (value ^ sign) - sign


def _check_width(width: int) -> None:
    if not isinstance(width, int) or isinstance(width, bool) or width < 1:
        raise InvalidWidth(f"width must be a positive integer, got {width!r}")


@dataclass(frozen=True, slots=True)
class BitVec:
    width: int
    value: int

    def __post_init__(self) -> None:
        _check_width(self.width)
        if not 0 <= self.value < (1 << self.width):
            # Normalise instead of rejecting; frozen dataclass needs object.__setattr__.
            object.__setattr__(self, "value", self.value & mask(self.width))

    # -- construction -----------------------------------------------------

    @classmethod
    def of_int(cls, width: int, v: int) -> BitVec:
        _check_width(width)
        return cls(width, v & mask(width))

    @classmethod
    def zero(cls, width: int) -> BitVec:
        return cls.of_int(width, 0)

    @classmethod
    def ones(cls, width: int) -> BitVec:
        return cls.of_int(width, -1)

    @classmethod
    def of_bool(cls, b: bool) -> BitVec:
        return cls(1, int(bool(b)))

    @classmethod
    def of_binary_string(cls, text: str) -> BitVec:
        digits = text.replace("_", "")
        if not digits or set(digits) - {"0", "1"}:
            raise ValueError(f"not a binary string: {text!r}")
        return cls(len(digits), int(digits, 2))

    # -- inspection -------------------------------------------------------

    def to_int(self) -> int:
        return self.value

    def to_signed_int(self) -> int:
        return to_signed(self.value, self.width)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __len__(self) -> int:
        return self.width

    def to_binary_string(self) -> str:
        return format(self.value, f"0{self.width}b")

    def to_hex_string(self) -> str:
        return format(self.value, f"0{(self.width + 3) // 4}x")

    def __repr__(self) -> str:
        return f"{self.width}'b{self.to_binary_string()}"

    def __str__(self) -> str:
        return self.to_binary_string()

    # -- arithmetic -------------------------------------------------------

    def _same_width(self, other: BitVec, op: str) -> None:
        if not isinstance(other, BitVec):
            raise TypeError(f"{op}: expected BitVec, got {type(other).__name__}")
        if self.width != other.width:
            raise WidthError(f"{op}: operand widths differ ({self.width} vs {other.width})")

    def add(self, other: BitVec) -> BitVec:
        self._same_width(other, "add")
        return BitVec(self.width, (self.value + other.value) & mask(self.width))

    def sub(self, other: BitVec) -> BitVec:
        self._same_width(other, "sub")
        return BitVec(self.width, (self.value - other.value) & mask(self.width))

    def mul(self, other: BitVec) -> BitVec:
        if not isinstance(other, BitVec):
            raise TypeError(f"mul: expected BitVec, got {type(other).__name__}")
        return BitVec(self.width + other.width, self.value * other.value)

    def mul_signed(self, other: BitVec) -> BitVec:
        if not isinstance(other, BitVec):
            raise TypeError(f"mul_signed: expected BitVec, got {type(other).__name__}")
        w = self.width + other.width
        return BitVec.of_int(w, self.to_signed_int() * other.to_signed_int())

    def and_(self, other: BitVec) -> BitVec:
        self._same_width(other, "and")
        return BitVec(self.width, self.value & other.value)

    def or_(self, other: BitVec) -> BitVec:
        self._same_width(other, "or")
        return BitVec(self.width, self.value | other.value)

    def xor_(self, other: BitVec) -> BitVec:
        self._same_width(other, "xor")
        return BitVec(self.width, self.value ^ other.value)

    def not_(self) -> BitVec:
        return BitVec(self.width, self.value ^ mask(self.width))

    def neg(self) -> BitVec:
        return BitVec.of_int(self.width, -self.value)

    # -- comparison (1-bit results) ---------------------------------------

    def eq(self, other: BitVec) -> BitVec:
        self._same_width(other, "eq")
        return BitVec(1, int(self.value == other.value))

    def neq(self, other: BitVec) -> BitVec:
        self._same_width(other, "neq")
        return BitVec(1, int(self.value != other.value))

    def lt(self, other: BitVec) -> BitVec:
        self._same_width(other, "lt")
        return BitVec(1, int(self.value < other.value))

    def gt(self, other: BitVec) -> BitVec:
        self._same_width(other, "gt")
        return BitVec(1, int(self.value > other.value))

    def lte(self, other: BitVec) -> BitVec:
        self._same_width(other, "lte")
        return BitVec(1, int(self.value <= other.value))

    def gte(self, other: BitVec) -> BitVec:
        self._same_width(other, "gte")
        return BitVec(1, int(self.value >= other.value))

    def slt(self, other: BitVec) -> BitVec:
        self._same_width(other, "slt")
        return BitVec(1, int(self.to_signed_int() < other.to_signed_int()))

    def sgt(self, other: BitVec) -> BitVec:
        self._same_width(other, "sgt")
        return BitVec(1, int(self.to_signed_int() > other.to_signed_int()))

    def slte(self, other: BitVec) -> BitVec:
        self._same_width(other, "slte")
        return BitVec(1, int(self.to_signed_int() <= other.to_signed_int()))

    def sgte(self, other: BitVec) -> BitVec:
        self._same_width(other, "sgte")
        return BitVec(1, int(self.to_signed_int() >= other.to_signed_int()))

    # -- structure ----------------------------------------------------------

    def select(self, hi: int, lo: int) -> BitVec:
        if not 0 <= lo <= hi < self.width:
            raise IndexRangeError(f"select [{hi}:{lo}] out of range for width {self.width}")
        return BitVec(hi - lo + 1, (self.value >> lo) & mask(hi - lo + 1))

    def bit(self, i: int) -> BitVec:
        return self.select(i, i)

    def lsbs(self) -> BitVec:
        """All bits but the most significant one."""
        return self.select(self.width - 2, 0)

    def msbs(self) -> BitVec:
        """All bits but the least significant one."""
        return self.select(self.width - 1, 1)

    def msb(self) -> BitVec:
        return self.bit(self.width - 1)

    def lsb(self) -> BitVec:
        return self.bit(0)

    def bits_lsb_first(self) -> list[int]:
        return [(self.value >> i) & 1 for i in range(self.width)]

    def uresize(self, width: int) -> BitVec:
        _check_width(width)
        return BitVec(width, self.value & mask(width))

    def sresize(self, width: int) -> BitVec:
        _check_width(width)
        return BitVec.of_int(width, self.to_signed_int())

    def cat(self, other: BitVec) -> BitVec:
        """``self`` occupies the most significant bits."""
        return concat_msb([self, other])

    # -- operator sugar -----------------------------------------------------

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __and__ = and_
    __or__ = or_
    __xor__ = xor_
    __invert__ = not_
    __matmul__ = cat


def concat_msb(parts: Sequence[BitVec]) -> BitVec:
    """Concatenate with ``parts[0]`` in the most significant position."""
    if not parts:
        raise EmptyOperands("concat of an empty list")
    width = 0
    value = 0
    for p in parts:
        value = (value << p.width) | p.value
        width += p.width
    return BitVec(width, value)


def concat_lsb(parts: Sequence[BitVec]) -> BitVec:
    """Concatenate with ``parts[0]`` in the least significant position."""
    return concat_msb(list(reversed(parts)))


def cat(a: BitVec, b: BitVec) -> BitVec:
    return concat_msb([a, b])


def of_int(width: int, v: int) -> BitVec:
    return BitVec.of_int(width, v)


def of_bits_lsb_first(bits: Iterable[int]) -> BitVec:
    bits = list(bits)
    if not bits:
        raise EmptyOperands("no bits given")
    return BitVec(len(bits), sum((b & 1) << i for i, b in enumerate(bits)))
