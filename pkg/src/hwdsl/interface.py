"""Named, width-annotated port bundles.

An :class:`InterfaceSpec` is a runtime declaration list; a :class:`Bundle` is
a tree of values (Signals in circuits, BitVecs or ints in testbenches) shaped
like its declaration. Structural helpers (map, zip, mux, priority select) are derived
from the declaration, so they work for any interface without per-type code.

    Rectangle = interface("rectangle", length=10, width=6)
    rect = Rectangle.inputs()
    bigger = rect.map(lambda s: s + 1)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable, Generic, Iterator, Sequence, TypeVar, Union

from . import signal as S
from .bitvec import BitVec
from .errors import EmptyOperands, SpecMismatch, WidthError
from .signal import Builder, Signal

T = TypeVar("T")
U = TypeVar("U")


@dataclass(frozen=True)
class Array:
    shape: "Shape"
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError(f"array length must be >= 1, got {self.length}")


@dataclass(frozen=True)
class Nested:
    spec: "InterfaceSpec"
    prefix: str = ""


Shape = Union[int, "InterfaceSpec", Nested, Array]


def _normalize(shape: Any) -> Any:
    if isinstance(shape, bool):
        raise TypeError("a field shape cannot be a bool")
    if isinstance(shape, int):
        if shape < 1:
            raise ValueError(f"field width must be >= 1, got {shape}")
        return shape
    if isinstance(shape, InterfaceSpec):
        return Nested(shape)
    if isinstance(shape, Nested):
        return shape
    if isinstance(shape, Array):
        return Array(_normalize(shape.shape), shape.length)
    raise TypeError(f"unsupported field shape {shape!r}")


@dataclass(frozen=True)
class InterfaceSpec:
    name: str
    fields: tuple[tuple[str, Any], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        norm = []
        for fname, shape in self.fields:
            if not fname or fname in seen:
                raise ValueError(f"interface {self.name!r}: bad or duplicate field {fname!r}")
            seen.add(fname)
            norm.append((fname, _normalize(shape)))
        object.__setattr__(self, "fields", tuple(norm))
        names = [n for n, _ in self.port_widths()]
        dups = sorted({n for n in names if names.count(n) > 1})
        if dups:
            raise ValueError(
                f"interface {self.name!r}: flattened port names collide: {dups}; use Nested(spec, prefix=...)"
            )

    def field_names(self) -> list[str]:
        return [n for n, _ in self.fields]

    def port_widths(self) -> list[tuple[str, int]]:
        """Flattened (port name, width) pairs in declaration order, depth first."""
        out: list[tuple[str, int]] = []

        def walk(shape: Any, name: str, element: bool = False) -> None:
            if isinstance(shape, int):
                out.append((name, shape))
            elif isinstance(shape, Nested):
                # Array elements need their index in the name to stay distinct.
                prefix = (f"{name}_" if element else "") + shape.prefix
                for fname, fshape in shape.spec.fields:
                    walk(fshape, prefix + fname)
            else:
                for i in range(shape.length):
                    walk(shape.shape, f"{name}{i}", True)

        for fname, shape in self.fields:
            walk(shape, fname)
        return out

    def port_names(self) -> list[str]:
        return [n for n, _ in self.port_widths()]

    @property
    def total_width(self) -> int:
        return sum(w for _, w in self.port_widths())

    # -- bundle construction ------------------------------------------------

    def of_flat_list(self, leaves: Sequence[T]) -> Bundle[T]:
        it = iter(leaves)

        def build(shape: Any) -> Any:
            if isinstance(shape, int):
                try:
                    return next(it)
                except StopIteration:
                    raise SpecMismatch(f"too few leaves for interface {self.name!r}") from None
            if isinstance(shape, Nested):
                return Bundle(shape.spec, {n: build(s) for n, s in shape.spec.fields})
            return [build(shape.shape) for _ in range(shape.length)]

        b = Bundle(self, {n: build(s) for n, s in self.fields})
        if next(it, None) is not None:
            raise SpecMismatch(f"too many leaves for interface {self.name!r}")
        return b

    def of_named(self, values: dict[str, T]) -> Bundle[T]:
        missing = [n for n in self.port_names() if n not in values]
        if missing:
            raise SpecMismatch(f"interface {self.name!r}: missing ports {missing}")
        return self.of_flat_list([values[n] for n in self.port_names()])

    def inputs(self, builder: Builder | None = None) -> Bundle[Signal]:
        b = builder or Builder.current()
        return self.of_flat_list([b.input(n, w) for n, w in self.port_widths()])

    def wires(self, builder: Builder | None = None) -> Bundle[Signal]:
        b = builder or Builder.current()
        return self.of_flat_list([b.wire(w) for _, w in self.port_widths()])

    def consts(self, values: Sequence[int], builder: Builder | None = None) -> Bundle[Signal]:
        b = builder or Builder.current()
        return self.of_flat_list(
            [b.const(BitVec.of_int(w, v)) for (_, w), v in zip(self.port_widths(), values)]
        )

    def zero(self) -> Bundle[BitVec]:
        return self.of_flat_list([BitVec.zero(w) for _, w in self.port_widths()])

    def to_dict(self) -> dict:
        def shape_doc(shape: Any) -> dict:
            if isinstance(shape, int):
                return {"bits": shape}
            if isinstance(shape, Nested):
                doc = {"interface": shape.spec.to_dict()}
                if shape.prefix:
                    doc["prefix"] = shape.prefix
                return doc
            return {"array": shape_doc(shape.shape), "length": shape.length}

        return {
            "name": self.name,
            "fields": [{"name": n, **shape_doc(s)} for n, s in self.fields],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def interface(name: str, **fields: Any) -> InterfaceSpec:
    """``interface("rectangle", length=10, width=6)``; keyword order is field order."""
    return InterfaceSpec(name, tuple(fields.items()))


def spec_of_ports(name: str, ports: Sequence[tuple[str, int]]) -> InterfaceSpec:
    return InterfaceSpec(name, tuple(ports))


class Bundle(Generic[T]):
    """Values arranged in the shape of an interface spec."""

    __slots__ = ("spec", "values")

    def __init__(self, spec: InterfaceSpec, values: dict[str, Any]) -> None:
        if list(values) != spec.field_names():
            raise SpecMismatch(
                f"bundle fields {list(values)} do not match interface {spec.name!r} {spec.field_names()}"
            )
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "values", values)

    def __getattr__(self, item: str) -> Any:
        try:
            return self.values[item]
        except KeyError:
            raise AttributeError(f"interface {self.spec.name!r} has no field {item!r}") from None

    def __setattr__(self, key: str, value: Any) -> None:
        raise AttributeError("bundles are immutable; use map or of_flat_list")

    def __getitem__(self, item: str) -> Any:
        return self.values[item]

    def __repr__(self) -> str:
        return f"Bundle({self.spec.name}, {self.values!r})"

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Bundle) and self.spec == other.spec
                and self.to_flat_list() == other.to_flat_list())

    def __iter__(self) -> Iterator[tuple[str, Any]]:
        return iter(self.named())

    def to_flat_list(self) -> list[T]:
        out: list[T] = []

        def walk(v: Any) -> None:
            if isinstance(v, Bundle):
                for x in v.values.values():
                    walk(x)
            elif isinstance(v, list):
                for x in v:
                    walk(x)
            else:
                out.append(v)

        walk(self)
        return out

    def named(self) -> list[tuple[str, T]]:
        return list(zip(self.spec.port_names(), self.to_flat_list()))

    def as_dict(self) -> dict[str, T]:
        return dict(self.named())

    def map(self, f: Callable[[T], U]) -> Bundle[U]:
        return self.spec.of_flat_list([f(x) for x in self.to_flat_list()])

    def map2(self, other: Bundle[U], f: Callable[[T, U], Any]) -> Bundle:
        _same_spec(self, other)
        return self.spec.of_flat_list([f(a, b) for a, b in zip(self.to_flat_list(), other.to_flat_list())])

    def zip(self, other: Bundle[U]) -> Bundle[tuple[T, U]]:
        return self.map2(other, lambda a, b: (a, b))

    def check_widths(self) -> None:
        for (name, width), v in zip(self.spec.port_widths(), self.to_flat_list()):
            w = getattr(v, "width", None)
            if w is not None and w != width:
                raise WidthError(f"{self.spec.name}.{name}: expected width {width}, got {w}")


def unzip(bundle: Bundle[tuple[T, U]]) -> tuple[Bundle[T], Bundle[U]]:
    return bundle.map(lambda p: p[0]), bundle.map(lambda p: p[1])


def _same_spec(*bundles: Bundle) -> InterfaceSpec:
    spec = bundles[0].spec
    for b in bundles[1:]:
        if b.spec != spec:
            raise SpecMismatch(f"interface mismatch: {spec.name!r} vs {b.spec.name!r}")
    return spec


def assign_bundle(target: Bundle[Signal], source: Bundle[Signal]) -> None:
    for t, s in target.zip(source).to_flat_list():
        S.assign(t, s)


def mux_bundle(select: Signal, cases: Sequence[Bundle[Signal]]) -> Bundle[Signal]:
    """Field-wise ``mux``."""
    if not cases:
        raise EmptyOperands("mux_bundle of no cases")
    spec = _same_spec(*cases)
    columns = zip(*(c.to_flat_list() for c in cases))
    return spec.of_flat_list([S.mux(select, list(col)) for col in columns])


@dataclass(frozen=True)
class WithValid(Generic[T]):
    valid: Any
    value: T

    def __post_init__(self) -> None:
        w = getattr(self.valid, "width", 1)
        if w != 1:
            raise WidthError(f"WithValid.valid must be 1 bit, got {w}")


def priority_select(items: Sequence[WithValid[Bundle[Signal]]]) -> WithValid[Bundle[Signal]]:
    """First item whose ``valid`` is set; valid of the result is the OR of all valids.

    With no valid item the value of the last entry is passed through (with
    valid low).
    """
    if not items:
        raise EmptyOperands("priority_select of an empty list")
    _same_spec(*(i.value for i in items))
    acc = items[-1].value
    for item in reversed(items[:-1]):
        acc = item.value.map2(acc, lambda a, b, v=item.valid: S.mux2(v, a, b))
    valid = S.reduce(S.or_, [i.valid for i in items])
    return WithValid(valid, acc)


# --------------------------------------------------------------------------
# scalar types


@dataclass(frozen=True)
class ScalarSpec:
    port_name: str
    port_width: int


@dataclass(frozen=True)
class Scalar:
    spec: ScalarSpec
    signal: Signal

    @property
    def width(self) -> int:
        return self.signal.width


class ScalarType:
    """A named bit-vector type; functions taking it refuse other scalar types.

    The check is by spec identity (port name and width) at elaboration time.
    """

    def __init__(self, port_name: str, port_width: int) -> None:
        self.spec = ScalarSpec(port_name, port_width)

    @property
    def port_name(self) -> str:
        return self.spec.port_name

    @property
    def port_width(self) -> int:
        return self.spec.port_width

    def __repr__(self) -> str:
        return f"ScalarType({self.port_name!r}, {self.port_width})"

    def interface(self) -> InterfaceSpec:
        return interface(self.port_name, **{self.port_name: self.port_width})

    def of_signal(self, s: Signal) -> Scalar:
        if s.width != self.port_width:
            raise WidthError(f"{self.port_name}: expected width {self.port_width}, got {s.width}")
        return Scalar(self.spec, s)

    def of_int(self, v: int) -> Scalar:
        return Scalar(self.spec, S.of_int(self.port_width, v))

    def input(self, name: str | None = None, builder: Builder | None = None) -> Scalar:
        b = builder or Builder.current()
        return Scalar(self.spec, b.input(name or self.port_name, self.port_width))

    def check(self, x: object) -> Scalar:
        if not isinstance(x, Scalar):
            got = x.spec.name if isinstance(x, Bundle) else type(x).__name__
            raise SpecMismatch(f"expected a {self.port_name} scalar, got {got}")
        if x.spec != self.spec:
            raise SpecMismatch(f"expected a {self.port_name} scalar, got {x.spec.port_name}")
        return x

    def is_gte_zero(self, t: Scalar) -> Signal:
        # Unsigned, so always true; kept as the plain comparison.
        return S.gte(self.check(t).signal, 0)

    def min(self, a: Scalar, b: Scalar) -> Scalar:
        a, b = self.check(a), self.check(b)
        return Scalar(self.spec, S.mux2(S.lt(a.signal, b.signal), a.signal, b.signal))

    def max(self, a: Scalar, b: Scalar) -> Scalar:
        a, b = self.check(a), self.check(b)
        return Scalar(self.spec, S.mux2(S.gt(a.signal, b.signal), a.signal, b.signal))

    def mux2(self, sel: Signal, a: Scalar, b: Scalar) -> Scalar:
        a, b = self.check(a), self.check(b)
        return Scalar(self.spec, S.mux2(sel, a.signal, b.signal))
