"""Exception hierarchy shared by every layer of the library."""

from __future__ import annotations


class HwError(Exception):
    """Base class for all errors raised while building, checking or running circuits."""


class InvalidWidth(HwError, ValueError):
    pass


class WidthError(HwError, ValueError):
    pass


class IndexRangeError(HwError, IndexError):
    pass


class EmptyOperands(HwError, ValueError):
    pass


class NoActiveBuilder(HwError, RuntimeError):
    pass


class CrossBuilderError(HwError, ValueError):
    pass


class MultipleDrivers(HwError):
    def __init__(self, uid: int, name: str | None = None):
        self.uid = uid
        self.name = name
        label = f"_{uid}" if name is None else f"{name} (_{uid})"
        super().__init__(f"wire {label} already has a driver")


class NotAWire(HwError, TypeError):
    pass


class ElaborationError(HwError):
    """Raised when a signal graph cannot be closed into a valid circuit."""


class FloatingWire(ElaborationError):
    def __init__(self, uid: int, name: str | None = None):
        self.uid = uid
        self.name = name
        label = f"_{uid}" if name is None else f"{name} (_{uid})"
        super().__init__(f"wire {label} has no driver")


class CombinationalLoop(ElaborationError):
    def __init__(self, path: list[int], names: dict[int, str] | None = None):
        self.path = list(path)
        names = names or {}
        hops = " -> ".join(names.get(u, f"_{u}") for u in self.path)
        super().__init__(f"combinational loop: {hops}")


class PortWidthMismatch(ElaborationError):
    def __init__(self, instance: str, port: str, expected: int, actual: int):
        self.instance = instance
        self.port = port
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"instance {instance!r}: port {port!r} expects width {expected}, got {actual}"
        )


class DuplicatePortName(ElaborationError):
    pass


class IllegalName(ElaborationError, ValueError):
    pass


class PortError(ElaborationError):
    """Missing, unknown or malformed ports on a circuit or instance."""


class SpecMismatch(HwError, TypeError):
    pass


class AlwaysError(HwError):
    pass


class SimulationError(HwError):
    pass


class UnknownSignal(SimulationError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown signal"


class GoldenMissing(HwError, FileNotFoundError):
    pass


class VerificationError(HwError):
    pass


class BoundExceeded(VerificationError):
    pass


class InterfaceMismatch(VerificationError):
    pass


class NotCombinational(VerificationError):
    pass


class UnknownExample(HwError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown example"


class ParameterError(HwError, ValueError):
    pass
