"""Continuous semirings used as transition weights.

Three kinds are built in: the boolean semiring, the natural numbers extended
with infinity and the nonnegative rationals extended with infinity.  Values
are stored as plain Python payloads (``int`` for boolean and ``nat``,
``Fraction`` for ``real``, and the :data:`INF` sentinel for infinity) so that
hot loops in the solvers do not pay for wrapper objects.  :class:`SemiringValue`
is the checked, kind-carrying wrapper for standalone arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class SemiringError(ValueError):
    """Raised on kind mismatches and malformed payloads."""


class _Infinity:
    """Top element shared by the ``nat`` and ``real`` kinds."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("coweak.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()

Payload = Union[int, Fraction, _Infinity]


class SemiringKind:
    """One of the three built-in continuous semirings.

    The arithmetic methods work on raw payloads and do not check kinds;
    use :class:`SemiringValue` or the module-level functions for checked use.
    """

    def __init__(self, tag: str, short: str):
        self.tag = tag
        self.short = short

    def __repr__(self):
        return f"SemiringKind({self.tag!r})"

    def __reduce__(self):
        return (kind_from_name, (self.short,))

    zero: Payload = 0
    one: Payload = 1

    @property
    def idempotent(self) -> bool:
        return self is BOOL

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def leq(self, a, b) -> bool:
        return a <= b

    def star(self, a):
        raise NotImplementedError

    def monus(self, a, b):
        """Truncated difference ``a - b`` for ``b <= a`` (the natural order)."""
        raise NotImplementedError

    def coerce(self, x) -> Payload:
        raise NotImplementedError

    def parse(self, text: str) -> Payload:
        raise NotImplementedError

    def format(self, a) -> str:
        if a is INF:
            return "inf"
        if isinstance(a, Fraction) and a.denominator == 1:
            return str(a.numerator)
        return str(a)

    def is_finite(self, a) -> bool:
        return a is not INF

    def sum(self, values) -> Payload:
        total = self.zero
        for v in values:
            total = self.add(total, v)
        return total


class _Boolean(SemiringKind):
    zero = 0
    one = 1

    def add(self, a, b):
        return a | b

    def mul(self, a, b):
        return a & b

    def star(self, a):
        return 1

    def monus(self, a, b):
        return a & (1 - b)

    def coerce(self, x):
        if x is INF:
            raise SemiringError("boolean semiring has no infinity")
        if x in (0, 1) or x is True or x is False:
            return int(x)
        raise SemiringError(f"not a boolean value: {x!r}")

    def parse(self, text):
        t = text.strip().lower()
        if t in ("1", "true", "t"):
            return 1
        if t in ("0", "false", "f"):
            return 0
        raise SemiringError(f"not a boolean value: {text!r}")


class _NatInf(SemiringKind):
    zero = 0
    one = 1

    def add(self, a, b):
        if a is INF or b is INF:
            return INF
        return a + b

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if a is INF or b is INF:
            return INF
        return a * b

    def star(self, a):
        return 1 if a == 0 else INF

    def monus(self, a, b):
        if a is INF:
            return INF
        return a - b

    def coerce(self, x):
        if x is INF:
            return INF
        if isinstance(x, bool):
            return int(x)
        if isinstance(x, int) and x >= 0:
            return x
        if isinstance(x, Fraction) and x.denominator == 1 and x >= 0:
            return int(x)
        raise SemiringError(f"not a value of N u {{inf}}: {x!r}")

    def parse(self, text):
        t = text.strip().lower()
        if t in ("inf", "infinity", "oo"):
            return INF
        if not t.isdigit():
            raise SemiringError(f"not a value of N u {{inf}}: {text!r}")
        return int(t)


class _RealInf(SemiringKind):
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        if a is INF or b is INF:
            return INF
        return a + b

    def mul(self, a, b):
        if a == 0 or b == 0:
            return Fraction(0)
        if a is INF or b is INF:
            return INF
        return a * b

    def star(self, a):
        if a is INF or a >= 1:
            return INF
        return 1 / (1 - a)

    def monus(self, a, b):
        if a is INF:
            return INF
        return a - b

    def coerce(self, x):
        if x is INF:
            return INF
        if isinstance(x, float):
            raise SemiringError("floats are not accepted; use Fraction or 'p/q'")
        try:
            q = Fraction(x)
        except (TypeError, ValueError) as exc:
            raise SemiringError(f"not a rational value: {x!r}") from exc
        if q < 0:
            raise SemiringError(f"negative weight: {x!r}")
        return q

    def parse(self, text):
        t = text.strip().lower()
        if t in ("inf", "infinity", "oo"):
            return INF
        try:
            # Fraction('0.1') is exactly 1/10
            q = Fraction(t)
        except (ValueError, ZeroDivisionError) as exc:
            raise SemiringError(f"not a rational value: {text!r}") from exc
        if q < 0:
            raise SemiringError(f"negative weight: {text!r}")
        return q


BOOL = _Boolean("boolean", "bool")
NAT = _NatInf("nat-inf", "nat")
REAL = _RealInf("real-inf", "real")

KINDS = (BOOL, NAT, REAL)


def kind_from_name(name: str) -> SemiringKind:
    """Look up a kind by file name (``bool|nat|real``) or tag."""
    for k in KINDS:
        if name in (k.short, k.tag):
            return k
    raise SemiringError(f"unknown semiring {name!r}; expected bool, nat or real")


@dataclass(frozen=True)
class SemiringValue:
    """A payload tagged with its semiring kind."""

    kind: SemiringKind
    payload: object

    @classmethod
    def of(cls, kind: SemiringKind, x) -> "SemiringValue":
        if isinstance(x, str):
            return cls(kind, kind.parse(x))
        return cls(kind, kind.coerce(x))

    def _check(self, other: "SemiringValue"):
        if not isinstance(other, SemiringValue):
            raise SemiringError(f"expected SemiringValue, got {type(other).__name__}")
        if other.kind is not self.kind:
            raise SemiringError(f"kind mismatch: {self.kind.tag} vs {other.kind.tag}")

    def __add__(self, other):
        self._check(other)
        return SemiringValue(self.kind, self.kind.add(self.payload, other.payload))

    def __mul__(self, other):
        self._check(other)
        return SemiringValue(self.kind, self.kind.mul(self.payload, other.payload))

    def __le__(self, other):
        self._check(other)
        return self.kind.leq(self.payload, other.payload)

    def star(self):
        return SemiringValue(self.kind, self.kind.star(self.payload))

    def __str__(self):
        return self.kind.format(self.payload)


def add(a: SemiringValue, b: SemiringValue) -> SemiringValue:
    return a + b


def mul(a: SemiringValue, b: SemiringValue) -> SemiringValue:
    return a * b


def leq(a: SemiringValue, b: SemiringValue) -> bool:
    return a <= b


def star(a: SemiringValue) -> SemiringValue:
    """Kleene star: the supremum of the partial sums of ``a**n``."""
    return a.star()
