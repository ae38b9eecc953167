"""Finite-support valuations: the semimodule monad at desk scale."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Mapping

from .semiring import SemiringError, SemiringKind


class Valuation(Mapping):
    """Immutable map ``key -> semiring payload`` with no stored zeros.

    Missing keys read as zero.  Equality is structural on the canonical
    sparse form, so two valuations compare equal iff they agree pointwise.
    """

    __slots__ = ("kind", "_d", "_hash")

    def __init__(self, kind: SemiringKind, entries: Mapping | Iterable = ()):
        self.kind = kind
        d = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for k, v in items:
            if v != 0:
                d[k] = v
        self._d = d
        self._hash = None

    @classmethod
    def _trusted(cls, kind, d):
        v = cls.__new__(cls)
        v.kind = kind
        v._d = d
        v._hash = None
        return v

    def __getitem__(self, key):
        return self._d.get(key, self.kind.zero)

    def __contains__(self, key):
        return key in self._d

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def get(self, key, default=None):
        return self._d.get(key, self.kind.zero if default is None else default)

    @property
    def support(self) -> frozenset:
        return frozenset(self._d)

    def __eq__(self, other):
        if not isinstance(other, Valuation):
            return NotImplemented
        return self.kind is other.kind and self._d == other._d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.kind.tag, frozenset(self._d.items())))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{k!r}: {self.kind.format(v)}" for k, v in sorted(self._d.items(), key=lambda kv: repr(kv[0])))
        return f"Valuation({self.kind.short}, {{{body}}})"

    def __le__(self, other: "Valuation") -> bool:
        _same_kind(self, other)
        leq = self.kind.leq
        return all(leq(v, other[k]) for k, v in self._d.items())

    def __or__(self, other):
        return join(self, other)

    def __add__(self, other):
        return add(self, other)

    def scale(self, r) -> "Valuation":
        mul = self.kind.mul
        return Valuation(self.kind, {k: mul(r, v) for k, v in self._d.items()})

    def total(self):
        return self.kind.sum(self._d.values())

    def map_keys(self, fn: Callable[[Hashable], Hashable]) -> "Valuation":
        """Push forward along ``fn`` (the functor action), summing collisions."""
        add_ = self.kind.add
        out: dict = {}
        for k, v in self._d.items():
            j = fn(k)
            out[j] = add_(out[j], v) if j in out else v
        return Valuation(self.kind, out)

    def to_json(self) -> dict:
        return {str(k): self.kind.format(v) for k, v in sorted(self._d.items(), key=lambda kv: str(kv[0]))}


def _same_kind(a: Valuation, b: Valuation):
    if a.kind is not b.kind:
        raise SemiringError(f"kind mismatch: {a.kind.tag} vs {b.kind.tag}")


def zero(kind: SemiringKind) -> Valuation:
    return Valuation._trusted(kind, {})


def unit(key, kind: SemiringKind) -> Valuation:
    """Dirac valuation at ``key``."""
    return Valuation._trusted(kind, {key: kind.one})


def kleisli_extend(f: Callable[[Hashable], Valuation] | Mapping, v: Valuation) -> Valuation:
    """``f†(v)(y) = sum_x v(x) * f(x)(y)`` over the finite support of ``v``."""
    kind = v.kind
    add_, mul = kind.add, kind.mul
    lookup = f.__getitem__ if isinstance(f, Mapping) else f
    out: dict = {}
    for x, w in v.items():
        try:
            fx = lookup(x)
        except KeyError as exc:
            raise SemiringError(f"Kleisli map undefined on support key {x!r}") from exc
        if fx.kind is not kind:
            raise SemiringError(f"kind mismatch: {kind.tag} vs {fx.kind.tag}")
        for y, u in fx.items():
            t = mul(w, u)
            out[y] = add_(out[y], t) if y in out else t
    return Valuation(kind, out)


def join(a: Valuation, b: Valuation) -> Valuation:
    """Pointwise maximum (binary supremum; the built-in orders are total)."""
    _same_kind(a, b)
    out = dict(a._d)
    for k, v in b._d.items():
        if k not in out or out[k] < v:
            out[k] = v
    return Valuation._trusted(a.kind, out)


def add(a: Valuation, b: Valuation) -> Valuation:
    """Pointwise semiring sum."""
    _same_kind(a, b)
    add_ = a.kind.add
    out = dict(a._d)
    for k, v in b._d.items():
        out[k] = add_(out[k], v) if k in out else v
    return Valuation._trusted(a.kind, out)


def combine(oplus: str, a: Valuation, b: Valuation) -> Valuation:
    if oplus == "join":
        return join(a, b)
    if oplus == "sum":
        return add(a, b)
    raise ValueError(f"unknown continuous operation {oplus!r}")


def quotient_project(v: Valuation, partition) -> Valuation:
    """Sum the entries of ``v`` within each block, keyed by block label."""

    def block(k):
        try:
            return partition.label_of(k)
        except KeyError as exc:
            raise SemiringError(f"key {k!r} is not assigned to any block") from exc

    return v.map_keys(block)
