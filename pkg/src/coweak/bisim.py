"""Pattern bisimulations, their largest instance, and kernel bisimulations.

A partition ``E`` is a B-bisimulation when any two related states have the
same row in the behaviour table computed for the quotient map of ``E``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .fixpoint import InexactError, SaturatedSystem, solve
from .pattern import PatternAutomaton
from .system import InputError, Partition, WeightedSystem, all_partitions
from .valuation import Valuation


@dataclass(frozen=True)
class BisimVerdict:
    holds: bool
    witness: tuple | None = None  # (x, x', pattern state, class, value at x, value at x')

    def __post_init__(self):
        if self.holds != (self.witness is None):
            raise ValueError("a witness is present exactly when the verdict fails")

    def __bool__(self):
        return self.holds

    def to_json(self, kind=None) -> dict:
        out = {"holds": self.holds}
        if self.witness is not None:
            x, y, b, c, vx, vy = self.witness
            fmt = kind.format if kind is not None else str
            out["witness"] = {"x": str(x), "y": str(y), "pattern": str(b), "class": str(c),
                              "value_x": fmt(vx), "value_y": fmt(vy)}
        return out


def _row_witness(partition: Partition, row: Callable, columns) -> BisimVerdict:
    """Compare ``row(x, col)`` valuations of every state with its block's first member."""
    for block in partition.blocks:
        x = block[0]
        for y in block[1:]:
            for col in columns:
                vx, vy = row(x, col), row(y, col)
                if vx != vy:
                    key = min(set(vx.support) ^ set(vy.support) or
                              {k for k in vx.support if vx[k] != vy[k]}, key=str)
                    return BisimVerdict(False, (x, y, col, key, vx[key], vy[key]))
    return BisimVerdict(True)


def behavior(sys, pattern, partition, oplus="join", strategy="exact"):
    table = solve(sys, pattern, partition, oplus, strategy)
    if not table.exact:
        raise InexactError(
            f"behaviour table did not stabilise (bound {table.bound}); refusing to decide equivalence"
        )
    return table


def check_bisimulation(sys: WeightedSystem, pattern: PatternAutomaton, partition: Partition, oplus: str = "join",
                       strategy: str = "exact", observables_only: bool = False) -> BisimVerdict:
    if set(partition.states) != set(sys.states):
        raise InputError("partition does not cover exactly the system's states")
    table = behavior(sys, pattern, partition, oplus, strategy)
    cols = pattern.compared(observables_only)
    return _row_witness(partition, lambda x, b: table.entries[(x, b)], cols)


def _split(partition: Partition, signature: Callable) -> Partition:
    blocks = []
    for block in partition.blocks:
        groups: dict = {}
        for x in block:
            groups.setdefault(signature(x), []).append(x)
        blocks.extend(groups.values())
    return Partition(blocks, partition.states)


def refine(states: Sequence, signature_for: Callable[[Partition], Callable]) -> Partition:
    """Split the one-block partition by ``signature_for(E)`` until stable."""
    part = Partition.single(states)
    while True:
        new = _split(part, signature_for(part))
        if len(new) == len(part):
            return part
        part = new


def largest_bisimulation(sys: WeightedSystem, pattern: PatternAutomaton, oplus: str = "join",
                         strategy: str = "exact", observables_only: bool = False) -> Partition:
    cols = pattern.compared(observables_only)

    def signature_for(part):
        table = behavior(sys, pattern, part, oplus, strategy)
        return lambda x: tuple(table.entries[(x, b)] for b in cols)

    return refine(sys.states, signature_for)


def partition_join(parts: Sequence[Partition], states: Sequence) -> Partition:
    """Finest partition coarser than all of ``parts`` (transitive closure of the union)."""
    parent = {x: x for x in states}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in parts:
        for block in p.blocks:
            r = find(block[0])
            for y in block[1:]:
                s = find(y)
                if s != r:
                    parent[s] = r
    groups: dict = {}
    for x in states:
        groups.setdefault(find(x), []).append(x)
    return Partition(groups.values(), states)


def passing_partitions(sys, pattern, oplus="join", max_states=7, observables_only=False):
    if len(sys.states) > max_states:
        raise InputError(f"brute force is limited to {max_states} states, got {len(sys.states)}")
    return [p for p in all_partitions(sys.states)
            if check_bisimulation(sys, pattern, p, oplus, observables_only=observables_only).holds]


def brute_force_largest(sys: WeightedSystem, pattern: PatternAutomaton, oplus: str = "join",
                        max_states: int = 7, observables_only: bool = False) -> Partition:
    """Coarsest B-bisimulation by exhaustive enumeration of partitions."""
    passing = passing_partitions(sys, pattern, oplus, max_states, observables_only)
    best = partition_join(passing, sys.states)
    if not check_bisimulation(sys, pattern, best, oplus, observables_only=observables_only).holds:
        raise AssertionError("closure of passing partitions is not a bisimulation")
    return best


# -- kernel bisimulations ---------------------------------------------------------


def _projected_rows(obj) -> Callable:
    """``(x, partition) -> {column: projected valuation}`` for a system or saturated table."""
    if isinstance(obj, SaturatedSystem):
        def rows(x, part):
            return tuple(obj.table.entries[(x, b)].map_keys(part.label_of) for b in obj.labels)
        return rows
    if isinstance(obj, WeightedSystem):
        def rows(x, part):
            return obj.f(x).map_keys(lambda ya: (part.label_of(ya[0]), ya[1]))
        return rows
    raise TypeError(f"expected a WeightedSystem or SaturatedSystem, got {type(obj).__name__}")


def strong_kernel_bisim(obj) -> Partition:
    """Coarsest partition whose blocks agree on one-step quotient-projected behaviour."""
    rows = _projected_rows(obj)
    return refine(obj.states, lambda part: (lambda x: rows(x, part)))


def is_kernel_bisimulation(obj, partition: Partition) -> bool:
    rows = _projected_rows(obj)
    for block in partition.blocks:
        r0 = rows(block[0], partition)
        if any(rows(y, partition) != r0 for y in block[1:]):
            return False
    return True


# -- distribution-level (reactive) kernel bisimulation --------------------------------


def reactive_kernel_bisim(states: Sequence, steps: Mapping) -> Partition:
    """Kernel bisimulation on ``x -> label -> distribution`` directly.

    ``steps[x][a]`` is a mapping ``y -> probability``; absent labels mean no
    ``a``-step.  Blocks are split by the per-label class-sum distributions.
    """

    def signature_for(part):
        def sig(x):
            out = []
            for a in sorted(steps.get(x, {}), key=str):
                mass: dict = {}
                for y, p in steps[x][a].items():
                    c = part.label_of(y)
                    mass[c] = mass.get(c, 0) + p
                out.append((a, frozenset((c, p) for c, p in mass.items() if p != 0)))
            return tuple(out)
        return sig

    return refine(states, signature_for)


def embed_reactive(kind, states: Sequence, labels: Sequence, steps: Mapping, tau=None) -> WeightedSystem:
    """Reactive system as a valuation system over ``(state, label)`` keys."""
    triples = [(x, a, p, y) for x in states for a, dist in steps.get(x, {}).items() for y, p in dist.items() if p != 0]
    return WeightedSystem.build(kind, states, labels, triples, tau)
