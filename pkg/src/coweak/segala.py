"""Simple Segala systems, convex sets of valuations, and weak probabilistic bisimulation.

A :class:`Polytope` is a finite generator set read either as its convex hull
or as its subconvex hull (all ``sum r_i g_i`` with ``r_i >= 0`` and
``sum r_i <= 1``, which always contains the zero valuation).  Membership is
decided by an exact rational LP, so every verdict here is exact.

Two independent routes decide weak equivalence of a partition:

* the Segala route iterates class-projected weak-transition polytopes and
  matches every step of a state in the polytope of each related state;
* the pattern route solves the behaviour equation under the weak pattern
  with polytope-valued entries (join = subconvex hull of the union).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .lp import feasible
from .pattern import PatternAutomaton, build_weak
from .semiring import REAL, SemiringError
from .system import InputError, ParseError, Partition, all_partitions
from .valuation import Valuation, unit


def _key(k):
    return str(k)


def hull_membership(point: Valuation, generators: Sequence[Valuation], subconvex: bool = True) -> bool:
    return hull_coefficients(point, generators, subconvex) is not None


def hull_coefficients(point: Valuation, generators: Sequence[Valuation], subconvex: bool = True):
    """Coefficients ``lambda`` expressing ``point`` over ``generators``, or ``None``."""
    gens = list(generators)
    if not gens:
        return [] if (subconvex and not point) else None
    dims = sorted(set(point.support).union(*(g.support for g in gens)), key=_key)
    if any(k not in set().union(*(g.support for g in gens)) for k in point.support):
        return None
    A = [[g[k] for g in gens] for k in dims]
    b = [point[k] for k in dims]
    if subconvex:
        A.append([Fraction(1)] * len(gens) + [Fraction(1)])
        for row in A[:-1]:
            row.append(Fraction(0))
    else:
        A.append([Fraction(1)] * len(gens))
    b.append(Fraction(1))
    sol = feasible(A, b)
    if sol is None:
        return None
    return sol[: len(gens)]


def _canon(gens: Iterable[Valuation]) -> tuple:
    seen = {}
    for g in gens:
        if g:
            seen.setdefault(g, None)
    return tuple(sorted(seen, key=lambda v: sorted((str(k), v[k]) for k in v.support)))


class Polytope:
    """Generator-represented convex (``subconvex=False``) or subconvex set of valuations."""

    __slots__ = ("generators", "subconvex", "_zero")

    def __init__(self, generators: Iterable[Valuation] = (), subconvex: bool = True, prune: bool = True):
        gens = list(generators)
        self.subconvex = subconvex
        # the zero valuation is implicit in a subconvex hull; for convex hulls it must be kept
        self._zero = (not subconvex) and any(not g for g in gens)
        gens = _canon(gens)
        if prune:
            gens = _prune(gens, subconvex)
        self.generators = gens

    @property
    def empty(self) -> bool:
        return not self.subconvex and not self.generators and not self._zero

    def points(self) -> list:
        pts = list(self.generators)
        if self._zero:
            pts.append(Valuation(REAL))
        return pts

    def contains(self, point: Valuation) -> bool:
        if not self.subconvex and not point and self._zero:
            return True
        return hull_membership(point, self.points(), self.subconvex)

    def __le__(self, other: "Polytope") -> bool:
        if self.subconvex and not other.subconvex:
            if not other.contains(Valuation(REAL)):
                return False
        return all(other.contains(g) for g in self.points())

    def hull_equal(self, other: "Polytope") -> bool:
        return self <= other and other <= self

    def __repr__(self):
        kind = "subconv" if self.subconvex else "conv"
        return f"{kind}{list(self.points())}"

    def to_json(self) -> dict:
        return {"subconvex": self.subconvex, "generators": [g.to_json() for g in self.points()]}


def _prune(gens: tuple, subconvex: bool) -> tuple:
    """Drop generators lying in the hull of the remaining ones."""
    keep = list(gens)
    i = 0
    while i < len(keep):
        others = keep[:i] + keep[i + 1:]
        if hull_membership(keep[i], others, subconvex):
            keep.pop(i)
        else:
            i += 1
    return tuple(keep)


def hull_equal(p: Polytope, q: Polytope) -> bool:
    return p.hull_equal(q)


def minkowski(terms: Sequence[tuple]) -> list:
    """Points whose convex hull is ``sum_i r_i * P_i`` for ``(r_i, P_i)`` pairs.

    A subconvex summand may contribute zero; an empty convex summand with a
    positive coefficient makes the whole sum empty.  The result may contain
    the zero valuation as an explicit point.
    """
    acc = [Valuation(REAL)]
    for r, P in terms:
        if r == 0:
            continue
        choices = [g.scale(r) for g in P.points()]
        if P.subconvex:
            choices.append(Valuation(REAL))
        if not choices:
            return []
        acc = Polytope([a + c for a, c in product(acc, choices)], subconvex=False).points()
    return acc


# -- Segala systems -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SegalaSystem:
    states: tuple
    labels: tuple
    steps: Mapping  # state -> tuple of (label, distribution Valuation over states)
    tau: str = "tau"

    def __post_init__(self):
        sset = set(self.states)
        if self.tau not in self.labels:
            raise InputError(f"silent label {self.tau!r} is not declared")
        fixed = {}
        for x in self.states:
            out = []
            for a, xi in self.steps.get(x, ()):
                if a not in self.labels:
                    raise InputError(f"undeclared label {a!r}")
                if not isinstance(xi, Valuation):
                    xi = Valuation(REAL, {y: REAL.coerce(p) for y, p in dict(xi).items()})
                if any(y not in sset for y in xi.support):
                    raise InputError(f"step of {x!r} leaves the state set")
                if xi.total() != 1:
                    raise InputError(f"step {x!r} -{a}-> must sum to 1, got {xi.total()}")
                if (a, xi) not in out:
                    out.append((a, xi))
            fixed[x] = tuple(out)
        extra = set(self.steps) - sset
        if extra:
            raise InputError(f"steps for undeclared states {sorted(map(str, extra))}")
        object.__setattr__(self, "steps", fixed)

    def steps_of(self, x, a) -> list:
        return [xi for (b, xi) in self.steps[x] if b == a]

    @property
    def visible(self) -> tuple:
        return tuple(a for a in self.labels if a != self.tau)


_SSTEP = re.compile(r"^sstep\s+(\S+)\s+(\S+)\s*\{(.*)\}\s*$")


def parse_segala(text: str) -> SegalaSystem:
    """Parse ``states``/``labels``/``tau`` directives and ``sstep x a { y 1/2 ; z 1/2 }`` lines."""
    states = labels = None
    tau = "tau"
    steps: dict = {}
    order: list = []
    seen_labels: list = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "sstep":
            m = _SSTEP.match(line)
            if not m:
                raise ParseError("expected 'sstep <src> <label> { <dst> <prob> ; ... }'", n)
            x, a, body = m.groups()
            dist: dict = {}
            for part in body.split(";"):
                part = part.strip()
                if not part:
                    continue
                toks = part.split()
                if len(toks) != 2:
                    raise ParseError(f"bad distribution entry {part!r}", n, raw.find(part) + 1)
                y, p = toks
                try:
                    q = REAL.parse(p)
                except SemiringError as exc:
                    raise ParseError(str(exc), n, raw.find(p) + 1) from None
                if q == 0:
                    raise ParseError("zero probability entry", n, raw.find(p) + 1)
                if y in dist:
                    raise ParseError(f"duplicate target {y!r}", n, raw.find(part) + 1)
                dist[y] = q
            if sum(dist.values()) != 1:
                raise ParseError(f"distribution sums to {sum(dist.values())}, not 1", n)
            for s in (x, *dist):
                if s not in order:
                    order.append(s)
            if a not in seen_labels:
                seen_labels.append(a)
            steps.setdefault(x, []).append((a, Valuation(REAL, dist)))
        elif head == "states":
            states = line.split()[1:]
        elif head == "labels":
            labels = line.split()[1:]
        elif head == "tau":
            tau = line.split()[1]
        elif head == "semiring":
            if line.split()[1:] != ["real"]:
                raise ParseError("Segala systems use the real semiring", n)
        elif head == "trans":
            raise ParseError("'trans' lines belong to weighted systems; use parse_system", n)
        else:
            raise ParseError(f"unknown directive {head!r}", n)
    if states is None:
        states = order
    if labels is None:
        labels = seen_labels + ([tau] if tau not in seen_labels else [])
    undeclared = [s for s in order if s not in states]
    if undeclared:
        raise ParseError(f"undeclared state(s) {undeclared}", 1)
    return SegalaSystem(tuple(states), tuple(labels), steps, tau)


def kappa_segala(sys: SegalaSystem) -> dict:
    """``x -> Polytope`` over ``(state, label)`` keys: subconvex hull of label-tagged steps."""
    return {x: Polytope([xi.map_keys(lambda y, a=a: (y, a)) for a, xi in sys.steps[x]], subconvex=True)
            for x in sys.states}


def combined_steps(sys: SegalaSystem, x, a, subconvex: bool = False) -> Polytope:
    return Polytope(sys.steps_of(x, a), subconvex=subconvex)


# -- Segala route -------------------------------------------------------------------------


@dataclass
class ClassPolytopes:
    polytopes: dict  # (state, label) -> Polytope over block labels (convex)
    iterations: int
    stable: bool


def weak_class_polytopes(sys: SegalaSystem, partition: Partition, cap: int = 64) -> ClassPolytopes:
    """Cumulative weak-transition polytopes, projected to blocks, iterated to stability."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    tau = sys.tau
    V = {}
    for x in sys.states:
        V[(x, tau)] = Polytope([unit(partition.label_of(x), REAL)], subconvex=False)
        for a in sys.visible:
            V[(x, a)] = Polytope([], subconvex=False)

    def through(steps, follow):
        gens = []
        for xi in steps:
            gens.extend(minkowski([(p, V[(y, follow)]) for y, p in xi.items()]))
        return gens

    for it in range(1, cap + 1):
        new = {}
        for x in sys.states:
            tau_steps = sys.steps_of(x, tau)
            for a in sys.labels:
                gens = list(V[(x, a)].points())
                if a == tau:
                    gens += through(tau_steps, tau)
                else:
                    gens += through(sys.steps_of(x, a), tau)
                    gens += through(tau_steps, a)
                new[(x, a)] = Polytope(gens, subconvex=False)
        stable = all(new[k] <= V[k] for k in V)
        V = new
        if stable:
            return ClassPolytopes(V, it, True)
    return ClassPolytopes(V, cap, False)


@dataclass(frozen=True)
class SegalaVerdict:
    holds: bool | None  # None when the polytopes did not stabilise
    witness: tuple | None = None  # (x, y, label, class vector)
    stable: bool = True
    iterations: int = 0

    def to_json(self) -> dict:
        out = {"holds": self.holds, "stable": self.stable, "iterations": self.iterations}
        if self.witness is not None:
            x, y, a, v = self.witness
            out["witness"] = {"x": str(x), "y": str(y), "label": str(a), "step": v.to_json()}
        return out


def check_weak_prob_bisim(sys: SegalaSystem, partition: Partition, cap: int = 64) -> SegalaVerdict:
    """Match every step ``x -a-> xi`` by a weak ``a``-transition of each related state, up to blocks."""
    cp = weak_class_polytopes(sys, partition, cap)
    if not cp.stable:
        return SegalaVerdict(None, None, False, cp.iterations)
    for block in partition.blocks:
        for x in block:
            for y in block:
                if x == y:
                    continue
                for a, xi in sys.steps[x]:
                    v = xi.map_keys(partition.label_of)
                    if not cp.polytopes[(y, a)].contains(v):
                        return SegalaVerdict(False, (x, y, a, v), True, cp.iterations)
    return SegalaVerdict(True, None, True, cp.iterations)


def check_strong_prob_bisim(sys: SegalaSystem, partition: Partition) -> bool:
    """Each step of ``x`` is matched by a combined step of every related ``y``, up to blocks."""
    for block in partition.blocks:
        for x in block:
            for y in block:
                if x == y:
                    continue
                for a, xi in sys.steps[x]:
                    gens = [z.map_keys(partition.label_of) for z in sys.steps_of(y, a)]
                    if not hull_membership(xi.map_keys(partition.label_of), gens, subconvex=False):
                        return False
    return True


def kappa_kernel_bisim(sys: SegalaSystem, partition: Partition) -> bool:
    """Related states have hull-equal block-projected images under the convex-set translation."""
    k = kappa_segala(sys)
    proj = {x: Polytope([g.map_keys(lambda ya: (partition.label_of(ya[0]), ya[1])) for g in k[x].points()])
            for x in sys.states}
    return all(proj[block[0]].hull_equal(proj[y]) for block in partition.blocks for y in block[1:])


# -- pattern route ----------------------------------------------------------------------------


@dataclass
class PatternPolytopes:
    entries: dict  # (state, pattern state) -> subconvex Polytope over block labels
    pattern: PatternAutomaton
    iterations: int
    stable: bool


def weak_pattern_polytopes(sys: SegalaSystem, partition: Partition, cap: int = 64) -> PatternPolytopes:
    """Kleene iteration of the behaviour equation in the convex-set monad, weak pattern, ``h`` = blocks."""
    pattern = build_weak(sys.labels, sys.tau)
    k = kappa_segala(sys)
    dead = pattern.dead_states()
    zero_poly = Polytope([], subconvex=True)
    T = {(x, b): zero_poly for x in sys.states for b in pattern.states}
    for it in range(1, cap + 1):
        new = {}
        for x in sys.states:
            for b in pattern.states:
                if b in dead:
                    new[(x, b)] = zero_poly
                    continue
                gens = [unit(partition.label_of(x), REAL)] if pattern.accepts(b) else []
                db = pattern.delta[b]
                for g in k[x].generators:
                    gens.extend(minkowski([(w, T[(y, db[a])]) for (y, a), w in g.items()]))
                new[(x, b)] = Polytope(gens, subconvex=True)
        stable = all(new[key] <= T[key] for key in T)
        T = new
        if stable:
            return PatternPolytopes(T, pattern, it, True)
    return PatternPolytopes(T, pattern, cap, False)


def check_pattern_bisim(sys: SegalaSystem, partition: Partition, cap: int = 64) -> SegalaVerdict:
    pp = weak_pattern_polytopes(sys, partition, cap)
    if not pp.stable:
        return SegalaVerdict(None, None, False, pp.iterations)
    for block in partition.blocks:
        for y in block[1:]:
            for b in pp.pattern.reachable:
                if not pp.entries[(block[0], b)].hull_equal(pp.entries[(y, b)]):
                    return SegalaVerdict(False, (block[0], y, b, Valuation(REAL)), True, pp.iterations)
    return SegalaVerdict(True, None, True, pp.iterations)


def check_segala_equivalence(sys: SegalaSystem, partition: Partition, cap: int = 64) -> dict:
    seg = check_weak_prob_bisim(sys, partition, cap)
    # no point iterating the second route when the first one already failed to stabilise
    pat = check_pattern_bisim(sys, partition, cap) if seg.stable else SegalaVerdict(None, None, False, 0)
    stable = seg.stable and pat.stable
    return {
        "stable": stable,
        "segala": seg.holds,
        "pattern": pat.holds,
        "agree": (seg.holds == pat.holds) if stable else None,
        "iterations": {"segala": seg.iterations, "pattern": pat.iterations},
    }


def largest_weak_prob_bisim(sys: SegalaSystem, cap: int = 64) -> Partition | None:
    """Coarsest passing partition by enumeration (small systems); ``None`` if any check is unstable."""
    passing = []
    for p in all_partitions(sys.states):
        v = check_weak_prob_bisim(sys, p, cap)
        if v.holds is None:
            return None
        if v.holds:
            passing.append(p)
    from .bisim import partition_join

    best = partition_join(passing, sys.states)
    return best if check_weak_prob_bisim(sys, best, cap).holds else None


# -- C0M monad operations (used by the law suites) -----------------------------------------------


def c0m_unit(key) -> Polytope:
    """The Dirac set ``{delta_key}``; its subconvex closure would break the right unit law."""
    return Polytope([unit(key, REAL)], subconvex=False)


def c0m_extend(g: Mapping, S: Polytope) -> Polytope:
    """Kleisli extension: all ``sum_k xi(k) * theta_k`` with ``xi`` in ``S`` and ``theta_k`` in ``g(k)``."""
    gens = []
    for xi in S.points():
        gens.extend(minkowski([(w, g[k]) for k, w in xi.items()]))
    if S.subconvex:
        return Polytope(gens, subconvex=True)
    return Polytope(gens, subconvex=False)
