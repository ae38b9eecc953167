"""Least solutions of the cumulative-behaviour equation.

For a system ``f``, a pattern ``B``, a map ``h: X -> Y`` and a continuous
operation ``oplus`` (``"join"`` or ``"sum"``), the behaviour table satisfies

    entry(x, b) = [eta(h(x)) if b accepts the empty trace else bottom]
                  oplus  sum_{(y,a)} f(x)(y,a) * entry(y, b/a)

and is the least such table.  Two strategies compute it:

* :func:`solve_iterate` runs Kleene iteration on valuation tables, with
  widening to infinity over ``nat`` and a convergence bound over ``real``;
* :func:`solve_exact` decouples the equation per target key (valuations are
  pointwise) and solves each column exactly: by star-elimination when the
  equation is linear (``sum``, or ``join`` on the idempotent boolean
  semiring), and by pin-and-release elimination for ``join`` otherwise.

:func:`path_oracle` sums weights of (prefix-minimal) paths up to a depth and
is the independent reference for both.
"""

from __future__ import annotations

import time
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Mapping

from .pattern import PatternAutomaton
from .semiring import BOOL, INF, NAT, REAL, SemiringKind
from .system import Partition, WeightedSystem
from .valuation import Valuation, combine, kleisli_extend, unit, zero


class InexactError(RuntimeError):
    """A verdict was requested from an approximate (non-stabilised) table."""


@dataclass
class BehaviorTable:
    entries: dict  # (state, pattern state) -> Valuation over codomain keys
    oplus: str
    strategy: str
    iterations: int = 0
    exact: bool = True
    bound: float | None = None
    meta: dict = field(default_factory=dict)

    def __getitem__(self, key) -> Valuation:
        return self.entries[key]

    def __eq__(self, other):
        if not isinstance(other, BehaviorTable):
            return NotImplemented
        return self.entries == other.entries

    def row(self, x, pstates) -> tuple:
        return tuple(self.entries[(x, b)] for b in pstates)

    def leq(self, other: "BehaviorTable") -> bool:
        return all(v <= other.entries[k] for k, v in self.entries.items())

    def to_json(self, states=None, pstates=None) -> dict:
        keys = list(self.entries)
        if states is not None and pstates is not None:
            keys = [(x, b) for x in states for b in pstates]
        out = {
            "oplus": self.oplus,
            "strategy": self.strategy,
            "exact": self.exact,
            "iterations": self.iterations,
            "entries": [
                {"state": str(x), "pattern": str(b), "value": self.entries[(x, b)].to_json()} for (x, b) in keys
            ],
        }
        if self.bound is not None:
            out["bound"] = self.bound
        return out


def _check_oplus(oplus):
    if oplus not in ("join", "sum"):
        raise ValueError(f"unknown continuous operation {oplus!r}; expected 'join' or 'sum'")


def _as_function(h, sys: WeightedSystem) -> Callable:
    if h is None:
        return lambda x: x
    if isinstance(h, Partition):
        return h.label_of
    if isinstance(h, Mapping):
        return h.__getitem__
    return h


# -- linear algebra over the star semiring -------------------------------------


def least_solution(kind: SemiringKind, rows: list, const: list) -> list:
    """Least solution of ``u = A u + c`` by Gauss-Jordan star-elimination.

    ``rows[i]`` is a sparse dict ``j -> A[i][j]``.  Pivoting on ``x_k`` turns
    ``x_k = a x_k + r`` into ``x_k = a* r``; this yields the least solution in
    any commutative continuous semiring.
    """
    add, mul, star = kind.add, kind.mul, kind.star
    A = [dict(r) for r in rows]
    c = list(const)
    n = len(A)
    users: list = [set() for _ in range(n)]
    for i, r in enumerate(A):
        for j in r:
            if j != i:
                users[j].add(i)
    for k in range(n):
        rk = A[k]
        akk = rk.pop(k, None)
        if akk is not None:
            s = star(akk)
            if s != 1:
                for j in list(rk):
                    v = mul(s, rk[j])
                    if v == 0:
                        del rk[j]
                    else:
                        rk[j] = v
                c[k] = mul(s, c[k])
        ck = c[k]
        for i in users[k]:
            ri = A[i]
            coef = ri.pop(k, None)
            if coef is None:
                continue
            for j, v in rk.items():
                t = mul(coef, v)
                if t == 0:
                    continue
                if j in ri:
                    ri[j] = add(ri[j], t)
                else:
                    ri[j] = t
                    if j != i:
                        users[j].add(i)
            if ck != 0:
                c[i] = add(c[i], mul(coef, ck))
        users[k] = set()
    return c


def _apply(kind, row: dict, u: list):
    add, mul = kind.add, kind.mul
    acc = kind.zero
    for j, w in row.items():
        uj = u[j]
        if uj != 0:
            acc = add(acc, mul(w, uj))
    return acc


def pinned_join_solution(kind: SemiringKind, rows: list, base: Mapping) -> tuple:
    """Least solution of ``u_i = max(base_i, (A u)_i)``, exactly.

    Start with every based unknown pinned to its base value and solve the
    remaining linear system; this is below the least fixpoint.  Whenever a
    pinned unknown's linear part overshoots its base, release it and continue
    from the current vector ``L`` by solving ``d = A d + (G(L) - L)`` for the
    increment, which telescopes to the supremum of Kleene iteration from
    ``L``.  Every vector produced stays below the least fixpoint, and the
    loop ends on a fixpoint, hence on the least one.  Returns ``(u, rounds)``.
    """
    n = len(rows)
    pinned = {i for i, v in base.items() if v != 0}
    rows_p = [{} if i in pinned else rows[i] for i in range(n)]
    const = [base[i] if i in pinned else kind.zero for i in range(n)]
    u = least_solution(kind, rows_p, const)
    rounds = 0
    while True:
        release = [i for i in pinned if kind.leq(_apply(kind, rows[i], u), base[i]) is False]
        if not release:
            return u, rounds
        rounds += 1
        pinned.difference_update(release)
        frozen = {i for i in range(n) if u[i] is INF}
        rows_d, r = [], []
        for i in range(n):
            if i in pinned or i in frozen:
                rows_d.append({})
                r.append(kind.zero)
            else:
                rows_d.append(rows[i])
                r.append(kind.monus(_apply(kind, rows[i], u), u[i]))
        d = least_solution(kind, rows_d, r)
        u = [kind.add(u[i], d[i]) for i in range(n)]


# -- equation structure ---------------------------------------------------------


class EquationSystem:
    """Linear skeleton of the behaviour equation for one system and pattern.

    Unknowns are the pairs ``(x, b)`` with ``b`` a live pattern state; dead
    pattern states (denoting the empty trace set) are constantly bottom.
    Solutions per target set of states are cached.
    """

    def __init__(self, sys: WeightedSystem, pattern: PatternAutomaton):
        missing = set(l for x in sys.states for (_, l) in sys.f(x)) - set(pattern.labels)
        if missing:
            raise ValueError(f"pattern alphabet lacks system label(s) {sorted(missing)}")
        self.sys = sys
        self.pattern = pattern
        self.kind = sys.kind
        dead = pattern.dead_states()
        self.live = [b for b in pattern.states if b not in dead]
        self.keys = [(x, b) for x in sys.states for b in self.live]
        self.index = {k: i for i, k in enumerate(self.keys)}
        add = self.kind.add
        rows = []
        for x, b in self.keys:
            row: dict = {}
            for (y, a), w in sys.f(x).items():
                c = pattern.delta[b][a]
                if c in dead:
                    continue
                j = self.index[(y, c)]
                row[j] = add(row[j], w) if j in row else w
            rows.append(row)
        self.rows = rows
        self.accepting = [pattern.accepts(b) for _, b in self.keys]
        self._cache: dict = {}

    def linear(self, oplus: str) -> bool:
        return oplus == "sum" or self.kind.idempotent

    def base_for(self, target: frozenset, value=None) -> dict:
        one = self.kind.one if value is None else value
        return {i: one for i, (x, b) in enumerate(self.keys) if self.accepting[i] and x in target}

    def solve_base(self, base: Mapping, oplus: str) -> tuple:
        """Solve one column for explicit base values; returns ``(values, rounds)``."""
        kind = self.kind
        if self.linear(oplus):
            const = [base.get(i, kind.zero) for i in range(len(self.keys))]
            return least_solution(kind, self.rows, const), 0
        return pinned_join_solution(kind, self.rows, base)

    def column(self, target: frozenset, oplus: str) -> list:
        key = (target, oplus)
        hit = self._cache.get(key)
        if hit is None:
            hit = self.solve_base(self.base_for(target), oplus)
            self._cache[key] = hit
        return hit[0]

    def column_rounds(self, target: frozenset, oplus: str) -> int:
        self.column(target, oplus)
        return self._cache[(target, oplus)][1]


_EQ_CACHE: "OrderedDict" = OrderedDict()


def equations(sys: WeightedSystem, pattern: PatternAutomaton) -> EquationSystem:
    key = (id(sys), id(pattern))
    hit = _EQ_CACHE.get(key)
    if hit is not None and hit.sys is sys and hit.pattern is pattern:
        _EQ_CACHE.move_to_end(key)
        return hit
    eq = EquationSystem(sys, pattern)
    _EQ_CACHE[key] = eq
    if len(_EQ_CACHE) > 256:
        _EQ_CACHE.popitem(last=False)
    return eq


def _preimages(sys, h):
    groups: dict = {}
    for x in sys.states:
        groups.setdefault(h(x), set()).add(x)
    return {k: frozenset(v) for k, v in groups.items()}


def solve_exact(sys: WeightedSystem, pattern: PatternAutomaton, h=None, oplus: str = "join") -> BehaviorTable:
    """Exact least solution, one column per codomain key of ``h``."""
    _check_oplus(oplus)
    hf = _as_function(h, sys)
    eq = equations(sys, pattern)
    kind = sys.kind
    cols = {}
    rounds = 0
    for k, pre in _preimages(sys, hf).items():
        cols[k] = eq.column(pre, oplus)
        rounds = max(rounds, eq.column_rounds(pre, oplus))
    entries = {}
    empty = zero(kind)
    for x in sys.states:
        for b in pattern.states:
            i = eq.index.get((x, b))
            if i is None:
                entries[(x, b)] = empty
                continue
            entries[(x, b)] = Valuation(kind, {k: col[i] for k, col in cols.items()})
    strategy = "exact-linear" if eq.linear(oplus) else "exact-pinned"
    return BehaviorTable(entries, oplus, strategy, iterations=0, exact=True, meta={"release_rounds": rounds})


# -- Kleene iteration -----------------------------------------------------------


def bottom_table(sys: WeightedSystem, pattern: PatternAutomaton, oplus: str = "join") -> BehaviorTable:
    empty = zero(sys.kind)
    return BehaviorTable({(x, b): empty for x in sys.states for b in pattern.states}, oplus, "iterate")


def step(table: BehaviorTable, sys: WeightedSystem, pattern: PatternAutomaton, h=None, oplus: str = "join") -> BehaviorTable:
    """One application of the behaviour functional to ``table``."""
    _check_oplus(oplus)
    hf = _as_function(h, sys)
    kind = sys.kind
    empty = zero(kind)
    entries = {}
    for x in sys.states:
        fx = sys.f(x)
        hx = hf(x)
        for b in pattern.states:
            delta_b = pattern.delta[b]
            ext = kleisli_extend(lambda ya: table.entries[(ya[0], delta_b[ya[1]])], fx)
            base = unit(hx, kind) if pattern.accepts(b) else empty
            entries[(x, b)] = combine(oplus, base, ext)
    return BehaviorTable(entries, oplus, table.strategy, table.iterations + 1, table.exact)


def _max_gap(old: BehaviorTable, new: BehaviorTable) -> float:
    gap = 0.0
    for k, v in new.entries.items():
        w = old.entries[k]
        for key in set(v) | set(w):
            a, b = v[key], w[key]
            if a is INF or b is INF:
                if a is not b:
                    return float("inf")
                continue
            try:
                gap = max(gap, float(abs(a - b)))
            except OverflowError:
                return float("inf")
    return gap


def solve_iterate(sys: WeightedSystem, pattern: PatternAutomaton, h=None, oplus: str = "join",
                  max_iter: int = 10_000, widen_after: int | None = None) -> BehaviorTable:
    """Kleene iteration from bottom until an iterate repeats.

    Over ``nat``, an entry that still grows after iteration ``widen_after``
    (default: number of unknowns) is widened to infinity.  Iterate ``k`` counts
    paths of length below ``k``; growth past the number of unknowns needs a
    path that revisits a (state, pattern state) pair, and that cycle pumps.  Over
    ``real`` without exact stabilisation the result is flagged inexact and
    carries the last step's largest entry difference as ``bound``.
    """
    _check_oplus(oplus)
    kind = sys.kind
    table = bottom_table(sys, pattern, oplus)
    if widen_after is None:
        widen_after = max(1, len(sys.states) * len(pattern.states))
    widened = 0
    for it in range(1, max_iter + 1):
        new = step(table, sys, pattern, h, oplus)
        if kind is NAT and it > widen_after:
            patched = {}
            for k, v in new.entries.items():
                old = table.entries[k]
                grown = {key: INF for key, val in v.items() if val is not INF and val != old[key]}
                if grown:
                    widened += len(grown)
                    patched[k] = Valuation(kind, {**dict(v), **grown})
            new.entries.update(patched)
        if new.entries == table.entries:
            return BehaviorTable(new.entries, oplus, "iterate", it, True, meta={"widened": widened})
        prev, table = table, new
    return BehaviorTable(table.entries, oplus, "iterate", max_iter, False, _max_gap(prev, table), meta={"widened": widened})


def solve(sys: WeightedSystem, pattern: PatternAutomaton, h=None, oplus: str = "join", strategy: str = "auto",
          max_iter: int = 10_000, widen_after: int | None = None) -> BehaviorTable:
    """Dispatch: ``auto`` iterates over the boolean semiring, else solves exactly."""
    if strategy == "auto":
        strategy = "iterate" if sys.kind is BOOL else "exact"
    if strategy == "iterate":
        return solve_iterate(sys, pattern, h, oplus, max_iter, widen_after)
    if strategy == "exact":
        return solve_exact(sys, pattern, h, oplus)
    raise ValueError(f"unknown strategy {strategy!r}")


def residual_free(table: BehaviorTable, sys, pattern, h=None) -> bool:
    """True iff one functional step reproduces ``table`` exactly."""
    return step(table, sys, pattern, h, table.oplus).entries == table.entries


# -- saturation -----------------------------------------------------------------


@dataclass
class SaturatedSystem:
    """The identity-target behaviour table read as a ``B``-labelled system."""

    states: tuple
    labels: tuple  # pattern states
    table: BehaviorTable

    def successors(self, x, b) -> Valuation:
        return self.table.entries[(x, b)]

    def label_rows(self) -> dict:
        return {x: {b: self.table.entries[(x, b)] for b in self.labels} for x in self.states}


def saturate(sys: WeightedSystem, pattern: PatternAutomaton, oplus: str = "join", strategy: str = "auto",
             pstates=None) -> SaturatedSystem:
    table = solve(sys, pattern, None, oplus, strategy)
    if not table.exact:
        raise InexactError("saturation did not stabilise")
    labels = tuple(pstates) if pstates is not None else pattern.states
    return SaturatedSystem(sys.states, labels, table)


# -- probabilistic recursion and path oracle ----------------------------------------


def total_probabilities(sys: WeightedSystem, pattern: PatternAutomaton, partition: Partition) -> BehaviorTable:
    """Least solution of ``P(x,b,C) = 1 if eps in b and x in C else sum f(x)(y,a) P(y,b/a,C)``."""
    eq = equations(sys, pattern)
    kind = sys.kind
    n = len(eq.keys)
    cols = {}
    for label in partition.labels():
        block = frozenset(partition.block(label))
        base = eq.base_for(block)
        rows = [{} if i in base else eq.rows[i] for i in range(n)]
        const = [base.get(i, kind.zero) for i in range(n)]
        cols[label] = least_solution(kind, rows, const)
    entries = {}
    for x in sys.states:
        for b in pattern.states:
            i = eq.index.get((x, b))
            entries[(x, b)] = zero(kind) if i is None else Valuation(kind, {k: c[i] for k, c in cols.items()})
    return BehaviorTable(entries, "join", "probabilistic-recursion")


def path_oracle(sys: WeightedSystem, pattern: PatternAutomaton, h=None, depth: int = 30,
                oplus: str = "join") -> BehaviorTable:
    """Sum of path weights of length ``<= depth``, per (state, pattern state, key).

    With ``join`` only prefix-minimal paths count (a path stops contributing to
    a key once it has reached that key along an accepted trace); with ``sum``
    every accepted path counts.  Computed backwards over path length, one key
    at a time, so it never consults the solvers' equations.
    """
    _check_oplus(oplus)
    hf = _as_function(h, sys)
    kind = sys.kind
    add, mul = kind.add, kind.mul
    keys = list(_preimages(sys, hf).items())
    pstates = pattern.states
    cols = {}
    for key, pre in keys:
        hit = {(x, b): (pattern.accepts(b) and x in pre) for x in sys.states for b in pstates}
        cur = {k: (kind.one if v else kind.zero) for k, v in hit.items()}
        for _ in range(depth):
            nxt = {}
            for x in sys.states:
                fx = sys.f(x)
                for b in pstates:
                    if oplus == "join" and hit[(x, b)]:
                        nxt[(x, b)] = kind.one
                        continue
                    acc = kind.one if hit[(x, b)] else kind.zero
                    db = pattern.delta[b]
                    for (y, a), w in fx.items():
                        v = cur[(y, db[a])]
                        if v != 0:
                            acc = add(acc, mul(w, v))
                    nxt[(x, b)] = acc
            cur = nxt
        cols[key] = cur
    entries = {(x, b): Valuation(kind, {key: cols[key][(x, b)] for key, _ in keys}) for x in sys.states for b in pstates}
    return BehaviorTable(entries, oplus, f"path-oracle(depth={depth})", exact=False)


def enumerate_paths(sys: WeightedSystem, pattern: PatternAutomaton, x, b, target: frozenset, depth: int,
                    minimal: bool = True):
    """Explicit path enumeration (exponential; small depths only).

    Yields ``(path, weight)`` for each path from ``x`` of length ``<= depth``
    whose trace lies in ``b`` and which ends in ``target``; with ``minimal``
    only paths without such a proper prefix are produced.
    """

    def rec(state, pstate, path, weight, left):
        if pattern.accepts(pstate) and state in target:
            yield tuple(path), weight
            if minimal:
                return
        if left == 0:
            return
        for (y, a), w in sys.f(state).items():
            path.append((a, y))
            yield from rec(y, pattern.delta[pstate][a], path, sys.kind.mul(weight, w), left - 1)
            path.pop()

    yield from rec(x, b, [], sys.kind.one, depth)
