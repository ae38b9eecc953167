"""Reductions of pattern bisimulation to kernel bisimulation.

Two routes are checked here:

* saturation: for an algebraic ``oplus`` (``sum`` always, ``join`` on the
  boolean semiring), B-bisimulations are exactly the kernel bisimulations of
  the saturated system ``f^B_id``;
* continuation embedding: a valuation ``p`` is sent to the linear functional
  ``c -> sum_x p(x) c(x)``.  Joins of such functionals are taken pointwise,
  which is algebraic, so ``join``-bisimulations over ``nat`` and ``real``
  become kernel bisimulations of the saturated embedded system.

A functional is represented by an evaluation callable; when it is the image
of a valuation, that valuation is kept as ``carrier``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .bisim import check_bisimulation, is_kernel_bisimulation, largest_bisimulation, strong_kernel_bisim
from .fixpoint import EquationSystem, equations, saturate, solve_exact
from .pattern import PatternAutomaton
from .semiring import BOOL, INF, NAT, REAL, SemiringKind
from .system import Partition, WeightedSystem
from .valuation import Valuation


class NotAlgebraicError(ValueError):
    """The requested continuous operation is not algebraic for this semiring."""


def is_algebraic(kind: SemiringKind, oplus: str) -> bool:
    return oplus == "sum" or (oplus == "join" and kind.idempotent)


# -- continuation elements ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ContinuationElement:
    kind: SemiringKind
    ev: Callable  # test function (key -> payload) -> payload
    carrier: Valuation | None = None

    def __call__(self, c):
        return self.ev(c)

    def agrees_on(self, other: "ContinuationElement", tests) -> bool:
        return all(self.ev(c) == other.ev(c) for c in tests)

    def __eq__(self, other):
        if not isinstance(other, ContinuationElement):
            return NotImplemented
        if self.carrier is None or other.carrier is None:
            raise ValueError("equality of bare functionals needs explicit test functions; use agrees_on")
        keys = set(self.carrier.support) | set(other.carrier.support)
        return self.agrees_on(other, [indicator(k, self.kind) for k in keys])

    __hash__ = None


def indicator(key, kind: SemiringKind) -> Callable:
    return lambda y: kind.one if y == key else kind.zero


def class_function(partition: Partition, values: Mapping, kind: SemiringKind) -> Callable:
    """Test function constant on blocks: ``x -> values[label_of(x)]``."""
    return lambda x: values.get(partition.label_of(x), kind.zero)


def evaluate(p: Valuation, c: Callable):
    kind = p.kind
    acc = kind.zero
    for x, w in p.items():
        acc = kind.add(acc, kind.mul(w, c(x)))
    return acc


def embed(p: Valuation) -> ContinuationElement:
    """``p -> (c -> c-dagger(p))``: weighted evaluation of test functions."""
    return ContinuationElement(p.kind, lambda c: evaluate(p, c), p)


def unit_element(key, kind: SemiringKind) -> ContinuationElement:
    return ContinuationElement(kind, lambda c: c(key), Valuation(kind, {key: kind.one}))


def pointwise(oplus: str, e1: ContinuationElement, e2: ContinuationElement) -> ContinuationElement:
    kind = e1.kind
    if oplus == "join":
        op = lambda a, b: a if kind.leq(b, a) else b
    elif oplus == "sum":
        op = kind.add
    else:
        raise ValueError(f"unknown continuous operation {oplus!r}")
    return ContinuationElement(kind, lambda c: op(e1.ev(c), e2.ev(c)))


def extend(h: Callable, e: ContinuationElement) -> ContinuationElement:
    """Kleisli extension in the continuation monad: ``h-dagger(e)(c) = e(x -> h(x)(c))``."""
    return ContinuationElement(e.kind, lambda c: e.ev(lambda x: h(x).ev(c)))


# -- saturation route -------------------------------------------------------------


def _guard(kind, oplus):
    if not is_algebraic(kind, oplus):
        raise NotAlgebraicError(
            f"'{oplus}' is not algebraic over the {kind.tag} semiring; the saturation reduction does not apply"
            " (use the continuation embedding instead)"
        )


def check_theorem_red(sys: WeightedSystem, pattern: PatternAutomaton, oplus: str, partition: Partition,
                      saturated=None) -> dict:
    """Both verdicts for one partition: pattern bisimulation vs kernel bisimulation after saturation."""
    _guard(sys.kind, oplus)
    sat = saturated if saturated is not None else saturate(sys, pattern, oplus, strategy="exact",
                                                           pstates=pattern.reachable)
    b = check_bisimulation(sys, pattern, partition, oplus).holds
    k = is_kernel_bisimulation(sat, partition)
    return {"bisimulation": b, "kernel": k, "agree": b == k}


def check_theorem_red_largest(sys: WeightedSystem, pattern: PatternAutomaton, oplus: str) -> dict:
    _guard(sys.kind, oplus)
    sat = saturate(sys, pattern, oplus, strategy="exact", pstates=pattern.reachable)
    a = largest_bisimulation(sys, pattern, oplus)
    b = strong_kernel_bisim(sat)
    return {"largest": a.to_json(), "kernel": b.to_json(), "agree": a == b}


# -- continuation route ---------------------------------------------------------------


def _test_values(kind: SemiringKind):
    if kind is REAL:
        from fractions import Fraction
        return [kind.zero, Fraction(1, 2), kind.one, Fraction(2), INF]
    if kind is NAT:
        return [0, 1, 2, INF]
    return [0, 1]


def class_tests(partition: Partition, kind: SemiringKind, extra: int = 8, seed: int = 0) -> list:
    """Class indicators followed by ``extra`` seeded random class-constant value maps."""
    labels = partition.labels()
    tests = [{c: kind.one} for c in labels]
    rng = random.Random(seed)
    vals = _test_values(kind)
    for _ in range(extra):
        tests.append({c: rng.choice(vals) for c in labels})
    return tests


class ContinuationSaturation:
    """Saturated embedded system ``x -> b -> functional``, evaluated lazily per test function.

    For a test function ``c`` the family of values ``G_c(x, b)`` is the least
    solution of ``G_c(x,b) = [c(x) if b accepts] join sum f(x)(y,a) G_c(y, b/a)``.
    """

    def __init__(self, sys: WeightedSystem, pattern: PatternAutomaton):
        self.sys = sys
        self.pattern = pattern
        self.eq: EquationSystem = equations(sys, pattern)
        self._cache: dict = {}

    def values(self, c: Callable) -> list:
        eq = self.eq
        key = tuple(c(x) for x in self.sys.states)
        hit = self._cache.get(key)
        if hit is None:
            base = {}
            for i, (x, b) in enumerate(eq.keys):
                if eq.accepting[i]:
                    v = c(x)
                    if v != 0:
                        base[i] = v
            hit = eq.solve_base(base, "join")[0]
            self._cache[key] = hit
        return hit

    def element(self, x, b) -> ContinuationElement:
        kind = self.sys.kind
        i = self.eq.index.get((x, b))
        if i is None:
            return ContinuationElement(kind, lambda c: kind.zero, Valuation(kind))
        return ContinuationElement(kind, lambda c: self.values(c)[i])

    def kernel_witness(self, partition: Partition, tests: Sequence[Mapping], columns) -> tuple | None:
        """First ``(x, y, b, test)`` on which related states' functionals differ."""
        kind = self.sys.kind
        for t in tests:
            vals = self.values(class_function(partition, t, kind))
            for block in partition.blocks:
                for b in columns:
                    i0 = self.eq.index.get((block[0], b))
                    v0 = vals[i0] if i0 is not None else kind.zero
                    for y in block[1:]:
                        j = self.eq.index.get((y, b))
                        vy = vals[j] if j is not None else kind.zero
                        if vy != v0:
                            return block[0], y, b, t
        return None


def check_semi_strong(sys: WeightedSystem, pattern: PatternAutomaton, partition: Partition,
                      extra_tests: int = 8, seed: int = 0, saturation: ContinuationSaturation | None = None) -> dict:
    """Join-bisimulation verdict vs kernel verdict of the embedded saturated system."""
    if sys.kind is BOOL:
        raise ValueError("the continuation route targets the nat and real semirings")
    sat = saturation if saturation is not None else ContinuationSaturation(sys, pattern)
    cols = pattern.reachable
    b = check_bisimulation(sys, pattern, partition, "join").holds
    indicators = class_tests(partition, sys.kind, 0)
    k_ind = sat.kernel_witness(partition, indicators, cols) is None
    tests = class_tests(partition, sys.kind, extra_tests, seed)
    wit = sat.kernel_witness(partition, tests, cols)
    return {
        "bisimulation": b,
        "kernel_indicators": k_ind,
        "kernel": wit is None,
        "agree": b == k_ind == (wit is None),
        "tests": len(tests),
        "witness": None if wit is None else {"x": str(wit[0]), "y": str(wit[1]), "pattern": str(wit[2]),
                                             "test": {k: sys.kind.format(v) for k, v in wit[3].items()}},
    }


# -- law witnesses --------------------------------------------------------------------


def join_not_algebraic_witness(kind: SemiringKind = REAL) -> tuple:
    """``h-dagger(p join q)`` vs ``h-dagger(p) join h-dagger(q)`` with ``h`` merging two keys."""
    from .valuation import join, kleisli_extend, unit

    p, q = unit("x", kind), unit("y", kind)
    h = {"x": unit("z", kind), "y": unit("z", kind)}
    return kleisli_extend(h, join(p, q)), join(kleisli_extend(h, p), kleisli_extend(h, q))


def quotient_system(sys: WeightedSystem, partition: Partition) -> WeightedSystem:
    """System on block labels; well defined when ``partition`` is a kernel bisimulation."""
    if not is_kernel_bisimulation(sys, partition):
        raise ValueError("partition is not a kernel bisimulation; the quotient is not a coalgebra")
    trans = {c: sys.f(partition.block(c)[0]).map_keys(lambda ya: (partition.label_of(ya[0]), ya[1]))
             for c in partition.labels()}
    return WeightedSystem(sys.kind, tuple(partition.labels()), sys.labels, trans, sys.tau)


def tail_identity(sys, pattern, h: Mapping, u: Mapping, oplus: str) -> bool:
    """``f^B_{u.h}`` equals ``T^B u`` applied to ``f^B_h``."""
    lhs = solve_exact(sys, pattern, lambda x: u[h[x]], oplus)
    rhs = solve_exact(sys, pattern, h, oplus)
    return all(lhs.entries[k] == v.map_keys(u.__getitem__) for k, v in rhs.entries.items())


def morphism_identity(sys, pattern, partition: Partition, u: Mapping, oplus: str) -> bool:
    """For the quotient morphism ``h``: ``g^B_u . h`` equals ``f^B_{u.h}``."""
    g = quotient_system(sys, partition)
    lhs = solve_exact(g, pattern, u, oplus)
    rhs = solve_exact(sys, pattern, lambda x: u[partition.label_of(x)], oplus)
    return all(lhs.entries[(partition.label_of(x), b)] == rhs.entries[(x, b)]
               for x in sys.states for b in pattern.states)
