"""Seeded random systems for property tests, demos and acceptance runs."""

from __future__ import annotations

import random
from fractions import Fraction

from .semiring import BOOL, NAT, REAL
from .system import WeightedSystem


def _labels(n_labels: int, tau: str = "tau") -> list:
    visible = ["a", "b", "c", "d", "e"][: max(0, n_labels - 1)]
    return visible + [tau]


def _states(n: int) -> list:
    return [f"s{i}" for i in range(n)]


def random_lts(rng: random.Random, n_states: int = 4, n_labels: int = 2, density: float = 0.3) -> WeightedSystem:
    states, labels = _states(n_states), _labels(n_labels)
    triples = [(x, a, 1, y) for x in states for a in labels for y in states if rng.random() < density]
    return WeightedSystem.build(BOOL, states, labels, triples, "tau")


def random_nat(rng: random.Random, n_states: int = 4, n_labels: int = 2, density: float = 0.3,
               max_weight: int = 3) -> WeightedSystem:
    states, labels = _states(n_states), _labels(n_labels)
    triples = [(x, a, rng.randint(1, max_weight), y) for x in states for a in labels for y in states
               if rng.random() < density]
    return WeightedSystem.build(NAT, states, labels, triples, "tau")


def random_distribution(rng: random.Random, keys: list, max_support: int = 3, dyadic: bool = False) -> dict:
    support = rng.sample(keys, rng.randint(1, min(max_support, len(keys))))
    if dyadic:
        # split 1 into dyadic pieces by repeated halving of a random piece
        probs = [Fraction(1)]
        while len(probs) < len(support):
            i = rng.randrange(len(probs))
            half = probs[i] / 2
            probs[i] = half
            probs.append(half)
    else:
        raw = [rng.randint(1, 6) for _ in support]
        total = sum(raw)
        probs = [Fraction(r, total) for r in raw]
    return dict(zip(support, probs))


def random_fully_probabilistic(rng: random.Random, n_states: int = 4, n_labels: int = 2,
                               max_support: int = 3) -> WeightedSystem:
    """Every state's outgoing weights over (target, label) sum to exactly 1."""
    states, labels = _states(n_states), _labels(n_labels)
    keys = [(y, a) for y in states for a in labels]
    triples = []
    for x in states:
        for (y, a), p in random_distribution(rng, keys, max_support).items():
            triples.append((x, a, p, y))
    return WeightedSystem.build(REAL, states, labels, triples, "tau")


def random_reactive(rng: random.Random, n_states: int = 4, n_labels: int = 2, p_step: float = 0.6) -> tuple:
    """Return ``(states, labels, steps)`` with ``steps[x][a]`` a distribution over states."""
    states, labels = _states(n_states), _labels(n_labels)
    steps = {}
    for x in states:
        steps[x] = {a: random_distribution(rng, states, 2) for a in labels if rng.random() < p_step}
    return states, labels, steps


def max_cycle_product(sys: WeightedSystem, label: str | None = None) -> Fraction:
    """Largest weight product along a simple cycle (restricted to ``label`` if given)."""
    succ = {x: {} for x in sys.states}
    for x, a, w, y in sys.triples():
        if label is None or a == label:
            succ[x][y] = succ[x].get(y, 0) + w
    best = Fraction(0)

    def dfs(start, x, prod, seen):
        nonlocal best
        for y, w in succ[x].items():
            if y == start:
                best = max(best, prod * w)
            elif y not in seen and sys.index(y) > sys.index(start):
                seen.add(y)
                dfs(start, y, prod * w, seen)
                seen.discard(y)

    for s in sys.states:
        dfs(s, s, Fraction(1), {s})
    return best


def isomorphic_shuffle(rng: random.Random, sys: WeightedSystem) -> tuple:
    """Rename states by a random permutation; returns ``(system, renaming)``."""
    perm = list(sys.states)
    rng.shuffle(perm)
    ren = dict(zip(sys.states, perm))
    triples = [(ren[x], a, w, ren[y]) for x, a, w, y in sys.triples()]
    return WeightedSystem.build(sys.kind, sys.states, sys.labels, triples, sys.tau), ren


def random_segala(rng: random.Random, n_states: int = 3, n_labels: int = 2, max_steps: int = 2,
                  max_support: int = 2):
    """Simple Segala system with dyadic distributions and at most ``max_steps`` steps per state."""
    from .segala import SegalaSystem

    states, labels = _states(n_states), _labels(n_labels)
    steps = {}
    for x in states:
        steps[x] = [(rng.choice(labels), random_distribution(rng, states, max_support, dyadic=True))
                    for _ in range(rng.randint(0, max_steps))]
    return SegalaSystem(tuple(states), tuple(labels), steps, "tau")
