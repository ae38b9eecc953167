"""Observation patterns: deterministic automata over trace sets.

A pattern state names a set of traces.  ``accepts(b)`` says whether the empty
trace belongs to it and ``derivative(b, a)`` is the set of suffixes ``w`` with
``a w`` in ``b``.  The built-in strong, weak and delay patterns are closed under
derivatives by construction; custom patterns are loaded from JSON and checked
for totality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence


class PatternError(ValueError):
    pass


EMPTY = "empty"
EPS = "eps"


@dataclass(frozen=True)
class PatternAutomaton:
    labels: tuple
    states: tuple
    accepting: frozenset
    delta: Mapping  # state -> label -> state
    observables: tuple
    tau: str | None = None
    name: str = "custom"
    _reach: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        for b in self.states:
            row = self.delta.get(b)
            if row is None:
                raise PatternError(f"no derivative row for pattern state {b!r}")
            for a in self.labels:
                if a not in row:
                    raise PatternError(f"missing derivative entry ({b!r}, {a!r})")
                if row[a] not in self.states:
                    raise PatternError(f"derivative ({b!r}, {a!r}) -> {row[a]!r} leaves the pattern (not closed)")
            extra = set(row) - set(self.labels)
            if extra:
                raise PatternError(f"unknown label(s) {sorted(extra)} in row {b!r}")
        for b in self.observables:
            if b not in self.states:
                raise PatternError(f"observable {b!r} is not a pattern state")
        object.__setattr__(self, "_reach", self._closure())

    def accepts(self, b) -> bool:
        return b in self.accepting

    def derivative(self, b, a):
        try:
            return self.delta[b][a]
        except KeyError:
            raise PatternError(f"unknown pattern state or label: ({b!r}, {a!r})") from None

    def member_word(self, b, word: Sequence) -> bool:
        for a in word:
            if a not in self.labels:
                raise PatternError(f"unknown label {a!r}")
            b = self.delta[b][a]
        return b in self.accepting

    def _closure(self) -> tuple:
        seen = list(self.observables)
        i = 0
        while i < len(seen):
            for a in self.labels:
                c = self.delta[seen[i]][a]
                if c not in seen:
                    seen.append(c)
            i += 1
        order = {b: n for n, b in enumerate(self.states)}
        return tuple(sorted(seen, key=order.__getitem__))

    @property
    def reachable(self) -> tuple:
        """Pattern states reachable from the observables by derivatives."""
        return self._reach

    def compared(self, observables_only: bool = False) -> tuple:
        return self.observables if observables_only else self._reach

    def dead_states(self) -> frozenset:
        """States denoting the empty trace set (no accepting state reachable)."""
        live = set(self.accepting)
        changed = True
        while changed:
            changed = False
            for b in self.states:
                if b not in live and any(self.delta[b][a] in live for a in self.labels):
                    live.add(b)
                    changed = True
        return frozenset(self.states) - live

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "states": list(self.states),
            "accepts": {b: b in self.accepting for b in self.states},
            "delta": {b: dict(self.delta[b]) for b in self.states},
            "observables": list(self.observables),
        }


def _check_alphabet(alphabet, tau=None):
    labels = tuple(alphabet)
    if not labels:
        raise PatternError("alphabet must be nonempty")
    if len(set(labels)) != len(labels):
        raise PatternError("duplicate labels in alphabet")
    if tau is not None and tau not in labels:
        raise PatternError(f"silent label {tau!r} is not in the alphabet")
    return labels


def build_strong(alphabet) -> PatternAutomaton:
    labels = _check_alphabet(alphabet)
    singles = tuple(f"s_{a}" for a in labels)
    states = singles + (EPS, EMPTY)
    delta = {}
    for a, s in zip(labels, singles):
        delta[s] = {c: (EPS if c == a else EMPTY) for c in labels}
    delta[EPS] = {c: EMPTY for c in labels}
    delta[EMPTY] = {c: EMPTY for c in labels}
    return PatternAutomaton(labels, states, frozenset([EPS]), delta, singles, name="strong")


def build_weak(alphabet, tau="tau") -> PatternAutomaton:
    labels = _check_alphabet(alphabet, tau)
    visible = [a for a in labels if a != tau]
    w_tau = f"w_{tau}"
    states = (w_tau,) + tuple(f"w_{a}" for a in visible) + (EMPTY,)
    delta = {w_tau: {c: (w_tau if c == tau else EMPTY) for c in labels}}
    for a in visible:
        delta[f"w_{a}"] = {c: (f"w_{a}" if c == tau else w_tau if c == a else EMPTY) for c in labels}
    delta[EMPTY] = {c: EMPTY for c in labels}
    return PatternAutomaton(labels, states, frozenset([w_tau]), delta, states[:-1], tau=tau, name="weak")


def build_delay(alphabet, tau="tau") -> PatternAutomaton:
    labels = _check_alphabet(alphabet, tau)
    visible = [a for a in labels if a != tau]
    d_tau = f"d_{tau}"
    obs = (d_tau,) + tuple(f"d_{a}" for a in visible)
    states = obs + (EPS, EMPTY)
    delta = {d_tau: {c: (d_tau if c == tau else EMPTY) for c in labels}}
    for a in visible:
        delta[f"d_{a}"] = {c: (f"d_{a}" if c == tau else EPS if c == a else EMPTY) for c in labels}
    delta[EPS] = {c: EMPTY for c in labels}
    delta[EMPTY] = {c: EMPTY for c in labels}
    return PatternAutomaton(labels, states, frozenset([d_tau, EPS]), delta, obs, tau=tau, name="delay")


def builtin(name: str, alphabet, tau=None) -> PatternAutomaton:
    if name == "strong":
        return build_strong(alphabet)
    if tau is None:
        raise PatternError(f"the {name} pattern needs a silent label")
    if name == "weak":
        return build_weak(alphabet, tau)
    if name == "delay":
        return build_delay(alphabet, tau)
    raise PatternError(f"unknown built-in pattern {name!r}")


def load_pattern(document, tau=None) -> PatternAutomaton:
    """Build a pattern from its JSON document (a string or parsed dict)."""
    doc = json.loads(document) if isinstance(document, (str, bytes)) else document
    try:
        labels = tuple(doc["labels"])
        states = tuple(doc["states"])
        accepts = doc.get("accepts", {})
        delta = doc["delta"]
    except (KeyError, TypeError) as exc:
        raise PatternError(f"malformed pattern document: {exc}") from None
    for b in accepts:
        if b not in states:
            raise PatternError(f"accepts names unknown state {b!r}")
    for b in delta:
        if b not in states:
            raise PatternError(f"delta names unknown state {b!r}")
    observables = tuple(doc.get("observables", states))
    accepting = frozenset(b for b in states if accepts.get(b, False))
    table = {b: dict(delta.get(b, {})) for b in states}
    tau = doc.get("tau", tau)
    return PatternAutomaton(labels, states, accepting, table, observables, tau=tau, name=doc.get("name", "custom"))
