"""Weighted transition systems, partitions, file formats and process terms.

A system is a finite coalgebra ``X -> T_R(X x A)``: every state carries a
sparse valuation over ``(successor, label)`` pairs.

The ``.wts`` text format has one directive per line; ``#`` starts a comment::

    semiring real        # bool | nat | real
    tau tau              # optional; names the silent label
    labels a b tau
    states x y
    trans x a 1/2 y
    trans x tau 1/2 x
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .semiring import BOOL, NAT, REAL, SemiringError, SemiringKind, kind_from_name
from .valuation import Valuation


class InputError(ValueError):
    """Invalid user input (files, partitions, process terms)."""


class ParseError(InputError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True, eq=False)
class WeightedSystem:
    kind: SemiringKind
    states: tuple
    labels: tuple
    transitions: Mapping  # state -> Valuation over (state, label)
    tau: str | None = None
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise InputError("duplicate state names")
        if len(set(self.labels)) != len(self.labels):
            raise InputError("duplicate labels")
        if self.tau is not None and self.tau not in self.labels:
            raise InputError(f"silent label {self.tau!r} is not declared")
        sset, lset = set(self.states), set(self.labels)
        trans = {}
        for x in self.states:
            v = self.transitions.get(x)
            if v is None:
                v = Valuation(self.kind)
            if v.kind is not self.kind:
                raise InputError(f"transitions of {x!r} use the wrong semiring")
            for (y, a), w in v.items():
                if y not in sset:
                    raise InputError(f"undeclared state {y!r}")
                if a not in lset:
                    raise InputError(f"undeclared label {a!r}")
            trans[x] = v
        extra = set(self.transitions) - sset
        if extra:
            raise InputError(f"transitions for undeclared states {sorted(map(str, extra))}")
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(self.states)})

    @classmethod
    def build(cls, kind, states, labels, triples: Iterable, tau=None) -> "WeightedSystem":
        """Construct from ``(source, label, weight, target)`` triples; weights accumulate."""
        acc: dict = {x: {} for x in states}
        for x, a, w, y in triples:
            w = kind.coerce(w)
            if w == 0:
                continue
            if x not in acc:
                raise InputError(f"undeclared state {x!r}")
            row = acc[x]
            row[(y, a)] = kind.add(row[(y, a)], w) if (y, a) in row else w
        return cls(kind, tuple(states), tuple(labels), {x: Valuation(kind, r) for x, r in acc.items()}, tau)

    def f(self, x) -> Valuation:
        return self.transitions[x]

    def index(self, x) -> int:
        return self._index[x]

    def triples(self):
        for x in self.states:
            for (y, a), w in sorted(self.transitions[x].items(), key=lambda kv: (self._index[kv[0][0]], str(kv[0][1]))):
                yield x, a, w, y

    def out_total(self, x, label=None):
        k = self.kind
        return k.sum(w for (y, a), w in self.transitions[x].items() if label is None or a == label)

    def with_transitions(self, transitions) -> "WeightedSystem":
        return WeightedSystem(self.kind, self.states, self.labels, transitions, self.tau)

    def __eq__(self, other):
        if not isinstance(other, WeightedSystem):
            return NotImplemented
        return (self.kind is other.kind and self.states == other.states and set(self.labels) == set(other.labels)
                and self.tau == other.tau and self.transitions == other.transitions)

    def __hash__(self):
        return id(self)


# -- partitions --------------------------------------------------------------


class Partition:
    """Disjoint blocks covering a state set, in canonical order.

    Blocks are ordered by their least member (w.r.t. the given state order),
    and block ``i`` is labelled ``"B{i}"``.
    """

    __slots__ = ("blocks", "_of", "_states")

    def __init__(self, blocks: Iterable[Iterable], states: Sequence | None = None):
        blocks = [list(b) for b in blocks]
        seen: dict = {}
        for i, b in enumerate(blocks):
            if not b:
                raise InputError("empty block")
            for x in b:
                if x in seen:
                    raise InputError(f"state {x!r} occurs in more than one block")
                seen[x] = i
        if states is None:
            states = [x for b in blocks for x in b]
        order = {x: i for i, x in enumerate(states)}
        for x in seen:
            if x not in order:
                raise InputError(f"unknown state {x!r} in partition")
        missing = [x for x in states if x not in seen]
        if missing:
            raise InputError(f"partition does not cover state(s) {missing}")
        blocks = [tuple(sorted(b, key=order.__getitem__)) for b in blocks]
        blocks.sort(key=lambda b: order[b[0]])
        self.blocks = tuple(blocks)
        self._states = tuple(states)
        self._of = {x: i for i, b in enumerate(self.blocks) for x in b}

    @classmethod
    def discrete(cls, states) -> "Partition":
        return cls([[x] for x in states], states)

    @classmethod
    def single(cls, states) -> "Partition":
        return cls([list(states)], states)

    @classmethod
    def from_labels(cls, states, label_of) -> "Partition":
        groups: dict = {}
        for x in states:
            groups.setdefault(label_of(x), []).append(x)
        return cls(groups.values(), states)

    @property
    def states(self) -> tuple:
        return self._states

    def block_index(self, x) -> int:
        return self._of[x]

    def label_of(self, x) -> str:
        return f"B{self._of[x]}"

    def labels(self) -> list:
        return [f"B{i}" for i in range(len(self.blocks))]

    def block(self, label: str) -> tuple:
        return self.blocks[int(label[1:])]

    def related(self, x, y) -> bool:
        return self._of[x] == self._of[y]

    def refines(self, other: "Partition") -> bool:
        return all(other.related(b[0], x) for b in self.blocks for x in b)

    def __len__(self):
        return len(self.blocks)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return set(map(frozenset, self.blocks)) == set(map(frozenset, other.blocks))

    def __hash__(self):
        return hash(frozenset(map(frozenset, self.blocks)))

    def __repr__(self):
        return "Partition(" + " | ".join(" ".join(map(str, b)) for b in self.blocks) + ")"

    def to_json(self) -> dict:
        return {"blocks": [list(map(str, b)) for b in self.blocks]}


def parse_partition(document, sys: WeightedSystem | Sequence) -> Partition:
    doc = json.loads(document) if isinstance(document, (str, bytes)) else document
    states = sys.states if isinstance(sys, WeightedSystem) or hasattr(sys, "states") else tuple(sys)
    try:
        blocks = doc["blocks"]
    except (KeyError, TypeError):
        raise InputError("partition document needs a 'blocks' list") from None
    return Partition(blocks, states)


def partitions_of(items: Sequence):
    """Enumerate all set partitions of ``items`` (restricted growth strings)."""
    items = list(items)
    n = len(items)
    if n == 0:
        yield []
        return

    def rec(i, blocks):
        if i == n:
            yield [list(b) for b in blocks]
            return
        x = items[i]
        for b in blocks:
            b.append(x)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([x])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


def all_partitions(states: Sequence):
    for blocks in partitions_of(states):
        yield Partition(blocks, states)


# -- .wts parsing and rendering ------------------------------------------------

_SSTEP = re.compile(r"^sstep\s+(\S+)\s+(\S+)\s*\{(.*)\}\s*$")


def _tokens(text):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield n, raw, line


def _col(raw, token):
    i = raw.find(token)
    return i + 1 if i >= 0 else 1


def parse_system(text: str) -> WeightedSystem:
    kind = None
    tau = None
    labels = states = None
    raw_trans = []
    seen_triples = set()
    for n, raw, line in _tokens(text):
        parts = line.split()
        head = parts[0]
        if head == "semiring":
            if len(parts) != 2:
                raise ParseError("expected 'semiring bool|nat|real'", n)
            try:
                kind = kind_from_name(parts[1])
            except SemiringError as exc:
                raise ParseError(str(exc), n, _col(raw, parts[1])) from None
        elif head == "tau":
            if len(parts) != 2:
                raise ParseError("expected 'tau <label>'", n)
            tau = parts[1]
        elif head == "labels":
            labels = parts[1:]
        elif head == "states":
            states = parts[1:]
        elif head == "trans":
            if len(parts) != 5:
                raise ParseError("expected 'trans <src> <label> <weight> <dst>'", n)
            _, x, a, w, y = parts
            if (x, a, y) in seen_triples:
                raise ParseError(f"duplicate transition {x} -{a}-> {y}", n)
            seen_triples.add((x, a, y))
            raw_trans.append((n, raw, x, a, w, y))
        elif head == "sstep":
            raise ParseError("'sstep' lines belong to Segala systems; use parse_segala", n)
        else:
            raise ParseError(f"unknown directive {head!r}", n)
    if kind is None:
        raise ParseError("missing 'semiring' directive", 1)
    if states is None:
        states = []
        for _, _, x, _, _, y in raw_trans:
            for s in (x, y):
                if s not in states:
                    states.append(s)
    if labels is None:
        labels = []
        for _, _, _, a, _, _ in raw_trans:
            if a not in labels:
                labels.append(a)
        if tau is not None and tau not in labels:
            labels.append(tau)
    sset, lset = set(states), set(labels)
    triples = []
    for n, raw, x, a, w, y in raw_trans:
        for s in (x, y):
            if s not in sset:
                raise ParseError(f"undeclared state {s!r}", n, _col(raw, s))
        if a not in lset:
            raise ParseError(f"undeclared label {a!r}", n, _col(raw, a))
        try:
            weight = kind.parse(w)
        except SemiringError as exc:
            raise ParseError(str(exc), n, _col(raw, w)) from None
        if weight == 0:
            raise ParseError("transition weight must be nonzero", n, _col(raw, w))
        triples.append((x, a, weight, y))
    if tau is not None and tau not in lset:
        raise ParseError(f"silent label {tau!r} is not among the labels", 1)
    return WeightedSystem.build(kind, states, labels, triples, tau)


def render_system(sys: WeightedSystem) -> str:
    lines = [f"semiring {sys.kind.short}"]
    if sys.tau is not None:
        lines.append(f"tau {sys.tau}")
    lines.append("labels " + " ".join(map(str, sys.labels)))
    lines.append("states " + " ".join(map(str, sys.states)))
    for x, a, w, y in sys.triples():
        lines.append(f"trans {x} {a} {sys.kind.format(w)} {y}")
    return "\n".join(lines) + "\n"


# -- sub-class validators -------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    violations: list  # (state, detail)

    def __bool__(self):
        return self.ok


def _require_real(sys):
    if sys.kind is not REAL:
        raise InputError("probabilistic validators need the real semiring")


def validate_fully_probabilistic(sys: WeightedSystem) -> ValidationReport:
    _require_real(sys)
    bad = [(x, sys.out_total(x)) for x in sys.states if sys.out_total(x) != 1]
    return ValidationReport(not bad, bad)


def validate_generative(sys: WeightedSystem) -> ValidationReport:
    _require_real(sys)
    bad = [(x, sys.out_total(x)) for x in sys.states if sys.out_total(x) not in (0, 1)]
    return ValidationReport(not bad, bad)


def validate_reactive(sys: WeightedSystem) -> ValidationReport:
    _require_real(sys)
    bad = []
    for x in sys.states:
        for a in sys.labels:
            t = sys.out_total(x, a)
            if t not in (0, 1):
                bad.append((x, (a, t)))
    return ValidationReport(not bad, bad)


# -- weighted process terms ------------------------------------------------------
#
# P ::= 0 | l.P | P + P | name | (P)      definitions:  name = P


@dataclass(frozen=True)
class _Nil:
    def render(self, top=True):
        return "0"


@dataclass(frozen=True)
class _Prefix:
    label: str
    body: object

    def render(self, top=True):
        inner = self.body.render(top=False)
        if isinstance(self.body, _Sum):
            inner = f"({inner})"
        return f"{self.label}.{inner}"


@dataclass(frozen=True)
class _Sum:
    left: object
    right: object

    def render(self, top=True):
        return f"{self.left.render()} + {self.right.render()}"


_TOKEN = re.compile(r"\s*(?:(?P<num>0)(?![\w'])|(?P<id>[A-Za-z_][\w']*)|(?P<op>[.+()=]))")


def _lex(text, line):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r}", line, pos + 1)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return out


class _TermParser:
    def __init__(self, toks, line):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.toks) + 1)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            want = value or "a term"
            raise ParseError(f"expected {want!r}", self.line, tok[2])
        self.i += 1
        return tok

    def parse_sum(self):
        t = self.parse_prefix()
        while self.peek()[1] == "+":
            self.take("+")
            t = ("sum", t, self.parse_prefix())
        return t

    def parse_prefix(self):
        kind, val, col = self.peek()
        if kind == "num":
            self.take()
            return ("nil",)
        if val == "(":
            self.take("(")
            t = self.parse_sum()
            self.take(")")
            return t
        if kind == "id":
            self.take()
            if self.peek()[1] == ".":
                self.take(".")
                return ("prefix", val, self.parse_prefix())
            return ("name", val, col)
        raise ParseError("expected a term", self.line, col)


def _elaborate_terms(text):
    defs: dict = {}
    order = []
    bare = []
    for n, raw, line in _tokens(text):
        toks = _lex(line, n)
        if len(toks) >= 2 and toks[0][0] == "id" and toks[1][1] == "=":
            name = toks[0][1]
            if name in defs:
                raise ParseError(f"duplicate definition of {name!r}", n)
            p = _TermParser(toks[2:], n)
            defs[name] = (p.parse_sum(), n)
            order.append(name)
        else:
            p = _TermParser(toks, n)
            bare.append((p.parse_sum(), n))
        if p.i != len(p.toks):
            raise ParseError("trailing input", n, p.peek()[2])

    resolved: dict = {}

    def resolve(ast, line, stack):
        tag = ast[0]
        if tag == "nil":
            return _Nil()
        if tag == "prefix":
            return _Prefix(ast[1], resolve(ast[2], line, stack))
        if tag == "sum":
            return _Sum(resolve(ast[1], line, stack), resolve(ast[2], line, stack))
        name = ast[1]
        if name not in defs:
            raise ParseError(f"undefined name {name!r}", line, ast[2])
        if name in stack:
            raise ParseError(f"recursive definition through {name!r}", line, ast[2])
        if name not in resolved:
            body, dline = defs[name]
            resolved[name] = resolve(body, dline, stack | {name})
        return resolved[name]

    roots = [(name, resolve(("name", name, 1), defs[name][1], frozenset())) for name in order]
    roots += [(None, resolve(ast, n, frozenset())) for ast, n in bare]
    return roots


def _derivations(term):
    """Multiset of (label, successor) derivations of ``term``."""
    if isinstance(term, _Nil):
        return {}
    if isinstance(term, _Prefix):
        return {(term.label, term.body): 1}
    left, right = _derivations(term.left), _derivations(term.right)
    out = dict(left)
    for k, v in right.items():
        out[k] = out.get(k, 0) + v
    return out


@dataclass
class ProcessSystem:
    system: WeightedSystem
    roots: dict  # definition name (or term text) -> state name


def elaborate_process_term(text: str, tau: str = "tau", kind: SemiringKind = NAT) -> ProcessSystem:
    """Turn non-recursive weighted process terms into a system over N u {inf}.

    States are the distinct subterms reachable from every definition (and
    from any bare term line); weights count syntactic derivations, so
    ``a.0 + a.0`` has a single ``a``-transition of weight 2 to ``0``.  With
    ``kind=BOOL`` only the existence of a derivation is kept (a plain LTS).
    """
    if kind not in (NAT, BOOL):
        raise InputError("process terms elaborate over the nat or boolean semiring")
    roots = _elaborate_terms(text)
    if not roots:
        raise InputError("no process terms given")
    names: dict = {}
    order = []
    queue = [t for _, t in roots]
    while queue:
        t = queue.pop(0)
        if t in names:
            continue
        names[t] = t.render()
        order.append(t)
        for (_, succ) in _derivations(t):
            queue.append(succ)
    labels = []
    triples = []
    for t in order:
        for (a, succ), w in _derivations(t).items():
            if a not in labels:
                labels.append(a)
            triples.append((names[t], a, w if kind is NAT else 1, names[succ]))
    if tau not in labels:
        labels.append(tau)
    sys = WeightedSystem.build(kind, [names[t] for t in order], labels, triples, tau)
    root_map = {(name if name is not None else names[t]): names[t] for name, t in roots}
    return ProcessSystem(sys, root_map)


def relabel_states(sys: WeightedSystem, prefix="s") -> WeightedSystem:
    """Rename states to ``s0, s1, ...`` (handy for terms with spaces)."""
    ren = {x: f"{prefix}{i}" for i, x in enumerate(sys.states)}
    trans = {ren[x]: v.map_keys(lambda k: (ren[k[0]], k[1])) for x, v in sys.transitions.items()}
    return WeightedSystem(sys.kind, tuple(ren[x] for x in sys.states), sys.labels, trans, sys.tau)


def disjoint_union(*systems: WeightedSystem) -> WeightedSystem:
    kind = systems[0].kind
    states, labels, trans = [], [], {}
    tau = None
    for s in systems:
        if s.kind is not kind:
            raise InputError("cannot join systems over different semirings")
        for x in s.states:
            if x in trans:
                raise InputError(f"state {x!r} occurs in two systems")
            states.append(x)
            trans[x] = s.transitions[x]
        for a in s.labels:
            if a not in labels:
                labels.append(a)
        tau = tau or s.tau
    return WeightedSystem(kind, tuple(states), tuple(labels), trans, tau)


__all__ = [
    "BOOL", "NAT", "REAL", "InputError", "ParseError", "WeightedSystem", "Partition", "parse_partition",
    "partitions_of", "all_partitions", "parse_system", "render_system", "validate_fully_probabilistic",
    "validate_generative", "validate_reactive", "elaborate_process_term", "ProcessSystem",
    "relabel_states", "disjoint_union",
]
