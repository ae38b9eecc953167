import json
import re

import pytest
from hypothesis import given, strategies as st

from coweak.pattern import EMPTY, EPS, PatternError, build_delay, build_strong, build_weak, builtin, load_pattern

ALPHA = ("a", "b", "tau")
words = st.lists(st.sampled_from(ALPHA), max_size=6)


def _regex(w):
    return "".join("t" if c == "tau" else c for c in w)


LANGS = {
    "strong": {"s_a": r"a", "s_b": r"b", "s_tau": r"t", EPS: r"", EMPTY: r"(?!)"},
    "weak": {"w_tau": r"t*", "w_a": r"t*at*", "w_b": r"t*bt*", EMPTY: r"(?!)"},
    "delay": {"d_tau": r"t*", "d_a": r"t*a", "d_b": r"t*b", EPS: r"", EMPTY: r"(?!)"},
}


@pytest.mark.parametrize("name", ["strong", "weak", "delay"])
@given(w=words)
def test_membership_matches_regular_expressions(name, w):
    pat = builtin(name, ALPHA, "tau")
    for b, rx in LANGS[name].items():
        assert pat.member_word(b, w) == bool(re.fullmatch(rx, _regex(w)))


@pytest.mark.parametrize("name", ["strong", "weak", "delay"])
@given(w=words, a=st.sampled_from(ALPHA))
def test_derivative_is_quotient(name, w, a):
    pat = builtin(name, ALPHA, "tau")
    for b in pat.states:
        assert pat.member_word(pat.derivative(b, a), w) == pat.member_word(b, [a] + w)


def test_shapes():
    s = build_strong(["a", "tau"])
    assert s.observables == ("s_a", "s_tau") and s.accepts(EPS)
    w = build_weak(["a", "tau"])
    assert w.states == ("w_tau", "w_a", EMPTY) and w.accepts("w_tau") and not w.accepts("w_a")
    d = build_delay(["a", "tau"])
    assert d.derivative("d_a", "a") == EPS and d.derivative("d_a", "tau") == "d_a"
    assert w.dead_states() == frozenset({EMPTY})
    assert set(s.reachable) == set(s.states)


def test_builtin_errors():
    with pytest.raises(PatternError):
        builtin("weak", ["a"], None)
    with pytest.raises(PatternError):
        build_weak(["a"], "tau")
    with pytest.raises(PatternError):
        builtin("fancy", ["a"], "a")


def test_custom_pattern_roundtrip():
    doc = build_weak(["a", "tau"]).to_json()
    pat = load_pattern(json.dumps(doc))
    assert pat.states == build_weak(["a", "tau"]).states
    assert pat.member_word("w_a", ["tau", "a"])


def test_custom_pattern_validation():
    base = {"labels": ["a"], "states": ["p", "q"], "accepts": {"q": True}, "delta": {"p": {"a": "q"}, "q": {"a": "q"}}}
    assert load_pattern(base).member_word("p", ["a", "a"])
    bad = json.loads(json.dumps(base))
    del bad["delta"]["q"]["a"]
    with pytest.raises(PatternError, match="missing"):
        load_pattern(bad)
    bad = json.loads(json.dumps(base))
    bad["delta"]["q"]["a"] = "r"
    with pytest.raises(PatternError, match="not closed"):
        load_pattern(bad)
    bad = json.loads(json.dumps(base))
    bad["delta"]["q"]["z"] = "q"
    with pytest.raises(PatternError, match="unknown label"):
        load_pattern(bad)
    with pytest.raises(PatternError):
        load_pattern({"states": []})


@pytest.mark.parametrize("name", ["strong", "weak", "delay"])
def test_membership_exhaustive_short_words(name):
    from itertools import product
    pat = builtin(name, ALPHA, "tau")
    for n in range(5):
        for w in product(ALPHA, repeat=n):
            for b, rx in LANGS[name].items():
                assert pat.member_word(b, list(w)) == bool(re.fullmatch(rx, _regex(w)))
