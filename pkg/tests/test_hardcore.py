import itertools

import pytest

from cptk.classify import load_conditional
from cptk.dfa import Dfa
from cptk.families import FamilyFlags, length_family, list_family
from cptk.hardcore import (TraceEntry, hardcore_componentwise, hardcore_run,
                           hardcore_step, initial_state, is_proper_hardcore,
                           trace_from_jsonl, trace_to_jsonl, verify_trace)
from cptk.langs import (EMPTY, FULL, Complement, DfaAtom, FiniteSet,
                        LeftMark, Predicate, member)
from cptk.words import ord_


def simulate(family_member, in_condition, in_target, alphabet_symbols, steps):
    """Independent simulation, written directly against plain callables and
    its own word enumeration; shares no code with the implementation."""
    words = []
    length = 0
    while len(words) < steps:
        for tup in itertools.product(alphabet_symbols, repeat=length):
            words.append("".join(tup))
            if len(words) == steps:
                break
        length += 1
    accepted = []
    cancel = set()
    card = 0
    for n in range(steps):
        w = words[n]
        if in_condition(w):
            for i in range(card + 1):
                if i not in cancel and family_member(i, w):
                    cancel.add(i)
        if in_target(w):
            if all(i in cancel or not family_member(i, w) for i in range(card + 1)):
                accepted.append(w)
                card += 1
    return accepted, cancel


@pytest.fixture(scope="module")
def len_ab(ab):
    return length_family(ab)


def test_length_family_run_matches_hand_simulation(ab, len_ab):
    state, trace = hardcore_run(len_ab, EMPTY, FULL, ab, 64)
    want_accepted, want_cancel = simulate(lambda i, w: len(w) == i,
                                          lambda w: False, lambda w: True,
                                          "ab", 64)
    assert list(state.accepted) == want_accepted
    assert set(state.cancelled) == want_cancel
    # at 64 steps the rank-63 word aaaaaa is examined and accepted
    assert state.accepted == ("a", "aa", "aaa", "aaaa", "aaaaa", "aaaaaa")
    # one step earlier the prefix is exactly the five shortest a-runs
    state63, _ = hardcore_run(len_ab, EMPTY, FULL, ab, 63)
    assert state63.accepted == ("a", "aa", "aaa", "aaaa", "aaaaa")


def test_run_matches_simulation_on_varied_configs(ab, reg_ab):
    sq = Predicate("square-length")
    configs = [
        (reg_ab, LeftMark("a", FULL), LeftMark("b", sq),
         lambda w: w.startswith("a"),
         lambda w: w.startswith("b") and is_square(len(w) - 1)),
        (reg_ab, EMPTY, Complement(FiniteSet(("",))),
         lambda w: False, lambda w: w != ""),
        (length_family(ab), LeftMark("b", FULL), LeftMark("a", FULL),
         lambda w: w.startswith("b"), lambda w: w.startswith("a")),
    ]
    for family, cond, target, cond_fn, target_fn in configs:
        def fam_fn(i, w, family=family):
            return member(family.expr(i), w, ab)
        state, trace = hardcore_run(family, cond, target, ab, 200)
        want_accepted, want_cancel = simulate(fam_fn, cond_fn, target_fn, "ab", 200)
        assert list(state.accepted) == want_accepted
        assert set(state.cancelled) == want_cancel


def is_square(n):
    r = int(n ** 0.5)
    return r * r == n or (r + 1) * (r + 1) == n


def test_step_examples(ab, len_ab):
    # a condition word cancels the guarded indices containing it, for good
    state = initial_state()
    cond = FULL  # every word is a condition word
    target = EMPTY
    state, entry = hardcore_step(state, len_ab, cond, target, ab)
    assert entry.action == "cancelled" and entry.cancelled == (0,)
    assert 0 in state.cancelled
    state2, entry2 = hardcore_step(state, len_ab, cond, target, ab)
    assert 0 in state2.cancelled  # cancellation is permanent
    # a word neither in the condition nor the target only advances n
    state = initial_state()
    state, entry = hardcore_step(state, len_ab, EMPTY, EMPTY, ab)
    assert entry.action == "skipped" and entry.reason == "not-in-target"
    assert state.accepted == () and state.cancelled == frozenset()


def test_blocked_entry_records_blocker(ab, len_ab):
    _, trace = hardcore_run(len_ab, EMPTY, FULL, ab, 8)
    blocked = [e for e in trace if e.reason == "blocked"]
    assert blocked
    for e in blocked:
        assert member(len_ab.expr(e.blocking), e.word, ab)


def test_steps_validation(ab, len_ab):
    with pytest.raises(ValueError):
        hardcore_run(len_ab, EMPTY, FULL, ab, 0)


def test_cancellation_of_touching_indices(ab, reg_ab):
    # condition: a-started words; eventually every small index whose
    # language contains one gets cancelled, including the full language
    cond = LeftMark("a", FULL)
    target = LeftMark("b", Predicate("equal-counts-ab"))
    state, trace = hardcore_run(reg_ab, cond, target, ab, 1000)
    rep = verify_trace(trace, reg_ab, cond, target, ab)
    assert rep["ok"]
    assert 1 in state.cancelled  # index 1 is the all-words language


def test_determinism_bit_identical(ab, reg_ab):
    cond = LeftMark("a", FULL)
    target = LeftMark("b", FULL)
    runs = [hardcore_run(reg_ab, cond, target, ab, 300) for _ in range(3)]
    texts = {trace_to_jsonl(tr) for _, tr in runs}
    assert len(texts) == 1
    states = {st for st, _ in runs}
    assert len(states) == 1


def test_monotonicity_and_card(ab, len_ab):
    state = initial_state()
    prev_accepted, prev_cancel = (), frozenset()
    for _ in range(150):
        state, entry = hardcore_step(state, len_ab, EMPTY, FULL, ab)
        assert set(prev_accepted) <= set(state.accepted)
        assert prev_cancel <= state.cancelled
        assert entry.card == len(state.accepted)
        prev_accepted, prev_cancel = state.accepted, state.cancelled
    ranks = [ord_(ab, w) for w in state.accepted]
    assert ranks == sorted(ranks)


def test_trace_jsonl_roundtrip(ab, len_ab):
    _, trace = hardcore_run(len_ab, EMPTY, FULL, ab, 40)
    text = trace_to_jsonl(trace)
    assert trace_from_jsonl(text) == trace
    with pytest.raises(ValueError):
        trace_from_jsonl('{"n": 0}\n')


# ---------------------------------------------------------------------------
# verification and tampering


def test_verify_clean_trace(ab, len_ab):
    _, trace = hardcore_run(len_ab, EMPTY, FULL, ab, 64)
    rep = verify_trace(trace, len_ab, EMPTY, FULL, ab)
    assert rep["ok"] and rep["final_card"] == 6
    # each guarded index meets the prefix in exactly the words accepted
    # before it became guarded: the single length-i run
    for i in range(1, 6):
        hits = [w for w in ("a", "aa", "aaa", "aaaa", "aaaaa", "aaaaaa")
                if member(len_ab.expr(i), w, ab)]
        assert hits == ["a" * i]


def test_tampering_inserted_acceptance(ab, len_ab):
    _, trace = hardcore_run(len_ab, EMPTY, FULL, ab, 64)
    idx = next(i for i, e in enumerate(trace) if e.reason == "blocked")
    tampered = list(trace)
    bumped = tampered[idx]
    tampered[idx] = TraceEntry(bumped.n, bumped.word, "accepted", bumped.cancelled,
                               bumped.card + 1, None, None)
    for i in range(idx + 1, len(tampered)):
        e = tampered[i]
        tampered[i] = TraceEntry(e.n, e.word, e.action, e.cancelled, e.card + 1,
                                 e.reason, e.blocking)
    rep = verify_trace(tampered, len_ab, EMPTY, FULL, ab)
    assert not rep["ok"]
    assert any(v["code"] == "accept-blocked" for v in rep["violations"])


def test_tampering_missing_cancellation_witness(ab, len_ab):
    _, trace = hardcore_run(len_ab, EMPTY, FULL, ab, 30)
    idx = next(i for i, e in enumerate(trace) if e.action == "skipped")
    tampered = list(trace)
    e = tampered[idx]
    tampered[idx] = TraceEntry(e.n, e.word, "cancelled", (0,), e.card, None, None)
    rep = verify_trace(tampered, len_ab, EMPTY, FULL, ab)
    assert not rep["ok"]
    assert any(v["code"] == "cancel-no-condition-witness" for v in rep["violations"])


def test_tampering_reordered_prefix(ab, len_ab):
    _, trace = hardcore_run(len_ab, EMPTY, FULL, ab, 64)
    accepted_idx = [i for i, e in enumerate(trace) if e.action == "accepted"]
    i1, i2 = accepted_idx[1], accepted_idx[2]
    tampered = list(trace)
    e1, e2 = tampered[i1], tampered[i2]
    tampered[i1] = TraceEntry(e1.n, e2.word, e1.action, e1.cancelled, e1.card,
                              e1.reason, e1.blocking)
    tampered[i2] = TraceEntry(e2.n, e1.word, e2.action, e2.cancelled, e2.card,
                              e2.reason, e2.blocking)
    rep = verify_trace(tampered, len_ab, EMPTY, FULL, ab)
    assert not rep["ok"]
    assert any(v["code"] == "word-rank" for v in rep["violations"])


# ---------------------------------------------------------------------------
# hard-core reports


def test_single_a_runs_pass_against_length_family(ab, len_ab):
    runs = DfaAtom(Dfa(2, ((1, 2), (1, 2), (2, 2)), 0, frozenset({1})))  # a a*
    report = is_proper_hardcore(runs, FULL, len_ab, index_bound=40, horizon=300)
    assert report["holds_up_to_bounds"]
    assert not report["violations"]


def test_marker_language_fails_against_family_containing_it(ab):
    a_marked = LeftMark("a", FULL)
    fam = list_family("with-marker", ab, [a_marked, EMPTY],
                      FamilyFlags(nontrivial=True))
    report = is_proper_hardcore(a_marked, FULL, fam, index_bound=4, horizon=300)
    assert not report["holds_up_to_bounds"]
    assert any(v["index"] in (0, 2) for v in report["violations"])


def test_componentwise_runs(ab, reg_ab):
    sq = Predicate("square-length")
    cond = load_conditional(FiniteSet(("",)),
                            [LeftMark("a", sq), LeftMark("b", Complement(sq))], ab)
    results = hardcore_componentwise(cond, reg_ab, steps=200)
    assert len(results) == 2
    words_sets = []
    for entry in results:
        rep = verify_trace(entry["trace"], reg_ab, cond.condition,
                           cond.problem.components[entry["component"]], ab)
        assert rep["ok"]
        words_sets.append(set(entry["state"].accepted))
    assert not (words_sets[0] & words_sets[1])  # disjoint markers, disjoint prefixes
    for entry, marker in zip(results, "ab"):
        assert all(w.startswith(marker) for w in entry["state"].accepted)
