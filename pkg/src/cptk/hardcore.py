"""Streaming diagonalization against a family enumeration.

The loop walks words in length-lexicographic order.  A word inside the
condition cancels every guarded index whose language contains it; a word
inside the target is accepted only if no uncancelled guarded index claims
it.  Guarded means index at most the current accepted count, inclusive.
The construction is inherently sequential, so the driver is a pure step
function iterated a bounded number of steps, emitting one trace entry per
word; traces are bit-reproducible and replay-verifiable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .classify import ConditionalProblem, INFINITE_EVIDENCE_THRESHOLD
from .families import FamilyEnum
from .langs import Inter, LangExpr, is_finite, member, subset_of
from .words import Alphabet, lex, ord_


@dataclass(frozen=True)
class DiagonalizationState:
    """Loop state: step counter, accepted prefix, cancelled indices."""

    n: int
    accepted: tuple[str, ...]
    cancelled: frozenset[int]

    @property
    def card(self) -> int:
        return len(self.accepted)


def initial_state() -> DiagonalizationState:
    return DiagonalizationState(0, (), frozenset())


ACCEPTED = "accepted"
CANCELLED = "cancelled"
SKIPPED = "skipped"

REASON_BLOCKED = "blocked"
REASON_NOT_IN_TARGET = "not-in-target"
REASON_IN_CONDITION = "in-condition"


@dataclass(frozen=True)
class TraceEntry:
    n: int
    word: str
    action: str
    cancelled: tuple[int, ...]
    card: int
    reason: str | None = None
    blocking: int | None = None

    def to_json(self) -> dict:
        out = {"n": self.n, "word": self.word, "action": self.action,
               "cancelled": list(self.cancelled), "card": self.card}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.blocking is not None:
            out["blocking"] = self.blocking
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TraceEntry":
        return cls(int(data["n"]), data["word"], data["action"],
                   tuple(int(i) for i in data["cancelled"]), int(data["card"]),
                   data.get("reason"), data.get("blocking"))


def _indexed_member(family: FamilyEnum, i: int, w: str) -> bool:
    return member(family.expr(i), w, family.alphabet)


def hardcore_step(state: DiagonalizationState, family: FamilyEnum,
                  condition: LangExpr, target: LangExpr,
                  alphabet: Alphabet) -> tuple[DiagonalizationState, TraceEntry]:
    """One loop iteration on the word of rank ``state.n``."""
    w = lex(alphabet, state.n)
    card = state.card
    cancel = state.cancelled
    newly_cancelled: list[int] = []
    if member(condition, w, alphabet):
        for i in range(card + 1):
            if i not in cancel and _indexed_member(family, i, w):
                newly_cancelled.append(i)
        if newly_cancelled:
            cancel = cancel | frozenset(newly_cancelled)
    accepted = state.accepted
    action, reason, blocking = SKIPPED, None, None
    if member(target, w, alphabet):
        blocker = None
        for i in range(card + 1):
            if i not in cancel and _indexed_member(family, i, w):
                blocker = i
                break
        if blocker is None:
            accepted = accepted + (w,)
            action = ACCEPTED
        else:
            reason, blocking = REASON_BLOCKED, blocker
    elif member(condition, w, alphabet):
        reason = REASON_IN_CONDITION
    else:
        reason = REASON_NOT_IN_TARGET
    if action is SKIPPED and newly_cancelled:
        action = CANCELLED
    new_state = DiagonalizationState(state.n + 1, accepted, cancel)
    entry = TraceEntry(state.n, w, action, tuple(newly_cancelled),
                       len(accepted), reason, blocking)
    return new_state, entry


def hardcore_run(family: FamilyEnum, condition: LangExpr, target: LangExpr,
                 alphabet: Alphabet, steps: int
                 ) -> tuple[DiagonalizationState, list[TraceEntry]]:
    """Iterate the step function over the first ``steps`` words.

    The accepted prefix decides membership below rank ``steps`` exactly
    (accept exactly the listed words); beyond that the run says nothing.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    state = initial_state()
    trace: list[TraceEntry] = []
    for _ in range(steps):
        state, entry = hardcore_step(state, family, condition, target, alphabet)
        trace.append(entry)
    return state, trace


# ---------------------------------------------------------------------------
# trace verification


def _violation(step, code, detail):
    return {"step": step, "code": code, "detail": detail}


def verify_trace(trace: list[TraceEntry], family: FamilyEnum, condition: LangExpr,
                 target: LangExpr, alphabet: Alphabet) -> dict:
    """Replay a trace and assert the loop invariants.

    Checks: (a) every accepted word avoids every uncancelled guarded
    language at its step; (b) every cancellation has its in-condition
    witness; (c) finally-uncancelled guarded languages meet the accepted
    prefix only among the words accepted before they became guarded;
    (d) the prefix lies in the target, avoids the condition, and is
    strictly increasing; and full equality with an independent replay.
    """
    violations = []
    accepted_so_far: list[tuple[str, int]] = []   # (word, card before acceptance)
    cancel: set[int] = set()
    cancel_step: dict[int, int] = {}
    prev_rank = -1
    for pos, entry in enumerate(trace):
        if entry.n != pos:
            violations.append(_violation(entry.n, "step-numbering",
                                         f"expected step {pos}"))
            break
        w = lex(alphabet, entry.n)
        if entry.word != w:
            violations.append(_violation(entry.n, "word-rank",
                                         f"word {entry.word!r} is not lex({entry.n})"))
            continue
        card_before = len(accepted_so_far)
        # (b) cancellations need their condition witness
        for i in entry.cancelled:
            if not member(condition, w, alphabet):
                violations.append(_violation(entry.n, "cancel-no-condition-witness",
                                             f"index {i} cancelled on {w!r} not in the condition"))
            elif not _indexed_member(family, i, w):
                violations.append(_violation(entry.n, "cancel-no-membership-witness",
                                             f"index {i} cancelled but {w!r} not in language {i}"))
            if i > card_before:
                violations.append(_violation(entry.n, "cancel-outside-guard",
                                             f"index {i} beyond guard {card_before}"))
            if i in cancel:
                violations.append(_violation(entry.n, "cancel-repeated",
                                             f"index {i} already cancelled"))
            cancel.add(i)
            cancel_step.setdefault(i, entry.n)
        if entry.action == ACCEPTED:
            # (d) prefix discipline
            if not member(target, w, alphabet):
                violations.append(_violation(entry.n, "accept-outside-target", w))
            if member(condition, w, alphabet):
                violations.append(_violation(entry.n, "accept-inside-condition", w))
            rank = ord_(alphabet, w)
            if rank <= prev_rank:
                violations.append(_violation(entry.n, "accept-order",
                                             f"{w!r} not above the previous accepted word"))
            prev_rank = max(prev_rank, rank)
            # (a) acceptance guard
            for i in range(card_before + 1):
                if i not in cancel and _indexed_member(family, i, w):
                    violations.append(_violation(entry.n, "accept-blocked",
                                                 f"uncancelled index {i} contains {w!r}"))
            accepted_so_far.append((w, card_before))
        if entry.card != len(accepted_so_far):
            violations.append(_violation(entry.n, "card-mismatch",
                                         f"declared {entry.card}, replay has {len(accepted_so_far)}"))
    # (c) finite-intersection bound for surviving guarded indices
    final_card = len(accepted_so_far)
    for i in range(final_card + 1):
        if i in cancel:
            continue
        hits = [(w, cb) for w, cb in accepted_so_far if _indexed_member(family, i, w)]
        late = [w for w, cb in hits if cb >= i]
        if late:
            violations.append(_violation(None, "late-intersection",
                                         f"index {i} meets words accepted while guarded: {late}"))
    # independent replay must reproduce the trace bit for bit
    state = initial_state()
    for pos, entry in enumerate(trace):
        state, expected = hardcore_step(state, family, condition, target, alphabet)
        if expected != entry:
            violations.append(_violation(pos, "replay-divergence",
                                         {"expected": expected.to_json(),
                                          "found": entry.to_json()}))
            break
    return {"ok": not violations, "violations": violations,
            "steps": len(trace), "final_card": final_card,
            "cancelled": sorted(cancel)}


# ---------------------------------------------------------------------------
# hard-core reports


def is_proper_hardcore(b: LangExpr, target: LangExpr, family: FamilyEnum,
                       index_bound: int, horizon: int = 300,
                       threshold: int = INFINITE_EVIDENCE_THRESHOLD) -> dict:
    """Bound-relative check that ``b`` is an infinite subset of the target
    meeting every in-target family language only finitely.

    Only an exactly-infinite intersection violates; horizon evidence is
    reported separately as suspicion.
    """
    alphabet = family.alphabet
    b_finiteness = is_finite(b, alphabet, horizon)
    containment = subset_of(b, target, alphabet, horizon)
    violations = []
    suspects = []
    for i in range(index_bound):
        inside = subset_of(family.expr(i), target, alphabet, horizon)
        if not inside.is_certified:
            continue
        meet = is_finite(Inter((b, family.expr(i))), alphabet, horizon)
        if meet.is_infinite:
            violations.append({"index": i, "evidence": meet.to_json()})
        elif meet.is_unknown and (meet.count or 0) >= threshold:
            suspects.append({"index": i, "members_seen": meet.count})
    holds = (not violations) and not containment.is_refuted \
        and not b_finiteness.is_finite
    return {
        "holds_up_to_bounds": holds,
        "b_infinite": b_finiteness.to_json(),
        "containment": containment.to_json(),
        "violations": violations,
        "suspects": suspects,
        "index_bound": index_bound,
        "horizon": horizon,
    }


def hardcore_componentwise(cond: ConditionalProblem, family: FamilyEnum,
                           steps: int) -> list[dict]:
    """Run the diagonalization once per component against the shared
    condition; each run carries its own trace."""
    out = []
    for t, comp in enumerate(cond.problem.components):
        state, trace = hardcore_run(family, cond.condition, comp,
                                    cond.alphabet, steps)
        out.append({"component": t, "state": state, "trace": trace})
    return out


# ---------------------------------------------------------------------------
# trace files


def trace_to_jsonl(trace: list[TraceEntry]) -> str:
    return "".join(json.dumps(e.to_json(), sort_keys=True, separators=(",", ":")) + "\n"
                   for e in trace)


def trace_from_jsonl(text: str) -> list[TraceEntry]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(TraceEntry.from_json(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"trace line {lineno}: {exc}") from exc
    return out
