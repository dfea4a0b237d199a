"""Denumerable language families as index-to-expression enumerations.

A family is a total generator from naturals to language expressions plus
declared closure flags.  The uniform word problem ``word_e(i, j)`` asks
whether the j-th word belongs to the i-th language; it stays total under
every closure operator because derived indices decode through exact
integer codecs.

The shipped regular family enumerates every complete automaton over the
alphabet by (state count, transition table, accepting set); the table and
the accepting characteristic vector are both ranked lexicographically with
the first position most significant.  Canonical indices of minimized
automata are computable in both directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import codec
from .dfa import Dfa, dfa_length_equals
from .langs import (EMPTY, Complement, DfaAtom, FiniteSet, Inter, LangExpr,
                    Union, equivalent, expr_from_json, member, member_batch,
                    regular_view)
from .verdicts import Verdict
from .words import Alphabet, PackedWords, lex, window_for_horizon


@dataclass(frozen=True)
class FamilyFlags:
    """Closure properties declared for a family (they are semantic claims
    about the whole family, not per-index facts)."""

    nontrivial: bool = False
    union_closed: bool = False
    inter_closed: bool = False
    complement_closed: bool = False

    def to_json(self) -> dict:
        return {
            "nontrivial": self.nontrivial,
            "union_closed": self.union_closed,
            "inter_closed": self.inter_closed,
            "complement_closed": self.complement_closed,
        }


class FamilyEnum:
    """An enumerated family with memoized expressions and window rows."""

    def __init__(self, name: str, alphabet: Alphabet, generator, exact: bool,
                 flags: FamilyFlags = FamilyFlags()):
        self.name = name
        self.alphabet = alphabet
        self.generator = generator
        self.exact = exact
        self.flags = flags
        self._exprs: dict[int, LangExpr] = {}
        self._rows: dict[tuple[int, int], tuple[PackedWords, np.ndarray]] = {}
        self._canon: dict[int, tuple] = {}
        self._dc: dict[tuple[int, int], list] = {}

    def __repr__(self):
        return f"FamilyEnum({self.name!r}, alphabet={self.alphabet})"

    def expr(self, i: int) -> LangExpr:
        if i < 0:
            raise ValueError("family index must be nonnegative")
        e = self._exprs.get(i)
        if e is None:
            e = self.generator(i)
            self._exprs[i] = e
        return e

    def word_e(self, i: int, j: int) -> bool:
        """The uniform word problem: is lex(j) in the i-th language?"""
        return member(self.expr(i), lex(self.alphabet, j), self.alphabet)

    def canonical(self, i: int) -> tuple | None:
        """Canonical automaton key of the i-th language, if regular."""
        if i in self._canon:
            return self._canon[i]
        view = regular_view(self.expr(i), self.alphabet)
        key = view.canonical_key() if view is not None else None
        self._canon[i] = key
        return key

    def window_row(self, i: int, packed: PackedWords) -> np.ndarray:
        key = (i, id(packed))
        hit = self._rows.get(key)
        if hit is not None:
            return hit[1]
        row = member_batch(self.expr(i), packed)
        self._rows[key] = (packed, row)
        return row

    def window_matrix(self, index_bound: int, packed: PackedWords) -> np.ndarray:
        return np.stack([self.window_row(i, packed) for i in range(index_bound)]) \
            if index_bound else np.zeros((0, len(packed)), dtype=bool)


def word_e(family: FamilyEnum, i: int, j: int) -> bool:
    return family.word_e(i, j)


# ---------------------------------------------------------------------------
# shipped families


def _regular_block(n_states: int, n_symbols: int) -> int:
    return n_states ** (n_states * n_symbols) * 2 ** n_states


def regular_index_decode(i: int, n_symbols: int) -> Dfa:
    """The i-th complete automaton (initial state 0) in canonical order."""
    if i < 0:
        raise ValueError("index must be nonnegative")
    n = 1
    while i >= _regular_block(n, n_symbols):
        i -= _regular_block(n, n_symbols)
        n += 1
    table_rank, acc_rank = divmod(i, 2 ** n)
    digits = []
    for _ in range(n * n_symbols):
        table_rank, d = divmod(table_rank, n)
        digits.append(d)
    digits.reverse()
    rows = tuple(tuple(digits[s * n_symbols:(s + 1) * n_symbols]) for s in range(n))
    accepting = frozenset(s for s in range(n) if acc_rank & (1 << (n - 1 - s)))
    return Dfa(n_symbols, rows, 0, accepting)


def regular_index_encode(dfa: Dfa) -> int:
    """Index of this exact automaton shape (not of its minimal form)."""
    n = dfa.n_states
    base = sum(_regular_block(m, dfa.n_symbols) for m in range(1, n))
    table_rank = 0
    for row in dfa.transitions:
        for d in row:
            table_rank = table_rank * n + d
    acc_rank = sum(1 << (n - 1 - s) for s in dfa.accepting)
    if dfa.initial != 0:
        raise ValueError("enumeration fixes the initial state at 0")
    return base + table_rank * 2 ** n + acc_rank


def canonical_index(dfa: Dfa) -> int:
    """Least enumeration index whose automaton is the minimal form of ``dfa``."""
    return regular_index_encode(dfa.minimize())


def regular_family(alphabet: Alphabet) -> FamilyEnum:
    """Every regular language over the alphabet, with many duplicate indices."""
    n_symbols = alphabet.size

    def gen(i: int) -> LangExpr:
        return DfaAtom(regular_index_decode(i, n_symbols))

    return FamilyEnum("regular", alphabet, gen, exact=True,
                      flags=FamilyFlags(nontrivial=True, union_closed=True,
                                        inter_closed=True, complement_closed=True))


def length_family(alphabet: Alphabet) -> FamilyEnum:
    """e(i) = all words of length exactly i."""

    def gen(i: int) -> LangExpr:
        return DfaAtom(dfa_length_equals(alphabet.size, i))

    return FamilyEnum("length", alphabet, gen, exact=True, flags=FamilyFlags())


def finite_family(alphabet: Alphabet) -> FamilyEnum:
    """All finite languages: index 0 is empty, others decode rank tuples."""

    def gen(i: int) -> LangExpr:
        if i == 0:
            return EMPTY
        ranks = codec.seq_decode(i - 1)
        return FiniteSet(tuple(lex(alphabet, r) for r in ranks))

    return FamilyEnum("finite", alphabet, gen, exact=True,
                      flags=FamilyFlags(nontrivial=False, union_closed=True,
                                        inter_closed=True, complement_closed=False))


def list_family(name: str, alphabet: Alphabet, exprs, flags: FamilyFlags = FamilyFlags(),
                exact: bool | None = None) -> FamilyEnum:
    """A user family: the listed expressions repeated periodically."""
    exprs = list(exprs)
    if not exprs:
        raise ValueError("list family needs at least one expression")
    if exact is None:
        exact = all(regular_view(e, alphabet) is not None for e in exprs)

    def gen(i: int) -> LangExpr:
        return exprs[i % len(exprs)]

    return FamilyEnum(name, alphabet, gen, exact=exact, flags=flags)


# ---------------------------------------------------------------------------
# closure operators on enumerations


def close_u(family: FamilyEnum) -> FamilyEnum:
    def gen(i: int) -> LangExpr:
        parts = codec.seq_decode(i)
        return Union(tuple(family.expr(k) for k in parts))

    f = family.flags
    return FamilyEnum(f"u({family.name})", family.alphabet, gen, family.exact,
                      FamilyFlags(nontrivial=f.nontrivial, union_closed=True,
                                  inter_closed=f.inter_closed, complement_closed=False))


def close_s(family: FamilyEnum) -> FamilyEnum:
    def gen(i: int) -> LangExpr:
        parts = codec.seq_decode(i)
        return Inter(tuple(family.expr(k) for k in parts))

    f = family.flags
    return FamilyEnum(f"s({family.name})", family.alphabet, gen, family.exact,
                      FamilyFlags(nontrivial=f.nontrivial, union_closed=f.union_closed,
                                  inter_closed=True, complement_closed=False))


def close_co(family: FamilyEnum) -> FamilyEnum:
    def gen(i: int) -> LangExpr:
        return Complement(family.expr(i))

    f = family.flags
    return FamilyEnum(f"co({family.name})", family.alphabet, gen, family.exact,
                      FamilyFlags(nontrivial=f.nontrivial, union_closed=f.inter_closed,
                                  inter_closed=f.union_closed,
                                  complement_closed=f.complement_closed))


def close_cc(family: FamilyEnum) -> FamilyEnum:
    """Even indices reproduce the family, odd indices its complements."""

    def gen(i: int) -> LangExpr:
        base, flip = divmod(i, 2)
        e = family.expr(base)
        return Complement(e) if flip else e

    f = family.flags
    return FamilyEnum(f"cc({family.name})", family.alphabet, gen, family.exact,
                      FamilyFlags(nontrivial=f.nontrivial, union_closed=False,
                                  inter_closed=False, complement_closed=True))


def close_b(family: FamilyEnum) -> FamilyEnum:
    """Boolean closure: unions of intersections over the two-sided family."""
    g = close_u(close_s(close_cc(family)))
    g.name = f"b({family.name})"
    g.flags = FamilyFlags(nontrivial=family.flags.nontrivial, union_closed=True,
                          inter_closed=True, complement_closed=True)
    return g


CLOSURES = {"u": close_u, "s": close_s, "co": close_co, "cc": close_cc, "b": close_b}


# ---------------------------------------------------------------------------
# complement pairs inside a family


@dataclass(frozen=True)
class DcMember:
    """Indices (i, j) with the claim that language i is the complement of
    language j, either proven on automata or checked to a horizon."""

    i: int
    j: int
    status: str  # "exact" | "horizon"
    horizon: int | None = None

    def to_json(self) -> dict:
        out = {"i": self.i, "j": self.j, "status": self.status}
        if self.horizon is not None:
            out["horizon"] = self.horizon
        return out


def complement_key(canonical: tuple) -> tuple:
    """Canonical key of the complement language, derived in place: the
    minimal automaton of the complement shares the transition structure,
    only the accepting set flips."""
    n_symbols, transitions, accepting = canonical
    acc = set(accepting)
    return (n_symbols, transitions,
            tuple(s for s in range(len(transitions)) if s not in acc))


def dc_members(family: FamilyEnum, index_bound: int, horizon: int) -> list[DcMember]:
    """All pairs (i, j) below the bound with e(i) = e(j)^c, in (i, j) order."""
    cached = family._dc.get((index_bound, horizon))
    if cached is not None:
        return cached
    out: list[DcMember] = []
    if family.exact:
        by_canon: dict[tuple, list[int]] = {}
        for i in range(index_bound):
            by_canon.setdefault(family.canonical(i), []).append(i)
        for j in range(index_bound):
            for i in by_canon.get(complement_key(family.canonical(j)), ()):
                out.append(DcMember(i, j, "exact"))
        out.sort(key=lambda m: (m.i, m.j))
        family._dc[(index_bound, horizon)] = out
        return out
    packed = window_for_horizon(family.alphabet, horizon)
    rows = [family.window_row(i, packed) for i in range(index_bound)]
    by_bytes: dict[bytes, list[int]] = {}
    for i, row in enumerate(rows):
        by_bytes.setdefault(np.packbits(row).tobytes(), []).append(i)
    for j, row in enumerate(rows):
        key = np.packbits(~row).tobytes()
        for i in by_bytes.get(key, ()):
            out.append(DcMember(i, j, "horizon", horizon))
    out.sort(key=lambda m: (m.i, m.j))
    family._dc[(index_bound, horizon)] = out
    return out


# ---------------------------------------------------------------------------
# algebraic-law harness

LAW_IDS = ("distributivity", "deMorgan", "cc-dc-fixpoint", "co-involution",
           "nontriviality-preservation")


def _law_report(law, samples, horizon):
    return {"law": law, "samples": samples, "horizon": horizon,
            "agreements": 0, "disagreements": 0, "first_counterexample": None}


def _compare_on_window(report, family, expr_a, expr_b, packed, label):
    va = member_batch(expr_a, packed)
    vb = member_batch(expr_b, packed)
    diff = np.nonzero(va != vb)[0]
    if diff.size:
        report["disagreements"] += 1
        if report["first_counterexample"] is None:
            report["first_counterexample"] = {
                "sample": label, "word": packed.word(int(diff[0]))}
    else:
        report["agreements"] += 1


def check_law(law_id: str, family: FamilyEnum, index_samples: int, horizon: int,
              seed: int = 0, index_pool: int = 64) -> dict:
    """Spot-check one closure-algebra identity on sampled indices.

    Both sides of each identity are realized through the enumeration
    codecs and compared word by word on lex(0..horizon).
    """
    if law_id not in LAW_IDS:
        raise ValueError(f"unknown law {law_id!r}; choose from {LAW_IDS}")
    rng = np.random.default_rng(seed)
    packed = window_for_horizon(family.alphabet, horizon)
    report = _law_report(law_id, index_samples, horizon)

    if law_id == "distributivity":
        fu_s = close_s(close_u(family))
        fs_u = close_u(close_s(family))
        for _ in range(index_samples):
            parts = [[int(rng.integers(0, index_pool))
                      for _ in range(int(rng.integers(1, 3)))]
                     for _ in range(int(rng.integers(1, 3)))]
            inter_of_unions = codec.seq_code([codec.seq_code(p) for p in parts])
            choices = list(itertools.product(*parts))
            union_of_inters = codec.seq_code([codec.seq_code(c) for c in choices])
            _compare_on_window(report, family, fu_s.expr(inter_of_unions),
                               fs_u.expr(union_of_inters), packed,
                               {"parts": parts})
    elif law_id == "deMorgan":
        co_u = close_u(close_co(family))
        s_co = close_co(close_s(family))
        for _ in range(index_samples):
            parts = [int(rng.integers(0, index_pool))
                     for _ in range(int(rng.integers(1, 4)))]
            code = codec.seq_code(parts)
            _compare_on_window(report, family, co_u.expr(code), s_co.expr(code),
                               packed, {"parts": parts})
    elif law_id == "co-involution":
        coco = close_co(close_co(family))
        for _ in range(index_samples):
            i = int(rng.integers(0, index_pool))
            _compare_on_window(report, family, coco.expr(i), family.expr(i),
                               packed, {"index": i})
    elif law_id == "cc-dc-fixpoint":
        cc = close_cc(family)
        for _ in range(index_samples):
            i = int(rng.integers(0, 2 * index_pool))
            partner = i + 1 if i % 2 == 0 else i - 1
            _compare_on_window(report, family, Complement(cc.expr(i)),
                               cc.expr(partner), packed,
                               {"index": i, "partner": partner})
    else:  # nontriviality-preservation
        for op_name, op in CLOSURES.items():
            closed = op(family)
            if family.flags.nontrivial and not closed.flags.nontrivial:
                report["disagreements"] += 1
                if report["first_counterexample"] is None:
                    report["first_counterexample"] = {"sample": {"closure": op_name},
                                                      "word": None}
                continue
            found_empty = found_full = False
            for i in range(index_pool):
                row = member_batch(closed.expr(i), packed)
                if not row.any():
                    found_empty = True
                if row.all():
                    found_full = True
                if found_empty and found_full:
                    break
            if found_empty and found_full:
                report["agreements"] += 1
            else:
                report["disagreements"] += 1
                if report["first_counterexample"] is None:
                    report["first_counterexample"] = {"sample": {"closure": op_name},
                                                      "word": None}
    return report


# ---------------------------------------------------------------------------
# loading from JSON


def family_from_json(data: dict) -> FamilyEnum:
    alphabet = Alphabet.parse(data["alphabet"], data.get("order"))
    if "builtin" in data:
        builders = {"regular": regular_family, "finite": finite_family,
                    "length": length_family}
        try:
            fam = builders[data["builtin"]](alphabet)
        except KeyError:
            raise ValueError(f"unknown builtin family {data['builtin']!r}") from None
    elif "list" in data:
        exprs = [expr_from_json(e, alphabet.size) for e in data["list"]]
        declared = data.get("flags", {})
        flags = FamilyFlags(
            nontrivial=bool(declared.get("nontrivial", False)),
            union_closed=bool(declared.get("union_closed", False)),
            inter_closed=bool(declared.get("inter_closed", False)),
            complement_closed=bool(declared.get("complement_closed", False)),
        )
        fam = list_family(data.get("name", "user"), alphabet, exprs, flags)
    else:
        raise ValueError("family JSON needs 'builtin' or 'list'")
    for op_name in data.get("closure", []):
        try:
            fam = CLOSURES[op_name](fam)
        except KeyError:
            raise ValueError(f"unknown closure operator {op_name!r}") from None
    return fam


def family_member_verdict(family: FamilyEnum, expr: LangExpr, index_bound: int,
                          horizon: int) -> tuple[int | None, Verdict | None]:
    """Least index below the bound whose language equals ``expr``."""
    for i in range(index_bound):
        v = equivalent(family.expr(i), expr, family.alphabet, horizon)
        if v.is_certified or (v.is_unknown and not family.exact):
            return i, v
    return None, None
