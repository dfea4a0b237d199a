"""Classification problems, partitions and the solvability search.

A problem is a vector of pairwise-disjoint infinite languages; a solution
is a same-length partition of all words into family members, each problem
component contained in its own block.  Searches are bounded and
deterministic: candidates are ordered by the nested pair code of their
index tuple and the least fully-verified tuple wins, so identical inputs
and bounds always return the identical certificate.  A failed search is
reported as inconclusive together with the bounds it exhausted, never as a
negative answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import codec
from .families import FamilyEnum
from .langs import (FULL, Complement, Inter, LangExpr, Union,
                    equivalent, is_finite, member_batch, regular_view, simplify,
                    subset_of)
from .verdicts import (CERTIFIED, REFUTED, UNKNOWN, FinitenessVerdict, Verdict)
from .words import Alphabet, window_for_horizon

INFINITE_EVIDENCE_THRESHOLD = 32


class ProblemPrecondition(ValueError):
    """A classification-problem precondition is provably violated."""


class ClosureFlagsAbsent(ValueError):
    """The operation needs closure flags the family does not declare."""


def disjoint_verdict(e1: LangExpr, e2: LangExpr, alphabet: Alphabet,
                     horizon: int) -> Verdict:
    """Is the intersection empty?  Exact when it simplifies to regular."""
    both = simplify(Inter((e1, e2)), alphabet)
    view = regular_view(both, alphabet)
    if view is not None:
        least = view.least_accepted()
        if least is None:
            return Verdict(CERTIFIED, exact=True)
        return Verdict(REFUTED, exact=True, witness=alphabet.word(least))
    packed = window_for_horizon(alphabet, horizon)
    hits = np.nonzero(member_batch(both, packed))[0]
    if hits.size:
        return Verdict(REFUTED, exact=True, witness=packed.word(int(hits[0])),
                       detail={"route": "window"})
    return Verdict(UNKNOWN, exact=False, horizon=horizon)


@dataclass(frozen=True)
class ProblemCheck:
    """Verification record produced when a problem is loaded."""

    disjointness: tuple[tuple[int, int, Verdict], ...]
    infiniteness: tuple[FinitenessVerdict, ...]
    condition_disjointness: tuple[Verdict, ...] = ()
    flags: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "disjointness": [{"pair": [i, j], **v.to_json()}
                             for i, j, v in self.disjointness],
            "infiniteness": [v.to_json() for v in self.infiniteness],
            "condition_disjointness": [v.to_json() for v in self.condition_disjointness],
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class ClassificationProblem:
    components: tuple[LangExpr, ...]
    alphabet: Alphabet
    check: ProblemCheck | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.components:
            raise ValueError("a classification problem needs at least one component")

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class ConditionalProblem:
    condition: LangExpr
    problem: ClassificationProblem

    @property
    def alphabet(self) -> Alphabet:
        return self.problem.alphabet


def _component_checks(components, alphabet, horizon, threshold):
    flags = []
    disj = []
    for i in range(len(components)):
        for j in range(i + 1, len(components)):
            v = disjoint_verdict(components[i], components[j], alphabet, horizon)
            if v.is_refuted:
                raise ProblemPrecondition(
                    f"components {i} and {j} overlap on {v.witness!r}")
            if not v.exact:
                flags.append(f"disjointness({i},{j}) checked to horizon {horizon} only")
            disj.append((i, j, v))
    inf = []
    for i, comp in enumerate(components):
        v = is_finite(comp, alphabet, horizon)
        if v.is_finite:
            raise ProblemPrecondition(
                f"component {i} is finite ({v.count} members)")
        if v.is_unknown:
            kind = "evidence" if (v.count or 0) >= threshold else "weak evidence"
            flags.append(f"infiniteness({i}) not exact: {v.count} members up to "
                         f"horizon {horizon} ({kind})")
        inf.append(v)
    return tuple(disj), tuple(inf), flags


def load_problem(components, alphabet: Alphabet, horizon: int = 300,
                 threshold: int = INFINITE_EVIDENCE_THRESHOLD) -> ClassificationProblem:
    """Build a problem, verifying disjointness and infiniteness.

    Provable violations raise :class:`ProblemPrecondition`; aspects that
    can only be checked to the horizon are recorded as flags.
    """
    components = tuple(components)
    disj, inf, flags = _component_checks(components, alphabet, horizon, threshold)
    check = ProblemCheck(disj, inf, (), tuple(flags))
    return ClassificationProblem(components, alphabet, check)


def load_conditional(condition: LangExpr, components, alphabet: Alphabet,
                     horizon: int = 300,
                     threshold: int = INFINITE_EVIDENCE_THRESHOLD) -> ConditionalProblem:
    """Build a conditional problem; the condition may be finite or empty,
    but must be disjoint from every component."""
    components = tuple(components)
    disj, inf, flags = _component_checks(components, alphabet, horizon, threshold)
    cond_checks = []
    for i, comp in enumerate(components):
        v = disjoint_verdict(condition, comp, alphabet, horizon)
        if v.is_refuted:
            raise ProblemPrecondition(
                f"condition overlaps component {i} on {v.witness!r}")
        if not v.exact:
            flags.append(f"condition-disjointness({i}) checked to horizon {horizon} only")
        cond_checks.append(v)
    check = ProblemCheck(disj, inf, tuple(cond_checks), tuple(flags))
    return ConditionalProblem(condition, ClassificationProblem(components, alphabet, check))


def set_of(problem: ClassificationProblem) -> LangExpr:
    """Union of all components."""
    if len(problem.components) == 1:
        return problem.components[0]
    return Union(problem.components)


def refines(b: ClassificationProblem, a: ClassificationProblem,
            horizon: int = 300) -> tuple[int, ...] | None:
    """Least injection mapping each component of ``b`` into one of ``a``.

    Injections are searched in lexicographic order; a pair is accepted
    when containment is certified or consistent up to the horizon.
    Returns the 0-based injection, or None.
    """
    m, k = len(b), len(a)
    if m > k:
        return None
    for sigma in itertools.permutations(range(k), m):
        ok = True
        for i in range(m):
            v = subset_of(b.components[i], a.components[sigma[i]], a.alphabet, horizon)
            if v.is_refuted:
                ok = False
                break
        if ok:
            return sigma
    return None


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class PartitionVerdict:
    status: str
    exact: bool
    witness: str | None = None
    kind: str | None = None           # "uncovered" | "overlap" | "membership"
    member_indices: tuple | None = None
    flags: tuple[str, ...] = ()

    @property
    def is_certified(self):
        return self.status == CERTIFIED

    @property
    def is_refuted(self):
        return self.status == REFUTED

    def to_json(self) -> dict:
        out = {"status": self.status, "exact": self.exact, "flags": list(self.flags)}
        if self.witness is not None:
            out["witness"] = self.witness
            out["kind"] = self.kind
        if self.member_indices is not None:
            out["member_indices"] = list(self.member_indices)
        return out


def is_partition(blocks, alphabet: Alphabet, family: FamilyEnum | None = None,
                 index_bound: int = 0, horizon: int = 300) -> PartitionVerdict:
    """Check cover of all words, pairwise disjointness and (optionally)
    that every block equals some family language below the index bound."""
    blocks = tuple(blocks)
    if not blocks:
        raise ValueError("a partition needs at least one block")
    flags = []
    exact = True
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            v = disjoint_verdict(blocks[i], blocks[j], alphabet, horizon)
            if v.is_refuted:
                return PartitionVerdict(REFUTED, True, v.witness, "overlap")
            if not v.exact:
                exact = False
                flags.append(f"disjointness({i},{j}) horizon-checked")
    cover = equivalent(Union(blocks), FULL, alphabet, horizon)
    if cover.is_refuted:
        return PartitionVerdict(REFUTED, True, cover.witness, "uncovered")
    if not cover.exact:
        exact = False
        flags.append("cover horizon-checked")
    member_indices = None
    if family is not None:
        member_indices = []
        for t, block in enumerate(blocks):
            idx, verdict = _family_index_of(family, block, index_bound, horizon)
            if idx is None:
                return PartitionVerdict(
                    REFUTED, False, None, "membership",
                    flags=(f"block {t} matches no family index below {index_bound}",))
            if not verdict.exact:
                exact = False
                flags.append(f"membership({t}) horizon-checked")
            member_indices.append(idx)
        member_indices = tuple(member_indices)
    status = CERTIFIED if exact else UNKNOWN
    return PartitionVerdict(status, exact, member_indices=member_indices,
                            flags=tuple(flags))


def _family_index_of(family, expr, index_bound, horizon):
    for i in range(index_bound):
        v = equivalent(family.expr(i), expr, family.alphabet, horizon)
        if v.is_certified:
            return i, v
        if v.is_unknown:
            return i, v
    return None, None


# ---------------------------------------------------------------------------
# the bounded solvability search


@dataclass(frozen=True)
class PartitionCertificate:
    """A verified solution: blocks, their family indices, the injection
    placing each problem component, and how far verification is exact."""

    blocks: tuple[LangExpr, ...]
    injection: tuple[int, ...]
    status: str                      # "exact" | "horizon"
    indices: tuple[int, ...] | None = None
    code: int | None = None
    horizon: int | None = None
    has_condition_block: bool = False

    def to_json(self) -> dict:
        from .langs import expr_to_json
        return {
            "result": "certified",
            "blocks": [expr_to_json(b) for b in self.blocks],
            "indices": None if self.indices is None else list(self.indices),
            "injection": list(self.injection),
            "status": self.status,
            "code": self.code,
            "horizon": self.horizon,
            "has_condition_block": self.has_condition_block,
        }


@dataclass(frozen=True)
class SolveNotFound:
    index_bound: int
    horizon: int
    note: str = "search exhausted its bounds; inconclusive, not a refutation"

    def to_json(self) -> dict:
        return {"result": "not-found", "index_bound": self.index_bound,
                "horizon": self.horizon, "note": self.note}


def _dedup_candidates(family, indices):
    """Keep the least index per language (safe: tuple codes are strictly
    monotone in every coordinate, and all filters are language-level)."""
    if not family.exact:
        return list(indices)
    seen = {}
    for i in indices:
        key = family.canonical(i)
        if key not in seen:
            seen[key] = i
    return sorted(seen.values())


def _window_rows(family, index_bound, packed):
    return [family.window_row(i, packed) for i in range(index_bound)]


def _containment_candidates(rows, comp_vec):
    return [i for i, row in enumerate(rows) if not (comp_vec & ~row).any()]


def _verify_tuple(problem, family, slots, assignment, horizon):
    """Full verification of one candidate tuple; returns status or None."""
    alphabet = problem.alphabet
    blocks = tuple(family.expr(i) for i in slots)
    exact = True
    for x in range(len(blocks)):
        for y in range(x + 1, len(blocks)):
            v = disjoint_verdict(blocks[x], blocks[y], alphabet, horizon)
            if v.is_refuted:
                return None
            if not v.exact:
                exact = False
    cover = equivalent(Union(blocks), FULL, alphabet, horizon)
    if cover.is_refuted:
        return None
    if not cover.exact:
        exact = False
    for t, slot in assignment:
        v = subset_of(problem.components[t], blocks[slot], alphabet, horizon)
        if v.is_refuted:
            return None
        if not v.exact:
            exact = False
    return "exact" if exact else "horizon"


def solve(problem: ClassificationProblem, family: FamilyEnum, index_bound: int,
          horizon: int = 300) -> PartitionCertificate | SolveNotFound:
    """Search for a same-length family partition refining the problem.

    Candidate index tuples are ordered by their nested pair code; the
    least tuple passing full verification is returned.
    """
    k = len(problem)
    alphabet = problem.alphabet
    packed = window_for_horizon(alphabet, horizon)
    rows = _window_rows(family, index_bound, packed)
    comp_vecs = [member_batch(c, packed) for c in problem.components]
    cand = [_dedup_candidates(family, _containment_candidates(rows, v))
            for v in comp_vecs]
    if any(not c for c in cand):
        return SolveNotFound(index_bound, horizon)
    # collect window-level partitions with every injection that fits them
    tuples: dict[tuple, list[tuple]] = {}
    for perm in itertools.permutations(range(k)):
        # slot s hosts component perm[s]
        for slots in itertools.product(*[cand[perm[s]] for s in range(k)]):
            known = tuples.get(slots)
            if known is not None:
                known.append(perm)
                continue
            ok = True
            acc = np.zeros(len(packed), dtype=bool)
            for x in range(k):
                rx = rows[slots[x]]
                if (acc & rx).any():
                    ok = False
                    break
                acc |= rx
            if ok and acc.all():
                tuples[slots] = [perm]
    for slots in sorted(tuples, key=codec.tuple_code):
        for perm in tuples[slots]:
            assignment = [(perm[s], s) for s in range(k)]
            status = _verify_tuple(problem, family, slots, assignment, horizon)
            if status is not None:
                injection = tuple(perm.index(t) for t in range(k))
                return PartitionCertificate(
                    tuple(family.expr(i) for i in slots), injection, status,
                    indices=slots, code=codec.tuple_code(slots), horizon=horizon)
    return SolveNotFound(index_bound, horizon)


def solve_conditional(cond: ConditionalProblem, family: FamilyEnum, index_bound: int,
                      horizon: int = 300) -> PartitionCertificate | SolveNotFound:
    """As :func:`solve`, with a distinguished block 0 containing the
    condition; block 0 is forced to the complement of the others."""
    k = len(cond.problem)
    alphabet = cond.alphabet
    packed = window_for_horizon(alphabet, horizon)
    rows = _window_rows(family, index_bound, packed)
    cond_vec = member_batch(cond.condition, packed)
    comp_vecs = [member_batch(c, packed) for c in cond.problem.components]
    cand = [_dedup_candidates(family, _containment_candidates(rows, v))
            for v in comp_vecs]
    if any(not c for c in cand):
        return SolveNotFound(index_bound, horizon)
    # lookup for the forced complement block
    if family.exact:
        by_canon: dict[tuple, list[int]] = {}
        for i in range(index_bound):
            by_canon.setdefault(family.canonical(i), []).append(i)
    else:
        by_row: dict[bytes, list[int]] = {}
        for i, row in enumerate(rows):
            by_row.setdefault(np.packbits(row).tobytes(), []).append(i)
    tuples: dict[tuple, list[tuple]] = {}
    for perm in itertools.permutations(range(k)):
        for rest in itertools.product(*[cand[perm[s]] for s in range(k)]):
            known = tuples.get(rest)
            if known is not None:
                known.append(perm)
                continue
            ok = True
            acc = np.zeros(len(packed), dtype=bool)
            for x in range(k):
                rx = rows[rest[x]]
                if (acc & rx).any():
                    ok = False
                    break
                acc |= rx
            if not ok:
                continue
            # forced block 0: complement of the union of the rest
            if family.exact:
                union_expr = simplify(Union(tuple(family.expr(i) for i in rest)),
                                      alphabet)
                forced = regular_view(Complement(union_expr), alphabet)
                zero_cands = by_canon.get(forced.canonical_key(), [])
            else:
                zero_cands = by_row.get(np.packbits(~acc).tobytes(), [])
            zero_cands = [i0 for i0 in zero_cands if not (cond_vec & ~rows[i0]).any()]
            if zero_cands:
                tuples[rest] = [zero_cands, perm]
    candidates = []
    for rest, entry in tuples.items():
        zero_cands, perms = entry[0], entry[1:]
        for i0 in zero_cands:
            slots = (i0,) + rest
            candidates.append((codec.tuple_code(slots), slots, perms))
    for code, slots, perms in sorted(candidates, key=lambda c: c[0]):
        blocks = tuple(family.expr(i) for i in slots)
        pv = is_partition(blocks, alphabet, horizon=horizon)
        if pv.is_refuted:
            continue
        cv = subset_of(cond.condition, blocks[0], alphabet, horizon)
        if cv.is_refuted:
            continue
        for perm in perms:
            exact = pv.exact and cv.exact
            bad = False
            for s in range(k):
                sv = subset_of(cond.problem.components[perm[s]], blocks[1 + s],
                               alphabet, horizon)
                if sv.is_refuted:
                    bad = True
                    break
                if not sv.exact:
                    exact = False
            if bad:
                continue
            injection = tuple(1 + perm.index(t) for t in range(k))
            return PartitionCertificate(blocks, injection,
                                        "exact" if exact else "horizon",
                                        indices=slots, code=code, horizon=horizon,
                                        has_condition_block=True)
    return SolveNotFound(index_bound, horizon)


# ---------------------------------------------------------------------------
# the two partition constructions


def pad_partition(cert: PartitionCertificate, a: ClassificationProblem,
                  b: ClassificationProblem, family: FamilyEnum,
                  horizon: int = 300) -> PartitionCertificate:
    """Shrink a certificate for ``a`` to one for a refinement ``b``.

    The blocks hosting the surviving components are kept; every unused
    block is merged into the last kept one.  Needs a union-closed family.
    """
    if not family.flags.union_closed:
        raise ClosureFlagsAbsent("pad_partition needs a union-closed family")
    sigma_ba = refines(b, a, horizon)
    if sigma_ba is None:
        raise ProblemPrecondition("second problem does not refine the first")
    m = len(b)
    kept_slots = [cert.injection[sigma_ba[i]] for i in range(m)]
    unused = [s for s in range(len(cert.blocks)) if s not in kept_slots]
    blocks = [cert.blocks[s] for s in kept_slots]
    if unused:
        blocks[-1] = Union(tuple([blocks[-1]] + [cert.blocks[s] for s in unused]))
    status_exact = cert.status == "exact"
    pv = is_partition(blocks, b.alphabet, horizon=horizon)
    if pv.is_refuted:
        raise ProblemPrecondition(f"padded blocks do not partition: {pv.witness!r}")
    for i in range(m):
        v = subset_of(b.components[i], blocks[i], b.alphabet, horizon)
        if v.is_refuted:
            raise ProblemPrecondition("padded blocks fail containment")
        status_exact = status_exact and v.exact and pv.exact
    return PartitionCertificate(tuple(blocks), tuple(range(m)),
                                "exact" if status_exact else "horizon",
                                horizon=horizon)


def combine_pairwise(problem: ClassificationProblem,
                     pair_certs: dict[tuple[int, int], PartitionCertificate],
                     family: FamilyEnum, horizon: int = 300) -> PartitionCertificate:
    """Assemble a full certificate from two-component certificates.

    ``pair_certs[(i, j)]`` must certify the subproblem (A_i, A_j).  The
    construction is inductive: a partition for the first j components is
    intersected with the union of separators against component j+1, and
    the complement becomes the new block.  Needs union and intersection
    closure.
    """
    flags = family.flags
    if not (flags.union_closed and flags.inter_closed):
        raise ClosureFlagsAbsent("combine_pairwise needs union and intersection closure")
    k = len(problem)
    alphabet = problem.alphabet

    def aligned_pair(i, j):
        cert = pair_certs.get((i, j))
        swap = False
        if cert is None:
            cert = pair_certs.get((j, i))
            swap = True
        if cert is None:
            raise KeyError(f"missing pair certificate for components ({i}, {j})")
        first = cert.blocks[cert.injection[0]]
        second = cert.blocks[cert.injection[1]]
        if swap:
            first, second = second, first
        # sanity: the supplied certificate must actually separate the pair
        pv = is_partition((first, second), alphabet, horizon=horizon)
        if pv.is_refuted:
            raise ProblemPrecondition(
                f"supplied certificate for ({i}, {j}) is not a partition: {pv.witness!r}")
        for comp, block in ((problem.components[i], first), (problem.components[j], second)):
            v = subset_of(comp, block, alphabet, horizon)
            if v.is_refuted:
                raise ProblemPrecondition(
                    f"supplied certificate for ({i}, {j}) fails containment on {v.witness!r}")
        return first, second

    if k == 1:
        return PartitionCertificate((FULL,), (0,), "exact", horizon=horizon)
    blocks = list(aligned_pair(0, 1))
    for nxt in range(2, k):
        separators = []
        for i in range(nxt):
            sep, _ = aligned_pair(i, nxt)
            separators.append(sep)
        p = Union(tuple(separators))
        blocks = [simplify(Inter((q, p)), alphabet) for q in blocks]
        blocks.append(simplify(Complement(p), alphabet))
    pv = is_partition(blocks, alphabet, horizon=horizon)
    if pv.is_refuted:
        raise ProblemPrecondition(f"combined blocks do not partition: {pv.witness!r}")
    exact = pv.exact
    for t in range(k):
        v = subset_of(problem.components[t], blocks[t], alphabet, horizon)
        if v.is_refuted:
            raise ProblemPrecondition("combined blocks fail containment")
        exact = exact and v.exact
    return PartitionCertificate(tuple(blocks), tuple(range(k)),
                                "exact" if exact else "horizon", horizon=horizon)
