"""Cohesiveness checks with refutation witnesses, and core status reports.

An infinite language is cohesive against a family when no member-with-
complement splits it into two infinite parts.  The checker scans
complement pairs below an index bound and returns either a re-verifiable
refutation witness or "consistent up to these bounds" — never a positive
cohesiveness claim, which no finite procedure could back.

Core status combines two routes: cohesiveness of the component union, and
bounded solvability of sampled subproblems.  On automaton-backed families
a solvable subproblem always induces a splitting witness, and the report
cross-links the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import codec
from .classify import (ClassificationProblem, ClosureFlagsAbsent, ConditionalProblem,
                       PartitionCertificate, disjoint_verdict, set_of, solve,
                       solve_conditional, INFINITE_EVIDENCE_THRESHOLD)
from .families import DcMember, FamilyEnum, dc_members
from .langs import (Complement, Inter, LangExpr, expr_to_json, is_finite,
                    regular_view, simplify, subset_of)
from .verdicts import FinitenessVerdict
from .words import window_for_horizon


@dataclass(frozen=True)
class CohesionVerdict:
    """Refuted carries the splitting pair and per-side evidence; consistent
    carries only the bounds that were exhausted."""

    status: str                       # "refuted" | "consistent"
    index_bound: int
    horizon: int
    witness: DcMember | None = None
    witness_expr: LangExpr | None = None
    evidence: tuple[FinitenessVerdict, FinitenessVerdict] | None = None
    exact: bool = False

    @property
    def is_refuted(self) -> bool:
        return self.status == "refuted"

    def to_json(self) -> dict:
        out = {"status": self.status, "index_bound": self.index_bound,
               "horizon": self.horizon, "exact": self.exact}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["witness_expr"] = expr_to_json(self.witness_expr)
            out["evidence"] = [v.to_json() for v in self.evidence]
        return out


def infinite_evidence(expr: LangExpr, alphabet, horizon: int,
                      threshold: int = INFINITE_EVIDENCE_THRESHOLD
                      ) -> tuple[bool, FinitenessVerdict]:
    """Whether the language counts as infinite for splitting purposes.

    Exact verdicts decide; otherwise at least ``threshold`` members below
    the horizon count as (non-exact) evidence.
    """
    v = is_finite(expr, alphabet, horizon)
    if v.is_infinite:
        return True, v
    if v.is_finite:
        return False, v
    return (v.count or 0) >= threshold, v


def _scan_order(members: list[DcMember]) -> list[DcMember]:
    return sorted(members, key=lambda m: codec.pair(m.i, m.j))


def check_cohesive(a: LangExpr, family: FamilyEnum, index_bound: int,
                   horizon: int = 300,
                   threshold: int = INFINITE_EVIDENCE_THRESHOLD) -> CohesionVerdict:
    """Scan complement pairs for one splitting the language both ways.

    The witness is the least (i, j) pair in pair-code order; both sides of
    a refutation carry their own finiteness evidence.
    """
    return _check_cohesive_restricted(a, None, family, index_bound, horizon, threshold)


def check_ccohesive(a: LangExpr, region: LangExpr, family: FamilyEnum,
                    index_bound: int, horizon: int = 300,
                    threshold: int = INFINITE_EVIDENCE_THRESHOLD) -> CohesionVerdict:
    """As :func:`check_cohesive`, with witnesses restricted to family
    members certified to lie inside ``region``.

    Equivalent to plain cohesiveness against the two-sided closure of the
    in-region part of the family, which is how the restriction is run.
    """
    return _check_cohesive_restricted(a, region, family, index_bound, horizon, threshold)


def _check_cohesive_restricted(a, region, family, index_bound, horizon, threshold):
    alphabet = family.alphabet
    # outcome per language class: enumerations repeat languages across
    # indices, and the verdict depends only on the language
    class_outcome: dict[object, tuple] = {}
    packed = window_for_horizon(alphabet, horizon)
    for m in _scan_order(dc_members(family, index_bound, horizon)):
        key = family.canonical(m.i) if family.exact \
            else np.packbits(family.window_row(m.i, packed)).tobytes()
        if key in class_outcome:
            hit = class_outcome[key]
        else:
            q = family.expr(m.i)
            hit = None
            usable = True
            if region is not None:
                usable = subset_of(q, region, alphabet, horizon).is_certified
            if usable:
                side_in, ev_in = infinite_evidence(Inter((a, q)), alphabet,
                                                   horizon, threshold)
                if side_in:
                    side_out, ev_out = infinite_evidence(Inter((a, Complement(q))),
                                                         alphabet, horizon, threshold)
                    if side_out:
                        hit = (ev_in, ev_out)
            class_outcome[key] = hit
        if hit is not None:
            ev_in, ev_out = hit
            exact = ev_in.exact and ev_out.exact and m.status == "exact"
            return CohesionVerdict("refuted", index_bound, horizon, m,
                                   family.expr(m.i), (ev_in, ev_out), exact)
    return CohesionVerdict("consistent", index_bound, horizon)


# ---------------------------------------------------------------------------
# core reports


def _find_family_index(family: FamilyEnum, view, index_bound: int) -> int | None:
    key = view.canonical_key()
    for i in range(index_bound):
        if family.canonical(i) == key:
            return i
    return None


def check_core(problem: ClassificationProblem, family: FamilyEnum, index_bound: int,
               horizon: int = 300, subset_samples: int = 4, seed: int = 0,
               threshold: int = INFINITE_EVIDENCE_THRESHOLD) -> dict:
    """Core status of a problem: no multi-component subproblem solvable.

    Primary route: cohesiveness of the component union.  Secondary route:
    bounded solvability of component pairs and of sampled slices (a
    component intersected with a family language).  A certified solvable
    subproblem refutes core status; the routes are cross-checked and any
    contradiction is reported as an internal inconsistency.
    """
    if not (family.flags.nontrivial and family.flags.union_closed):
        raise ClosureFlagsAbsent("core checks need a nontrivial, union-closed family")
    if len(problem) < 2:
        raise ValueError("core status concerns problems with at least 2 components")
    alphabet = problem.alphabet
    cohesion = check_cohesive(set_of(problem), family, index_bound, horizon, threshold)

    rng = np.random.default_rng(seed)
    findings = []
    refuted_by_subproblem = False
    k = len(problem)

    def try_subproblem(label, components):
        nonlocal refuted_by_subproblem
        sub = ClassificationProblem(tuple(components), alphabet)
        res = solve(sub, family, index_bound, horizon)
        entry = {"subproblem": label}
        if isinstance(res, PartitionCertificate):
            entry["result"] = res.to_json()
            entry["refutes"] = res.status == "exact"
            if res.status == "exact":
                refuted_by_subproblem = True
        else:
            entry["result"] = res.to_json()
            entry["refutes"] = False
        findings.append(entry)
        return res

    pair_results = {}
    for i in range(k):
        for j in range(i + 1, k):
            pair_results[(i, j)] = try_subproblem(
                {"pair": [i, j]}, (problem.components[i], problem.components[j]))

    # sliced subproblems: component n family language, kept only with
    # infinite evidence
    for _ in range(subset_samples):
        i, j = rng.choice(k, size=2, replace=False)
        si, sj = int(rng.integers(0, index_bound)), int(rng.integers(0, index_bound))
        slice_i = simplify(Inter((problem.components[int(i)], family.expr(si))), alphabet)
        slice_j = simplify(Inter((problem.components[int(j)], family.expr(sj))), alphabet)
        ok_i, _ = infinite_evidence(slice_i, alphabet, horizon, threshold)
        ok_j, _ = infinite_evidence(slice_j, alphabet, horizon, threshold)
        if not (ok_i and ok_j):
            continue
        dv = disjoint_verdict(slice_i, slice_j, alphabet, horizon)
        if dv.is_refuted:
            continue
        try_subproblem({"slices": [[int(i), si], [int(j), sj]]}, (slice_i, slice_j))

    # cross-check: an exactly solvable subproblem induces a splitting pair
    linked = []
    inconsistent = False
    for entry, res in zip([f for f in findings if "pair" in f["subproblem"]],
                          pair_results.values()):
        if not isinstance(res, PartitionCertificate) or res.status != "exact":
            continue
        sep = res.blocks[res.injection[0]]
        view = regular_view(sep, alphabet)
        if view is None:
            continue
        sep_index = _find_family_index(family, view, index_bound)
        comp_index = _find_family_index(family, view.complement(), index_bound)
        both_in, ev_in = infinite_evidence(Inter((set_of(problem), sep)),
                                           alphabet, horizon, threshold)
        both_out, ev_out = infinite_evidence(
            Inter((set_of(problem), Complement(sep))), alphabet, horizon, threshold)
        link = {"separator_index": sep_index, "complement_index": comp_index,
                "splits_union": bool(both_in and both_out)}
        linked.append(link)
        if (both_in and both_out and sep_index is not None
                and comp_index is not None and not cohesion.is_refuted):
            inconsistent = True

    status = "refuted" if (cohesion.is_refuted or refuted_by_subproblem) \
        else "consistent-up-to-bounds"
    return {
        "core_status": status,
        "cohesion": cohesion.to_json(),
        "subproblems": findings,
        "linked_witnesses": linked,
        "routes_consistent": not inconsistent,
        "index_bound": index_bound,
        "horizon": horizon,
    }


def ccore1_check(component: LangExpr, condition: LangExpr, family: FamilyEnum,
                 index_bound: int, horizon: int = 300,
                 threshold: int = INFINITE_EVIDENCE_THRESHOLD) -> dict:
    """Single-component conditional-core check.

    The component must (a) admit no bounded single-component conditional
    solution and (b) show no splitting witness inside the condition's
    complement.  Needs only a nontrivial family.
    """
    if not family.flags.nontrivial:
        raise ClosureFlagsAbsent("conditional core checks need a nontrivial family")
    alphabet = family.alphabet
    single = ConditionalProblem(condition,
                                ClassificationProblem((component,), alphabet))
    res = solve_conditional(single, family, index_bound, horizon)
    solvable_exact = isinstance(res, PartitionCertificate) and res.status == "exact"
    solvable_horizon = isinstance(res, PartitionCertificate) and res.status != "exact"
    region = simplify(Complement(condition), alphabet)
    ccoh = check_ccohesive(component, region, family, index_bound, horizon, threshold)
    refutes = solvable_exact or (ccoh.is_refuted and ccoh.exact)
    return {
        "conditional_solve": res.to_json(),
        "solvable_exact": solvable_exact,
        "solvable_horizon_only": solvable_horizon,
        "ccohesive": ccoh.to_json(),
        "ccohesive_refuted": ccoh.is_refuted,
        "refutes": refutes,
    }


def check_ccore(cond: ConditionalProblem, family: FamilyEnum, index_bound: int,
                horizon: int = 300,
                threshold: int = INFINITE_EVIDENCE_THRESHOLD) -> dict:
    """Conditional-core status, component by component.

    Aggregates :func:`ccore1_check` over every component; a certified
    violation of either clause anywhere refutes, otherwise the verdict is
    consistent up to the bounds.
    """
    if not (family.flags.nontrivial and family.flags.union_closed):
        raise ClosureFlagsAbsent("conditional core checks need a nontrivial, "
                                 "union-closed family")
    components_report = []
    refuted = False
    for t, comp in enumerate(cond.problem.components):
        entry = {"component": t,
                 **ccore1_check(comp, cond.condition, family, index_bound,
                                horizon, threshold)}
        refuted = refuted or entry["refutes"]
        components_report.append(entry)
    return {
        "ccore_status": "refuted" if refuted else "consistent-up-to-bounds",
        "components": components_report,
        "index_bound": index_bound,
        "horizon": horizon,
    }
