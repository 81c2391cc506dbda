"""Radical membership modulo simple differential systems and the
s-consistency checkers (decomposition-based and Groebner-based).

Membership follows the normal-form criterion: a differential polynomial lies
in the saturated ideal of a simple system exactly when its Janet normal form
vanishes; radical membership over a full decomposition requires a vanishing
normal form modulo every supplied system.

The decomposition-based check decomposes the difference system, discards
branches with no continuous limit (an equation whose limit stratum contains
a non-zero constant) and branches whose inequations approximate differential
consequences, and flags every remaining branch by testing each equation's
limit stratum for membership.  Branches reached through an initial = 0 case
split describe degenerate solution families; they are reported but do not
decide the overall verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Optional, Sequence

from .groebner import certify_groebner
from .janet import build_janet_system
from .limits import LimitResult, continuous_limit
from .orderings import MonomialOrdering
from .poly import PARTIAL, DiffPoly, DiffRing
from .reduction import ReductionReceipt, janet_normal_form
from .thomas import AnalysisSystem, difference_decompose, verify_quasi_simple


def _janet_for(S: AnalysisSystem):
    if S.janet is not None:
        return S.janet
    return build_janet_system(list(S.equations), S.ranking)


def check_simple_system(S: AnalysisSystem) -> None:
    """Validate the checkable simplicity conditions of a user-supplied
    differential system (the discriminant condition is declared, not
    verified)."""
    if S.ring.action != PARTIAL:
        raise ValueError("expected a differential system")
    ok, report = verify_quasi_simple(S)
    if not ok:
        raise ValueError("differential system fails simplicity conditions: "
                         + "; ".join(report))
    if not S.simple_declared:
        raise ValueError("system must declare simplicity (discriminant "
                         "condition is taken on trust)")


def differential_membership(f: DiffPoly, S: AnalysisSystem,
                            trust: bool = False
                            ) -> tuple[bool, ReductionReceipt]:
    """f in E : q^infinity for the simple differential system S, decided by
    the Janet normal form."""
    if not trust:
        check_simple_system(S)
    receipt = janet_normal_form(f, _janet_for(S))
    return receipt.remainder.is_zero(), receipt


def radical_membership(f: DiffPoly, systems: Sequence[AnalysisSystem],
                       trust: bool = False) -> tuple[bool, list[ReductionReceipt]]:
    """Radical differential ideal membership via all supplied decomposition
    branches: every normal form must vanish."""
    receipts = []
    ok = True
    for S in systems:
        member, receipt = differential_membership(f, S, trust=trust)
        receipts.append(receipt)
        ok = ok and member
    return ok, receipts


@dataclass
class BranchVerdict:
    system: AnalysisSystem
    flag: str  # "s-consistent" | "w-only" | "dropped"
    witnesses: list[DiffPoly] = dfield(default_factory=list)
    dropped_reason: Optional[str] = None
    limits: list[LimitResult] = dfield(default_factory=list)
    matched_system: Optional[int] = None
    receipts: list = dfield(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return self.system.degenerate


@dataclass
class ConsistencyVerdict:
    branches: list[BranchVerdict]
    overall: str  # "s-consistent" | "w-only" | "empty"
    notes: list[str] = dfield(default_factory=list)

    @property
    def s_consistent(self) -> bool:
        return self.overall == "s-consistent"


def _limit_terms(lim: LimitResult) -> list[DiffPoly]:
    return [r for _, r in lim.terms]


def _branch_verdict(branch: AnalysisSystem, diff_systems, steps, target,
                    trust: bool) -> BranchVerdict:
    # drop rule: an equation whose limit stratum contains a nonzero constant
    # admits no continuous limit (the branch disappears as h -> 0)
    limits = []
    for eq in branch.equations:
        lim = continuous_limit(eq, steps, target=target)
        limits.append(lim)
        if any(r.is_constant() and not r.is_zero() for r in _limit_terms(lim)):
            return BranchVerdict(branch, "dropped", limits=limits,
                                 dropped_reason="equation limit contains a "
                                                "non-zero constant")
    # drop rule: inequation approximating a differential consequence
    for g in branch.inequations:
        lim = continuous_limit(g, steps, target=target)
        for r in _limit_terms(lim):
            if r.is_constant() and not r.is_zero():
                continue
            member, _ = radical_membership(r, diff_systems, trust=trust)
            if member:
                return BranchVerdict(branch, "dropped", limits=limits,
                                     dropped_reason="inequation approximates "
                                                    "a consequence of the PDE")
    # membership of every limit term, branch matched to one supplied system
    best = None
    for si, S in enumerate(diff_systems):
        witnesses = []
        receipts = []
        for lim in limits:
            for r in _limit_terms(lim):
                member, receipt = differential_membership(r, S, trust=True)
                receipts.append(receipt)
                if not member:
                    witnesses.append(r)
        if not witnesses:
            return BranchVerdict(branch, "s-consistent", limits=limits,
                                 matched_system=si, receipts=receipts)
        if best is None or len(witnesses) < len(best[1]):
            best = (si, witnesses, receipts)
    si, witnesses, receipts = best
    # keep as witnesses the limit terms outside the full radical
    hard = []
    for lim in limits:
        for r in _limit_terms(lim):
            member, _ = radical_membership(r, diff_systems, trust=True)
            if not member:
                hard.append(r)
    return BranchVerdict(branch, "w-only", witnesses=hard or witnesses,
                         limits=limits, matched_system=si, receipts=receipts)


def s_consistency_check(diff_systems, fda: AnalysisSystem, steps,
                        target: DiffRing | None = None,
                        backshift: bool = False,
                        trust: bool = False,
                        max_nodes: int = 4000) -> ConsistencyVerdict:
    """Difference-Thomas-based s-consistency analysis of an FDA against the
    supplied simple differential system(s)."""
    if isinstance(diff_systems, AnalysisSystem):
        diff_systems = [diff_systems]
    diff_systems = list(diff_systems)
    if not trust:
        for S in diff_systems:
            check_simple_system(S)
    if target is None:
        from .limits import partial_ring_for
        target = diff_systems[0].ring if diff_systems else \
            partial_ring_for(fda.ring)
    notes = []
    if len(diff_systems) == 1:
        notes.append("membership tested against a single simple system; "
                     "verdicts are relative to that decomposition branch")
    branches = difference_decompose(fda, backshift=backshift,
                                    max_nodes=max_nodes)
    if not branches:
        return ConsistencyVerdict([], "empty", notes + ["no solutions"])
    verdicts = [
        _branch_verdict(b, diff_systems, steps, target, trust=True)
        for b in branches]
    decisive = [v for v in verdicts
                if v.flag != "dropped" and not v.degenerate]
    if decisive and all(v.flag == "s-consistent" for v in decisive):
        overall = "s-consistent"
    else:
        overall = "w-only"
    degenerate_fail = [v for v in verdicts
                       if v.degenerate and v.flag == "w-only"]
    if degenerate_fail:
        notes.append("%d degenerate branch(es) only w-consistent; the "
                     "overall verdict follows the generic branches"
                     % len(degenerate_fail))
    return ConsistencyVerdict(verdicts, overall, notes)


def groebner_s_consistency(diff_systems, basis: Sequence[DiffPoly],
                           ordering: MonomialOrdering, steps,
                           target: DiffRing | None = None,
                           trust: bool = False,
                           skip_coprime: bool = False) -> ConsistencyVerdict:
    """Groebner-basis s-consistency criterion: every basis element's limit
    must consist of differential consequences."""
    if isinstance(diff_systems, AnalysisSystem):
        diff_systems = [diff_systems]
    diff_systems = list(diff_systems)
    if not trust:
        for S in diff_systems:
            check_simple_system(S)
    ok, log = certify_groebner(basis, ordering, skip_coprime=skip_coprime)
    if not ok:
        raise ValueError("basis is not a certified Groebner basis")
    if target is None:
        target = diff_systems[0].ring
    limits = []
    witnesses = []
    receipts = []
    for g in basis:
        lim = continuous_limit(g, steps, target=target)
        limits.append(lim)
        for r in _limit_terms(lim):
            member, recs = radical_membership(r, diff_systems, trust=True)
            receipts.extend(recs)
            if not member:
                witnesses.append(r)
    ring = basis[0].ring
    pseudo = AnalysisSystem(ring, None, list(basis), [])
    flag = "s-consistent" if not witnesses else "w-only"
    branch = BranchVerdict(pseudo, flag, witnesses=witnesses, limits=limits,
                           receipts=receipts)
    return ConsistencyVerdict([branch], flag,
                              ["single certified-basis branch"])
