"""Deterministic JSON serialization of results, receipts included."""

from __future__ import annotations

import json

from .consistency import BranchVerdict, ConsistencyVerdict
from .groebner import GroebnerResult
from .limits import LimitResult
from .numeric import GridRun
from .parser import print_poly_expr
from .poly import DiffPoly
from .reduction import ReductionReceipt
from .render import render_poly
from .thomas import AnalysisSystem


def _poly(p: DiffPoly) -> str:
    return render_poly(p)


def _monomial_str(field, gamma) -> str:
    parts = []
    for name, e in zip(field.params, gamma):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append("%s^%d" % (name, e))
    return "*".join(parts) if parts else "1"


def receipt_dict(r: ReductionReceipt) -> dict:
    return {
        "input": _poly(r.input),
        "remainder": _poly(r.remainder),
        "multiplier": _poly(r.multiplier),
        "cofactors": [
            {"equation": int(i), "shift": list(theta), "cofactor": _poly(c)}
            for (i, theta), c in sorted(r.cofactors.items())],
        "steps": [{"equation": int(i), "shift": list(t), "degree": d}
                  for i, t, d in r.steps],
    }


def limit_dict(lim: LimitResult) -> dict:
    field = lim.terms[0][1].ring.field if lim.terms else None
    return {
        "degree": lim.degree,
        "terms": [{"m": _monomial_str(field, gamma), "r": _poly(r)}
                  for gamma, r in lim.terms],
        "q": _monomial_str(field, lim.q) if field else "1",
        "truncation": lim.truncation,
    }


def system_dict(S: AnalysisSystem, receipts: bool = False) -> dict:
    out = {
        "equations": [_poly(p) for p in S.equations],
        "inequations": [_poly(g) for g in S.inequations],
        "splitPath": list(S.split_path),
        "degenerate": S.degenerate,
    }
    if receipts:
        out["events"] = [
            {k: (receipt_dict(v) if isinstance(v, ReductionReceipt)
                 else _poly(v) if isinstance(v, DiffPoly)
                 else list(v) if isinstance(v, tuple)
                 else v)
             for k, v in ev.items()}
            for ev in S.events]
    return out


def decomposition_json(branches: list[AnalysisSystem],
                       receipts: bool = False) -> str:
    return json.dumps([system_dict(b, receipts) for b in branches], indent=2)


def groebner_dict(res: GroebnerResult) -> dict:
    return {
        "basis": [_poly(p) for p in res.basis],
        "status": res.status,
        "spolyLog": [
            {"pair": list(e["pair"]),
             "theta": [list(t) for t in e["theta"]],
             "zero": e["zero"]}
            for e in res.spoly_log],
        "pendingPairs": len(res.pending),
    }


def verdict_dict(v: ConsistencyVerdict, receipts: bool = False) -> dict:
    def branch(b: BranchVerdict) -> dict:
        out = {
            "flag": b.flag,
            "degenerate": b.degenerate,
            "equations": [_poly(p) for p in b.system.equations],
            "inequations": [_poly(g) for g in b.system.inequations],
            "witnesses": [_poly(w) for w in b.witnesses],
            "limits": [limit_dict(l) for l in b.limits],
        }
        if b.dropped_reason:
            out["droppedReason"] = b.dropped_reason
        if b.matched_system is not None:
            out["matchedSystem"] = b.matched_system
        if receipts:
            out["receipts"] = [receipt_dict(r) for r in b.receipts]
        return out
    return {
        "overall": v.overall,
        "branches": [branch(b) for b in v.branches],
        "notes": v.notes,
    }


def gridrun_dict(run: GridRun) -> dict:
    return {
        "scheme": run.scheme,
        "h": run.h,
        "C": run.C,
        "domain": [run.X, run.Y],
        "maxError": run.max_error,
        "argmax": list(run.argmax),
        "residualMax": run.residual_max,
        "seeded": run.seeded,
    }


def gridrun_csv(run: GridRun) -> str:
    lines = ["x,y,error"]
    nx, ny = run.error.shape
    for i in range(nx):
        for j in range(ny):
            lines.append("%.17g,%.17g,%.17g"
                         % (i * run.h, j * run.h, run.error[i, j]))
    return "\n".join(lines) + "\n"
