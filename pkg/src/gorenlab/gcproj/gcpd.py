"""G_C-projectivity and G_C-projective dimension within a window."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..algebracore import FdModule, regular_module
from ..complexes import DEFAULT_BOUND, depth, ext, ext_dim, resolution_of
from ..semidualizing import (CompletePCResolution, TotCRefReport, build_complete_PC,
                             is_totally_C_reflexive, require_semidualizing)

COMPLETE_PC_WINDOW = 3


@dataclass
class GcProjectiveResult:
    verdict: bool
    report: TotCRefReport | None
    complete_pc: CompletePCResolution | None = None
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict


def is_gc_projective(M: FdModule, C: FdModule, L=None, bound: int = DEFAULT_BOUND, seed: int = 0,
                     window: int = COMPLETE_PC_WINDOW) -> GcProjectiveResult:
    """Total C-reflexivity, plus a verified complete PC-resolution when it holds."""
    A = M.algebra
    if not A.is_local and A.factors:
        from ..algebracore.product import decompose
        parts = [is_gc_projective(Mt, Ct, bound=bound, seed=seed, window=window)
                 for Mt, Ct in zip(decompose(M), decompose(C))]
        return GcProjectiveResult(all(p.verdict for p in parts), None,
                                  notes=["computed on each local factor"] + [n for p in parts for n in p.notes])
    rep = is_totally_C_reflexive(M, C, bound=bound, seed=seed)
    if not rep.verdict:
        return GcProjectiveResult(False, rep)
    X = build_complete_PC(M, C, window=window, seed=seed)
    ok = X.verification.passed
    notes = [] if ok else ["complete PC-resolution failed verification"]
    return GcProjectiveResult(ok, rep, X, notes)


@dataclass
class SyzygyCheck:
    n: int
    verdict: bool
    reason: str
    report: TotCRefReport | None = None

    def as_dict(self):
        out = {"n": self.n, "verdict": self.verdict, "reason": self.reason}
        if self.report is not None:
            out["totref"] = self.report.as_dict()
        return out


@dataclass
class GcPdReport:
    detected: bool
    n: float | int | None          # detected value (-inf for the zero module)
    bound: int
    checks: list
    ext_dims: list                 # dim Ext^i(M, C), 0 <= i <= bound
    sup_value: float | int | None  # sup{i <= bound : Ext^i(M, C) != 0}
    sup_consistent: bool | None
    ab_value: float | int | None   # depth R - depth M
    ab_consistent: bool | None
    notes: list = field(default_factory=list)
    components: list = field(default_factory=list)

    def describe(self) -> str:
        if self.detected:
            return f"Detected({_fmt(self.n)})"
        return f"NotDetected({self.bound})"

    def __bool__(self):
        return self.detected

    def as_dict(self) -> dict:
        out = {"verdict": self.describe(), "detected": self.detected, "bound": self.bound,
               "ext_dims": list(self.ext_dims), "sup_value": _fmt(self.sup_value),
               "sup_consistent": self.sup_consistent, "ab_value": _fmt(self.ab_value),
               "ab_consistent": self.ab_consistent, "checks": [c.as_dict() for c in self.checks],
               "notes": list(self.notes)}
        if self.detected:
            out["n"] = _fmt(self.n)
        if self.components:
            out["components"] = [c.as_dict() for c in self.components]
        return out


def _fmt(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _sup(dims):
    nz = [i for i, d in enumerate(dims) if d]
    return max(nz) if nz else -math.inf


def gc_pd(M: FdModule, C: FdModule, L=None, bound: int = DEFAULT_BOUND, seed: int = 0) -> GcPdReport:
    """Scan Omega^0 M, Omega^1 M, ... for the first totally C-reflexive syzygy.

    Omega^n M fails at once when Ext^{n+1}(M, C) = Ext^1(Omega^n M, C) is
    nonzero; otherwise its full total-reflexivity report is computed.  A
    detected value is cross-checked against sup{i : Ext^i(M, C) != 0} and
    against depth R - depth M.
    """
    key = ("gc_pd", id(C), bound, seed)
    hit = M._cache.get(key)
    if hit is not None and hit[0] is C:
        return hit[1]
    A = M.algebra
    if not A.is_local and A.factors:
        rep = _gc_pd_product(M, C, bound, seed)
    else:
        rep = _gc_pd_local(M, C, bound, seed)
    M._cache[key] = (C, rep)
    return rep


def _gc_pd_local(M, C, bound, seed):
    A = M.algebra
    A.require_local()
    require_semidualizing(C, bound, seed)
    dims = ext(M, C, bound).dims
    sup = _sup(dims)
    if M.dim == 0:
        n = -math.inf
        return GcPdReport(True, n, bound, [], dims, sup, sup == n, _ab(M), _ab(M) == n,
                          notes=["zero module"])
    res = resolution_of(M)
    checks = []
    found = None
    for n in range(bound + 1):
        e = ext_dim(M, C, n + 1)
        if e:
            checks.append(SyzygyCheck(n, False, f"Ext^{n + 1}(M,C) = Ext^1(Omega^{n} M, C) has dim {e}"))
            continue
        G = res.syzygy(n)
        rep = is_totally_C_reflexive(G, C, bound=bound, seed=seed)
        checks.append(SyzygyCheck(n, rep.verdict, "totally C-reflexive" if rep.verdict else "not totally C-reflexive", rep))
        if rep.verdict:
            found = n
            break
    ab = _ab(M)
    if found is None:
        return GcPdReport(False, None, bound, checks, dims, sup, None, ab, None)
    sup_ok = sup == found if found > 0 else sup == 0 or sup == -math.inf
    return GcPdReport(True, found, bound, checks, dims, sup, sup_ok, ab, ab == found)


def _ab(M):
    """depth R - depth M (artinian rings have depth 0)."""
    A = M.algebra
    dR = depth(regular_module(A))
    dM = depth(M)
    if dR is None or dM is None:
        return None
    return dR - dM


def _gc_pd_product(M, C, bound, seed):
    from ..algebracore.product import decompose
    parts = [gc_pd(Mt, Ct, bound=bound, seed=seed) for Mt, Ct in zip(decompose(M), decompose(C))]
    dims = ext(M, C, bound).dims
    sup = _sup(dims)
    notes = ["computed on each local factor; depth identity not applicable to a product"]
    if not all(p.detected for p in parts):
        return GcPdReport(False, None, bound, [], dims, sup, None, None, None, notes, parts)
    n = max(p.n for p in parts)
    sup_ok = sup == n if n > 0 else sup in (0, -math.inf)
    return GcPdReport(True, n, bound, [], dims, sup, sup_ok, None, None, notes, parts)
