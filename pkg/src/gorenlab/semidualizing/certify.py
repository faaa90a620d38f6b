"""Semidualizing certification, Bass class membership, C-projectivity, total reflexivity."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..algebracore import (FdModule, IsoResult, ModuleError, ModuleHom, Verdict, direct_sum,
                           find_isomorphism, hom_module, ideal_module, power_module, tensor_module,
                           zero_module)
from ..complexes import DEFAULT_BOUND, WindowStatus, ext, periodicity_of, tor, window_status
from .maps import biduality_map, evaluation_map, homothety_map


class SemidualizingError(ModuleError):
    """Raised when an operation needs a certified semidualizing module."""


@dataclass
class SemidualizingReport:
    candidate: FdModule
    homothety: ModuleHom
    homothety_iso: bool
    ext_status: WindowStatus
    ext_dims: list
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.homothety_iso and self.ext_status.ok

    def __bool__(self):
        return self.passed


def check_semidualizing(C: FdModule, L=None, bound: int = DEFAULT_BOUND, seed: int = 0) -> SemidualizingReport:
    """Homothety R -> Hom(C, C) bijective and Ext^i(C, C) = 0 for 1 <= i <= bound."""
    key = ("semidualizing", bound, seed)
    if key in C._cache:
        return C._cache[key]
    A = C.algebra
    chi = homothety_map(C)
    H = chi.target
    notes = ["finite resolutions: automatic for finitely generated modules"]
    iso = H.dim == A.dim and chi.rank == A.dim
    if H.dim != A.dim:
        notes.append(f"homothety dimension obstruction: dim Hom(C,C) = {H.dim} != {A.dim} = dim R")
    elif not iso:
        notes.append(f"homothety map has rank {chi.rank} < {A.dim}")
    table = ext(C, C, bound)
    status = window_status(table.positive_dims(), bound)
    if status.ok:
        status = window_status(table.positive_dims(), bound, periodicity_of(C, bound, seed=seed))
    report = SemidualizingReport(C, chi, iso, status, table.dims, notes)
    C._cache[key] = report
    return report


def require_semidualizing(C: FdModule, bound: int = DEFAULT_BOUND, seed: int = 0) -> SemidualizingReport:
    rep = check_semidualizing(C, bound=bound, seed=seed)
    if not rep.passed:
        raise SemidualizingError("C is not certified semidualizing: " + "; ".join(rep.notes[1:] or
                                 [f"Ext^{rep.ext_status.degree}(C,C) != 0"]))
    return rep


# -- Bass class --------------------------------------------------------------

@dataclass
class BassReport:
    ext_status: WindowStatus      # Ext^{>=1}(C, N) = 0
    tor_status: WindowStatus      # Tor_{>=1}(C, Hom(C, N)) = 0
    evaluation_iso: bool          # C (x) Hom(C, N) -> N bijective
    evaluation: ModuleHom
    ext_dims: list
    tor_dims: list

    @property
    def member(self) -> bool:
        return self.ext_status.ok and self.tor_status.ok and self.evaluation_iso

    def __bool__(self):
        return self.member


def bass_membership(N: FdModule, C: FdModule, L=None, bound: int = DEFAULT_BOUND, seed: int = 0) -> BassReport:
    key = ("bass", id(C), bound, seed)
    hit = N._cache.get(key)
    if hit is not None and hit[0] is C:
        return hit[1]
    e = ext(C, N, bound)
    HC = hom_module(C, N)
    t = tor(C, HC, bound)
    nu = evaluation_map(C, N)
    se, st = window_status(e.positive_dims(), bound), window_status(t.positive_dims(), bound)
    if se.ok or st.ok:
        cert = periodicity_of(C, bound, seed=seed)
        se = window_status(e.positive_dims(), bound, cert)
        st = window_status(t.positive_dims(), bound, cert)
    rep = BassReport(se, st, nu.is_isomorphism(), nu, e.dims, t.dims)
    N._cache[key] = (C, rep)
    return rep


# -- C-projective modules ----------------------------------------------------

@dataclass
class CProjectiveResult:
    verdict: Verdict
    rank: object = None            # an int, or a tuple of per-factor ranks
    witness: ModuleHom | None = None  # M -> C^rank
    certificate: dict = field(default_factory=dict)

    @property
    def is_yes(self):
        return self.verdict is Verdict.YES

    @property
    def is_no(self):
        return self.verdict is Verdict.NO


def c_power(C: FdModule, r: int) -> FdModule:
    return power_module(C, r)


def is_C_projective(M: FdModule, C: FdModule, L=None, seed: int = 0, bound: int = DEFAULT_BOUND) -> CProjectiveResult:
    """Is M isomorphic to C (x) P with P projective?

    Over a local ring P is free, so M must be C^r with r = dim M / dim C.
    Over a product the rank may differ on each factor.
    """
    A = M.algebra
    if C.dim == 0:
        raise ModuleError("C must be nonzero")
    if A.is_local:
        if M.dim % C.dim:
            return CProjectiveResult(Verdict.NO, certificate={"kind": "ratio", "dims": [M.dim, C.dim]})
        r = M.dim // C.dim
        iso = find_isomorphism(M, c_power(C, r), seed=seed)
        return _from_iso(iso, r, M, C, bound, seed)
    if not A.factors:
        A.require_local()
    from ..algebracore.product import decompose
    ranks = []
    for Mt, Ct in zip(decompose(M), decompose(C)):
        if Ct.dim == 0 or Mt.dim % Ct.dim:
            if Mt.dim == 0:
                ranks.append(0)
                continue
            return CProjectiveResult(Verdict.NO, certificate={"kind": "ratio", "dims": [Mt.dim, Ct.dim]})
        ranks.append(Mt.dim // Ct.dim)
    parts = [power_module(ideal_module(A, [e]), r) for e, r in zip(A.idempotents, ranks) if r]
    target = tensor_module(C, direct_sum(*parts).module) if parts else zero_module(A)
    iso = find_isomorphism(M, target, seed=seed)
    return _from_iso(iso, tuple(ranks), M, C, bound, seed)


def _from_iso(iso: IsoResult, r, M, C, bound, seed) -> CProjectiveResult:
    if iso.is_yes:
        return CProjectiveResult(Verdict.YES, r, iso.witness)
    if iso.is_no:
        return CProjectiveResult(Verdict.NO, r, certificate=dict(iso.certificate))
    bass = bass_membership(M, C, bound=bound, seed=seed)
    if not bass.member:
        return CProjectiveResult(Verdict.NO, r, certificate={"kind": "bass", "ext": bass.ext_status.describe(),
                                                             "tor": bass.tor_status.describe(),
                                                             "evaluation_iso": bass.evaluation_iso})
    return CProjectiveResult(Verdict.UNKNOWN, r, certificate=dict(iso.certificate))


# -- total reflexivity -------------------------------------------------------

@dataclass
class TotCRefReport:
    biduality_iso: bool
    ext_status: WindowStatus       # Ext^{>=1}(M, C)
    dual_ext_status: WindowStatus  # Ext^{>=1}(Hom(M, C), C)
    biduality: ModuleHom
    ext_dims: list
    dual_ext_dims: list

    @property
    def verdict(self) -> bool:
        return self.biduality_iso and self.ext_status.ok and self.dual_ext_status.ok

    def __bool__(self):
        return self.verdict

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "biduality_iso": self.biduality_iso,
                "ext": self.ext_status.as_dict(), "dual_ext": self.dual_ext_status.as_dict(),
                "ext_dims": list(self.ext_dims), "dual_ext_dims": list(self.dual_ext_dims)}


def is_totally_C_reflexive(M: FdModule, C: FdModule, L=None, bound: int = DEFAULT_BOUND,
                           seed: int = 0) -> TotCRefReport:
    """Biduality M -> Hom(Hom(M,C),C) bijective and both Ext families vanish on 1..bound."""
    require_semidualizing(C, bound, seed)
    key = ("totref", id(C), bound, seed)
    hit = M._cache.get(key)
    if hit is not None and hit[0] is C:
        return hit[1]
    delta = biduality_map(M, C)
    iso = delta.is_isomorphism()
    e1 = ext(M, C, bound)
    Md = hom_module(M, C)
    e2 = ext(Md, C, bound)
    # periodicity searches only when they can upgrade a clean window
    s1 = window_status(e1.positive_dims(), bound)
    if s1.ok:
        s1 = window_status(e1.positive_dims(), bound, periodicity_of(M, bound, seed=seed))
    s2 = window_status(e2.positive_dims(), bound)
    if s2.ok:
        s2 = window_status(e2.positive_dims(), bound, periodicity_of(Md, bound, seed=seed))
    rep = TotCRefReport(iso, s1, s2, delta, e1.dims, e2.dims)
    M._cache[key] = (C, rep)
    return rep
