"""Minimal C-projective resolutions, C-summand detection, trimming, splittings."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebracore import (FdModule, ModuleError, ModuleHom, ShortExactSequence, exactness_check,
                           hom_module, image, kernel, power_module, submodule)
from ..algebracore.presentation import residues, tensor_block_matrix
from ..complexes import (DEFAULT_BOUND, BoundedComplex, Resolution, TermLabel, complex_rmatrices,
                         minimize_complex, resolution_of)
from ..semidualizing import SemidualizingError, bass_membership, is_C_projective
from .strict import GcApproximation, strict_gc_resolution, verify_proper


# -- reading C-endomorphisms as ring elements -------------------------------------

def residue_functional(C: FdModule) -> np.ndarray:
    """w with <w, vec(rho_C(r))> = residue of r, for every ring element r."""
    A, F = C.algebra, C.field
    L = A.require_local()
    H = np.ascontiguousarray(C.actions.reshape(A.dim, -1).T)
    w = F.solve(np.ascontiguousarray(H.T), L.residue.reshape(-1, 1))
    if w is None:
        raise SemidualizingError("C is not faithful")
    return w[:, 0]


@dataclass
class MinimalityVerdict:
    minimal: bool
    offending: list  # (degree, row, column) entries with unit residue

    def __bool__(self):
        return self.minimal


def is_minimal_PC(X: BoundedComplex, C: FdModule, L=None) -> MinimalityVerdict:
    """Every differential of a complex of C-powers has entries in m.

    Blocks C -> C are read back as ring elements through the homothety;
    terms must be labelled cproj and be powers of C.
    """
    for n, T in X.modules.items():
        lab = X.labels.get(n)
        if T.dim and (lab is None or lab.kind != "cproj"):
            raise ModuleError(f"term in degree {n} carries no C-power decomposition")
    _, E = complex_rmatrices(X, C)
    bad = []
    for n in sorted(E):
        res = residues(X.algebra, E[n])
        bad.extend((n, int(a), int(b)) for a, b in np.argwhere(res != 0))
    return MinimalityVerdict(not bad, bad)


# -- C-summands in images ---------------------------------------------------

@dataclass
class SummandWitness:
    rho: ModuleHom     # H_0 -> C
    iota: ModuleHom    # C -> Im(d), composed with the inclusion into H_0
    unit: object       # residue of rho o iota


def detect_C_summand_in_image(d: ModuleHom, C: FdModule, L=None) -> SummandWitness | None:
    """A copy of C inside Im(d) that splits off H_0, or None.

    Pairs a basis of Hom(C, Im d) with a basis of Hom(H_0, C) and reads the
    residue of each composite C -> C.  A nonzero residue gives rho, iota with
    rho o iota = id_C (after rescaling); all residues zero means no such copy.
    """
    F = C.field
    I, j = image(d)
    H0 = d.target
    if I.dim == 0:
        return None
    HI = hom_module(C, I)
    HR = hom_module(H0, C)
    if HI.dim == 0 or HR.dim == 0:
        return None
    w = residue_functional(C).reshape(C.dim, C.dim)
    incl = F.einsum("xi,aic->axc", j.matrix, HI.basis)            # C -> H_0
    comp = F.einsum("byx,axc->bayc", HR.basis, incl)               # C -> C
    pair = F.einsum("bayc,yc->ba", comp, w)
    nz = np.argwhere(pair != 0)
    if not len(nz):
        return None
    b, a = (int(t) for t in nz[0])
    r = pair[b, a]
    rho = ModuleHom(H0, C, F.scale(F.inv(r), HR.basis[b]), check=False)
    iota = ModuleHom(C, H0, incl[a], check=False)
    comp_ab = F.matmul(rho.matrix, iota.matrix)
    A = C.algebra
    # rho o iota is a unit homothety; rescale rho so the composite is the identity
    hm = np.ascontiguousarray(C.actions.reshape(A.dim, -1).T)
    u = F.solve(hm, comp_ab.reshape(-1, 1))
    if u is None:
        raise SemidualizingError("an endomorphism of C is not a homothety")
    uinv = A.inverse(u[:, 0])
    rho = ModuleHom(H0, C, F.matmul(C.action(uinv), rho.matrix), check=False)
    return SummandWitness(rho, iota, r)


# -- minimal C-projective resolutions ----------------------------------------------

def minimal_PC_resolution(M: FdModule, C: FdModule, L=None, bound: int = DEFAULT_BOUND,
                          seed: int = 0) -> Resolution:
    """C (x) F for a minimal free resolution F of Hom(C, M), with M in B_C.

    Terms are C^{b_i} (C (x) R^b modelled as C^b); the augmentation is
    c (x) g -> g(c) on generators g of Hom(C, M).
    """
    F = M.field
    bass = bass_membership(M, C, bound=bound, seed=seed)
    problems = []
    if not bass.member:
        problems.append(f"M is not in the Bass class (Ext: {bass.ext_status.describe()}, "
                        f"Tor: {bass.tor_status.describe()}, evaluation iso: {bass.evaluation_iso})")
    P = hom_module(C, M)
    res = resolution_of(P)
    res.extend(bound + 1)
    if res.length is None:
        problems.append(f"Hom(C,M) has infinite projective dimension within bound {bound} "
                        f"(Betti numbers {res.betti(bound)})")
    if problems:
        raise ModuleError("; ".join(problems))
    n = res.length
    mods = {i: power_module(C, res.rank(i)) for i in range(n + 1)}
    diffs = {i: ModuleHom(mods[i], mods[i - 1], tensor_block_matrix(res.rmatrix(i), C), check=False)
             for i in range(1, n + 1)}
    gens = res.gens
    cols = [P.matrix(gens[:, j]) for j in range(gens.shape[1])]
    aug = np.concatenate(cols, axis=1) if cols else F.zeros((M.dim, 0))
    labels = {i: TermLabel("cproj", res.rank(i)) for i in range(n + 1)}
    X = BoundedComplex(mods, diffs, labels, check=False)
    out = Resolution(X, ModuleHom(mods[0], M, aug, check=False), window=n, complete=True)
    out.minimal = is_minimal_PC(X, C).minimal
    out.data["bass"] = bass
    out.data["exactness_failures"] = out.augmented_exactness_failures()
    return out


def minimized_k_resolution(approx: GcApproximation, C: FdModule):
    """Minimize the C-projective resolution of K; returns (complex, data, minimality)."""
    X = approx.k_resolution.complex
    Xp, data = minimize_complex(X, C)
    return Xp, data, is_minimal_PC(Xp, C)


# -- trimming to a minimal proper resolution ------------------------------------------

@dataclass
class MinimalProperReport:
    trims: int
    condition1: bool   # terms in degrees >= 1 are C-powers
    condition2: bool   # d_n(H_n) in m H_{n-1} for n >= 2
    condition3: bool   # no C-summand of H_0 inside d_1(H_1)
    exactness_failures: list
    proper: object = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.condition1 and self.condition2 and self.condition3 and not self.exactness_failures

    def __bool__(self):
        return self.passed

    def as_dict(self):
        return {"passed": self.passed, "trims": self.trims, "condition1": self.condition1,
                "condition2": self.condition2, "condition3": self.condition3,
                "exactness_failures": list(self.exactness_failures),
                "proper": self.proper.as_dict() if self.proper is not None else None,
                "notes": list(self.notes)}


def trim_approximation(approx: GcApproximation, C: FdModule, max_iter: int | None = None):
    """Split copies of C lying in K off G until none is left.  Returns (approx', trims)."""
    K, G, M = approx.K, approx.G, approx.M
    iota, pi = approx.iota, approx.pi
    F = G.field
    trims = 0
    limit = max_iter if max_iter is not None else G.dim // max(C.dim, 1) + 1
    while trims < limit:
        w = detect_C_summand_in_image(iota, C)
        if w is None:
            break
        # G = iota(C) (+) ker rho and K = C (+) (K cap ker rho)
        G2, g_inc = kernel(w.rho)
        # K' = preimage in K of ker rho
        kr = F.kernel(F.matmul(w.rho.matrix, iota.matrix))
        K2, k_inc = submodule(K, kr)
        rows = G2._cache["ambient_rows"]
        new_iota = ModuleHom(K2, G2, F.matmul(iota.matrix, k_inc.matrix)[rows, :], check=False)
        new_pi = pi @ g_inc
        K, G, iota, pi = K2, G2, new_iota, new_pi
        trims += 1
    return GcApproximation(K, G, M, iota, pi), trims


def build_minimal_proper_gc_resolution(M: FdModule, C: FdModule, L=None, bound: int = DEFAULT_BOUND,
                                       seed: int = 0, length: int | None = None,
                                       start: GcApproximation | None = None):
    """Trim a G_C-approximation, then splice with a minimal C-projective resolution of K.

    Returns (Resolution, MinimalProperReport).  `start` supplies a ready-made
    approximation; otherwise one comes from a strict resolution of the given
    length (default: the detected gc_pd).
    """
    F = M.field
    if start is None:
        from .gcpd import gc_pd
        rep = gc_pd(M, C, bound=bound, seed=seed)
        if not rep.detected:
            raise ModuleError(f"gc_pd not detected ({rep.describe()})")
        n = length if length is not None else max(int(rep.n), 0) if rep.n != float("-inf") else 0
        start = strict_gc_resolution(M, C, n=n, bound=bound, seed=seed).approximation
    elif not exactness_check(start.sequence).exact:
        raise ModuleError("the supplied approximation is not exact")
    approx, trims = trim_approximation(start, C)
    K = approx.K
    notes = []
    if K.dim:
        kres = minimal_PC_resolution(K, C, bound=bound, seed=seed)
        kx = kres.complex
        mods = {0: approx.G}
        mods.update({i + 1: T for i, T in kx.modules.items()})
        diffs = {1: ModuleHom(mods[1], approx.G, F.matmul(approx.iota.matrix, kres.augmentation.matrix), check=False)}
        diffs.update({i + 1: d for i, d in kx.differentials.items()})
        labels = {0: TermLabel("gcproj")}
        labels.update({i + 1: lab for i, lab in kx.labels.items()})
    else:
        mods, diffs, labels = {0: approx.G}, {}, {0: TermLabel("gcproj")}
    X = BoundedComplex(mods, diffs, labels, check=False)
    res = Resolution(X, approx.pi, window=X.hi, complete=True)
    c1 = all(getattr(T, "base", None) is C for n, T in X.modules.items() if n >= 1 and T.dim)
    if X.hi >= 2:
        tail = BoundedComplex({n: X.modules[n] for n in range(1, X.hi + 1)},
                              {n: X.differentials[n] for n in range(2, X.hi + 1)},
                              {n: X.labels[n] for n in range(1, X.hi + 1)}, check=False)
        c2 = is_minimal_PC(tail, C).minimal
    else:
        c2 = True
    c3 = detect_C_summand_in_image(X.differential(1), C) is None if X.hi >= 1 else True
    report = MinimalProperReport(trims, c1, c2, c3, res.augmented_exactness_failures(), notes=notes)
    report.proper = verify_proper(res, C)
    return res, report


# -- splitting sequences of C-projectives -----------------------------------------

def split_c_projective_sequence(S: ShortExactSequence, C: FdModule, L=None, seed: int = 0) -> ModuleHom:
    """A section s of rho with rho s = id, for 0 -> C^a -> C^b -> C^c -> 0."""
    F = C.field
    for name, T in (("left", S.left), ("middle", S.middle), ("right", S.right)):
        if not is_C_projective(T, C, seed=seed).is_yes:
            raise ModuleError(f"certification missing: the {name} term is not certified C-projective")
    if not exactness_check(S).exact:
        raise ModuleError("sequence is not exact")
    H = hom_module(S.right, S.middle)
    if H.dim == 0:
        if S.right.dim:
            raise ModuleError("no section exists")
        return ModuleHom(S.right, S.middle, F.zeros((S.middle.dim, 0)), check=False)
    comps = F.einsum("yx,hxz->hyz", S.rho.matrix, H.basis)
    A = np.ascontiguousarray(comps.reshape(H.dim, -1).T)
    c = F.solve(A, F.eye(S.right.dim).reshape(-1, 1))
    if c is None:
        raise ModuleError("no section found on certified input")
    s = H.hom(c[:, 0])
    if not np.array_equal(F.matmul(S.rho.matrix, s.matrix), F.eye(S.right.dim)):
        raise ModuleError("section check failed")
    return s
