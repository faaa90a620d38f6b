"""Strict G_C-projective resolutions by iterated pushouts, properness, relative (co)homology."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebracore import (FdModule, ModuleError, ModuleHom, ShortExactSequence,
                           hom_module, identity, kernel, postcompose, power_module, precompose,
                           pushout, regular_module, tensor_hom, tensor_module)
from ..algebracore.presentation import minimal_generators
from ..complexes import DEFAULT_BOUND, BoundedComplex, Resolution, TermLabel, resolution_of
from ..semidualizing import is_totally_C_reflexive
from .gcpd import gc_pd


def dual_embedding(G: FdModule, C: FdModule) -> ModuleHom:
    """G -> C^a, g -> (f_j(g)) for minimal generators f_j of Hom(G, C).

    Injective when G is totally C-reflexive; this is the first map of the
    C-projective side of its complete PC-resolution.
    """
    F = G.field
    H = hom_module(G, C)
    gens = minimal_generators(H)
    a = gens.shape[1]
    target = power_module(C, a)
    if a == 0:
        return ModuleHom(G, target, F.zeros((0, G.dim)), check=False)
    mat = np.concatenate([H.matrix(gens[:, j]) for j in range(a)], axis=0)
    return ModuleHom(G, target, mat, check=False)


@dataclass
class ProperCheckReport:
    family: list                    # names of the test modules
    failures: list                  # (member name, degree) where Hom(H, X) is not exact
    checked: int

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.passed

    def as_dict(self):
        return {"passed": self.passed, "family": list(self.family),
                "failures": [[m, d] for m, d in self.failures], "checked": self.checked}


@dataclass
class GcApproximation:
    """0 -> K -> G -> M -> 0 with G G_C-projective and a bounded C-projective resolution of K."""

    K: FdModule
    G: FdModule
    M: FdModule
    iota: ModuleHom
    pi: ModuleHom
    k_resolution: Resolution | None = None

    @property
    def sequence(self) -> ShortExactSequence:
        return ShortExactSequence(self.iota, self.pi)


@dataclass
class StrictGcResolution:
    """0 -> C^{a_n} -> ... -> C^{a_1} -> G -> M -> 0 in degrees n..0 (M augmented)."""

    resolution: Resolution
    c_ranks: list                                # a_1, ..., a_n
    G: FdModule
    G_report: object
    approximation: GcApproximation
    proper: ProperCheckReport | None = None
    exactness_failures: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def length(self):
        return len(self.c_ranks)

    @property
    def verified(self) -> bool:
        return (not self.exactness_failures and self.G_report.verdict and self.labels_ok
                and (self.proper is None or self.proper.passed))

    @property
    def labels_ok(self) -> bool:
        X = self.resolution.complex
        C = self.data["C"]
        for i, a in enumerate(self.c_ranks, start=1):
            T = X.modules[i]
            if T.dim == 0 and a == 0:
                continue
            if not (getattr(T, "base", None) is C and T.rank == a):
                return False
        return True


def strict_gc_resolution(M: FdModule, C: FdModule, L=None, n: int = 1, bound: int = DEFAULT_BOUND,
                         seed: int = 0, extra=()) -> StrictGcResolution:
    """A strict G_C-projective resolution of length n (padded if n exceeds gc_pd).

    The free resolution is cut at stage n, where the kernel G_n = Omega^n M is
    totally C-reflexive.  Each step embeds the current left-end module into
    C^a (dual embedding) and pushes out along its map to the next free term,
    which turns one free term into a G_C-projective one and leaves a
    C-projective term behind.
    """
    F = M.field
    rep = gc_pd(M, C, bound=bound, seed=seed)
    if not rep.detected or rep.n > n:
        raise ModuleError(f"gc_pd not detected at most {n} ({rep.describe()})")
    res = resolution_of(M)
    res.extend(n)
    if n == 0:
        G = M
        eta = None
    else:
        G, eta = res.syzygy_with_inclusion(n)  # Omega^n -> F_{n-1}
    us, psis = {}, {}
    cur = G
    for j in range(n, 0, -1):
        psi = dual_embedding(cur, C)               # cur -> C^{a_j}
        if not psi.is_injective():
            raise ModuleError(f"dual embedding of stage {j} is not injective")
        po = pushout(psi, eta)                     # H_{j-1}
        H = po.module
        Cpow = psi.target
        Fj = eta.target
        if j >= 2:
            dnext = ModuleHom(Fj, res.free(j - 2), res.kmatrix(j - 1), check=False)
        else:
            dnext = ModuleHom(Fj, M, res.eps, check=False)
        zero = ModuleHom(Cpow, dnext.target, F.zeros((dnext.target.dim, Cpow.dim)), check=False)
        eta_next = po.induced(zero, dnext)      # H_{j-1} -> F_{j-2} (or -> M)
        us[j], psis[j] = po.u, psi
        cur, eta = H, eta_next
    G0 = cur
    aug = eta if n else identity(M)
    # assemble 0 -> C^{a_n} -> ... -> C^{a_1} -> G0
    mods = {0: G0}
    diffs = {}
    ranks = []
    for j in range(1, n + 1):
        mods[j] = psis[j].target
        ranks.append(psis[j].target.rank)
    for j in range(1, n + 1):
        if j == 1:
            diffs[1] = us[1]
        else:
            diffs[j] = ModuleHom(mods[j], mods[j - 1], F.matmul(psis[j - 1].matrix, us[j].matrix), check=False)
    labels = {0: TermLabel("gcproj")}
    labels.update({j: TermLabel("cproj", ranks[j - 1]) for j in range(1, n + 1)})
    X = BoundedComplex(mods, diffs, labels, check=False)
    resol = Resolution(X, aug, window=n, complete=True)
    Grep = is_totally_C_reflexive(G0, C, bound=bound, seed=seed)
    K, kinc = kernel(aug)
    approx = GcApproximation(K, G0, M, kinc, aug, _k_resolution(X, K, kinc, C, ranks))
    out = StrictGcResolution(resol, ranks, G0, Grep, approx, data={"C": C})
    out.exactness_failures = resol.augmented_exactness_failures()
    out.proper = verify_proper(resol, C, extra)
    return out


def _k_resolution(X: BoundedComplex, K, kinc, C, ranks):
    """0 -> C^{a_n} -> ... -> C^{a_1} -> K as a Resolution (degrees shifted down by one)."""
    F = X.field
    n = len(ranks)
    if n == 0:
        cx = BoundedComplex({0: power_module(C, 0)}, labels={0: TermLabel("cproj", 0)}, check=False)
        return Resolution(cx, ModuleHom(cx.modules[0], K, F.zeros((K.dim, 0)), check=False), window=0, complete=True)
    mods = {j - 1: X.modules[j] for j in range(1, n + 1)}
    diffs = {j - 1: X.differentials[j] for j in range(2, n + 1)}
    labels = {j - 1: X.labels[j] for j in range(1, n + 1)}
    cx = BoundedComplex(mods, diffs, labels, check=False)
    rows = K._cache["ambient_rows"]
    aug = ModuleHom(mods[0], K, X.differentials[1].matrix[rows, :], check=False)
    return Resolution(cx, aug, window=n - 1, complete=True)


def verify_proper(res: Resolution, C: FdModule, extra=()) -> ProperCheckReport:
    """Hom(H, -) exactness of the augmented complex for H in {R, C, G_C terms} + extra."""
    X = res.augmented()
    A = X.algebra
    fam = [("R", regular_module(A)), ("C", C)]
    for n, lab in sorted(res.complex.labels.items()):
        if lab.kind == "gcproj" and res.complex.modules[n].dim:
            fam.append((f"X_{n}", res.complex.modules[n]))
    for i, H in enumerate(extra):
        fam.append((H.name or f"extra_{i}", H))
    failures = []
    checked = 0
    for name, H in fam:
        Hs = {n: hom_module(H, T) for n, T in X.modules.items()}
        maps = {n: postcompose(Hs[n], Hs[n - 1], d) for n, d in X.differentials.items()}
        rank = {n: m.rank for n, m in maps.items()}
        for n in range(X.lo, X.hi + 1):
            rin = rank.get(n + 1, 0)
            rout = rank.get(n, 0) if n > X.lo else 0
            checked += 1
            if rin != Hs[n].dim - rout:
                failures.append((name, n))
    return ProperCheckReport([name for name, _ in fam], failures, checked)


# -- relative (co)homology -----------------------------------------------------

@dataclass
class RelativeTable:
    kind: str
    bound: int
    dims: list
    resolution_length: int
    check_dims: list | None = None   # the same table from a padded resolution
    absolute_dims: list | None = None

    @property
    def well_defined(self) -> bool | None:
        return None if self.check_dims is None else self.check_dims == self.dims


def _hom_cohomology(X: BoundedComplex, N: FdModule, bound: int) -> list[int]:
    Hs = {n: hom_module(T, N) for n, T in X.modules.items()}
    rank = {n: precompose(Hs[n - 1], Hs[n], d).rank for n, d in X.differentials.items()}
    return [Hs[i].dim - rank.get(i + 1, 0) - rank.get(i, 0) if i in Hs else 0 for i in range(bound + 1)]


def _tensor_homology(X: BoundedComplex, N: FdModule, bound: int) -> list[int]:
    Ts = {n: tensor_module(T, N) for n, T in X.modules.items()}
    idN = identity(N)
    rank = {n: tensor_hom(Ts[n], Ts[n - 1], d, idN).rank for n, d in X.differentials.items()}
    return [Ts[i].dim - rank.get(i, 0) - rank.get(i + 1, 0) if i in Ts else 0 for i in range(bound + 1)]


def relative_cohomology(M: FdModule, N: FdModule, C: FdModule, L=None, bound: int = DEFAULT_BOUND,
                        kind: str = "ext", seed: int = 0, padding: int = 1) -> RelativeTable:
    """Relative Ext^n(M, N) = H^n Hom(X, N) or relative Tor_n = H_n(X (x) N) for a strict X.

    The table is computed from the strict resolution of the detected length
    and recomputed from one padded by `padding` extra steps.
    """
    rep = gc_pd(M, C, bound=bound, seed=seed)
    if not rep.detected:
        raise ModuleError(f"gc_pd not detected ({rep.describe()})")
    m = max(int(rep.n), 0) if rep.n != float("-inf") else 0
    fn = _hom_cohomology if kind == "ext" else _tensor_homology
    if kind not in ("ext", "tor"):
        raise ValueError(f"unknown kind {kind!r}")
    X = strict_gc_resolution(M, C, n=m, bound=bound, seed=seed)
    dims = fn(X.resolution.complex, N, bound)
    check = None
    if padding:
        Y = strict_gc_resolution(M, C, n=m + padding, bound=bound, seed=seed)
        check = fn(Y.resolution.complex, N, bound)
    from ..complexes import ext, tor
    absolute = (ext if kind == "ext" else tor)(M, N, bound).dims if M.algebra.is_local else None
    return RelativeTable(kind, bound, dims, m, check, absolute)
