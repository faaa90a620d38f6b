"""Splitting contractible summands off complexes of free or C-projective modules."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebracore import (FdModule, FreeModule, ModuleError, ModuleHom, PowerModule, power_module,
                           regular_module)
from ..algebracore.presentation import residues, tensor_block_matrix
from .complex import BoundedComplex, TermLabel


def rmat_mul(A, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Product of R-matrices (a, b, n) and (b, c, n)."""
    F = A.field
    if X.shape[1] == 0 or X.shape[0] == 0 or Y.shape[1] == 0:
        return F.zeros((X.shape[0], Y.shape[1], A.dim))
    T = F.einsum("abi,ijk->abjk", X, A.structure)
    a, b, n, _ = T.shape
    T = np.ascontiguousarray(T.transpose(0, 3, 1, 2)).reshape(a * n, b * n)
    Yf = np.ascontiguousarray(Y.transpose(0, 2, 1)).reshape(b * n, Y.shape[1])
    return np.ascontiguousarray(F.matmul(T, Yf).reshape(a, n, -1).transpose(0, 2, 1))


def rmat_identity(A, b: int) -> np.ndarray:
    E = A.field.zeros((b, b, A.dim))
    for j in range(b):
        E[j, j] = A.unit
    return E


def _base_and_rank(M: FdModule, label: TermLabel, base: FdModule):
    """Rank of M as a power of `base`, or an error if it is not one."""
    if M.dim == 0:
        return 0
    if isinstance(M, PowerModule) and (M.base is base or np.array_equal(M.base.actions, base.actions)):
        return M.rank
    if M.dim == base.dim and np.array_equal(M.actions, base.actions):
        return 1
    raise ModuleError(f"term labelled {label} is not a power of the expected module")


class _Homothety:
    """Reads dB x dB blocks that are actions of ring elements back as elements."""

    def __init__(self, B: FdModule):
        F = B.field
        self.B = B
        self.H = np.ascontiguousarray(B.actions.reshape(B.algebra.dim, -1).T)
        if F.rank(self.H) != B.algebra.dim:
            raise ModuleError("the base module is not faithful, entries are not well defined")

    def rmatrix(self, mat: np.ndarray, bt: int, bs: int) -> np.ndarray:
        F = self.B.field
        d, n = self.B.dim, self.B.algebra.dim
        if bt == 0 or bs == 0:
            return F.zeros((bt, bs, n))
        blocks = mat.reshape(bt, d, bs, d).transpose(0, 2, 1, 3).reshape(bt * bs, d * d)
        sol = F.solve(self.H, np.ascontiguousarray(blocks.T))
        if sol is None:
            raise ModuleError("a differential block is not multiplication by a ring element")
        return np.ascontiguousarray(sol.T.reshape(bt, bs, n))


@dataclass
class MinimizationData:
    """Chain maps p: X -> X' and i: X' -> X with p i = id, and the pivots used."""

    projection: dict
    inclusion: dict
    eliminations: list = field(default_factory=list)
    rmatrices: dict = field(default_factory=dict)


def complex_rmatrices(X: BoundedComplex, base: FdModule):
    """(ranks, R-matrices) of a complex whose terms are powers of `base`."""
    hm = _Homothety(base)
    ranks = {n: _base_and_rank(X.modules[n], X.labels.get(n), base) for n in X.modules}
    E = {n: hm.rmatrix(X.differentials[n].matrix, ranks[n - 1], ranks[n]) for n in X.differentials}
    return ranks, E


def _common_base(X: BoundedComplex, C):
    kinds = set()
    for n, M in X.modules.items():
        lab = X.labels.get(n)
        if lab is None or lab.kind not in ("free", "cproj"):
            if M.dim == 0:
                continue
            raise ModuleError(f"term in degree {n} is not labelled free or C-projective")
        if M.dim:
            kinds.add(lab.kind)
    if len(kinds) > 1:
        raise ModuleError("complex mixes free and C-projective terms")
    kind = kinds.pop() if kinds else "free"
    if kind == "cproj":
        if C is None:
            raise ModuleError("C-projective terms need the module C")
        return kind, C
    return kind, regular_module(X.algebra)


def is_minimal_complex(X: BoundedComplex, C=None) -> bool:
    """All differential entries lie in the maximal ideal."""
    _, base = _common_base(X, C)
    _, E = complex_rmatrices(X, base)
    F = X.field
    return all(F.is_zero(residues(X.algebra, e)) for e in E.values())


def minimize_complex(X: BoundedComplex, C: FdModule | None = None, L=None):
    """Remove unit pivots until every differential entry lies in m.

    Each unit entry alpha of d_n splits off a contractible summand
    0 -> B -> B -> 0; the remaining differential is eps - gamma alpha^-1 delta.
    Returns (X', MinimizationData).
    """
    A = X.algebra
    if L is None:
        A.require_local()
    F = A.field
    kind, base = _common_base(X, C)
    ranks, E = complex_rmatrices(X, base)
    P = {n: rmat_identity(A, ranks[n]) for n in ranks}
    I = {n: rmat_identity(A, ranks[n]) for n in ranks}
    log = []
    while True:
        pivot = None
        for n in sorted(E):
            res = residues(A, E[n])
            nz = np.argwhere(res != 0)
            if len(nz):
                l, j = min((int(b), int(a)) for a, b in nz)
                pivot = (n, j, l)
                break
        if pivot is None:
            break
        n, j, l = pivot
        log.append(pivot)
        D = E[n]
        ainv = A.inverse(D[j, l])
        rj = [a for a in range(D.shape[0]) if a != j]
        rl = [b for b in range(D.shape[1]) if b != l]
        gamma = D[rj][:, [l]]                       # (b2-1, 1, n)
        delta = D[[j]][:, rl]                       # (1, b1-1, n)
        ga = rmat_mul(A, gamma, ainv.reshape(1, 1, -1))   # gamma alpha^-1
        ad = rmat_mul(A, ainv.reshape(1, 1, -1), delta)   # alpha^-1 delta
        E[n] = F.sub(D[rj][:, rl], rmat_mul(A, ga, delta))
        if n + 1 in E:
            E[n + 1] = np.ascontiguousarray(E[n + 1][rl])
        if n - 1 in E:
            E[n - 1] = np.ascontiguousarray(E[n - 1][:, rj])
        # chain maps
        P[n] = np.ascontiguousarray(P[n][rl])
        I[n] = F.sub(I[n][:, rl], rmat_mul(A, I[n][:, [l]], ad))
        P[n - 1] = F.sub(P[n - 1][rj], rmat_mul(A, ga, P[n - 1][[j]]))
        I[n - 1] = np.ascontiguousarray(I[n - 1][:, rj])
        ranks[n] -= 1
        ranks[n - 1] -= 1
    lab = "cproj" if kind == "cproj" else "free"
    mods = {n: power_module(base, ranks[n]) if kind == "cproj" else
            FreeModule(A, ranks[n]) for n in ranks}
    diffs = {n: ModuleHom(mods[n], mods[n - 1], tensor_block_matrix(E[n], base), check=False) for n in E}
    Xp = BoundedComplex(mods, diffs, {n: TermLabel(lab, ranks[n]) for n in ranks}, check=False)
    proj = {n: ModuleHom(X.modules[n], mods[n], tensor_block_matrix(P[n], base), check=False) for n in ranks}
    inc = {n: ModuleHom(mods[n], X.modules[n], tensor_block_matrix(I[n], base), check=False) for n in ranks}
    return Xp, MinimizationData(proj, inc, log, dict(E))
