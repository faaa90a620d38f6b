"""Splitting modules over a product algebra into their factor components."""
from __future__ import annotations

import numpy as np

from .algebra import AlgebraError
from .modules import FdModule, ModuleHom, reduced_basis


def _offsets(P):
    out, off = [], 0
    for B in P.factors:
        out.append(off)
        off += B.dim
    return out


def components(M: FdModule):
    """[(M_t over factor t, inclusion matrix of e_t M into M)] for each factor t."""
    P = M.algebra
    if not P.factors:
        raise AlgebraError("algebra is not a product")
    if "components" in M._cache:
        return M._cache["components"]
    F = M.field
    out = []
    for t, (B, off) in enumerate(zip(P.factors, _offsets(P))):
        U, rows = reduced_basis(F, M.action(P.idempotents[t]))
        if U.shape[1]:
            acts = np.stack([M.apply(off + i, U)[rows, :] for i in range(B.dim)])
        else:
            acts = F.zeros((B.dim, 0, 0))
        out.append((FdModule(B, np.ascontiguousarray(acts), check=False), U))
    M._cache["components"] = out
    return out


def decompose(M: FdModule) -> list[FdModule]:
    return [c for c, _ in components(M)]


def inflate(P, t: int, V: FdModule) -> FdModule:
    """A module over factor t viewed over the product (other factors act by 0)."""
    F = P.field
    acts = F.zeros((P.dim, V.dim, V.dim))
    off = _offsets(P)[t]
    acts[off:off + P.factors[t].dim] = V.actions
    return FdModule(P, acts, check=False)


def component_hom(f: ModuleHom, t: int, src=None, tgt=None) -> ModuleHom:
    """The restriction of f to the t-th components."""
    F = f.field
    (S, U), (T, W) = components(f.source)[t], components(f.target)[t]
    S, T = src or S, tgt or T
    _, rows = reduced_basis(F, W)
    mat = F.matmul(f.matrix, U)[rows, :] if W.shape[1] else F.zeros((0, U.shape[1]))
    return ModuleHom(S, T, mat, check=False)
