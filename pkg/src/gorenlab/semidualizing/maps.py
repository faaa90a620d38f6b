"""Natural maps: homothety, tensor evaluation, evaluation and biduality."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebracore import (FdModule, ModuleHom, free_module, hom_module, regular_module,
                           tensor_module)
from ..complexes import DEFAULT_BOUND, ext


def homothety_map(C: FdModule) -> ModuleHom:
    """R -> Hom(C, C), r -> multiplication by r."""
    A = C.algebra
    H = hom_module(C, C)
    R = regular_module(A)
    mat = H.coords(C.actions) if H.dim else A.field.zeros((0, A.dim))
    return ModuleHom(R, H, mat, check=False)


def tensor_evaluation(M: FdModule, N: FdModule, n: int) -> ModuleHom:
    """Hom(M, N) (x) R^n -> Hom(M, N (x) R^n), psi (x) f -> (m -> psi(m) (x) f)."""
    F = M.field
    Fn = free_module(M.algebra, n)
    H = hom_module(M, N)
    T1 = tensor_module(H, Fn)
    T2 = tensor_module(N, Fn)
    H2 = hom_module(M, T2)
    dF = Fn.dim
    P3 = T2.pure.reshape(T2.dim, N.dim, dF)
    if H.dim == 0 or dF == 0:
        vals = F.zeros((H2.dim, H.dim * dF))
    else:
        stack = F.einsum("tnb,hnm->hbtm", P3, H.basis).reshape(H.dim * dF, T2.dim, M.dim)
        vals = H2.coords(stack)
    return T1.map_from_bilinear(H2, vals)


def evaluation_map(C: FdModule, N: FdModule) -> ModuleHom:
    """C (x) Hom(C, N) -> N, c (x) f -> f(c)."""
    F = C.field
    H = hom_module(C, N)
    T = tensor_module(C, H)
    if H.dim == 0 or C.dim == 0:
        return ModuleHom(T, N, F.zeros((N.dim, T.dim)), check=False)
    vals = np.ascontiguousarray(H.basis.transpose(1, 2, 0)).reshape(N.dim, C.dim * H.dim)
    return T.map_from_bilinear(N, vals)


def biduality_map(M: FdModule, C: FdModule) -> ModuleHom:
    """M -> Hom(Hom(M, C), C), m -> (f -> f(m))."""
    F = M.field
    H = hom_module(M, C)
    HH = hom_module(H, C)
    if M.dim == 0 or HH.dim == 0:
        return ModuleHom(M, HH, F.zeros((HH.dim, M.dim)), check=False)
    stack = np.ascontiguousarray(H.basis.transpose(2, 1, 0))  # (dM, dC, dH)
    return ModuleHom(M, HH, HH.coords(stack), check=False)


@dataclass
class BaseChangeRow:
    degree: int
    lhs: int  # dim Ext^i(M, C (x) R^n)
    rhs: int  # n * dim Ext^i(M, C)

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


@dataclass
class BaseChangeReport:
    n: int
    rows: list

    @property
    def ok(self) -> bool:
        return all(r.equal for r in self.rows)

    @property
    def vanishing_transfers(self) -> bool:
        """Ext^{>=1}(M, C) vanishes on the window iff Ext^{>=1}(M, C (x) R^n) does (n > 0)."""
        a = all(r.rhs == 0 for r in self.rows if r.degree >= 1)
        b = all(r.lhs == 0 for r in self.rows if r.degree >= 1)
        return a == b if self.n else True


def ext_base_change_check(M: FdModule, C: FdModule, n: int, bound: int = DEFAULT_BOUND) -> BaseChangeReport:
    """Compare dim Ext^i(M, C (x) R^n) with n dim Ext^i(M, C) for i <= bound."""
    M.algebra.require_local()
    CF = tensor_module(C, free_module(M.algebra, n))
    lhs, rhs = ext(M, CF, bound).dims, ext(M, C, bound).dims
    return BaseChangeReport(n, [BaseChangeRow(i, lhs[i], n * rhs[i]) for i in range(bound + 1)])
