"""Hom and tensor modules, with coordinates for their elements."""
from __future__ import annotations

import numpy as np

from .modules import FdModule, ModuleError, ModuleHom, PowerModule, quotient
from .presentation import hom_block_matrix, presentation, tensor_block_matrix


class HomModule(FdModule):
    """Hom_R(M, N) with an explicit basis of homomorphisms.

    `basis[h]` is the dim(N) x dim(M) matrix of the h-th basis element.
    Elements are identified with vectors in an ambient space (values on a
    generating set, or all matrix entries) whose kernel basis has an
    identity block in `rows`; `coords` reads coordinates off those rows.
    """

    def __init__(self, source, target, basis, embed, rows, actions):
        super().__init__(source.algebra, actions, check=False,
                         name=f"Hom({source.name},{target.name})" if source.name and target.name else None)
        self.source, self.target = source, target
        self.basis = basis
        self._embed = embed
        self._rows = list(rows)

    def matrix(self, coords: np.ndarray) -> np.ndarray:
        return self.field.einsum("h,hxm->xm", coords, self.basis)

    def hom(self, coords: np.ndarray) -> ModuleHom:
        return ModuleHom(self.source, self.target, self.matrix(coords), check=False)

    def element(self, h: int) -> ModuleHom:
        return ModuleHom(self.source, self.target, self.basis[h].copy(), check=False)

    def coords(self, phi) -> np.ndarray:
        """Coordinates of one hom (matrix or ModuleHom) or a stack (k, dN, dM).

        A stack gives a (dim H) x k array.  Inputs must be homomorphisms.
        """
        if isinstance(phi, ModuleHom):
            phi = phi.matrix
        single = phi.ndim == 2
        stack = phi[None] if single else phi
        amb = self._embed(stack)
        out = amb[:, self._rows].T
        return out[:, 0] if single else np.ascontiguousarray(out)

    def contains(self, phi) -> bool:
        if isinstance(phi, ModuleHom):
            phi = phi.matrix
        return np.array_equal(self.matrix(self.coords(phi)), phi)


def _hom_by_presentation(M: FdModule, N: FdModule) -> HomModule:
    F = M.field
    A = M.algebra
    n = A.dim
    P = presentation(M)
    b0 = P.rank0
    dN = N.dim
    if P.relations.shape[1]:
        K, rows = F.kernel(hom_block_matrix(P.relations, N), return_free=True)
    else:
        K, rows = F.eye(b0 * dN), list(range(b0 * dN))
    dH = K.shape[1]
    G = K.reshape(b0, dN, dH)
    S = P.section.reshape(b0, n, M.dim)
    W = F.einsum("ixy,jyh->ijxh", N.actions, G)
    basis = F.einsum("ijxh,jim->hxm", W, S) if dH else F.zeros((0, dN, M.dim))
    gens = P.gens

    def embed(stack):
        vals = F.einsum("kxm,mj->kjx", stack, gens)
        return vals.reshape(stack.shape[0], b0 * dN)

    if dH:
        acts = np.stack([F.einsum("xy,jyh->jxh", N.actions[i], G).reshape(b0 * dN, dH)[rows, :]
                         for i in range(n)])
    else:
        acts = F.zeros((n, 0, 0))
    return HomModule(M, N, basis, embed, rows, np.ascontiguousarray(acts))


def _hom_by_system(M: FdModule, N: FdModule) -> HomModule:
    F = M.field
    A = M.algebra
    dM, dN = M.dim, N.dim
    eqs = []
    g = A.generators
    for j in range(g.shape[1]):
        am, an = M.action(g[:, j]), N.action(g[:, j])
        eqs.append(F.sub(np.kron(F.eye(dN), am.T), np.kron(an, F.eye(dM))))
    if eqs:
        K, rows = F.kernel(np.concatenate(eqs, axis=0), return_free=True)
    else:
        K, rows = F.eye(dN * dM), list(range(dN * dM))
    dH = K.shape[1]
    basis = np.ascontiguousarray(K.T.reshape(dH, dN, dM))

    def embed(stack):
        return stack.reshape(stack.shape[0], dN * dM)

    if dH:
        acts = np.stack([embed(F.einsum("xy,hym->hxm", N.actions[i], basis))[:, rows].T
                         for i in range(A.dim)])
    else:
        acts = F.zeros((A.dim, 0, 0))
    return HomModule(M, N, basis, embed, rows, np.ascontiguousarray(acts))


def hom_module(M: FdModule, N: FdModule, method: str | None = None) -> HomModule:
    """Hom_R(M, N) with (r f)(m) = r f(m).

    method "presentation" solves for images of minimal generators (local
    algebras only); "system" solves the commuting-matrix system
    X rho_M(g) = rho_N(g) X over algebra generators g.  The default uses the
    presentation when the algebra is local.
    """
    if M.algebra is not N.algebra:
        raise ModuleError("modules over different algebras")
    if method is None:
        method = "presentation" if M.algebra.is_local else "system"
    key = ("hom", id(N), method)
    hit = M._cache.get(key)
    if hit is not None and hit.target is N:
        return hit
    if method == "presentation":
        H = _hom_by_presentation(M, N)
    elif method == "system":
        H = _hom_by_system(M, N)
    else:
        raise ValueError(f"unknown method {method!r}")
    M._cache[key] = H
    return H


def postcompose(H1: HomModule, H2: HomModule, f: ModuleHom) -> ModuleHom:
    """Hom(M, N) -> Hom(M, N'), phi -> f phi, for f: N -> N'."""
    F = f.field
    stack = F.einsum("yx,hxm->hym", f.matrix, H1.basis)
    return ModuleHom(H1, H2, H2.coords(stack) if H1.dim else F.zeros((H2.dim, 0)), check=False)


def precompose(H1: HomModule, H2: HomModule, g: ModuleHom) -> ModuleHom:
    """Hom(M, N) -> Hom(M', N), phi -> phi g, for g: M' -> M."""
    F = g.field
    stack = F.einsum("hxm,mz->hxz", H1.basis, g.matrix)
    return ModuleHom(H1, H2, H2.coords(stack) if H1.dim else F.zeros((H2.dim, 0)), check=False)


# -- tensor products -------------------------------------------------------

class TensorModule(FdModule):
    """M (x)_R N.  `pure[:, a*dim N + b]` is the class of e_a (x) f_b."""

    def __init__(self, left, right, actions, pure):
        super().__init__(left.algebra, actions, check=False,
                         name=f"{left.name}(x){right.name}" if left.name and right.name else None)
        self.left, self.right = left, right
        self.pure = pure

    def map_from_bilinear(self, target: FdModule, values: np.ndarray) -> ModuleHom:
        """The map T -> target with e_a (x) f_b -> values[:, a*dim N + b]."""
        F = self.field
        sol = F.solve(self.pure.T, values.T)
        if sol is None:
            raise ModuleError("values are not balanced over R")
        return ModuleHom(self, target, np.ascontiguousarray(sol.T), check=False)


def _tensor_by_presentation(M: FdModule, N: FdModule) -> TensorModule:
    F = M.field
    n = M.algebra.dim
    P = presentation(M)
    b0 = P.rank0
    dN = N.dim
    amb = b0 * dN
    rel = tensor_block_matrix(P.relations, N) if P.relations.shape[1] else F.zeros((amb, 0))
    q = quotient(_power_like(N, b0), rel)
    S = P.section.reshape(b0, n, M.dim)
    pre = F.einsum("jia,ixb->jxab", S, N.actions).reshape(amb, M.dim * dN)
    pure = F.matmul(q.projection.matrix, pre)
    return TensorModule(M, N, q.module.actions, pure)


def _power_like(N: FdModule, b: int) -> FdModule:
    return PowerModule(N, b)


def _tensor_by_relations(M: FdModule, N: FdModule) -> TensorModule:
    F = M.field
    A = M.algebra
    dM, dN = M.dim, N.dim
    acts = np.stack([np.kron(M.actions[i], F.eye(dN)) for i in range(A.dim)]) if dM * dN else F.zeros((A.dim, 0, 0))
    V = FdModule(A, acts, check=False)
    g = A.generators
    rels = [F.sub(np.kron(M.action(g[:, j]), F.eye(dN)), np.kron(F.eye(dM), N.action(g[:, j])))
            for j in range(g.shape[1])]
    span = np.concatenate(rels, axis=1) if rels else F.zeros((dM * dN, 0))
    q = quotient(V, span)
    return TensorModule(M, N, q.module.actions, q.projection.matrix)


def tensor_module(M: FdModule, N: FdModule, method: str | None = None) -> TensorModule:
    """M (x)_R N, as the quotient of M (x)_k N by r m (x) n - m (x) r n.

    method "relations" builds exactly that quotient; "presentation" uses
    M (x) N = coker(relations (x) N) from a presentation of M (local only).
    """
    if M.algebra is not N.algebra:
        raise ModuleError("modules over different algebras")
    if method is None:
        method = "presentation" if M.algebra.is_local else "relations"
    key = ("tensor", id(N), method)
    hit = M._cache.get(key)
    if hit is not None and hit.right is N:
        return hit
    if method == "presentation":
        T = _tensor_by_presentation(M, N)
    elif method == "relations":
        T = _tensor_by_relations(M, N)
    else:
        raise ValueError(f"unknown method {method!r}")
    M._cache[key] = T
    return T


def tensor_hom(T1: TensorModule, T2: TensorModule, f: ModuleHom, g: ModuleHom) -> ModuleHom:
    """f (x) g : M (x) N -> M' (x) N'."""
    F = f.field
    return T1.map_from_bilinear(T2, F.matmul(T2.pure, np.kron(f.matrix, g.matrix)))
