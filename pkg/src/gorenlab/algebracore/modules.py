"""Finitely generated modules as packages of action matrices."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra


class ModuleError(ValueError):
    pass


class FdModule:
    """A module over a finite-dimensional algebra, given on a k-basis.

    `actions[i]` is the matrix of basis element b_i.  Construction checks the
    module axioms unless `check=False`; internal constructions that are
    correct by design skip the check and tests call `verify()` on them.
    """

    def __init__(self, algebra: FiniteAlgebra, actions, *, check=True, name=None):
        self.algebra = algebra
        self.field = algebra.field
        acts = self.field.array(actions) if not isinstance(actions, np.ndarray) or actions.dtype != self.field.dtype else actions
        if acts.ndim != 3 or acts.shape[0] != algebra.dim or acts.shape[1] != acts.shape[2]:
            raise ModuleError("need one square action matrix per algebra basis element")
        self._actions = acts
        self.dim = acts.shape[1]
        self.name = name
        self._cache: dict = {}
        if check:
            self.verify()

    def __repr__(self):
        return self.name or f"{type(self).__name__}(dim={self.dim})"

    @property
    def actions(self) -> np.ndarray:
        return self._actions

    def action(self, r: np.ndarray) -> np.ndarray:
        """Matrix of the algebra element with coordinates r."""
        return self.field.einsum("i,ixy->xy", r, self.actions)

    def apply(self, i: int, v: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.actions[i], v)

    def apply_element(self, r: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.action(r), v)

    def apply_right(self, i: int, v: np.ndarray) -> np.ndarray:
        return self.field.matmul(v, self.actions[i])

    def generator_actions(self) -> list[np.ndarray]:
        g = self.algebra.generators
        return [self.action(g[:, j]) for j in range(g.shape[1])]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    def verify(self):
        A, F = self.algebra, self.field
        acts = self.actions
        if not np.array_equal(self.action(A.unit), F.eye(self.dim)):
            raise ModuleError("the unit does not act as the identity")
        for i in range(A.dim):
            for j in range(i, A.dim):
                prod = F.matmul(acts[i], acts[j])
                expected = F.einsum("k,kxy->xy", A.structure[i, j], acts)
                if not np.array_equal(prod, expected):
                    raise ModuleError(
                        f"actions of {A.labels[i]} and {A.labels[j]} violate the structure constants")
                if i != j and not np.array_equal(prod, F.matmul(acts[j], acts[i])):
                    raise ModuleError(f"actions of {A.labels[i]} and {A.labels[j]} do not commute")
        return True


class PowerModule(FdModule):
    """base^rank with the block basis; actions are materialised lazily."""

    def __init__(self, base: FdModule, rank: int, name=None):
        self.base = base
        self.rank = int(rank)
        self.algebra = base.algebra
        self.field = base.field
        self.dim = base.dim * self.rank
        self.name = name
        self._cache = {}

    @cached_property
    def _materialised(self):
        F = self.field
        eye = F.eye(self.rank)
        return np.stack([np.kron(eye, a) for a in self.base.actions]) if self.rank else F.zeros((self.algebra.dim, 0, 0))

    @property
    def actions(self):
        return self._materialised

    def _blocks(self, v):
        return v.reshape(self.rank, self.base.dim, -1)

    def apply(self, i, v):
        vec = v.ndim == 1
        w = v.reshape(self.dim, -1)
        out = self.field.einsum("xy,ryc->rxc", self.base.actions[i], self._blocks(w)).reshape(self.dim, -1)
        return out[:, 0] if vec else out

    def apply_element(self, r, v):
        vec = v.ndim == 1
        w = v.reshape(self.dim, -1)
        out = self.field.einsum("xy,ryc->rxc", self.base.action(r), self._blocks(w)).reshape(self.dim, -1)
        return out[:, 0] if vec else out

    def apply_right(self, i, v):
        w = v.reshape(-1, self.rank, self.base.dim)
        return self.field.einsum("cry,yx->crx", w, self.base.actions[i]).reshape(v.shape[0], self.dim)

    def action(self, r):
        if "_materialised" in self.__dict__:
            return super().action(r)
        return np.kron(self.field.eye(self.rank), self.base.action(r))

    def verify(self):
        return self.base.verify()


class FreeModule(PowerModule):
    """R^rank; generator j is the unit in block j."""

    def __init__(self, algebra: FiniteAlgebra, rank: int, name=None):
        super().__init__(regular_module(algebra), rank, name=name)

    def generator_vectors(self) -> np.ndarray:
        F = self.field
        g = F.zeros((self.dim, self.rank))
        n = self.algebra.dim
        for j in range(self.rank):
            g[j * n:(j + 1) * n, j] = self.algebra.unit
        return g


def regular_module(A: FiniteAlgebra) -> FdModule:
    if "regular" not in A._cache:
        A._cache["regular"] = FdModule(A, A.left.copy(), check=False, name="R")
    return A._cache["regular"]


def free_module(A: FiniteAlgebra, rank: int) -> FreeModule:
    return FreeModule(A, rank, name=f"R^{rank}" if rank != 1 else "R")


def power_module(base: FdModule, rank: int) -> PowerModule:
    if isinstance(base, FdModule) and base is regular_module(base.algebra):
        return free_module(base.algebra, rank)
    return PowerModule(base, rank)


def zero_module(A: FiniteAlgebra) -> FdModule:
    return FdModule(A, A.field.zeros((A.dim, 0, 0)), check=False, name="0")


def character_module(A: FiniteAlgebra, chi: np.ndarray, name=None) -> FdModule:
    """One-dimensional module where b_i acts by the scalar chi[i]."""
    return FdModule(A, chi.reshape(A.dim, 1, 1), name=name)


def residue_field(A: FiniteAlgebra, factor: int | None = None) -> FdModule:
    """k = R/m for local R, or the residue field of one factor of a product."""
    F = A.field
    if factor is None:
        L = A.require_local()
        chi = F.array([L.residue_of(A.basis_vector(i)) for i in range(A.dim)])
        return character_module(A, chi, name="k")
    if not A.factors:
        raise AlgebraError("factor index given for an algebra that is not a product")
    chi = F.zeros(A.dim)
    offset = sum(B.dim for B in A.factors[:factor])
    B = A.factors[factor]
    L = B.require_local()
    for i in range(B.dim):
        chi[offset + i] = L.residue_of(B.basis_vector(i))
    return character_module(A, chi, name=f"k{factor + 1}")


def k_dual(M: FdModule) -> FdModule:
    """Hom_k(M, k) on the dual basis; b acts by the transpose."""
    return FdModule(M.algebra, np.ascontiguousarray(np.transpose(M.actions, (0, 2, 1))),
                    check=False, name=f"{M.name}^*" if M.name else None)


def twisted(M: FdModule, g: np.ndarray) -> tuple[FdModule, "ModuleHom"]:
    """The same module on the new basis given by the columns of g, with the iso to M."""
    F = M.field
    ginv = F.solve(g, F.eye(M.dim))
    if ginv is None:
        raise ModuleError("change of basis is not invertible")
    acts = np.stack([F.matmul(ginv, F.matmul(a, g)) for a in M.actions]) if M.dim else M.actions.copy()
    N = FdModule(M.algebra, acts, check=False)
    return N, ModuleHom(N, M, g, check=False)


# -- homomorphisms -------------------------------------------------------

class ModuleHom:
    """An R-linear map, stored as a dim(target) x dim(source) matrix."""

    def __init__(self, source: FdModule, target: FdModule, matrix, *, check=True):
        if source.algebra is not target.algebra:
            raise ModuleError("modules over different algebras")
        F = source.field
        mat = matrix if isinstance(matrix, np.ndarray) and matrix.dtype == F.dtype else F.array(matrix)
        if mat.shape != (target.dim, source.dim):
            raise ModuleError(f"matrix shape {mat.shape} does not match {target.dim}x{source.dim}")
        self.source, self.target, self.matrix = source, target, mat
        if check:
            self.verify()

    def __repr__(self):
        return f"ModuleHom({self.source!r} -> {self.target!r})"

    @property
    def field(self):
        return self.source.field

    def verify(self):
        A = self.source.algebra
        for i in range(A.dim):
            if not np.array_equal(self.target.apply(i, self.matrix), self.source.apply_right(i, self.matrix)):
                raise ModuleError(f"matrix does not commute with the action of {A.labels[i]}")
        return True

    def is_linear(self) -> bool:
        try:
            return self.verify()
        except ModuleError:
            return False

    def __matmul__(self, other: "ModuleHom") -> "ModuleHom":
        if other.target is not self.source:
            raise ModuleError("composition of non-composable maps")
        return ModuleHom(other.source, self.target, self.field.matmul(self.matrix, other.matrix), check=False)

    def __add__(self, other):
        return ModuleHom(self.source, self.target, self.field.add(self.matrix, other.matrix), check=False)

    def __sub__(self, other):
        return ModuleHom(self.source, self.target, self.field.sub(self.matrix, other.matrix), check=False)

    def __neg__(self):
        return ModuleHom(self.source, self.target, self.field.neg(self.matrix), check=False)

    def scaled(self, c):
        return ModuleHom(self.source, self.target, self.field.scale(c, self.matrix), check=False)

    @property
    def rank(self) -> int:
        return self.field.rank(self.matrix)

    def is_injective(self) -> bool:
        return self.rank == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank == self.target.dim

    def is_isomorphism(self) -> bool:
        return self.source.dim == self.target.dim and self.is_injective()

    def is_zero(self) -> bool:
        return self.field.is_zero(self.matrix)

    def inverse(self) -> "ModuleHom":
        inv = self.field.solve(self.matrix, self.field.eye(self.target.dim)) if self.is_isomorphism() else None
        if inv is None:
            raise ModuleError("map is not invertible")
        return ModuleHom(self.target, self.source, inv, check=False)


def identity(M: FdModule) -> ModuleHom:
    return ModuleHom(M, M, M.field.eye(M.dim), check=False)


def zero_hom(M: FdModule, N: FdModule) -> ModuleHom:
    return ModuleHom(M, N, M.field.zeros((N.dim, M.dim)), check=False)


def multiplication_map(M: FdModule, r) -> ModuleHom:
    r = M.algebra.element(r)
    return ModuleHom(M, M, M.action(r), check=False)


# -- direct sums ---------------------------------------------------------

@dataclass(eq=False)
class DirectSum:
    module: FdModule
    summands: tuple
    injections: tuple
    projections: tuple


def direct_sum(*mods: FdModule) -> DirectSum:
    """Block-basis direct sum with its injections and projections."""
    if not mods:
        raise ModuleError("empty direct sum")
    A, F = mods[0].algebra, mods[0].field
    if any(M.algebra is not A for M in mods):
        raise ModuleError("modules over different algebras")
    d = sum(M.dim for M in mods)
    powers = [M for M in mods if M.dim] or list(mods)  # zero summands do not break a power structure
    bases = {id(M.base) if isinstance(M, PowerModule) else None for M in powers}
    if len(bases) == 1 and None not in bases:
        S = power_module(powers[0].base, sum(M.rank for M in powers))
    else:
        acts = F.zeros((A.dim, d, d))
        off = 0
        for M in mods:
            acts[:, off:off + M.dim, off:off + M.dim] = M.actions
            off += M.dim
        S = FdModule(A, acts, check=False)
    inj, proj = [], []
    off = 0
    for M in mods:
        e = F.zeros((d, M.dim))
        e[off:off + M.dim, :] = F.eye(M.dim)
        inj.append(ModuleHom(M, S, e, check=False))
        proj.append(ModuleHom(S, M, e.T.copy(), check=False))
        off += M.dim
    return DirectSum(S, tuple(mods), tuple(inj), tuple(proj))


def direct_sum_hom(f: ModuleHom, g: ModuleHom, source=None, target=None) -> ModuleHom:
    """f (+) g between the block sums (pass precomputed sums to reuse them)."""
    F = f.field
    source = source or direct_sum(f.source, g.source).module
    target = target or direct_sum(f.target, g.target).module
    mat = F.zeros((target.dim, source.dim))
    mat[:f.target.dim, :f.source.dim] = f.matrix
    mat[f.target.dim:, f.source.dim:] = g.matrix
    return ModuleHom(source, target, mat, check=False)


# -- subspaces, kernels, images, cokernels ---------------------------------

def reduced_basis(F, u: np.ndarray):
    """Echelon basis B of the span of u's columns and rows P with B[P] = I."""
    if u.shape[1] == 0:
        return F.zeros((u.shape[0], 0)), []
    r, piv = F.rref(u.T)
    return np.ascontiguousarray(r[: len(piv)].T), piv


def submodule(M: FdModule, u: np.ndarray, rows=None, name=None):
    """The submodule spanned by u (assumed R-stable) with its inclusion.

    If `rows` is given, u must already have an identity block in those rows;
    otherwise an echelon basis of the span is used instead of u.
    """
    F = M.field
    if rows is None:
        u, rows = reduced_basis(F, u)
    rows = list(rows)
    k = u.shape[1]
    if k == 0:
        S = zero_module(M.algebra)
    else:
        acts = np.stack([M.apply(i, u)[rows, :] for i in range(M.algebra.dim)])
        S = FdModule(M.algebra, np.ascontiguousarray(acts), check=False, name=name)
    S._cache["ambient_rows"] = rows
    return S, ModuleHom(S, M, u, check=False)


@dataclass(eq=False)
class Quotient:
    module: FdModule
    projection: ModuleHom
    section: np.ndarray  # k-linear splitting of the projection


def quotient(M: FdModule, u: np.ndarray, name=None) -> Quotient:
    """M / span(u) on the complement of the pivot coordinates of span(u)."""
    F = M.field
    b, piv = reduced_basis(F, u)
    pivset = set(piv)
    keep = [j for j in range(M.dim) if j not in pivset]
    pi = F.zeros((len(keep), M.dim))
    if keep:
        pi[np.arange(len(keep)), keep] = 1
        if piv:
            pi[:, piv] = F.neg(b[keep, :])
    sec = F.zeros((M.dim, len(keep)))
    if keep:
        sec[keep, np.arange(len(keep))] = 1
    if keep:
        acts = np.stack([F.matmul(pi, M.apply(i, sec)) for i in range(M.algebra.dim)])
        Q = FdModule(M.algebra, np.ascontiguousarray(acts), check=False, name=name)
    else:
        Q = zero_module(M.algebra)
    return Quotient(Q, ModuleHom(M, Q, pi, check=False), sec)


def kernel(f: ModuleHom):
    k, free = f.field.kernel(f.matrix, return_free=True)
    return submodule(f.source, k, rows=free)


def image(f: ModuleHom):
    return submodule(f.target, f.matrix)


def cokernel(f: ModuleHom) -> Quotient:
    return quotient(f.target, f.matrix)


def subobject(f: ModuleHom, which: str):
    """('kernel' | 'image' | 'cokernel') -> (module, canonical map)."""
    if which == "kernel":
        return kernel(f)
    if which == "image":
        return image(f)
    if which == "cokernel":
        q = cokernel(f)
        return q.module, q.projection
    raise ValueError(f"unknown subobject {which!r}")


def restrict(f: ModuleHom, sub_inclusion: ModuleHom) -> ModuleHom:
    return f @ sub_inclusion


def corestrict(f: ModuleHom, sub_inclusion: ModuleHom) -> ModuleHom:
    """Factor f through a submodule of its target (which must contain the image)."""
    F = f.field
    rows = sub_inclusion.source._cache.get("ambient_rows")
    coords = f.matrix[rows, :] if rows is not None else F.solve(sub_inclusion.matrix, f.matrix)
    if coords is None or not np.array_equal(F.matmul(sub_inclusion.matrix, coords), f.matrix):
        raise ModuleError("image is not contained in the submodule")
    return ModuleHom(f.source, sub_inclusion.source, coords, check=False)


def quotient_by_ideal(A: FiniteAlgebra, gens, name=None) -> FdModule:
    """R / I for the ideal generated by the given elements."""
    R = regular_module(A)
    F = A.field
    cols = [A.element(g) for g in gens]
    if not cols:
        return FdModule(A, R.actions.copy(), check=False, name=name)
    span = np.concatenate([F.matmul(A.mult_matrix(c), F.eye(A.dim)) for c in cols], axis=1)
    return FdModule(A, quotient(R, span).module.actions, check=False, name=name)


def ideal_module(A: FiniteAlgebra, gens, name=None) -> FdModule:
    """The ideal generated by the given elements, as a submodule of R."""
    R = regular_module(A)
    span = np.concatenate([A.mult_matrix(A.element(g)) for g in gens], axis=1)
    return submodule(R, span, name=name)[0]
