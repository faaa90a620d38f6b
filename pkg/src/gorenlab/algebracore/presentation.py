"""Minimal generators and minimal presentations over local algebras.

Maps between free modules are stored as R-matrices: an array E of shape
(b_target, b_source, n) whose (j, l) entry holds the coordinates of the
ring element sending generator l to generator j.  On k-bases the free module
R^b has coordinates (generator, ring basis index) in row-major order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modules import FdModule, FreeModule, PowerModule


def rmatrix_to_k(A, E: np.ndarray) -> np.ndarray:
    """k-matrix of the free map R^{b_s} -> R^{b_t} with R-matrix E."""
    bt, bs, n = E.shape
    blocks = A.field.einsum("jli,ixy->jxly", E, A.left)
    return blocks.reshape(bt * n, bs * n)


def kvectors_to_rmatrix(V: np.ndarray, n: int) -> np.ndarray:
    """Columns of V (elements of R^b on the k-basis) -> R-matrix (b, cols, n)."""
    b = V.shape[0] // n
    return np.ascontiguousarray(V.reshape(b, n, V.shape[1]).transpose(0, 2, 1))


def hom_block_matrix(E: np.ndarray, N: FdModule) -> np.ndarray:
    """Hom(d, N): N^{b_t} -> N^{b_s} for the free map d with R-matrix E.

    Block (l, j) is the action of the entry r_{jl} on N.
    """
    bt, bs, _ = E.shape
    d = N.dim
    blocks = N.field.einsum("jli,ixy->lxjy", E, N.actions)
    return blocks.reshape(bs * d, bt * d)


def tensor_block_matrix(E: np.ndarray, N: FdModule) -> np.ndarray:
    """d (x) N: N^{b_s} -> N^{b_t}; block (j, l) is the action of r_{jl}."""
    bt, bs, _ = E.shape
    d = N.dim
    blocks = N.field.einsum("jli,ixy->jxly", E, N.actions)
    return blocks.reshape(bt * d, bs * d)


def residues(A, E: np.ndarray) -> np.ndarray:
    """Residues in R/m = k of every entry of an R-matrix."""
    L = A.require_local()
    return A.field.einsum("jli,i->jl", E, L.residue)


def maximal_ideal_span(M: FdModule) -> np.ndarray:
    """Columns spanning m*M."""
    L = M.algebra.require_local()
    g = L.generators
    F = M.field
    if g.shape[1] == 0 or M.dim == 0:
        return F.zeros((M.dim, 0))
    return np.concatenate([M.action(g[:, j]) for j in range(g.shape[1])], axis=1)


def minimal_generators(M: FdModule) -> np.ndarray:
    """Lifts of a basis of M/mM, as columns (Nakayama)."""
    F = M.field
    if isinstance(M, FreeModule):
        return M.generator_vectors()
    if isinstance(M, PowerModule):
        g = minimal_generators(M.base)
        return np.kron(F.eye(M.rank), g)
    keep = F.complement(maximal_ideal_span(M), M.dim)
    out = F.zeros((M.dim, len(keep)))
    if keep:
        out[keep, np.arange(len(keep))] = 1
    return out


def generators_of_submodule(free: FdModule, K: np.ndarray, rows) -> np.ndarray:
    """Minimal generators of the submodule of `free` spanned by K.

    K must have an identity block in `rows`, so K-coordinates of a vector in
    its span are read off at those rows.  Returns a subset of K's columns.
    """
    F = free.field
    c = K.shape[1]
    if c == 0:
        return K
    L = free.algebra.require_local()
    g = L.generators
    parts = [free.apply_element(g[:, j], K)[rows, :] for j in range(g.shape[1])]
    mk = np.concatenate(parts, axis=1) if parts else F.zeros((c, 0))
    keep = F.complement(mk, c)
    return K[:, keep]


def augmentation_matrix(M: FdModule, gens: np.ndarray) -> np.ndarray:
    """k-matrix of R^{b} -> M sending generator j to gens[:, j]."""
    n = M.algebra.dim
    b = gens.shape[1]
    cols = np.stack([M.apply(i, gens) for i in range(n)], axis=2)  # (dM, b, n)
    return cols.reshape(M.dim, b * n)


@dataclass(eq=False)
class Presentation:
    """R^{b1} --relations--> R^{b0} --eps--> M -> 0 with a k-linear section."""

    module: FdModule
    gens: np.ndarray
    eps: np.ndarray
    relations: np.ndarray
    section: np.ndarray

    @property
    def rank0(self):
        return self.gens.shape[1]


def presentation(M: FdModule) -> Presentation:
    if "presentation" in M._cache:
        return M._cache["presentation"]
    A, F = M.algebra, M.field
    n = A.dim
    if isinstance(M, FreeModule):
        gens = M.generator_vectors()
        P = Presentation(M, gens, F.eye(M.dim), F.zeros((M.rank, 0, n)), F.eye(M.dim))
    elif isinstance(M, PowerModule):
        B = presentation(M.base)
        a = M.rank
        b0, b1 = B.relations.shape[:2]
        rel = F.zeros((a * b0, a * b1, n))
        for t in range(a):
            rel[t * b0:(t + 1) * b0, t * b1:(t + 1) * b1] = B.relations
        eye = F.eye(a)
        P = Presentation(M, np.kron(eye, B.gens), np.kron(eye, B.eps), rel, np.kron(eye, B.section))
    else:
        gens = minimal_generators(M)
        eps = augmentation_matrix(M, gens)
        K, rows = F.kernel(eps, return_free=True)
        F0 = FreeModule(A, gens.shape[1])
        rel = kvectors_to_rmatrix(generators_of_submodule(F0, K, rows), n)
        section = F.solve(eps, F.eye(M.dim))
        P = Presentation(M, gens, eps, rel, section)
    M._cache["presentation"] = P
    return P
