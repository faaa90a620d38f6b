"""Minimal free resolutions over local algebras, extended lazily."""
from __future__ import annotations

import numpy as np

from ..algebracore import (FdModule, FreeModule, ModuleError, ModuleHom, PowerModule, free_module,
                           submodule)
from ..algebracore.presentation import (augmentation_matrix, generators_of_submodule,
                                        kvectors_to_rmatrix, minimal_generators, residues,
                                        rmatrix_to_k)
from .complex import BoundedComplex, Resolution, TermLabel

DEFAULT_BOUND = 8


class FreeResolution:
    """F_i = R^{b_i} with R-matrix differentials E_i : F_i -> F_{i-1}.

    Stage i stores the kernel K_i of F_i -> F_{i-1} (of eps for i = 0) on an
    echelon basis; Omega^{i+1} M = K_i as a submodule of F_i.  `length` is set
    once some kernel vanishes.
    """

    def __init__(self, M: FdModule, L=None):
        A = M.algebra
        self.local = L if L is not None else A.require_local()
        if self.local.algebra is not A:
            raise ModuleError("local structure belongs to a different algebra")
        self.module = M
        self.algebra = A
        self.field = M.field
        n = A.dim
        self.gens = minimal_generators(M)
        self.ranks = [self.gens.shape[1]]
        self.eps = augmentation_matrix(M, self.gens)
        self.diffs: list = [None]  # diffs[i] is E_i for i >= 1
        self._kernels: dict = {}
        self._kmats: dict = {}
        self.length = None
        if isinstance(M, PowerModule) and not isinstance(M, FreeModule):
            self._seed_power(M)
        if self.ranks[0] == 0 or isinstance(M, FreeModule):
            self.length = 0
        self._n = n

    def _seed_power(self, M):
        base = resolution_of(M.base, self.local)
        self._power_of = (base, M.rank)

    # -- lazy construction ----------------------------------------------

    def kernel(self, i: int):
        """(K, rows): echelon basis of ker(F_i -> F_{i-1}) in F_i."""
        if i not in self._kernels:
            mat = self.eps if i == 0 else self.kmatrix(i)
            self._kernels[i] = self.field.kernel(mat, return_free=True)
        return self._kernels[i]

    def kmatrix(self, i: int) -> np.ndarray:
        """k-matrix of d_i (i >= 1), or of eps for i = 0."""
        if i == 0:
            return self.eps
        self.extend(i)
        if i not in self._kmats:
            self._kmats[i] = rmatrix_to_k(self.algebra, self.diffs[i])
        return self._kmats[i]

    def extend(self, top: int):
        """Make sure E_1..E_top exist (zero-rank beyond the length)."""
        while len(self.diffs) <= top:
            i = len(self.diffs)
            if self.length is not None and i > self.length:
                self.ranks.append(0)
                self.diffs.append(self.field.zeros((self.ranks[i - 1], 0, self._n)))
                continue
            E = self._power_step(i) if hasattr(self, "_power_of") else None
            if E is None:
                K, rows = self.kernel(i - 1)
                Fprev = FreeModule(self.algebra, self.ranks[i - 1])
                G = generators_of_submodule(Fprev, K, rows)
                E = kvectors_to_rmatrix(G, self._n)
            self.ranks.append(E.shape[1])
            self.diffs.append(E)
            if E.shape[1] == 0:
                self.length = i - 1
        return self

    def _power_step(self, i):
        base, a = self._power_of
        base.extend(i)
        Eb = base.diffs[i]
        bt, bs, n = Eb.shape
        E = self.field.zeros((a * bt, a * bs, n))
        for t in range(a):
            E[t * bt:(t + 1) * bt, t * bs:(t + 1) * bs] = Eb
        return E

    # -- accessors -------------------------------------------------------

    def rank(self, i: int) -> int:
        self.extend(i)
        return self.ranks[i]

    def betti(self, top: int) -> list[int]:
        self.extend(top)
        return self.ranks[: top + 1]

    def rmatrix(self, i: int) -> np.ndarray:
        self.extend(i)
        return self.diffs[i]

    def free(self, i: int) -> FreeModule:
        return free_module(self.algebra, self.rank(i))

    def syzygy_dim(self, n: int) -> int:
        if n == 0:
            return self.module.dim
        self.extend(n)
        return self.kernel(n - 1)[0].shape[1]

    def syzygy(self, n: int) -> FdModule:
        """Omega^n M (Omega^0 M = M) as a submodule of F_{n-1}."""
        return self.syzygy_with_inclusion(n)[0]

    def syzygy_with_inclusion(self, n: int):
        if n == 0:
            from ..algebracore import identity
            return self.module, identity(self.module)
        key = ("syz", n)
        cache = self.__dict__.setdefault("_syz", {})
        if key not in cache:
            self.extend(n)
            K, rows = self.kernel(n - 1)
            cache[key] = submodule(FreeModule(self.algebra, self.ranks[n - 1]), K, rows=rows,
                                   name=f"Omega^{n}")
        return cache[key]

    def is_minimal(self, top: int) -> bool:
        """Every differential entry lies in m."""
        self.extend(top)
        F = self.field
        return all(F.is_zero(residues(self.algebra, self.diffs[i])) for i in range(1, top + 1))

    def resolution(self, top: int) -> Resolution:
        """The truncation F_top -> ... -> F_0 -> M as a Resolution."""
        self.extend(top)
        hi = min(top, self.length) if self.length is not None else top
        mods = {i: self.free(i) for i in range(hi + 1)}
        diffs = {i: ModuleHom(mods[i], mods[i - 1], self.kmatrix(i), check=False) for i in range(1, hi + 1)}
        labels = {i: TermLabel("free", self.ranks[i]) for i in range(hi + 1)}
        X = BoundedComplex(mods, diffs, labels, check=False)
        aug = ModuleHom(mods[0], self.module, self.eps, check=False)
        res = Resolution(X, aug, minimal=True, window=top,
                         complete=self.length is not None and self.length <= top)
        res.data["free_resolution"] = self
        res.data["rmatrices"] = {i: self.diffs[i] for i in range(1, hi + 1)}
        return res


def resolution_of(M: FdModule, L=None) -> FreeResolution:
    """The cached lazy minimal free resolution of M."""
    hit = M._cache.get("free_resolution")
    if hit is None:
        hit = FreeResolution(M, L)
        M._cache["free_resolution"] = hit
    return hit


def minimal_free_resolution(M: FdModule, L=None, bound: int = DEFAULT_BOUND) -> Resolution:
    """Minimal free resolution of M computed through degree `bound`.

    Differentials are chosen from minimal generators of each syzygy, so all
    their entries lie in the maximal ideal.  Syzygies are available through
    `res.data["free_resolution"].syzygy(n)` or `syzygy(M, n)`.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    return resolution_of(M, L).resolution(bound)


def syzygy(M: FdModule, n: int, L=None) -> FdModule:
    return resolution_of(M, L).syzygy(n)


def betti_numbers(M: FdModule, bound: int = DEFAULT_BOUND, L=None) -> list[int]:
    return resolution_of(M, L).betti(bound)
