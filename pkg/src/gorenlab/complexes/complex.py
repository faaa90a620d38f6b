"""Bounded complexes with homological indexing (d_n : X_n -> X_{n-1})."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..algebracore import FdModule, ModuleError, ModuleHom, direct_sum, kernel, quotient, zero_module


@dataclass(frozen=True)
class TermLabel:
    """free(rank), cproj(rank) (a power of the class's C), gcproj, or other."""

    kind: str
    rank: int | None = None

    def __str__(self):
        return f"{self.kind}({self.rank})" if self.rank is not None else self.kind


class BoundedComplex:
    """Modules X_lo..X_hi with differentials d_n for lo < n <= hi.

    Missing differentials are zero maps; degrees outside the window hold the
    zero module.
    """

    def __init__(self, modules: dict, differentials: dict | None = None, labels: dict | None = None,
                 check: bool = True):
        if not modules:
            raise ModuleError("a complex needs at least one term")
        self.modules = dict(sorted(modules.items()))
        self.lo, self.hi = min(self.modules), max(self.modules)
        for n in range(self.lo, self.hi + 1):
            if n not in self.modules:
                raise ModuleError(f"missing term in degree {n}")
        first = self.modules[self.lo]
        self.algebra = first.algebra
        self.field = first.field
        self.differentials = {}
        for n in range(self.lo + 1, self.hi + 1):
            d = (differentials or {}).get(n)
            if d is None:
                d = ModuleHom(self.modules[n], self.modules[n - 1],
                              self.field.zeros((self.modules[n - 1].dim, self.modules[n].dim)), check=False)
            if d.source is not self.modules[n] or d.target is not self.modules[n - 1]:
                raise ModuleError(f"differential {n} does not match the terms")
            self.differentials[n] = d
        self.labels = dict(labels or {})
        if check:
            bad = self.square_failures()
            if bad:
                raise ModuleError(f"d o d != 0 at degrees {bad}")

    def __repr__(self):
        dims = " ".join(f"{n}:{self.modules[n].dim}" for n in range(self.hi, self.lo - 1, -1))
        return f"BoundedComplex([{self.lo},{self.hi}] {dims})"

    def module(self, n: int) -> FdModule:
        return self.modules.get(n) or self._zero()

    def _zero(self):
        if not hasattr(self, "_zero_term"):
            self._zero_term = zero_module(self.algebra)
        return self._zero_term

    def differential(self, n: int) -> ModuleHom:
        if n in self.differentials:
            return self.differentials[n]
        src, tgt = self.module(n), self.module(n - 1)
        return ModuleHom(src, tgt, self.field.zeros((tgt.dim, src.dim)), check=False)

    def dims(self) -> dict[int, int]:
        return {n: M.dim for n, M in self.modules.items()}

    def _rank(self, n: int) -> int:
        cache = self.__dict__.setdefault("_ranks", {})
        if n not in cache:
            d = self.differentials.get(n)
            cache[n] = d.rank if d is not None else 0
        return cache[n]

    def square_failures(self) -> list[int]:
        """Degrees n with d_{n-1} d_n != 0."""
        F = self.field
        return [n for n in range(self.lo + 2, self.hi + 1)
                if not F.is_zero(F.matmul(self.differentials[n - 1].matrix, self.differentials[n].matrix))]

    def exact_at(self, n: int) -> bool:
        """im d_{n+1} == ker d_n inside X_n."""
        F = self.field
        if n < self.lo or n > self.hi:
            return True
        din, dout = self.differential(n + 1), self.differential(n)
        if not F.is_zero(F.matmul(dout.matrix, din.matrix)):
            return False
        return self._rank(n + 1) == self.modules[n].dim - self._rank(n)

    def exactness_failures(self, degrees=None) -> list[int]:
        if degrees is None:
            degrees = range(self.lo + 1, self.hi)
        return [n for n in degrees if not self.exact_at(n)]

    def homology_dim(self, n: int) -> int:
        if n < self.lo or n > self.hi:
            return 0
        return self.modules[n].dim - self._rank(n) - self._rank(n + 1)

    def homology(self, n: int) -> FdModule:
        """ker d_n / im d_{n+1}."""
        if n < self.lo or n > self.hi:
            raise ModuleError(f"degree {n} outside the window [{self.lo}, {self.hi}]")
        F = self.field
        K, inc = kernel(self.differential(n))
        din = self.differential(n + 1)
        if not F.is_zero(F.matmul(self.differential(n).matrix, din.matrix)):
            raise ModuleError(f"not a complex at degree {n}")
        rows = K._cache["ambient_rows"]
        return quotient(K, din.matrix[rows, :]).module

    def shifted(self, s: int) -> "BoundedComplex":
        """Reindex so the old degree n becomes n + s."""
        mods = {n + s: M for n, M in self.modules.items()}
        diffs = {n + s: d for n, d in self.differentials.items()}
        labels = {n + s: l for n, l in self.labels.items()}
        return BoundedComplex(mods, diffs, labels, check=False)


def direct_sum_complexes(Xs) -> BoundedComplex:
    """Degreewise direct sum with block-diagonal differentials."""
    Xs = list(Xs)
    if not Xs:
        raise ModuleError("empty list of complexes")
    A = Xs[0].algebra
    if any(X.algebra is not A for X in Xs):
        raise ModuleError("complexes over different algebras")
    F = Xs[0].field
    lo, hi = min(X.lo for X in Xs), max(X.hi for X in Xs)
    sums = {n: direct_sum(*[X.module(n) for X in Xs]) for n in range(lo, hi + 1)}
    mods = {n: s.module for n, s in sums.items()}
    diffs = {}
    for n in range(lo + 1, hi + 1):
        tgt, src = mods[n - 1], mods[n]
        mat = F.zeros((tgt.dim, src.dim))
        r = c = 0
        for X in Xs:
            d = X.differential(n)
            mat[r:r + d.target.dim, c:c + d.source.dim] = d.matrix
            r += d.target.dim
            c += d.source.dim
        diffs[n] = ModuleHom(src, tgt, mat, check=False)
    labels = {}
    for n in range(lo, hi + 1):
        got = [X.labels.get(n) for X in Xs if X.module(n).dim]
        if not got:
            got = [X.labels[n] for X in Xs if n in X.labels]
            if not got:
                continue
        kinds = {g.kind if g is not None else None for g in got}
        if len(kinds) == 1 and kinds <= {"free", "cproj"}:
            labels[n] = TermLabel(got[0].kind, sum(g.rank for g in got))
        else:
            labels[n] = TermLabel("other")
    return BoundedComplex(mods, diffs, labels, check=False)


@dataclass
class Resolution:
    """A complex in degrees 0..length with an augmentation X_0 -> M."""

    complex: BoundedComplex
    augmentation: ModuleHom
    minimal: bool | None = None
    window: int | None = None
    complete: bool = False  # True when the resolution really stops at `length`
    data: dict = field(default_factory=dict)

    @property
    def module(self):
        return self.augmentation.target

    @property
    def length(self):
        return self.complex.hi

    def augmented(self) -> BoundedComplex:
        """... -> X_0 -> M with M placed in degree -1."""
        X = self.complex
        mods = dict(X.modules)
        mods[-1] = self.module
        diffs = dict(X.differentials)
        diffs[0] = self.augmentation
        labels = dict(X.labels)
        return BoundedComplex(mods, diffs, labels, check=False)

    def augmented_exactness_failures(self) -> list[int]:
        """Failures of exactness of X_len -> ... -> X_0 -> M -> 0.

        A truncated resolution is not checked at its top term; a complete one
        is checked there too (the differential into it is zero).
        """
        aug = self.augmented()
        zero = zero_module(aug.algebra)
        mods = dict(aug.modules)
        mods[-2] = zero
        mods[aug.hi + 1] = zero
        padded = BoundedComplex(mods, aug.differentials, aug.labels, check=False)
        top = aug.hi + 1 if self.complete else aug.hi
        return padded.exactness_failures(range(-1, top))
