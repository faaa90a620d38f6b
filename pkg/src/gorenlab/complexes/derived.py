"""Ext and Tor tables, windowed vanishing verdicts, periodicity and depth."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from ..algebracore import (FdModule, ModuleError, PowerModule, find_isomorphism, quotient, residue_field,
                           submodule)
from ..algebracore.presentation import hom_block_matrix, tensor_block_matrix
from .resolution import DEFAULT_BOUND, resolution_of


# -- tables ------------------------------------------------------------------

@dataclass
class TableEntry:
    degree: int
    dim: int
    _factory: Callable | None = field(default=None, repr=False)
    _module: FdModule | None = field(default=None, repr=False)

    @property
    def module(self) -> FdModule:
        """A module representing the entry (built on first access)."""
        if self._module is None:
            self._module = self._factory()
        return self._module


@dataclass
class ExtTorTable:
    kind: str  # "ext" or "tor"
    bound: int
    entries: list

    @property
    def dims(self) -> list[int]:
        return [e.dim for e in self.entries]

    def dim(self, i: int) -> int:
        return self.entries[i].dim

    def module(self, i: int) -> FdModule:
        return self.entries[i].module

    def positive_dims(self) -> dict[int, int]:
        return {e.degree: e.dim for e in self.entries if e.degree >= 1}


def _ext_blocks(M, N, top):
    """D_i = Hom(d_i, N) : N^{b_{i-1}} -> N^{b_i} for 1 <= i <= top (cached on M)."""
    res = resolution_of(M)
    res.extend(top)
    cache = M._cache.setdefault(("ext_blocks", id(N)), {"N": N, "mats": {}, "ranks": {}})
    if cache["N"] is not N:
        cache = M._cache[("ext_blocks", id(N))] = {"N": N, "mats": {}, "ranks": {}}
    return res, cache


def _ext_rank(M, N, i, cache, res):
    if i == 0 or res.ranks[i - 1] == 0 or res.rank(i) == 0 or N.dim == 0:
        return 0
    if i not in cache["ranks"]:
        cache["ranks"][i] = N.field.rank(_ext_matrix(N, i, cache, res))
    return cache["ranks"][i]


def _ext_matrix(N, i, cache, res):
    if i not in cache["mats"]:
        cache["mats"][i] = hom_block_matrix(res.rmatrix(i), N)
    return cache["mats"][i]


def ext_dim(M: FdModule, N: FdModule, i: int) -> int:
    """dim Ext^i(M, N) from the minimal free resolution of M."""
    res, cache = _ext_blocks(M, N, i + 1)
    return res.ranks[i] * N.dim - _ext_rank(M, N, i + 1, cache, res) - _ext_rank(M, N, i, cache, res)


def _ext_module(M, N, i, res, cache):
    F = N.field
    amb = PowerModule(N, res.ranks[i])
    if res.rank(i + 1) and amb.dim:
        K, rows = F.kernel(_ext_matrix(N, i + 1, cache, res), return_free=True)
    else:
        K, rows = F.eye(amb.dim), list(range(amb.dim))
    Z, _ = submodule(amb, K, rows=rows)
    if i >= 1 and res.ranks[i - 1] and amb.dim:
        B = _ext_matrix(N, i, cache, res)[rows, :]
    else:
        B = F.zeros((Z.dim, 0))
    return quotient(Z, B).module


def _tor_matrix(N, i, cache, res):
    if i not in cache["mats"]:
        cache["mats"][i] = tensor_block_matrix(res.rmatrix(i), N)
    return cache["mats"][i]


def _tor_rank(N, i, cache, res):
    if i == 0 or res.ranks[i - 1] == 0 or res.rank(i) == 0 or N.dim == 0:
        return 0
    if i not in cache["ranks"]:
        cache["ranks"][i] = N.field.rank(_tor_matrix(N, i, cache, res))
    return cache["ranks"][i]


def _tor_cache(M, N, top):
    res = resolution_of(M)
    res.extend(top)
    key = ("tor_blocks", id(N))
    cache = M._cache.get(key)
    if cache is None or cache["N"] is not N:
        cache = M._cache[key] = {"N": N, "mats": {}, "ranks": {}}
    return res, cache


def tor_dim(M: FdModule, N: FdModule, i: int) -> int:
    res, cache = _tor_cache(M, N, i + 1)
    return res.ranks[i] * N.dim - _tor_rank(N, i, cache, res) - _tor_rank(N, i + 1, cache, res)


def _tor_module(M, N, i, res, cache):
    F = N.field
    amb = PowerModule(N, res.ranks[i])
    if i >= 1 and res.ranks[i - 1] and amb.dim:
        K, rows = F.kernel(_tor_matrix(N, i, cache, res), return_free=True)
    else:
        K, rows = F.eye(amb.dim), list(range(amb.dim))
    Z, _ = submodule(amb, K, rows=rows)
    if res.rank(i + 1) and amb.dim:
        B = _tor_matrix(N, i + 1, cache, res)[rows, :]
    else:
        B = F.zeros((Z.dim, 0))
    return quotient(Z, B).module


def _componentwise(M, N, bound, kind):
    """Ext/Tor over a product algebra as the sum over its local factors."""
    from ..algebracore.product import decompose, inflate
    A = M.algebra
    cm, cn = decompose(M), decompose(N)
    tables = [(_table(cm[t], cn[t], bound, kind), t) for t in range(len(A.factors))]
    entries = []
    for i in range(bound + 1):
        dim = sum(T.dim(i) for T, _ in tables)

        def make(i=i):
            from ..algebracore import direct_sum
            parts = [inflate(A, t, T.module(i)) for T, t in tables]
            return direct_sum(*parts).module
        entries.append(TableEntry(i, dim, make))
    return ExtTorTable(kind, bound, entries)


def _table(M, N, bound, kind):
    if M.algebra is not N.algebra:
        raise ModuleError("modules over different algebras")
    if bound < 0:
        raise ValueError("bound must be non-negative")
    A = M.algebra
    if not A.is_local:
        if A.factors:
            return _componentwise(M, N, bound, kind)
        A.require_local()
    key = (kind + "_table", id(N), bound)
    hit = M._cache.get(key)
    if hit is not None and hit[0] is N:
        return hit[1]
    entries = []
    if kind == "ext":
        res, cache = _ext_blocks(M, N, bound + 1)
        for i in range(bound + 1):
            entries.append(TableEntry(i, ext_dim(M, N, i), lambda i=i: _ext_module(M, N, i, res, cache)))
    else:
        res, cache = _tor_cache(M, N, bound + 1)
        for i in range(bound + 1):
            entries.append(TableEntry(i, tor_dim(M, N, i), lambda i=i: _tor_module(M, N, i, res, cache)))
    table = ExtTorTable(kind, bound, entries)
    M._cache[key] = (N, table)
    return table


def ext(M: FdModule, N: FdModule, bound: int = DEFAULT_BOUND) -> ExtTorTable:
    """Ext^i(M, N) for 0 <= i <= bound, from the minimal free resolution of M."""
    return _table(M, N, bound, "ext")


def tor(M: FdModule, N: FdModule, bound: int = DEFAULT_BOUND) -> ExtTorTable:
    """Tor_i(M, N) for 0 <= i <= bound."""
    return _table(M, N, bound, "tor")


# -- windowed verdicts -------------------------------------------------------

@dataclass(frozen=True)
class PeriodicityCertificate:
    """Omega^start M is isomorphic to Omega^{start+period} M (witness attached).

    With `terminates` set the resolution stops: Omega^start M = 0.
    """

    start: int
    period: int
    terminates: bool = False
    witness: object = field(default=None, compare=False, repr=False)
    parts: tuple = ()  # per-factor certificates over a product algebra

    def needed_window(self) -> int:
        """Vanishing on 1..needed_window forces vanishing in all degrees >= 1."""
        if self.parts:
            return max(p.needed_window() for p in self.parts)
        if self.terminates:
            return max(self.start - 1, 0)
        return self.start + self.period

    def covers(self, bound: int) -> bool:
        return bound >= self.needed_window()

    def as_dict(self) -> dict:
        if self.parts:
            return {"factors": [p.as_dict() for p in self.parts]}
        return {"start": self.start, "period": self.period, "terminates": self.terminates}


@dataclass(frozen=True)
class WindowStatus:
    """Holds(<= bound), FailsAt(degree) or CertifiedAllDegrees."""

    kind: str  # "holds" | "fails" | "certified"
    bound: int
    degree: int | None = None
    certificate: PeriodicityCertificate | None = None
    note: str | None = None

    @property
    def ok(self) -> bool:
        return self.kind != "fails"

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.kind == "fails":
            return f"FailsAt({self.degree})"
        if self.kind == "certified":
            return "CertifiedAllDegrees"
        return f"Holds(<={self.bound})"

    def as_dict(self) -> dict:
        out = {"status": self.describe(), "kind": self.kind, "bound": self.bound}
        if self.degree is not None:
            out["degree"] = self.degree
        if self.certificate is not None:
            out["certificate"] = self.certificate.as_dict()
        if self.note:
            out["note"] = self.note
        return out


def window_status(dims: dict, bound: int, certificate: PeriodicityCertificate | None = None,
                  note: str | None = None) -> WindowStatus:
    """Verdict on 'this vanishes for all i >= 1' from dims on 1..bound."""
    for i in range(1, bound + 1):
        if dims.get(i, 0) != 0:
            return WindowStatus("fails", bound, degree=i, note=note)
    if certificate is not None and certificate.covers(bound):
        return WindowStatus("certified", bound, certificate=certificate, note=note)
    return WindowStatus("holds", bound, note=note)


def combine_status(statuses, bound: int) -> WindowStatus:
    """Conjunction: the first failure wins; certified only if all are."""
    statuses = list(statuses)
    fails = [s for s in statuses if s.kind == "fails"]
    if fails:
        return min(fails, key=lambda s: s.degree)
    if statuses and all(s.kind == "certified" for s in statuses):
        return WindowStatus("certified", bound, certificate=statuses[0].certificate)
    return WindowStatus("holds", bound)


def detect_periodicity(res, period_max: int = 2, seed: int = 0, top: int | None = None):
    """Search for Omega^n M isomorphic to Omega^{n+p} M with p <= period_max.

    `res` is a Resolution from minimal_free_resolution (or a FreeResolution,
    or a module).  Pairs are tried by increasing n + p, so the certificate
    needs the smallest window.  Returns None when no pair is certified.
    """
    from .complex import Resolution
    from .resolution import FreeResolution
    if isinstance(res, Resolution):
        fr = res.data["free_resolution"]
        top = top if top is not None else res.window
    elif isinstance(res, FreeResolution):
        fr = res
    else:
        fr = resolution_of(res)
    if top is None:
        top = DEFAULT_BOUND
    fr.extend(top)
    if fr.length is not None:
        return PeriodicityCertificate(fr.length + 1, 1, terminates=True)
    for s in range(1, top + 1):
        for p in range(1, min(period_max, s) + 1):
            n = s - p
            if fr.syzygy_dim(n) != fr.syzygy_dim(s):
                continue
            r = find_isomorphism(fr.syzygy(n), fr.syzygy(s), seed=seed)
            if r.is_yes:
                return PeriodicityCertificate(n, p, witness=r.witness)
    return None


def periodicity_of(M: FdModule, bound: int = DEFAULT_BOUND, period_max: int = 2, seed: int = 0):
    """Cached periodicity search for M's resolution within `bound`."""
    key = ("periodicity", bound, period_max, seed)
    if key not in M._cache:
        A = M.algebra
        if not A.is_local and A.factors:
            from ..algebracore.product import decompose
            parts = [periodicity_of(c, bound, period_max, seed) for c in decompose(M)]
            cert = None if any(p is None for p in parts) else PeriodicityCertificate(0, 0, parts=tuple(parts))
        else:
            cert = detect_periodicity(resolution_of(M), period_max, seed, top=bound)
        M._cache[key] = cert
    return M._cache[key]


# -- depth -------------------------------------------------------------------

def depth(M: FdModule, L=None, bound: int = DEFAULT_BOUND):
    """inf{i <= bound : Ext^i(k, M) != 0}; +inf for M = 0, None if no such i."""
    A = M.algebra
    if L is None:
        A.require_local()
    if M.dim == 0:
        return math.inf
    k = residue_field(A)
    if "residue_field" in A._cache:
        k = A._cache["residue_field"]
    else:
        A._cache["residue_field"] = k
    for i in range(bound + 1):
        if ext_dim(k, M, i):
            return i
    return None
