"""Finite-dimensional commutative algebras over an exact field."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field as dc_field

import numpy as np

from ..exactlinalg import Field


class AlgebraError(ValueError):
    pass


@dataclass(eq=False)
class LocalStructure:
    """The maximal ideal m of a local algebra, as a subspace of R.

    `ideal` holds a basis of m in its columns, `generators` holds lifts of a
    basis of m/m^2 (so they generate m as an ideal and R as an algebra), and
    `residue` is the row functional R -> R/m = k sending 1 to 1.
    """

    algebra: "FiniteAlgebra"
    ideal: np.ndarray
    nilpotency: int
    generators: np.ndarray = dc_field(init=False)
    residue: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        A, F = self.algebra, self.algebra.field
        n = A.dim
        if self.ideal.shape != (n, n - 1) or F.rank(self.ideal) != n - 1:
            raise AlgebraError("maximal ideal must have codimension 1")
        for i in range(n):
            moved = F.matmul(A.left[i], self.ideal)
            if F.rank(np.concatenate([self.ideal, moved], axis=1)) != n - 1:
                raise AlgebraError("maximal ideal is not closed under multiplication")
        frame = np.concatenate([self.ideal, A.unit.reshape(-1, 1)], axis=1)
        if F.rank(frame) != n:
            raise AlgebraError("the unit lies in the proposed maximal ideal")
        target = F.zeros(n)
        target[n - 1] = 1
        self.residue = F.solve(frame.T, target)
        powers = ideal_powers(A, self.ideal)
        t = len(powers) + 1
        if t != self.nilpotency:
            raise AlgebraError(f"nilpotency index is {t}, not {self.nilpotency}")
        square = powers[1] if len(powers) > 1 else F.zeros((n, 0))
        if square.shape[1]:
            coords = F.solve(self.ideal, square)
            keep = F.complement(coords, n - 1)
        else:
            keep = list(range(n - 1))
        self.generators = self.ideal[:, keep]

    def residue_of(self, r: np.ndarray):
        return self.algebra.field.reduce(np.asarray(self.residue @ r))

    def in_ideal(self, r: np.ndarray) -> bool:
        return self.residue_of(r) == 0


def ideal_powers(A: "FiniteAlgebra", ideal: np.ndarray) -> list[np.ndarray]:
    """[m, m^2, ..., m^{t-1}] as column bases, stopping at the first zero power."""
    F = A.field
    out = []
    cur = ideal
    while cur.shape[1]:
        out.append(cur)
        prods = [F.matmul(A.mult_matrix(ideal[:, a]), cur) for a in range(ideal.shape[1])]
        stacked = np.concatenate(prods, axis=1) if prods else F.zeros((A.dim, 0))
        cur = F.column_space(stacked) if stacked.size else F.zeros((A.dim, 0))
    return out


class FiniteAlgebra:
    """Commutative algebra with basis b_0..b_{n-1}.

    structure[i, j, k] is the coefficient of b_k in b_i b_j.  `left[i]` is the
    matrix of multiplication by b_i, which is also the action of b_i on the
    regular module.
    """

    def __init__(self, field: Field, labels, structure, unit, *, name=None,
                 generators=None, check=True):
        self.field = field
        self.labels = tuple(str(l) for l in labels)
        self.dim = len(self.labels)
        self.structure = field.array(structure)
        if self.structure.shape != (self.dim,) * 3:
            raise AlgebraError("structure constants must have shape (n, n, n)")
        self.unit = field.array(unit)
        self.name = name
        # left[i][k, j] = c_{ij}^k
        self.left = np.ascontiguousarray(np.transpose(self.structure, (0, 2, 1)))
        self.local: LocalStructure | None = None
        self.factors: tuple[FiniteAlgebra, ...] = ()
        self.idempotents: tuple[np.ndarray, ...] = ()
        self._gens = None if generators is None else field.array(generators)
        self.variables = None
        self.relations = None
        self._cache: dict = {}
        if check:
            self.verify()

    def __repr__(self):
        return self.name or f"FiniteAlgebra(dim={self.dim}, {self.field})"

    def verify(self):
        F, c, n = self.field, self.structure, self.dim
        if not np.array_equal(c, np.transpose(c, (1, 0, 2))):
            raise AlgebraError("structure constants are not commutative")
        # (b_i b_j) b_l == b_i (b_j b_l) for all triples
        lhs = F.einsum("ijk,klm->ijlm", c, c)
        rhs = F.einsum("jlk,ikm->ijlm", c, c)
        if not np.array_equal(lhs, rhs):
            bad = np.argwhere(lhs != rhs)[0]
            raise AlgebraError(f"structure constants are not associative at basis triple {tuple(int(t) for t in bad[:3])}")
        for i in range(n):
            e = F.zeros(n)
            e[i] = 1
            if not np.array_equal(self.mul(self.unit, e), e):
                raise AlgebraError(f"unit law fails on basis element {self.labels[i]}")

    # -- elements -------------------------------------------------------

    def basis_vector(self, i: int) -> np.ndarray:
        e = self.field.zeros(self.dim)
        e[i] = 1
        return e

    def element(self, spec) -> np.ndarray:
        """Coordinates from a basis label, a coordinate list, or an int scalar."""
        if isinstance(spec, str):
            if spec not in self.labels:
                raise AlgebraError(f"unknown basis label {spec!r}")
            return self.basis_vector(self.labels.index(spec))
        v = self.field.array(spec)
        if v.shape != (self.dim,):
            raise AlgebraError("element must have one coordinate per basis element")
        return v

    def mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.mult_matrix(u), v)

    def mult_matrix(self, u: np.ndarray) -> np.ndarray:
        return self.field.einsum("i,ixy->xy", u, self.left)

    def inverse(self, u: np.ndarray) -> np.ndarray | None:
        return self.field.solve(self.mult_matrix(u), self.unit)

    @property
    def generators(self) -> np.ndarray:
        """Algebra generators (columns); the unit is implied."""
        if self._gens is not None:
            return self._gens
        if self.local is not None:
            return self.local.generators
        if self.factors:
            return self._product_generators()
        nonunit = [i for i in range(self.dim) if not np.array_equal(self.basis_vector(i), self.unit)]
        return np.stack([self.basis_vector(i) for i in nonunit], axis=1) if nonunit else self.field.zeros((self.dim, 0))

    def _product_generators(self):
        cols = []
        offset = 0
        for A in self.factors:
            g = A.generators
            for j in range(g.shape[1]):
                v = self.field.zeros(self.dim)
                v[offset:offset + A.dim] = g[:, j]
                cols.append(v)
            offset += A.dim
        cols.extend(self.idempotents[:-1])
        return np.stack(cols, axis=1) if cols else self.field.zeros((self.dim, 0))

    @property
    def is_local(self) -> bool:
        return self.local is not None

    def require_local(self) -> LocalStructure:
        if self.local is None:
            raise AlgebraError(f"{self!r} is not local")
        return self.local

    def maximal_ideals(self) -> list[np.ndarray]:
        if self.local is not None:
            return [self.local.ideal]
        if not self.factors:
            raise AlgebraError("no local data recorded for this algebra")
        out = []
        offset = 0
        for idx, A in enumerate(self.factors):
            for m in A.maximal_ideals():
                cols = []
                for j in range(m.shape[1]):
                    v = self.field.zeros(self.dim)
                    v[offset:offset + A.dim] = m[:, j]
                    cols.append(v)
                inner = 0
                for jdx, B in enumerate(self.factors):
                    if jdx != idx:
                        for t in range(B.dim):
                            cols.append(self.basis_vector(inner + t))
                    inner += B.dim
                out.append(np.stack(cols, axis=1))
            offset += A.dim
        return out


# -- builders ------------------------------------------------------------

_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")


def parse_monomial(text: str, variables) -> tuple[int, ...]:
    """'x^2*y' -> exponent tuple in the order of `variables`."""
    exps = [0] * len(variables)
    text = text.strip()
    if text == "1":
        return tuple(exps)
    for token in text.split("*"):
        m = _TOKEN.match(token.strip())
        if not m or m.group(1) not in variables:
            raise AlgebraError(f"cannot read monomial {text!r}")
        exps[variables.index(m.group(1))] += int(m.group(2) or 1)
    return tuple(exps)


def monomial_label(exps, variables) -> str:
    parts = []
    for v, e in zip(variables, exps):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts) if parts else "1"


def build_monomial_quotient(variables, relations, field: Field, name=None):
    """k[variables] / (monomial relations), with its local structure.

    Relations are strings like "x^2" or "x*y", or exponent tuples.  The basis
    is the set of standard monomials ordered by degree, then by descending
    exponents in variable order (so x comes before y).
    """
    variables = list(variables)
    if len(set(variables)) != len(variables):
        raise AlgebraError("repeated variable name")
    rels = [parse_monomial(r, variables) if isinstance(r, str) else tuple(r) for r in relations]
    caps = []
    for i, v in enumerate(variables):
        pure = [r[i] for r in rels if all(e == 0 for j, e in enumerate(r) if j != i) and r[i] > 0]
        if not pure:
            raise AlgebraError(f"variable {v} is not nilpotent: the quotient has infinite basis")
        caps.append(min(pure))
    if any(all(e == 0 for e in r) for r in rels):
        raise AlgebraError("the relation 1 gives the zero ring")

    def standard(e):
        return not any(all(a >= b for a, b in zip(e, r)) for r in rels)

    monos = [e for e in itertools.product(*(range(c) for c in caps)) if standard(e)]
    monos.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    index = {e: i for i, e in enumerate(monos)}
    n = len(monos)
    c = np.zeros((n, n, n), dtype=np.int64)
    for i, a in enumerate(monos):
        for j, b in enumerate(monos):
            prod = tuple(x + y for x, y in zip(a, b))
            if prod in index:
                c[i, j, index[prod]] = 1
    labels = [monomial_label(e, variables) for e in monos]
    unit = np.zeros(n, dtype=np.int64)
    unit[0] = 1
    A = FiniteAlgebra(field, labels, c, unit, name=name)
    A.variables = tuple(variables)
    A.relations = tuple(rels)
    ideal = np.zeros((n, n - 1), dtype=np.int64)
    ideal[np.arange(1, n), np.arange(n - 1)] = 1
    nil = max(sum(e) for e in monos) + 1
    A.local = LocalStructure(A, field.array(ideal), nil)
    return A, A.local


def explicit_algebra(field: Field, labels, structure, unit, maximal_ideal=None, name=None):
    """Algebra from structure constants; a maximal ideal basis makes it local."""
    A = FiniteAlgebra(field, labels, structure, unit, name=name)
    if maximal_ideal is not None:
        m = field.array(maximal_ideal)
        if m.ndim == 1:
            m = m.reshape(-1, 1)
        if m.shape[0] != A.dim:
            m = m.T
        m = m if m.size else field.zeros((A.dim, 0))
        A.local = LocalStructure(A, m, len(ideal_powers(A, m)) + 1)
    return A


def product_algebra(*algebras: FiniteAlgebra, name=None) -> FiniteAlgebra:
    """Direct product with componentwise multiplication and unit (1, ..., 1)."""
    if len(algebras) < 2:
        raise AlgebraError("a product needs at least two factors")
    F = algebras[0].field
    if any(A.field != F for A in algebras):
        raise AlgebraError("factors are defined over different fields")
    n = sum(A.dim for A in algebras)
    c = F.zeros((n, n, n))
    unit = F.zeros(n)
    labels = []
    idems = []
    offset = 0
    for idx, A in enumerate(algebras):
        s = slice(offset, offset + A.dim)
        c[s, s, s] = A.structure
        unit[s] = A.unit
        e = F.zeros(n)
        e[s] = A.unit
        idems.append(e)
        for l in A.labels:
            slots = ["0"] * len(algebras)
            slots[idx] = l
            labels.append("(" + ",".join(slots) + ")")
        offset += A.dim
    P = FiniteAlgebra(F, labels, c, unit, name=name)
    P.factors = tuple(algebras)
    P.idempotents = tuple(idems)
    return P


def ground_field_algebra(field: Field, name=None) -> FiniteAlgebra:
    A, _ = build_monomial_quotient([], [], field, name=name)
    return A
