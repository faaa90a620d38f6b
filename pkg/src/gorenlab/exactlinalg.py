"""Exact dense linear algebra over prime fields and the rationals.

Matrices are plain numpy arrays.  Over F_p they are int64 arrays holding the
canonical residues 0..p-1; over Q they are object arrays of Fraction.  A
`Field` owns the arithmetic, and every routine returns fresh arrays.

Elimination over F_p runs in a numba kernel.  Products over F_p go through
float64 BLAS only when every partial sum is an integer below 2**53, so the
result is exact; larger products are split into limbs first.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numba
import numpy as np

_EXACT_FLOAT = 2**53


@numba.njit(cache=True)
def _inverse_mod(a, p):
    t, new_t = 0, 1
    r, new_r = p, a
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    if t < 0:
        t += p
    return t


@numba.njit(cache=True)
def _rref_modp(A, p, ncp, full):
    # In place.  Pivots are searched only among the first ncp columns; the
    # remaining columns are carried along (augmented blocks).
    m, n = A.shape
    pivots = np.empty(min(m, ncp), dtype=np.int64)
    support = np.empty(n, dtype=np.int64)
    r = 0
    for c in range(ncp):
        if r == m:
            break
        i = r
        while i < m and A[i, c] == 0:
            i += 1
        if i == m:
            continue
        if i != r:
            for j in range(c, n):
                tmp = A[i, j]
                A[i, j] = A[r, j]
                A[r, j] = tmp
        inv = _inverse_mod(A[r, c], p)
        k = 0
        for j in range(c, n):
            v = A[r, j]
            if v != 0:
                A[r, j] = v * inv % p
                support[k] = j
                k += 1
        start = 0 if full else r + 1
        for i2 in range(start, m):
            if i2 == r:
                continue
            f = A[i2, c]
            if f == 0:
                continue
            for t in range(k):
                j = support[t]
                A[i2, j] = (A[i2, j] - f * A[r, j]) % p
        pivots[r] = c
        r += 1
    return pivots[:r].copy()


def _rref_object(A, ncp, full):
    m, _ = A.shape
    pivots = []
    r = 0
    for c in range(ncp):
        if r == m:
            break
        i = next((i for i in range(r, m) if A[i, c] != 0), None)
        if i is None:
            continue
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r, c:] = A[r, c:] / A[r, c]
        rows = [i2 for i2 in range(0 if full else r + 1, m) if i2 != r and A[i2, c] != 0]
        if rows:
            A[rows, c:] = A[rows, c:] - np.outer(A[rows, c], A[r, c:])
        pivots.append(c)
        r += 1
    return np.array(pivots, dtype=np.int64)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, math.isqrt(p) + 1):
        if p % d == 0:
            return False
    return True


class Field:
    """F_p (prime p < 2**31) when `p` is given, otherwise Q."""

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None:
            p = int(p)
            if not (_is_prime(p) and p < 2**31):
                raise ValueError(f"{p} is not a prime below 2^31")
        self.p = p

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @classmethod
    def rational(cls) -> "Field":
        return cls(None)

    @property
    def is_prime(self) -> bool:
        return self.p is not None

    @property
    def dtype(self):
        return np.int64 if self.p is not None else object

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"GF({self.p})" if self.p is not None else "QQ"

    # -- scalars --------------------------------------------------------

    def scalar(self, value):
        """Canonical representative of an int, Fraction or string like "-1/2"."""
        if isinstance(value, (bool, np.bool_)) or isinstance(value, float):
            raise TypeError(f"not an exact scalar: {value!r}")
        if isinstance(value, str):
            value = Fraction(value.strip())
        elif isinstance(value, np.integer):
            value = int(value)
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator of {value} vanishes mod {self.p}")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def format(self, x) -> str:
        return str(int(x)) if self.p is not None else str(Fraction(x))

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / Fraction(x)
        return pow(int(x), -1, self.p)

    # -- arrays ---------------------------------------------------------

    def array(self, data) -> np.ndarray:
        a = np.asarray(data)
        if self.p is not None:
            if a.dtype.kind in "iu":
                return np.mod(a.astype(np.int64, copy=False), self.p)
            if a.dtype.kind == "b" or a.dtype.kind == "f":
                raise TypeError("matrices must hold exact scalars")
            flat = [self.scalar(v) for v in a.ravel()]
            return np.array(flat, dtype=np.int64).reshape(a.shape)
        if a.dtype.kind == "f" or a.dtype.kind == "b":
            raise TypeError("matrices must hold exact scalars")
        flat = [self.scalar(v) for v in a.ravel()]
        out = np.empty(len(flat), dtype=object)
        out[:] = flat
        return out.reshape(a.shape)

    def reduce(self, a: np.ndarray) -> np.ndarray:
        """Bring an integer-valued (or Fraction) array back to canonical form."""
        if self.p is not None:
            if a.dtype == object:
                return np.array([int(v) % self.p for v in a.ravel()], dtype=np.int64).reshape(a.shape)
            return np.mod(a, self.p).astype(np.int64, copy=False)
        return a

    def zeros(self, shape) -> np.ndarray:
        if self.p is not None:
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        out[np.arange(n), np.arange(n)] = 1 if self.p is not None else Fraction(1)
        return out

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.p is not None:
            return rng.integers(0, self.p, size=shape, dtype=np.int64)
        return self.array(rng.integers(-3, 4, size=shape))

    def is_zero(self, a: np.ndarray) -> bool:
        return not np.any(a != 0)

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def neg(self, a):
        return self.reduce(-a)

    def scale(self, c, a):
        c = self.scalar(c)
        if self.p is not None:
            return np.mod(a * c, self.p)
        return a * c

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p is None:
            if a.shape[-1] == 0:
                return self.zeros(a.shape[:-1] + b.shape[-1:])
            return a @ b
        return self._contract(lambda x, y: x @ y, a, b, a.shape[-1] if a.ndim else 1)

    def einsum(self, spec: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Two-operand einsum; `spec` must use explicit output indices."""
        ins, out = spec.split("->")
        sa, sb = ins.split(",")
        sizes = dict(zip(sa, a.shape))
        sizes.update(zip(sb, b.shape))
        inner = math.prod(sizes[c] for c in set(sa + sb) - set(out))
        if self.p is None:
            if inner == 0:
                return self.zeros(tuple(sizes[c] for c in out))
            return np.einsum(spec, a, b)
        return self._contract(lambda x, y: np.einsum(spec, x, y), a, b, inner)

    def _contract(self, op, a, b, inner):
        p = self.p
        inner = max(inner, 1)
        if (p - 1) ** 2 * inner < _EXACT_FLOAT:
            c = op(a.astype(np.float64), b.astype(np.float64))
            return np.mod(np.rint(c).astype(np.int64), p)
        bits = int(math.log2(_EXACT_FLOAT / ((p - 1) * inner)))
        if bits < 1:
            c = op(a.astype(object), b.astype(object))
            return self.reduce(c)
        af = a.astype(np.float64)
        base = 1 << bits
        limbs = []
        rest = b.astype(np.int64)
        while True:
            limbs.append(rest % base)
            rest = rest // base
            if not rest.any():
                break
        acc = None
        for limb in reversed(limbs):
            part = np.mod(np.rint(op(af, limb.astype(np.float64))).astype(np.int64), p)
            acc = part if acc is None else np.mod(acc * base + part, p)
        return acc

    # -- elimination ----------------------------------------------------

    def _rref_inplace(self, a: np.ndarray, ncp: int, full: bool = True) -> np.ndarray:
        if a.shape[0] == 0 or ncp == 0:
            return np.zeros(0, dtype=np.int64)
        if self.p is not None:
            return _rref_modp(a, self.p, ncp, full)
        return _rref_object(a, ncp, full)

    def _work_copy(self, a: np.ndarray) -> np.ndarray:
        if self.p is not None:
            return np.ascontiguousarray(a, dtype=np.int64).copy()
        return np.array(a, dtype=object, copy=True)

    def rref(self, a: np.ndarray, transform: bool = False):
        """Reduced row echelon form.

        Returns (R, pivots) or, with transform=True, (R, pivots, T) where
        T is invertible and T @ A == R.  Pivots are chosen leftmost-first,
        taking the first row with a nonzero entry.
        """
        a = self._work_copy(a)
        m, n = a.shape
        if transform:
            aug = np.concatenate([a, self.eye(m)], axis=1)
            piv = self._rref_inplace(aug, n)
            return aug[:, :n].copy(), [int(c) for c in piv], aug[:, n:].copy()
        piv = self._rref_inplace(a, n)
        return a, [int(c) for c in piv]

    def rank(self, a: np.ndarray) -> int:
        if a.size == 0:
            return 0
        work = self._work_copy(a)
        if work.shape[0] > work.shape[1]:
            work = self._work_copy(work.T)
        return len(self._rref_inplace(work, work.shape[1], full=False))

    def pivot_columns(self, a: np.ndarray) -> list[int]:
        """Indices of a maximal independent set of columns, leftmost first."""
        if a.size == 0:
            return []
        work = self._work_copy(a)
        return [int(c) for c in self._rref_inplace(work, work.shape[1], full=False)]

    def kernel(self, a: np.ndarray, return_free: bool = False):
        """Columns spanning {x : A x = 0}.

        Column j of the result is the solution with free variable j set to 1
        and the other free variables 0, so its rows at the free positions
        form an identity block.  `return_free` also returns those positions.
        """
        m, n = a.shape
        r, piv = self.rref(a)
        pivset = set(piv)
        free = [j for j in range(n) if j not in pivset]
        k = self.zeros((n, len(free)))
        if free:
            k[free, np.arange(len(free))] = 1 if self.p is not None else Fraction(1)
            if piv:
                k[piv, :] = self.neg(r[: len(piv)][:, free])
        return (k, free) if return_free else k

    def solve(self, a: np.ndarray, b: np.ndarray):
        """A solution X of A X = B with free variables 0, or None."""
        m, n = a.shape
        if b.ndim == 1:
            x = self.solve(a, b.reshape(-1, 1))
            return None if x is None else x[:, 0]
        if b.shape[0] != m:
            raise ValueError("row counts differ")
        aug = self._work_copy(np.concatenate([a, b], axis=1))
        piv = [int(c) for c in self._rref_inplace(aug, n)]
        rk = len(piv)
        if not self.is_zero(aug[rk:, n:]):
            return None
        x = self.zeros((n, b.shape[1]))
        if piv:
            x[piv, :] = aug[:rk, n:]
        return x

    def column_space(self, a: np.ndarray) -> np.ndarray:
        return a[:, self.pivot_columns(a)]

    def complement(self, u: np.ndarray, n: int | None = None) -> list[int]:
        """Standard basis indices completing the column span of `u` to k^n."""
        if n is None:
            n = u.shape[0]
        if u.size == 0:
            return list(range(n))
        _, piv = self.rref(u.T)
        pivset = set(piv)
        return [j for j in range(n) if j not in pivset]


def rref(a: np.ndarray, field: Field, transform: bool = True):
    return field.rref(a, transform=transform)


def kernel_basis(a: np.ndarray, field: Field) -> np.ndarray:
    return field.kernel(a)


def solve(a: np.ndarray, b: np.ndarray, field: Field):
    return field.solve(a, b)
