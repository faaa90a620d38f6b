"""Corpus rings, random modules and small independent oracles shared by the tests."""
from functools import lru_cache
from fractions import Fraction

from gorenlab.algebracore import (ModuleHom, build_monomial_quotient, direct_sum, free_module,
                                  ground_field_algebra, hom_module, ideal_module, k_dual,
                                  product_algebra, quotient, quotient_by_ideal, regular_module,
                                  residue_field, twisted)
from gorenlab.algebracore.presentation import rmatrix_to_k
from gorenlab.exactlinalg import Field

RINGS = ("Rx2", "Rx3", "Rxy", "Rm2", "Rprod")
LOCAL = ("Rx2", "Rx3", "Rxy", "Rm2")
GORENSTEIN = ("Rx2", "Rx3", "Rxy")

_MONO = {
    "Rx2": (["x"], ["x^2"]),
    "Rx3": (["x"], ["x^3"]),
    "Rxy": (["x", "y"], ["x^2", "y^2"]),
    "Rm2": (["x", "y"], ["x^2", "x*y", "y^2"]),
}

F5 = Field(5)


@lru_cache(maxsize=None)
def ring(name):
    if name == "Rprod":
        return product_algebra(ground_field_algebra(F5), ground_field_algebra(F5), name="Rprod")
    v, r = _MONO[name]
    return build_monomial_quotient(v, r, F5, name=name)[0]


@lru_cache(maxsize=None)
def R(name):
    return regular_module(ring(name))


@lru_cache(maxsize=None)
def k(name):
    return residue_field(ring(name))


@lru_cache(maxsize=None)
def D(name):
    return k_dual(R(name))


@lru_cache(maxsize=None)
def module_set(name):
    """The fixed six-module set: k, R, D, m, k+R, R/(x)."""
    A = ring(name)
    m = ideal_module(A, [lab for lab in A.labels if lab != "1"][:2])
    return {"k": k(name), "R": R(name), "D": D(name), "m": m,
            "k+R": direct_sum(k(name), R(name)).module, "R/(x)": quotient_by_ideal(A, ["x"])}


def random_invertible(F, n, rng):
    while True:
        g = F.random(rng, (n, n))
        if F.rank(g) == n:
            return g


def random_hom(M, N, rng):
    H = hom_module(M, N)
    F = M.field
    mat = F.zeros((N.dim, M.dim))
    for h in range(H.dim):
        mat = F.add(mat, F.scale(int(rng.integers(F.p)), H.basis[h]))
    return ModuleHom(M, N, mat)


def random_automorphism(M, rng, tries=50):
    for _ in range(tries):
        f = random_hom(M, M, rng)
        if f.is_isomorphism():
            return f
    raise RuntimeError("no automorphism found")


def random_cokernel(name, rng, gens=2, rels=2):
    """coker(R^rels -> R^gens) for a random R-matrix with entries in m (so gens stays minimal)."""
    A = ring(name)
    F = A.field
    E = F.random(rng, (gens, rels, A.dim))
    E[:, :, 0] = 0  # basis element 0 is the unit monomial
    P = free_module(A, gens)
    return quotient(P, rmatrix_to_k(A, E)).module


def random_twist(M, rng):
    """M on a random new k-basis."""
    return twisted(M, random_invertible(M.field, M.dim, rng))[0]


# -- independent oracles ------------------------------------------------------

def gauss_rank(rows, p=None):
    """Rank by plain Gaussian elimination on lists (mod p, or over QQ via Fraction)."""
    if p is None:
        a = [[Fraction(x) for x in r] for r in rows]
    else:
        a = [[int(x) % p for x in r] for r in rows]
    if not a:
        return 0
    ncol = len(a[0])
    rank = 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        if p is None:
            inv = 1 / a[rank][c]
            a[rank] = [x * inv for x in a[rank]]
        else:
            inv = pow(a[rank][c], p - 2, p)
            a[rank] = [x * inv % p for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c]
                if p is None:
                    a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
                else:
                    a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
        if rank == len(a):
            break
    return rank


def rm2_ext_dims_k_R(top):
    """dim Ext^i(k, R) over F_5[x,y]/(x^2,xy,y^2) for 0 <= i <= top, from first principles.

    Since m^2 = 0 the minimal resolution of k has F_i = R^{2^i} with generator
    e_{2l} of F_i going to x*e_l and e_{2l+1} going to y*e_l.  Hom(F_i, R) is
    identified with R^{2^i}; the coboundary d^i: R^{2^{i-1}} -> R^{2^i} sends
    a row of values f to (x*f_l, y*f_l)_l.  R has basis (1, x, y) with the
    multiplication table written out by hand below.
    """
    p = 5

    def times(var, v):  # v = (a, b, c) means a + b x + c y
        a = v[0]
        return (0, a, 0) if var == "x" else (0, 0, a)

    def cobound(i):
        """Matrix of Hom(d_i, R): R^{2^{i-1}} -> R^{2^i} on k-coordinates."""
        src, tgt = 2 ** (i - 1), 2 ** i
        rows = [[0] * (3 * src) for _ in range(3 * tgt)]
        for l in range(src):
            for t in range(3):
                unit = [0, 0, 0]
                unit[t] = 1
                for j, var in ((2 * l, "x"), (2 * l + 1, "y")):
                    img = times(var, unit)
                    for s in range(3):
                        rows[3 * j + s][3 * l + t] = img[s]
        return rows

    ranks = {i: gauss_rank(cobound(i), p) for i in range(1, top + 2)}
    # Hom(F_0, R) = Hom(R, R); Ext^0 is the kernel of Hom(d_1, R) there.
    dims = []
    for i in range(top + 1):
        dim_hom = 3 * 2 ** i
        out = ranks[i + 1]
        into = ranks[i] if i >= 1 else 0
        dims.append(dim_hom - out - into)
    return dims
