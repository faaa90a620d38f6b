import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gorenlab.algebracore import (AlgebraError, ModuleError, ModuleHom, free_module,
                                  hom_module, identity, multiplication_map, tensor_module, zero_module)
from gorenlab.algebracore.presentation import rmatrix_to_k
from gorenlab.complexes import (BoundedComplex, TermLabel, betti_numbers, depth, detect_periodicity,
                                direct_sum_complexes, ext, homology, is_minimal_complex,
                                minimal_free_resolution, minimize_complex, periodicity_of, tor,
                                window_status)
from helpers import D, F5, LOCAL, R, k, module_set, random_cokernel, random_twist, ring, rm2_ext_dims_k_R


def _mult_x(name):
    return multiplication_map(R(name), ring(name).element("x"))


def _two_term(d):
    return BoundedComplex({0: d.target, 1: d.source}, {1: d})


def test_homology_examples():
    M = module_set("Rx2")["k+R"]
    X = _two_term(identity(M))
    assert homology(X, 0).dim == 0 and homology(X, 1).dim == 0
    assert homology(BoundedComplex({0: k("Rx2")}), 0).dim == 1
    H0 = homology(_two_term(_mult_x("Rx2")), 0)
    assert H0.dim == 1
    H0.verify()


def test_homology_outside_window():
    with pytest.raises(ModuleError):
        homology(BoundedComplex({0: k("Rx2")}), 3)


def test_d_squared_checked():
    x = _mult_x("Rx3")
    with pytest.raises(ModuleError):
        BoundedComplex({0: R("Rx3"), 1: R("Rx3"), 2: R("Rx3")}, {1: x, 2: identity(R("Rx3"))})


def test_betti_numbers_examples():
    assert betti_numbers(free_module(ring("Rm2"), 3), 4) == [3, 0, 0, 0, 0]
    assert betti_numbers(k("Rx2"), 5) == [1] * 6
    assert betti_numbers(k("Rm2"), 5) == [1, 2, 4, 8, 16, 32]


def test_minimal_resolution_of_k_over_rx2_is_multiplication_by_x():
    res = minimal_free_resolution(k("Rx2"), bound=4)
    assert res.minimal and not res.augmented_exactness_failures()
    x = _mult_x("Rx2").matrix
    for n in range(1, 5):
        assert np.array_equal(res.complex.differentials[n].matrix, x)


def test_resolution_needs_local():
    with pytest.raises(AlgebraError):
        minimal_free_resolution(R("Rprod"))


def test_ext_examples():
    N = module_set("Rxy")["m"]
    assert ext(R("Rxy"), N, 3).dims == [N.dim, 0, 0, 0]
    assert ext(k("Rx2"), R("Rx2"), 8).dims[1:] == [0] * 8
    assert ext(k("Rm2"), R("Rm2"), 3).dims == [2, 3, 6, 12]


def test_rm2_ext_matches_brute_force_oracle():
    assert ext(k("Rm2"), R("Rm2"), 6).dims == rm2_ext_dims_k_R(6)


def test_ext_table_module_matches_dimension():
    T = ext(k("Rm2"), R("Rm2"), 2)
    E1 = T.module(1)
    assert E1.dim == 3
    E1.verify()


def test_tor_examples():
    M = module_set("Rm2")["k+R"]
    assert tor(M, k("Rm2"), 0).dims[0] == tensor_module(M, k("Rm2")).dim
    assert tor(R("Rm2"), M, 3).dims[1:] == [0, 0, 0]
    assert tor(k("Rx2"), k("Rx2"), 2).dims == [1, 1, 1]


def test_minimize_examples():
    A = ring("Rx2")
    X = minimal_free_resolution(k("Rx2"), bound=3).complex
    Xp, data = minimize_complex(X)
    assert Xp.dims() == X.dims() and data.eliminations == []
    Y = _two_term(identity(R("Rx2")))
    Y.labels = {0: TermLabel("free", 1), 1: TermLabel("free", 1)}
    Yp, _ = minimize_complex(Y)
    assert all(d == 0 for d in Yp.dims().values())
    # [[1, 0], [0, x]] on R^2 -> R^2
    E = F5.zeros((2, 2, 2))
    E[0, 0] = A.element("1")
    E[1, 1] = A.element("x")
    P = free_module(A, 2)
    Z = BoundedComplex({0: P, 1: free_module(A, 2)},
                       {1: None}, {0: TermLabel("free", 2), 1: TermLabel("free", 2)})
    Z = BoundedComplex({0: Z.modules[0], 1: Z.modules[1]},
                       {1: ModuleHom(Z.modules[1], Z.modules[0], rmatrix_to_k(A, E))},
                       Z.labels)
    Zp, data = minimize_complex(Z)
    assert Zp.dims() == {0: 2, 1: 2}
    assert is_minimal_complex(Zp)
    assert np.array_equal(Zp.differentials[1].matrix, _mult_x("Rx2").matrix)
    assert [Zp.homology_dim(n) for n in (0, 1)] == [Z.homology_dim(n) for n in (0, 1)]


def test_minimize_needs_labels():
    with pytest.raises(ModuleError):
        minimize_complex(_two_term(_mult_x("Rx2")))


def test_direct_sum_complexes():
    X = minimal_free_resolution(k("Rx2"), bound=3).complex
    Z = BoundedComplex({0: zero_module(ring("Rx2"))})
    S = direct_sum_complexes([X, Z])
    assert S.dims() == X.dims()
    S2 = direct_sum_complexes([X, X])
    assert S2.dims() == {n: 2 * d for n, d in X.dims().items()}
    for n in range(4):
        assert S2.homology_dim(n) == 2 * X.homology_dim(n)


def test_direct_sum_algebra_mismatch():
    with pytest.raises(ModuleError):
        direct_sum_complexes([BoundedComplex({0: k("Rx2")}), BoundedComplex({0: k("Rx3")})])


def test_depth_examples(local_name):
    assert depth(zero_module(ring(local_name))) == math.inf
    assert depth(k(local_name)) == 0
    assert depth(R(local_name)) == 0


def test_periodicity_examples():
    cert = detect_periodicity(minimal_free_resolution(k("Rx2"), bound=3))
    assert cert is not None and cert.period == 1 and cert.witness.is_isomorphism()
    term = detect_periodicity(free_module(ring("Rxy"), 2))
    assert term.terminates
    # over Rxy the syzygies of k grow, so no certificate is expected
    assert detect_periodicity(k("Rxy"), top=4) is None
    assert detect_periodicity(k("Rm2"), top=4) is None


def test_window_status_kinds():
    cert = periodicity_of(k("Rx2"))
    assert window_status({1: 0, 2: 0}, 2).kind == "holds"
    assert window_status({1: 0, 2: 1}, 2).kind == "fails"
    assert window_status({1: 0, 2: 0}, 2, cert).kind == "certified"


def test_mm_zero_betti_doubling():
    b = betti_numbers(k("Rm2"), 7)
    assert all(b[i + 1] == 2 * b[i] for i in range(7))


# -- properties -------------------------------------------------------------

local_rings = st.sampled_from(LOCAL)
seeds = st.integers(0, 2**32 - 1)
kinds = st.sampled_from(["random", "k", "D", "m", "k+R", "R/(x)"])


def _module(name, seed, which):
    rng = np.random.default_rng(seed)
    if which == "random":
        return random_cokernel(name, rng)
    return random_twist(module_set(name)[which], rng)


@settings(max_examples=40, deadline=None)
@given(local_rings, seeds, kinds)
def test_resolution_exact_and_minimal(name, seed, which):
    M = _module(name, seed, which)
    res = minimal_free_resolution(M, bound=4)
    assert not res.augmented_exactness_failures()
    assert res.minimal and is_minimal_complex(res.complex)
    fr = res.data["free_resolution"]
    assert fr.is_minimal(4)


@settings(max_examples=30, deadline=None)
@given(local_rings, seeds, kinds, kinds)
def test_ext_and_tor_degree_zero(name, seed, a, b):
    M, N = _module(name, seed, a), _module(name, seed + 1, b)
    assert ext(M, N, 1).dims[0] == hom_module(M, N).dim
    assert tor(M, N, 1).dims[0] == tensor_module(M, N).dim


@settings(max_examples=30, deadline=None)
@given(local_rings, seeds, kinds)
def test_ext_into_k_and_tor_with_k_are_betti(name, seed, which):
    M = _module(name, seed, which)
    b = betti_numbers(M, 4)
    b = b + [0] * (5 - len(b))
    assert ext(M, k(name), 4).dims == b
    assert tor(M, k(name), 4).dims == b


@settings(max_examples=30, deadline=None)
@given(local_rings, seeds, kinds)
def test_ext_into_dualizing_vanishes(name, seed, which):
    M = _module(name, seed, which)
    assert ext(M, D(name), 4).dims[1:] == [0] * 4


@settings(max_examples=30, deadline=None)
@given(local_rings, seeds, kinds)
def test_minimize_preserves_homology(name, seed, which):
    M = _module(name, seed, which)
    X = minimal_free_resolution(M, bound=3).complex
    # add a contractible summand R -(id)-> R in degrees 2,1 and scramble the bases
    A = ring(name)
    P1, P2 = free_module(A, 1), free_module(A, 1)
    C = BoundedComplex({1: P1, 2: P2}, {2: ModuleHom(P2, P1, F5.eye(A.dim))},
                       {1: TermLabel("free", 1), 2: TermLabel("free", 1)})
    S = direct_sum_complexes([X, C])
    Sp, _ = minimize_complex(S)
    assert is_minimal_complex(Sp)
    for n in range(S.lo, S.hi + 1):
        assert Sp.homology_dim(n) == S.homology_dim(n)
