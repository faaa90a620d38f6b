import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gorenlab.algebracore import (AlgebraError, ModuleError, ModuleHom, ShortExactSequence,
                                  build_monomial_quotient, direct_sum, dual_sequence, exactness_check,
                                  explicit_algebra, find_isomorphism, free_module, ground_field_algebra,
                                  hom_module, identity, ideal_module, induced_cokernel_map,
                                  k_dual, minimal_generators, multiplication_map, power_module,
                                  product_algebra, pushout, regular_module, residue_field, subobject,
                                  tensor_module, zero_hom)
from gorenlab.exactlinalg import Field
from helpers import (D, F5, LOCAL, R, k, random_cokernel, random_hom, random_twist, ring,
                     module_set)


def test_monomial_quotient_bases():
    assert ring("Rx2").labels == ("1", "x")
    assert ring("Rm2").labels == ("1", "x", "y")
    assert ring("Rxy").labels == ("1", "x", "y", "x*y")
    assert ring("Rx3").dim == 3


def test_monomial_quotient_needs_nilpotent_variables():
    with pytest.raises(AlgebraError, match="not nilpotent"):
        build_monomial_quotient(["x", "y"], ["x^2"], F5)


def test_local_structure_axioms(local_name):
    A = ring(local_name)
    L = A.local
    assert L.ideal.shape == (A.dim, A.dim - 1)
    assert L.residue_of(A.unit) == 1
    assert (L.nilpotency, local_name) in {(2, "Rx2"), (3, "Rx3"), (3, "Rxy"), (2, "Rm2")}


def test_product_algebra():
    P = ring("Rprod")
    assert P.dim == 2 and not P.is_local and len(P.idempotents) == 2
    e1, e2 = P.idempotents
    assert np.array_equal(P.mul(e1, e1), e1) and P.mul(e1, e2).sum() == 0
    Q = product_algebra(ring("Rx2"), ground_field_algebra(F5))
    assert Q.dim == 3 and not Q.is_local
    assert len(Q.maximal_ideals()) == 2


def test_product_needs_same_field():
    with pytest.raises(AlgebraError):
        product_algebra(ground_field_algebra(F5), ground_field_algebra(Field(7)))


def test_nonassociative_structure_rejected():
    # basis 1, a with a*a = 1 + a would be fine; break associativity by hand
    c = np.zeros((3, 3, 3), dtype=np.int64)
    for i in range(3):
        c[0, i, i] = c[i, 0, i] = 1
    c[1, 1, 2] = 1
    c[2, 2, 1] = 1
    c[1, 2, 1] = c[2, 1, 1] = 1
    with pytest.raises(AlgebraError, match="associativ"):
        explicit_algebra(F5, ["1", "a", "b"], c, [1, 0, 0])


def test_hom_examples():
    N = module_set("Rxy")["k+R"]
    H = hom_module(R("Rxy"), N)
    assert H.dim == N.dim
    assert hom_module(k("Rx2"), k("Rx2")).dim == 1
    assert hom_module(k("Rm2"), R("Rm2")).dim == 2


def test_tensor_examples():
    N = module_set("Rm2")["m"]
    assert tensor_module(R("Rm2"), N).dim == N.dim
    assert tensor_module(k("Rx2"), k("Rx2")).dim == 1
    for n in (1, 2, 3):
        assert tensor_module(D("Rm2"), free_module(ring("Rm2"), n)).dim == 3 * n


def test_k_dual_examples():
    assert D("Rm2").dim == 3
    assert find_isomorphism(k_dual(k("Rm2")), k("Rm2")).is_yes
    M = module_set("Rxy")["m"]
    assert np.array_equal(k_dual(k_dual(M)).actions, M.actions)


def test_subobjects():
    A = ring("Rx2")
    Rr = R("Rx2")
    K, _ = subobject(identity(Rr), "kernel")
    C, _ = subobject(identity(Rr), "cokernel")
    assert K.dim == 0 and C.dim == 0
    z = zero_hom(Rr, k("Rx2"))
    assert subobject(z, "kernel")[0].dim == 2 and subobject(z, "cokernel")[0].dim == 1
    x = multiplication_map(Rr, A.element("x"))
    assert subobject(x, "kernel")[0].dim == 1
    assert subobject(x, "image")[0].dim == 1
    Q, _ = subobject(x, "cokernel")
    assert find_isomorphism(Q, k("Rx2")).is_yes


def _socle_inclusion():
    return ModuleHom(k("Rx2"), R("Rx2"), F5.array([[0], [1]]))


def test_pushout_examples():
    s = _socle_inclusion()
    po = pushout(s, s)
    assert po.module.dim == 3 and po.commutes(s, s)
    assert induced_cokernel_map(s, po).is_isomorphism()
    # psi an isomorphism gives H = V
    iso = identity(R("Rx2"))
    po2 = pushout(iso, multiplication_map(R("Rx2"), ring("Rx2").element("x")))
    assert po2.module.dim == 2 and po2.v.is_isomorphism()
    # phi = 0 gives coker(psi) + V
    po3 = pushout(s, zero_hom(k("Rx2"), R("Rx2")))
    assert po3.module.dim == 1 + 2


def test_pushout_source_mismatch():
    with pytest.raises(ModuleError):
        pushout(_socle_inclusion(), identity(R("Rx2")))


def test_find_isomorphism_examples():
    M = module_set("Rm2")["k+R"]
    res = find_isomorphism(M, M)
    assert res.is_yes and res.witness.is_isomorphism()
    assert find_isomorphism(k("Rm2"), R("Rm2")).certificate["kind"] == "dimension"
    no = find_isomorphism(R("Rm2"), D("Rm2"))
    assert no.is_no and no.certificate["kind"] == "joint_image"


def test_find_isomorphism_on_twisted_copy():
    rng = np.random.default_rng(1)
    M = module_set("Rxy")["k+R"]
    T = random_twist(M, rng)
    assert find_isomorphism(M, T, seed=4).is_yes


def test_minimal_generators():
    assert minimal_generators(free_module(ring("Rm2"), 3)).shape[1] == 3
    assert minimal_generators(module_set("Rm2")["m"]).shape[1] == 2
    assert minimal_generators(k("Rxy")).shape[1] == 1


def test_minimal_generators_need_local():
    with pytest.raises(AlgebraError):
        minimal_generators(regular_module(ring("Rprod")))


def test_exactness_examples():
    M = module_set("Rx2")["k+R"]
    S = ShortExactSequence(identity(M), zero_hom(M, power_module(M, 0)))
    assert exactness_check(S).exact
    eps = ModuleHom(R("Rx2"), k("Rx2"), F5.array([[1, 0]]))
    assert exactness_check(ShortExactSequence(_socle_inclusion(), eps)).exact
    bad = ShortExactSequence(_socle_inclusion(), zero_hom(R("Rx2"), R("Rx2")))
    assert not exactness_check(bad).exact


def test_module_axioms_checked():
    A = ring("Rx2")
    with pytest.raises(ModuleError):
        from gorenlab.algebracore import FdModule
        FdModule(A, F5.array([[[1]], [[1]]]))  # x acting by 1 is not nilpotent


def test_nonlinear_hom_rejected():
    with pytest.raises(ModuleError):
        ModuleHom(R("Rx2"), R("Rx2"), F5.array([[0, 1], [1, 0]]))


# -- properties ------------------------------------------------------------

local_rings = st.sampled_from(LOCAL)
seeds = st.integers(0, 2**32 - 1)


def _module(name, seed, which):
    rng = np.random.default_rng(seed)
    if which == "random":
        return random_cokernel(name, rng)
    return random_twist(module_set(name)[which], rng)


module_kinds = st.sampled_from(["random", "k", "R", "D", "m", "k+R", "R/(x)"])


@settings(max_examples=40, deadline=None)
@given(local_rings, seeds, module_kinds, module_kinds)
def test_hom_routes_agree(name, seed, a, b):
    M, N = _module(name, seed, a), _module(name, seed + 1, b)
    H1 = hom_module(M, N, method="presentation")
    H2 = hom_module(M, N, method="system")
    assert H1.dim == H2.dim
    # every presentation-route basis element is a genuine module map
    for h in range(H1.dim):
        assert ModuleHom(M, N, H1.basis[h], check=False).is_linear()
        assert H2.contains(H1.basis[h])


@settings(max_examples=40, deadline=None)
@given(local_rings, seeds, module_kinds, module_kinds)
def test_tensor_routes_agree(name, seed, a, b):
    M, N = _module(name, seed, a), _module(name, seed + 1, b)
    T1 = tensor_module(M, N, method="presentation")
    T2 = tensor_module(M, N, method="relations")
    assert T1.dim == T2.dim
    T1.verify()
    T2.verify()


@settings(max_examples=25, deadline=None)
@given(local_rings, seeds, module_kinds, module_kinds, module_kinds)
def test_hom_tensor_adjunction_dims(name, seed, a, b, c):
    M, N, P = _module(name, seed, a), _module(name, seed + 1, b), _module(name, seed + 2, c)
    assert hom_module(tensor_module(M, N), P).dim == hom_module(M, hom_module(N, P)).dim


@settings(max_examples=40, deadline=None)
@given(local_rings, seeds, module_kinds, module_kinds)
def test_k_dual_is_exact(name, seed, a, b):
    rng = np.random.default_rng(seed)
    M = _module(name, seed, a)
    N = _module(name, seed + 1, b)
    ds = direct_sum(M, N)
    S = ShortExactSequence(ds.injections[0], ds.projections[1])
    assert exactness_check(dual_sequence(S)).exact
    f = random_hom(M, N, rng)
    K, inc = subobject(f, "kernel")
    I, _ = subobject(f, "image")
    from gorenlab.algebracore import corestrict
    S2 = ShortExactSequence(inc, corestrict(f, subobject(f, "image")[1]))
    assert exactness_check(S2).exact
    assert exactness_check(dual_sequence(S2)).exact


@settings(max_examples=40, deadline=None)
@given(local_rings, seeds, module_kinds, module_kinds, module_kinds)
def test_pushout_square_and_cokernels(name, seed, a, b, c):
    rng = np.random.default_rng(seed)
    G, U, V = _module(name, seed, a), _module(name, seed + 1, b), _module(name, seed + 2, c)
    psi, phi = random_hom(G, U, rng), random_hom(G, V, rng)
    po = pushout(psi, phi)
    po.module.verify()
    assert po.commutes(psi, phi)
    assert induced_cokernel_map(psi, po).is_isomorphism()


@settings(max_examples=30, deadline=None)
@given(local_rings, seeds)
def test_constructed_modules_satisfy_axioms(name, seed):
    rng = np.random.default_rng(seed)
    M = random_cokernel(name, rng)
    for X in (M, k_dual(M), hom_module(M, D(name)), tensor_module(M, M), direct_sum(M, k(name)).module):
        X.verify()


def test_product_hom_componentwise():
    P = ring("Rprod")
    k1, k2 = residue_field(P, 0), residue_field(P, 1)
    assert hom_module(k1, k2).dim == 0
    assert hom_module(k1, k1).dim == 1
    assert hom_module(regular_module(P), k2).dim == 1
    assert ideal_module(P, [P.idempotents[0]]).dim == 1
