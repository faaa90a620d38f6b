import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gorenlab.algebracore import (ModuleError, ModuleHom, direct_sum, free_module, hom_module, identity,
                                  power_module, residue_field)
from gorenlab.complexes import BoundedComplex, TermLabel, minimal_free_resolution
from gorenlab.semidualizing import (SemidualizingError, bass_membership, biduality_map, build_complete_PC,
                                    canonical_complete_PC, check_precover, check_semidualizing,
                                    evaluation_map, ext_base_change_check, is_C_projective,
                                    is_totally_C_reflexive, tensor_evaluation, unit_perturbation,
                                    verify_complete_PC)
from gorenlab.semidualizing.completepc import CompletePCResolution
from helpers import D, F5, GORENSTEIN, LOCAL, RINGS, R, k, module_set, random_cokernel, random_twist, ring


@pytest.mark.parametrize("name", RINGS)
def test_free_rank_one_is_semidualizing(name):
    rep = check_semidualizing(R(name))
    assert rep.passed and rep.homothety_iso


@pytest.mark.parametrize("name", LOCAL)
def test_dualizing_module_is_semidualizing(name):
    rep = check_semidualizing(D(name))
    assert rep.passed
    assert hom_module(D(name), D(name)).dim == ring(name).dim


def test_residue_field_not_semidualizing():
    rep = check_semidualizing(k("Rx2"))
    assert not rep.passed and not rep.homothety_iso
    assert any("1 != 2" in n for n in rep.notes)


def test_require_semidualizing_raises():
    with pytest.raises(SemidualizingError):
        is_totally_C_reflexive(k("Rx2"), k("Rx2"))


def test_windows_carry_certificates():
    rep = check_semidualizing(R("Rx2"))
    assert rep.ext_status.kind == "certified"
    rep = check_semidualizing(D("Rm2"), bound=4)
    assert rep.ext_status.ok


def test_tensor_evaluation_examples():
    assert tensor_evaluation(R("Rm2"), k("Rm2"), 1).is_isomorphism()
    R3 = free_module(ring("Rm2"), 3)
    assert tensor_evaluation(R3, module_set("Rm2")["m"], 2).is_isomorphism()
    w = tensor_evaluation(k("Rx2"), R("Rx2"), 2)
    assert w.source.dim == 2 and w.target.dim == 2 and w.is_isomorphism()


def test_ext_base_change_examples():
    assert ext_base_change_check(k("Rm2"), R("Rm2"), 1, 3).ok
    rep = ext_base_change_check(k("Rx2"), R("Rx2"), 2, 4)
    assert rep.ok and all(r.lhs == 0 for r in rep.rows[1:])
    rep = ext_base_change_check(k("Rm2"), R("Rm2"), 2, 1)
    assert rep.rows[1].lhs == 6 and rep.rows[1].rhs == 6 and rep.vanishing_transfers


def test_ext_base_change_needs_local():
    with pytest.raises(Exception):
        ext_base_change_check(R("Rprod"), R("Rprod"), 2, 1)


def test_evaluation_examples():
    for name in LOCAL:
        assert evaluation_map(D(name), D(name)).is_isomorphism()
        assert evaluation_map(R(name), module_set(name)["k+R"]).is_isomorphism()


def test_evaluation_D_into_k_over_rm2_is_not_an_isomorphism():
    # D needs two generators, so D (x) Hom(D, k) = (D/mD)^2 has dimension 4 while k has 1
    nu = evaluation_map(D("Rm2"), k("Rm2"))
    assert nu.source.dim == 4 and nu.target.dim == 1
    assert nu.is_surjective() and not nu.is_isomorphism()


def test_bass_examples():
    for name in LOCAL:
        M = module_set(name)["k+R"]
        assert bass_membership(M, R(name), bound=3).member
        assert bass_membership(D(name), D(name), bound=3).member
    rep = bass_membership(R("Rm2"), D("Rm2"), bound=3)
    assert not rep.member and not rep.ext_status.ok and rep.ext_dims[1] > 0


def test_c_projective_examples():
    DD = direct_sum(D("Rm2"), D("Rm2")).module
    yes = is_C_projective(DD, D("Rm2"))
    assert yes.is_yes and yes.rank == 2 and yes.witness.is_isomorphism()
    no = is_C_projective(k("Rx2"), R("Rx2"))
    assert no.is_no and no.certificate["kind"] == "ratio"
    no = is_C_projective(R("Rm2"), D("Rm2"))
    assert no.is_no and no.certificate["kind"] == "joint_image"


def test_c_projective_over_product():
    P = ring("Rprod")
    k1 = residue_field(P, 0)
    assert is_C_projective(k1, R("Rprod")).is_yes


def test_biduality_examples():
    assert biduality_map(R("Rm2"), D("Rm2")).is_isomorphism()
    assert biduality_map(k("Rm2"), D("Rm2")).is_isomorphism()
    assert not biduality_map(k("Rm2"), R("Rm2")).is_isomorphism()


def test_totally_reflexive_examples():
    for name in GORENSTEIN + ("Rm2",):
        for C in (R(name), D(name)):
            assert is_totally_C_reflexive(free_module(ring(name), 2), C, bound=4).verdict
            assert is_totally_C_reflexive(power_module(C, 2), C, bound=4).verdict
    assert is_totally_C_reflexive(k("Rx2"), R("Rx2")).verdict
    rep = is_totally_C_reflexive(k("Rm2"), R("Rm2"), bound=3)
    assert not rep.verdict and rep.ext_dims[1] == 3


def test_build_complete_pc_examples():
    X = build_complete_PC(R("Rx2"), R("Rx2"), window=2)
    assert X.verification.passed and X.free_ranks[0] == 1 and X.c_ranks[0] == 1
    X = build_complete_PC(k("Rx2"), R("Rx2"), window=4)
    assert X.verification.passed
    assert X.free_ranks == [1] * 5 and X.c_ranks == [1] * 4
    x = ring("Rx2").left[1]
    for n in range(-3, 5):
        if n != 0:
            m = X.complex.differentials[n].matrix
            assert np.array_equal(m, x) or np.array_equal(m, F5.neg(x)) or F5.rank(m) == 1
    X = build_complete_PC(k("Rm2"), D("Rm2"), window=3)
    assert X.verification.passed
    assert X.free_ranks == [1, 2, 4, 8] and X.c_ranks == [1, 2, 4]


def test_build_complete_pc_precondition():
    with pytest.raises(ModuleError):
        build_complete_PC(k("Rm2"), R("Rm2"), window=2)


def test_canonical_complete_pc():
    XC, XR = canonical_complete_PC(R("Rx2"), window=2)
    assert XC.verification.passed and XR.verification.passed
    XC, XR = canonical_complete_PC(D("Rm2"), window=3)
    assert XC.verification.passed and XR.verification.passed
    assert XC.free_ranks[0] == 2
    # X_R's C-side ranks are the Betti numbers of D = Hom(R, D)
    bD = minimal_free_resolution(D("Rm2"), bound=2).data["free_resolution"].betti(2)
    assert XR.c_ranks == bD


def test_canonical_needs_certified_C():
    with pytest.raises(SemidualizingError):
        canonical_complete_PC(k("Rx2"))


def test_identity_two_term_complex_verifies():
    A = ring("Rx3")
    P, Q = free_module(A, 1), free_module(A, 1)
    Z1, Z2 = free_module(A, 0), free_module(A, 0)
    cx = BoundedComplex({1: Z1, 0: P, -1: Q, -2: Z2}, {0: ModuleHom(P, Q, F5.eye(3))},
                        {1: TermLabel("free", 0), 0: TermLabel("free", 1), -1: TermLabel("cproj", 1),
                         -2: TermLabel("cproj", 0)})
    X = CompletePCResolution(cx, P, R("Rx3"), [1], [1])
    ver = verify_complete_PC(X, R("Rx3"))
    assert ver.passed and ver.checked_degrees == [0, -1][::-1]


@pytest.mark.parametrize("name,C", [("Rm2", "D"), ("Rx2", "R"), ("Rxy", "R")])
def test_unit_perturbation_fails_at_degree(name, C):
    Cm = D(name) if C == "D" else R(name)
    XC, XR = canonical_complete_PC(Cm, window=3)
    for X in (XC, XR):
        cx = X.complex
        good = [n for n in range(cx.lo + 1, cx.hi)
                if n in cx.differentials and cx.modules[n].dim and getattr(cx.modules[n], "rank", 0) >= 2]
        for n in good:
            try:
                Y = unit_perturbation(X, n)
            except ModuleError:
                continue
            ver = verify_complete_PC(Y, Cm)
            assert not ver.passed
            assert ver.exactness_failures == [n]


def test_precover_examples():
    M = module_set("Rm2")["k+R"]
    assert check_precover(identity(M), [k("Rm2"), R("Rm2")]).precover
    res = minimal_free_resolution(M, bound=0)
    fam = [free_module(ring("Rm2"), j) for j in (1, 2)]
    assert check_precover(res.augmentation, fam).precover
    # C (x) (free cover of Hom(C, M)) -> M for M in the Bass class of C = D
    Cm = D("Rm2")
    M = direct_sum(Cm, Cm).module
    nu = evaluation_map(Cm, M)
    assert check_precover(nu, [power_module(Cm, j) for j in (1, 2)]).precover
    assert not check_precover(ModuleHom(k("Rm2"), k("Rm2"), F5.zeros((1, 1))), [R("Rm2")]).precover


# -- properties ---------------------------------------------------------------

local_rings = st.sampled_from(LOCAL)
seeds = st.integers(0, 2**32 - 1)
kinds = st.sampled_from(["random", "k", "R", "m", "k+R", "R/(x)"])


def _module(name, seed, which):
    rng = np.random.default_rng(seed)
    if which == "random":
        return random_cokernel(name, rng)
    return random_twist(module_set(name)[which], rng)


@settings(max_examples=30, deadline=None)
@given(local_rings, seeds, kinds)
def test_every_module_is_totally_D_reflexive(name, seed, which):
    M = _module(name, seed, which)
    rep = is_totally_C_reflexive(M, D(name), bound=4)
    assert rep.verdict and rep.biduality_iso


@settings(max_examples=20, deadline=None)
@given(local_rings, seeds, kinds, st.integers(1, 3))
def test_base_change_identity(name, seed, which, n):
    M = _module(name, seed, which)
    for C in (R(name), D(name)):
        rep = ext_base_change_check(M, C, n, 3)
        assert rep.ok and rep.vanishing_transfers


@settings(max_examples=20, deadline=None)
@given(local_rings, seeds, kinds, st.integers(1, 2))
def test_tensor_evaluation_iso_for_free_source(name, seed, which, n):
    N = _module(name, seed, which)
    Fm = free_module(ring(name), 2)
    assert tensor_evaluation(Fm, N, n).is_isomorphism()
