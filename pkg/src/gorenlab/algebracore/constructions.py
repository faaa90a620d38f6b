"""Short exact sequences, pushouts and isomorphism search."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .functors import hom_module
from .modules import (FdModule, ModuleError, ModuleHom, cokernel, direct_sum,
                      k_dual)


@dataclass(eq=False)
class ShortExactSequence:
    """0 -> M' --iota--> M --rho--> M'' -> 0 (exactness checked separately)."""

    iota: ModuleHom
    rho: ModuleHom

    def __post_init__(self):
        if self.iota.target is not self.rho.source:
            raise ModuleError("the maps do not compose")

    @property
    def left(self):
        return self.iota.source

    @property
    def middle(self):
        return self.iota.target

    @property
    def right(self):
        return self.rho.target


@dataclass
class ExactnessVerdict:
    injective: bool
    surjective: bool
    composite_zero: bool
    image_is_kernel: bool

    @property
    def exact(self) -> bool:
        return self.injective and self.surjective and self.composite_zero and self.image_is_kernel

    def __bool__(self):
        return self.exact


def exactness_check(S: ShortExactSequence) -> ExactnessVerdict:
    F = S.iota.field
    ri, rr = S.iota.rank, S.rho.rank
    comp = F.is_zero(F.matmul(S.rho.matrix, S.iota.matrix))
    return ExactnessVerdict(
        injective=ri == S.left.dim,
        surjective=rr == S.right.dim,
        composite_zero=comp,
        image_is_kernel=comp and ri == S.middle.dim - rr,
    )


def dual_sequence(S: ShortExactSequence) -> ShortExactSequence:
    """0 -> M''* -> M* -> M'* -> 0."""
    Lp, Mp, Rp = k_dual(S.left), k_dual(S.middle), k_dual(S.right)
    return ShortExactSequence(ModuleHom(Rp, Mp, S.rho.matrix.T.copy(), check=False),
                              ModuleHom(Mp, Lp, S.iota.matrix.T.copy(), check=False))


@dataclass(eq=False)
class Pushout:
    module: FdModule
    u: ModuleHom  # U -> H
    v: ModuleHom  # V -> H
    section: np.ndarray | None = None  # k-linear lift H -> U (+) V

    def induced(self, a: ModuleHom, b: ModuleHom) -> ModuleHom:
        """The map H -> T given by a: U -> T and b: V -> T with a psi = b phi."""
        F = a.field
        joint = np.concatenate([a.matrix, b.matrix], axis=1)
        return ModuleHom(self.module, a.target, F.matmul(joint, self.section), check=False)

    def commutes(self, psi: ModuleHom, phi: ModuleHom) -> bool:
        F = psi.field
        return np.array_equal(F.matmul(self.u.matrix, psi.matrix), F.matmul(self.v.matrix, phi.matrix))


def pushout(psi: ModuleHom, phi: ModuleHom) -> Pushout:
    """H = coker(G -> U (+) V, g -> (psi g, -phi g)) for psi: G -> U, phi: G -> V."""
    if psi.source is not phi.source:
        raise ModuleError("pushout needs maps with a common source")
    F = psi.field
    ds = direct_sum(psi.target, phi.target)
    g = np.concatenate([psi.matrix, F.neg(phi.matrix)], axis=0)
    q = cokernel(ModuleHom(psi.source, ds.module, g, check=False))
    u = q.projection @ ds.injections[0]
    v = q.projection @ ds.injections[1]
    return Pushout(q.module, u, v, q.section)


def induced_cokernel_map(psi: ModuleHom, po: Pushout) -> ModuleHom:
    """coker(psi) -> coker(v) induced by u; an isomorphism for a true pushout."""
    F = psi.field
    c1 = cokernel(psi)
    c2 = cokernel(po.v)
    mat = F.matmul(c2.projection.matrix, F.matmul(po.u.matrix, c1.section))
    return ModuleHom(c1.module, c2.module, mat, check=False)


# -- isomorphism search ------------------------------------------------------

class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(eq=False)
class IsoResult:
    verdict: Verdict
    witness: ModuleHom | None = None
    certificate: dict = field(default_factory=dict)

    @property
    def is_yes(self):
        return self.verdict is Verdict.YES

    @property
    def is_no(self):
        return self.verdict is Verdict.NO


def joint_image_rank(M: FdModule, N: FdModule) -> int:
    """dim of the sum of the images of all homs M -> N."""
    H = hom_module(M, N)
    if H.dim == 0 or M.dim == 0:
        return 0
    cols = np.concatenate(list(H.basis), axis=1)
    return M.field.rank(cols)


def find_isomorphism(M: FdModule, N: FdModule, seed: int = 0, attempts: int = 16) -> IsoResult:
    """Search Hom(M, N) for an isomorphism.

    NO is returned only with a certificate: a dimension mismatch, or a
    proper joint image of Hom(M, N) in N (or of Hom(N, M) in M), which rules
    out every surjection.  Otherwise random elements are tried.
    """
    if M.algebra is not N.algebra:
        raise ModuleError("modules over different algebras")
    if M.dim != N.dim:
        return IsoResult(Verdict.NO, certificate={"kind": "dimension", "dims": [M.dim, N.dim]})
    F = M.field
    if M.dim == 0:
        return IsoResult(Verdict.YES, ModuleHom(M, N, F.zeros((0, 0)), check=False))
    for direction, (X, Y) in (("forward", (M, N)), ("backward", (N, M))):
        r = joint_image_rank(X, Y)
        if r < Y.dim:
            return IsoResult(Verdict.NO, certificate={"kind": "joint_image", "direction": direction,
                                                      "rank": r, "dim": Y.dim})
    H = hom_module(M, N)
    for h in range(H.dim):
        if F.rank(H.basis[h]) == M.dim:
            return IsoResult(Verdict.YES, H.element(h))
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        c = F.random(rng, H.dim)
        mat = H.matrix(c)
        if F.rank(mat) == M.dim:
            return IsoResult(Verdict.YES, ModuleHom(M, N, mat, check=False))
    return IsoResult(Verdict.UNKNOWN, certificate={"attempts": attempts, "seed": seed})
