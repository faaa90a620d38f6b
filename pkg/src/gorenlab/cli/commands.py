"""Command dispatch and report assembly."""
from __future__ import annotations

import math
import time

import numpy as np

from .. import __version__
from ..algebracore import (AlgebraError, FreeModule, ModuleError, exactness_check, hom_module, power_module,
                           regular_module, residue_field)
from ..complexes import (DEFAULT_BOUND, BoundedComplex, betti_numbers, depth, ext, minimal_free_resolution,
                         resolution_of, tor)
from ..gcproj import (build_minimal_proper_gc_resolution, gc_pd, is_gc_projective, minimal_PC_resolution,
                      minimized_k_resolution, relative_cohomology, strict_gc_resolution, verify_proper)
from ..semidualizing import (SemidualizingError, bass_membership, build_complete_PC, canonical_complete_PC,
                             check_semidualizing, is_totally_C_reflexive)

CERT_DIM_LIMIT = 64


def _num(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


class _TooBig(Exception):
    pass


class CertContext:
    """Serializes the modules that certificates refer to."""

    def __init__(self, session, limit=CERT_DIM_LIMIT):
        self.S = session
        self.F = session.field
        self.limit = limit
        self.modules = {}
        self.names = {}
        for n, M in session.modules.items():
            self.names.setdefault(id(M), n)
        self._keep = []   # holds auto-named modules so their ids stay unique
        self._auto = 0

    def ref(self, M):
        if M.dim > self.limit:
            raise _TooBig(f"module of dimension {M.dim} exceeds the certificate limit {self.limit}")
        key = id(M)
        name = self.names.get(key)
        if name is None:
            name = f"_m{self._auto}"
            self._auto += 1
            self.names[key] = name
            self._keep.append(M)
        if name not in self.modules:
            if isinstance(M, FreeModule):
                self.modules[name] = {"free": M.rank}
            elif M is regular_module(M.algebra):
                self.modules[name] = {"free": 1}
            else:
                self.modules[name] = {"actions": self.mat(M.actions)}
        return name

    def mat(self, a):
        """Nested lists of canonical scalar strings (shape kept for empty arrays)."""
        if a.ndim == 0:
            return self.F.format(a)
        return [self.mat(x) for x in a]

    def algebra(self):
        A = self.S.algebra
        out = {"labels": list(A.labels), "structure": self.mat(A.structure), "unit": self.mat(A.unit)}
        if A.is_local:
            out["maximal_ideal"] = self.mat(A.local.ideal)
        if A.idempotents:
            out["idempotents"] = [self.mat(e) for e in A.idempotents]
        return out

    def as_dict(self):
        return {"field": self.S.spec["field"], "algebra": self.algebra(), "modules": dict(self.modules)}


def _guard(fn):
    """Build a certificate, or a stub saying why it was left out."""
    def wrapper(ctx, kind, *args, **kw):
        try:
            body = fn(ctx, *args, **kw)
        except _TooBig as e:
            return {"kind": kind, "omitted": str(e)}
        body["kind"] = kind
        return body
    return wrapper


@_guard
def iso_cert(ctx, f):
    return {"source": ctx.ref(f.source), "target": ctx.ref(f.target), "matrix": ctx.mat(f.matrix)}


@_guard
def endo_cert(ctx, C):
    return {"module": ctx.ref(C), "dim": C.algebra.dim}


@_guard
def ext_cert(ctx, M, N, bound):
    """A free resolution of M far enough to recompute Ext^i(M, N), i <= top."""
    res = resolution_of(M)
    res.extend(bound + 1)
    top = bound
    while top >= 0 and any(res.rank(i) * M.algebra.dim > ctx.limit for i in range(top + 2)):
        top -= 1
    if top < 0:
        raise _TooBig("the free resolution exceeds the certificate limit")
    tab = ext(M, N, bound)
    return {"module": ctx.ref(M), "target": ctx.ref(N), "free_ranks": [res.rank(i) for i in range(top + 2)],
            "augmentation": ctx.mat(res.eps), "differentials": [ctx.mat(res.kmatrix(i)) for i in range(1, top + 2)],
            "dims": tab.dims[:top + 1]}


@_guard
def complex_cert(ctx, X: BoundedComplex, exact_at=(), hom_into=(), hom_from=(), minimal_at=()):
    terms = {str(n): ctx.ref(T) for n, T in sorted(X.modules.items())}
    diffs = {str(n): ctx.mat(d.matrix) for n, d in sorted(X.differentials.items())}
    return {"terms": terms, "differentials": diffs, "exact_at": sorted(exact_at),
            "hom_into": [{"test": ctx.ref(T), "exact_at": sorted(d)} for T, d in hom_into],
            "hom_from": [{"test": ctx.ref(H), "exact_at": sorted(d)} for H, d in hom_from],
            "minimal_at": sorted(minimal_at)}


def _interior(X):
    return list(range(X.lo + 1, X.hi))


def _all(X):
    return list(range(X.lo, X.hi + 1))


# -- individual commands ------------------------------------------------------

def _status(s):
    return s.as_dict()


def cmd_check_semidualizing(S, c, ctx):
    C = S.module(c["C"])
    r = check_semidualizing(C, bound=c["bound"], seed=c["seed"])
    certs = [endo_cert(ctx, "endomorphisms", C)] if r.homothety_iso else []
    certs.append(ext_cert(ctx, "ext_dims", C, C, c["bound"]))
    data = {"homothety_iso": r.homothety_iso, "ext": _status(r.ext_status), "ext_dims": r.ext_dims,
            "notes": r.notes}
    return r.passed, "pass" if r.passed else "fail", data, certs


def cmd_bass(S, c, ctx):
    M, C = S.module(c["M"]), S.module(c["C"])
    r = bass_membership(M, C, bound=c["bound"], seed=c["seed"])
    data = {"ext": _status(r.ext_status), "tor": _status(r.tor_status), "evaluation_iso": r.evaluation_iso,
            "ext_dims": r.ext_dims, "tor_dims": r.tor_dims}
    certs = [ext_cert(ctx, "ext_dims", C, M, c["bound"])]
    if r.evaluation_iso:
        certs.append(iso_cert(ctx, "isomorphism", r.evaluation))
    return r.member, "member" if r.member else "not a member", data, certs


def _totref_certs(ctx, M, C, r, bound):
    certs = [ext_cert(ctx, "ext_dims", M, C, bound), ext_cert(ctx, "ext_dims", hom_module(M, C), C, bound)]
    if r.biduality_iso:
        certs.append(iso_cert(ctx, "isomorphism", r.biduality))
    return certs


def cmd_totref(S, c, ctx):
    M, C = S.module(c["M"]), S.module(c["C"])
    r = is_totally_C_reflexive(M, C, bound=c["bound"], seed=c["seed"])
    return r.verdict, "yes" if r.verdict else "no", r.as_dict(), _totref_certs(ctx, M, C, r, c["bound"])


def _pc_cert(ctx, X, C):
    cx = X.complex
    tests = [(power_module(C, n), cx_deg) for n, cx_deg in
             ((n, [d for d in _interior(cx) if d not in X.verification.hom_failures.get(n, [])])
              for n in X.verification.free_test_ranks)]
    return complex_cert(ctx, "complex", cx, exact_at=[d for d in _interior(cx) if d not in X.verification.exactness_failures],
                        hom_into=tests)


def _complex_dump(X):
    return {"dims": {str(n): d for n, d in sorted(X.dims().items())},
            "labels": {str(n): (lab.kind if lab.rank is None else f"{lab.kind}^{lab.rank}")
                       for n, lab in sorted(X.labels.items())}}


def cmd_gc_projective(S, c, ctx):
    M, C = S.module(c["M"]), S.module(c["C"])
    r = is_gc_projective(M, C, bound=c["bound"], seed=c["seed"], window=c["window"])
    data = {"notes": r.notes}
    certs = []
    if r.report is not None:
        data["totref"] = r.report.as_dict()
        certs += _totref_certs(ctx, M, C, r.report, c["bound"])
    if r.complete_pc is not None:
        data["complete_pc"] = {"verification": r.complete_pc.verification.as_dict(),
                               "free_ranks": r.complete_pc.free_ranks, "c_ranks": r.complete_pc.c_ranks}
        certs.append(_pc_cert(ctx, r.complete_pc, C))
    return r.verdict, "yes" if r.verdict else "no", data, certs


def cmd_gcpd(S, c, ctx):
    M, C = S.module(c["M"]), S.module(c["C"])
    r = gc_pd(M, C, bound=c["bound"], seed=c["seed"])
    certs = [ext_cert(ctx, "ext_dims", M, C, c["bound"])] if M.algebra.is_local else []
    return r.detected, r.describe(), r.as_dict(), certs


def cmd_resolve(S, c, ctx):
    M = S.module(c["M"])
    res = minimal_free_resolution(M, bound=c["bound"])
    fails = res.augmented_exactness_failures()
    aug = res.augmented()
    data = {"betti": betti_numbers(M, c["bound"]), "minimal": res.minimal,
            "terminated": res.complete, "exactness_failures": fails}
    degs = [d for d in range(-1, aug.hi + (1 if res.complete else 0)) if d not in fails]
    certs = [complex_cert(ctx, "complex", aug, exact_at=degs)]
    return not fails, "resolved", data, certs


def cmd_complete_pc(S, c, ctx):
    C = S.module(c["C"])
    kw = dict(window=c["window"], free_test_ranks=tuple(c["free_test_ranks"]), seed=c["seed"])
    if "M" not in c:
        XC, XR = canonical_complete_PC(C, **kw)
        ok = XC.verification.passed and XR.verification.passed
        data = {"canonical": {"C": {"verification": XC.verification.as_dict(), **_complex_dump(XC.complex)},
                              "R": {"verification": XR.verification.as_dict(), **_complex_dump(XR.complex)}}}
        return ok, "pass" if ok else "fail", data, [_pc_cert(ctx, XC, C), _pc_cert(ctx, XR, C)]
    X = build_complete_PC(S.module(c["M"]), C, **kw)
    data = {"verification": X.verification.as_dict(), "free_ranks": X.free_ranks, "c_ranks": X.c_ranks,
            **_complex_dump(X.complex)}
    ok = X.verification.passed
    return ok, "pass" if ok else "fail", data, [_pc_cert(ctx, X, C)]


def _proper_cert(ctx, res, rep, C, extra=()):
    aug = res.augmented()
    fam = [regular_module(C.algebra), C] + [res.complex.modules[n] for n, lab in sorted(res.complex.labels.items())
                              if lab.kind == "gcproj" and res.complex.modules[n].dim] + list(extra)
    bad = {}
    for name, deg in rep.failures:
        bad.setdefault(name, set()).add(deg)
    tests = [(H, [d for d in _all(aug) if d not in bad.get(nm, ())]) for H, nm in zip(fam, rep.family)]
    fails = set(res.augmented_exactness_failures())
    return complex_cert(ctx, "complex", aug, exact_at=[d for d in _all(aug) if d not in fails], hom_from=tests)


def _length(S, c, M, C):
    if "length" in c:
        return c["length"]
    r = gc_pd(M, C, bound=c["bound"], seed=c["seed"])
    if not r.detected:
        raise ModuleError(f"gc_pd not detected ({r.describe()})")
    return 0 if r.n == -math.inf else int(r.n)


def cmd_strict_resolve(S, c, ctx):
    M, C = S.module(c["M"]), S.module(c["C"])
    extra = [S.module(x) for x in c.get("extra", [])]
    X = strict_gc_resolution(M, C, n=_length(S, c, M, C), bound=c["bound"], seed=c["seed"], extra=extra)
    data = {"length": X.length, "c_ranks": X.c_ranks, "G_dim": X.G.dim, "G_totref": X.G_report.as_dict(),
            "exactness_failures": X.exactness_failures, "labels_ok": X.labels_ok, "proper": X.proper.as_dict(),
            **_complex_dump(X.resolution.complex)}
    certs = [_proper_cert(ctx, X.resolution, X.proper, C, extra)]
    return X.verified, "pass" if X.verified else "fail", data, certs


def cmd_approximate(S, c, ctx):
    M, C = S.module(c["M"]), S.module(c["C"])
    X = strict_gc_resolution(M, C, n=_length(S, c, M, C), bound=c["bound"], seed=c["seed"])
    ap = X.approximation
    ex = exactness_check(ap.sequence)
    kres = ap.k_resolution
    Kp, _, mv = minimized_k_resolution(ap, C)
    ok = ex.exact and X.G_report.verdict and not kres.augmented_exactness_failures() and mv.minimal
    data = {"dims": {"K": ap.K.dim, "G": ap.G.dim, "M": ap.M.dim}, "exact": ex.exact,
            "G_totref": X.G_report.verdict, "k_resolution": _complex_dump(kres.complex),
            "k_resolution_minimized": _complex_dump(Kp), "k_minimal": mv.minimal}
    seq = BoundedComplex({1: ap.K, 0: ap.G, -1: ap.M}, {1: ap.iota, 0: ap.pi}, check=False)
    return ok, "pass" if ok else "fail", data, [complex_cert(ctx, "complex", seq, exact_at=[-1, 0, 1]
                                                              if ex.exact else [])]


def cmd_minimal_pc(S, c, ctx):
    M, C = S.module(c["M"]), S.module(c["C"])
    res = minimal_PC_resolution(M, C, bound=c["bound"], seed=c["seed"])
    fails = res.data["exactness_failures"]
    aug = res.augmented()
    data = {"length": res.length, "minimal": res.minimal, "exactness_failures": fails, **_complex_dump(res.complex)}
    ok = res.minimal and not fails
    certs = [complex_cert(ctx, "complex", aug, exact_at=[d for d in _all(aug) if d not in fails],
                          minimal_at=[n for n in res.complex.differentials])]
    return ok, "pass" if ok else "fail", data, certs


def cmd_minimal_proper_gc(S, c, ctx):
    M, C = S.module(c["M"]), S.module(c["C"])
    res, rep = build_minimal_proper_gc_resolution(M, C, bound=c["bound"], seed=c["seed"], length=c.get("length"))
    data = {"report": rep.as_dict(), **_complex_dump(res.complex)}
    cert = _proper_cert(ctx, res, rep.proper, C)
    if "omitted" not in cert:
        cert["minimal_at"] = [n for n in res.complex.differentials if n >= 2]
    return rep.passed and rep.proper.passed, "pass" if rep.passed else "fail", data, [cert]


def _relative(kind):
    def run(S, c, ctx):
        M, N, C = S.module(c["M"]), S.module(c["N"]), S.module(c["C"])
        t = relative_cohomology(M, N, C, bound=c["bound"], kind=kind, seed=c["seed"])
        data = {"kind": f"relative-{kind}", "dims": t.dims, "padded_dims": t.check_dims,
                "absolute_dims": t.absolute_dims, "resolution_length": t.resolution_length,
                "well_defined": t.well_defined}
        return bool(t.well_defined), "well-defined" if t.well_defined else "inconsistent", data, []
    return run


def cmd_verify_proper(S, c, ctx):
    M, C = S.module(c["M"]), S.module(c["C"])
    extra = [S.module(x) for x in c.get("extra", [])]
    X = strict_gc_resolution(M, C, n=_length(S, c, M, C), bound=c["bound"], seed=c["seed"])
    rep = verify_proper(X.resolution, C, extra)
    return rep.passed, "proper" if rep.passed else "not proper", rep.as_dict(), \
        [_proper_cert(ctx, X.resolution, rep, C, extra)]


def cmd_depth(S, c, ctx):
    M = S.module(c["M"])
    d = depth(M, bound=c["bound"])
    certs = [] if M.dim == 0 else [ext_cert(ctx, "ext_dims", residue_field(M.algebra), M, c["bound"])]
    v = "undetected" if d is None else _num(d)
    return d is not None, f"depth {v}", {"depth": v, "bound": c["bound"]}, certs


def cmd_ext(S, c, ctx):
    M, N = S.module(c["M"]), S.module(c["N"])
    t = ext(M, N, c["bound"])
    return True, "computed", {"dims": t.dims}, [ext_cert(ctx, "ext_dims", M, N, c["bound"])]


def cmd_tor(S, c, ctx):
    M, N = S.module(c["M"]), S.module(c["N"])
    t = tor(M, N, c["bound"])
    return True, "computed", {"dims": t.dims}, []


DISPATCH = {
    "check-semidualizing": cmd_check_semidualizing, "bass": cmd_bass, "totref": cmd_totref,
    "gc-projective": cmd_gc_projective, "gcpd": cmd_gcpd, "resolve": cmd_resolve,
    "complete-pc": cmd_complete_pc, "strict-resolve": cmd_strict_resolve, "approximate": cmd_approximate,
    "minimal-pc": cmd_minimal_pc, "minimal-proper-gc": cmd_minimal_proper_gc,
    "rel-ext": _relative("ext"), "rel-tor": _relative("tor"), "verify-proper": cmd_verify_proper,
    "depth": cmd_depth, "ext": cmd_ext, "tor": cmd_tor,
}
DEFAULTS = {"bound": DEFAULT_BOUND, "seed": 0, "window": 3, "free_test_ranks": [1, 2]}


def effective(cmd: dict, overrides: dict) -> dict:
    """Command parameters with defaults; explicit command values win over overrides."""
    out = dict(DEFAULTS)
    out.update({k: v for k, v in overrides.items() if v is not None})
    out.update(cmd)
    return out


def run_command(S, cmd: dict, overrides=None, timing=False) -> dict:
    """One report entry: status pass | fail | error, verdict, data, certificates.

    The entry carries its own context (algebra and the modules its
    certificates name), so it can be checked on its own.
    """
    c = effective(cmd, overrides or {})
    ctx = CertContext(S)
    t0 = time.perf_counter()
    try:
        ok, verdict, data, certs = DISPATCH[c["command"]](S, c, ctx)
        status = "pass" if ok else "fail"
    except (ModuleError, AlgebraError, SemidualizingError) as e:
        status, verdict, data, certs = "error", "precondition failed", {"error": str(e)}, []
    elapsed = time.perf_counter() - t0
    return {"command": cmd, "parameters": {k: c[k] for k in sorted(c) if k != "command"},
            "status": status, "verdict": verdict, "data": _clean(data), "certificates": certs,
            "timing": round(elapsed, 6) if timing else None,
            "context": ctx.as_dict() if certs else None}


def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, float):
        return _num(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def run_session(S, overrides=None, timing=False, jobs=1, text=None) -> dict:
    """The full report for every command of a parsed session."""
    overrides = overrides or {}
    if jobs > 1 and text is not None and len(S.commands) > 1:
        results = _parallel(text, len(S.commands), overrides, timing, jobs)
    else:
        results = [run_command(S, c, overrides, timing) for c in S.commands]
    for i, r in enumerate(results):
        r["index"] = i
    counts = {s: sum(r["status"] == s for r in results) for s in ("pass", "fail", "error")}
    return {"engine": {"name": "gorenlab", "version": __version__}, "seed": DEFAULTS["seed"] if overrides.get("seed") is None else overrides["seed"],
            "session": S.spec, "results": results, "summary": counts}


def _worker(args):
    text, i, overrides, timing = args
    from .session import parse_session
    S = parse_session(text)
    return run_command(S, S.commands[i], overrides, timing)


def _parallel(text, n, overrides, timing, jobs):
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_worker, [(text, i, overrides, timing) for i in range(n)]))


def exit_code(report: dict) -> int:
    s = report["summary"]
    return 0 if s["fail"] == 0 and s["error"] == 0 else 1
