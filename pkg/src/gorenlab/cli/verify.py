"""Re-check emitted certificates from their witnesses alone.

Only exactlinalg is used: modules are rebuilt from their action matrices,
Hom spaces are solved from scratch, and Ext dimensions are recomputed from
the free resolution in the certificate.
"""
from __future__ import annotations

import numpy as np

from ..exactlinalg import Field


class CertificateError(ValueError):
    pass


class _Ctx:
    def __init__(self, ctx: dict):
        f = ctx["field"]
        self.F = Field.rational() if f == "QQ" else Field.prime(int(f[2:]))
        alg = ctx["algebra"]
        F = self.F
        self.labels = alg["labels"]
        n = len(self.labels)
        self.n = n
        self.structure = F.array(np.array(alg["structure"], dtype=object).reshape(n, n, n)) if n else F.zeros((0, 0, 0))
        self.unit = F.array(np.array(alg["unit"], dtype=object))
        self.left = np.ascontiguousarray(np.transpose(self.structure, (0, 2, 1)))
        mi = alg.get("maximal_ideal")
        self.ideal = F.array(np.array(mi, dtype=object)).reshape(n, n - 1) if mi is not None and n > 1 else \
            (F.zeros((n, 0)) if mi is not None else None)
        self.specs = ctx.get("modules", {})
        self._mods = {}

    def free(self, b):
        F, n = self.F, self.n
        acts = F.zeros((n, b * n, b * n))
        for g in range(b):
            acts[:, g * n:(g + 1) * n, g * n:(g + 1) * n] = self.left
        return acts

    def module(self, name):
        if name not in self._mods:
            spec = self.specs.get(name)
            if spec is None:
                raise CertificateError(f"certificate names unknown module {name!r}")
            if "free" in spec:
                acts = self.free(spec["free"])
            else:
                raw = np.array(spec["actions"], dtype=object)
                d = raw.shape[1] if raw.ndim == 3 else 0
                acts = self.F.array(raw) if raw.size else self.F.zeros((self.n, d, d))
            self._check_module(name, acts)
            self._mods[name] = acts
        return self._mods[name]

    def _check_module(self, name, acts):
        F = self.F
        d = acts.shape[1]
        if not np.array_equal(F.einsum("i,ixy->xy", self.unit, acts), F.eye(d)):
            raise CertificateError(f"module {name}: unit does not act as the identity")
        for i in range(self.n):
            for j in range(self.n):
                lhs = F.matmul(acts[i], acts[j])
                rhs = F.einsum("k,kxy->xy", self.structure[i, j], acts)
                if not np.array_equal(lhs, rhs):
                    raise CertificateError(f"module {name}: actions violate the structure constants")

    def matrix(self, raw, rows, cols):
        if rows == 0 or cols == 0:
            return self.F.zeros((rows, cols))
        m = self.F.array(np.array(raw, dtype=object))
        if m.shape != (rows, cols):
            raise CertificateError(f"matrix has shape {m.shape}, expected {(rows, cols)}")
        return m


def _linear(F, src, tgt, f):
    return all(np.array_equal(F.matmul(tgt[i], f), F.matmul(f, src[i])) for i in range(src.shape[0]))


def _hom_basis(F, src, tgt):
    """Basis of Hom(src, tgt) as an array (h, dim tgt, dim src), solved directly."""
    ds, dt = src.shape[1], tgt.shape[1]
    if ds == 0 or dt == 0:
        return F.zeros((0, dt, ds))
    # unknown f (dt x ds) in row-major order; equation tgt_i f - f src_i = 0
    blocks = []
    It, Is = F.eye(dt), F.eye(ds)
    for i in range(src.shape[0]):
        a = np.kron(tgt[i], Is) if F.p is not None else _kron(tgt[i], Is)
        b = np.kron(It, src[i].T) if F.p is not None else _kron(It, src[i].T)
        blocks.append(F.sub(F.reduce(a), F.reduce(b)))
    sysm = np.concatenate(blocks, axis=0)
    k = F.kernel(sysm)
    return np.ascontiguousarray(k.T.reshape(k.shape[1], dt, ds))


def _kron(a, b):
    out = np.empty((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[i * b.shape[0]:(i + 1) * b.shape[0], j * b.shape[1]:(j + 1) * b.shape[1]] = a[i, j] * b
    return out


def _stack_rank(F, mats, shape):
    if not len(mats):
        return 0
    return F.rank(np.stack([m.reshape(-1) for m in mats], axis=1))


# -- certificate kinds --------------------------------------------------------

def check_isomorphism(C: _Ctx, cert):
    F = C.F
    src, tgt = C.module(cert["source"]), C.module(cert["target"])
    f = C.matrix(cert["matrix"], tgt.shape[1], src.shape[1])
    if not _linear(F, src, tgt, f):
        return False, "map is not R-linear"
    if src.shape[1] != tgt.shape[1] or F.rank(f) != src.shape[1]:
        return False, "map is not bijective"
    return True, "R-linear bijection"


def check_endomorphisms(C: _Ctx, cert):
    F = C.F
    M = C.module(cert["module"])
    H = _hom_basis(F, M, M)
    faithful = _stack_rank(F, list(M), None) if M.shape[1] else 0
    if H.shape[0] != cert["dim"]:
        return False, f"End has dimension {H.shape[0]}, not {cert['dim']}"
    if faithful != C.n:
        return False, f"actions span {faithful} < {C.n} dimensions: homothety not injective"
    return True, "homothety is bijective"


def _ring_blocks(C: _Ctx, d, bs, bt):
    """R-matrix (bt, bs, n) of a map R^bs -> R^bt from its k-matrix."""
    n = C.n
    out = C.F.zeros((bt, bs, n))
    for j in range(bs):
        col = C.F.matmul(d[:, j * n:(j + 1) * n], C.unit)
        for l in range(bt):
            out[l, j] = col[l * n:(l + 1) * n]
    return out


def check_ext_dims(C: _Ctx, cert):
    F = C.F
    M, N = C.module(cert["module"]), C.module(cert["target"])
    b = cert["free_ranks"]
    n, dM, dN = C.n, M.shape[1], N.shape[1]
    frees = [C.free(r) for r in b]
    eps = C.matrix(cert["augmentation"], dM, b[0] * n)
    if not _linear(F, frees[0], M, eps):
        return False, "augmentation is not R-linear"
    if F.rank(eps) != dM:
        return False, "augmentation is not surjective"
    ds = []
    for i, raw in enumerate(cert["differentials"], start=1):
        d = C.matrix(raw, b[i - 1] * n, b[i] * n)
        if not _linear(F, frees[i], frees[i - 1], d):
            return False, f"d_{i} is not R-linear"
        ds.append(d)
    prev = eps
    ranks = [F.rank(eps)] + [F.rank(d) for d in ds]
    for i, d in enumerate(ds, start=1):
        if not F.is_zero(F.matmul(prev, d)):
            return False, f"d_{i - 1} d_{i} != 0"
        if b[i - 1] * n - ranks[i - 1] != ranks[i]:
            return False, f"resolution is not exact at F_{i - 1}"
        prev = d
    # Hom(F_i, N) = N^{b_i}; D_{i+1}: N^{b_i} -> N^{b_{i+1}}
    Dr = [0]
    for i, d in enumerate(ds, start=1):
        E = _ring_blocks(C, d, b[i], b[i - 1])
        if dN == 0:
            Dr.append(0)
            continue
        blk = F.zeros((b[i] * dN, b[i - 1] * dN))
        for j in range(b[i]):
            for l in range(b[i - 1]):
                blk[j * dN:(j + 1) * dN, l * dN:(l + 1) * dN] = F.einsum("i,ixy->xy", E[l, j], N)
        Dr.append(F.rank(blk))
    dims = [b[i] * dN - Dr[i] - Dr[i + 1] for i in range(len(ds))]
    if dims != list(cert["dims"]):
        return False, f"recomputed Ext dimensions {dims} differ from {cert['dims']}"
    return True, f"Ext dimensions {dims} recomputed"


def check_complex(C: _Ctx, cert):
    F = C.F
    terms = {int(k): C.module(v) for k, v in cert["terms"].items()}
    lo, hi = min(terms), max(terms)
    if sorted(terms) != list(range(lo, hi + 1)):
        return False, "terms are not in consecutive degrees"
    d = {}
    for k, raw in cert["differentials"].items():
        k = int(k)
        if k not in terms or k - 1 not in terms:
            return False, f"differential {k} has no source or target"
        d[k] = C.matrix(raw, terms[k - 1].shape[1], terms[k].shape[1])
        if not _linear(F, terms[k], terms[k - 1], d[k]):
            return False, f"d_{k} is not R-linear"
    for k in range(lo + 1, hi + 1):
        d.setdefault(k, F.zeros((terms[k - 1].shape[1], terms[k].shape[1])))
    for k in range(lo + 2, hi + 1):
        if not F.is_zero(F.matmul(d[k - 1], d[k])):
            return False, f"d_{k - 1} d_{k} != 0"
    rk = {k: F.rank(m) for k, m in d.items()}
    for k in cert.get("exact_at", []):
        if terms[k].shape[1] - rk.get(k, 0) != rk.get(k + 1, 0):
            return False, f"not exact in degree {k}"
    for t in cert.get("hom_into", []):
        T = C.module(t["test"])
        H = {k: _hom_basis(F, X, T) for k, X in terms.items()}
        # Hom(d_k, T): Hom(X_{k-1}, T) -> Hom(X_k, T), f -> f d_k
        r = {k: _stack_rank(F, [F.matmul(f, d[k]) for f in H[k - 1]], None) for k in d}
        for k in t["exact_at"]:
            if r.get(k, 0) + r.get(k + 1, 0) != H[k].shape[0]:
                return False, f"Hom(X, {t['test']}) is not exact in degree {k}"
    for t in cert.get("hom_from", []):
        Hm = C.module(t["test"])
        H = {k: _hom_basis(F, Hm, X) for k, X in terms.items()}
        r = {k: _stack_rank(F, [F.matmul(d[k], f) for f in H[k]], None) for k in d}
        for k in t["exact_at"]:
            if r.get(k, 0) + r.get(k + 1, 0) != H[k].shape[0]:
                return False, f"Hom({t['test']}, X) is not exact in degree {k}"
    if cert.get("minimal_at"):
        if C.ideal is None:
            return False, "minimality claimed over an algebra without a maximal ideal"
        for k in cert["minimal_at"]:
            X = terms[k - 1]
            mX = [F.einsum("i,ixy->xy", C.ideal[:, j], X) for j in range(C.ideal.shape[1])]
            span = np.concatenate(mX, axis=1) if mX else F.zeros((X.shape[1], 0))
            if F.rank(np.concatenate([span, d[k]], axis=1)) != F.rank(span):
                return False, f"d_{k} has image outside m X_{k - 1}"
    return True, "complex checks pass"


CHECKS = {"isomorphism": check_isomorphism, "endomorphisms": check_endomorphisms,
          "ext_dims": check_ext_dims, "complex": check_complex}


def verify_entry(entry: dict) -> list[dict]:
    certs = entry.get("certificates") or []
    if not certs:
        return []
    ctx = entry.get("context")
    if ctx is None:
        raise CertificateError("entry has certificates but no context")
    C = _Ctx(ctx)
    out = []
    for i, cert in enumerate(certs):
        kind = cert.get("kind")
        if "omitted" in cert:
            out.append({"certificate": i, "kind": kind, "status": "omitted", "detail": cert["omitted"]})
            continue
        fn = CHECKS.get(kind)
        if fn is None:
            out.append({"certificate": i, "kind": kind, "status": "fail", "detail": f"unknown kind {kind!r}"})
            continue
        try:
            ok, msg = fn(C, cert)
        except (CertificateError, KeyError, ValueError, TypeError) as e:
            ok, msg = False, f"malformed certificate: {e}"
        out.append({"certificate": i, "kind": kind, "status": "pass" if ok else "fail", "detail": msg})
    return out


def verify_artifact(doc) -> dict:
    """Check a run report (or a single result entry)."""
    entries = doc["results"] if isinstance(doc, dict) and "results" in doc else [doc]
    rows = []
    for e in entries:
        for r in verify_entry(e):
            r["entry"] = e.get("index", 0)
            rows.append(r)
    counts = {s: sum(r["status"] == s for r in rows) for s in ("pass", "fail", "omitted")}
    return {"checks": rows, "summary": counts}
