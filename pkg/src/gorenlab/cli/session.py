"""Session files: strict JSON with positions, object construction, canonical emission."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from json.decoder import JSONArray, JSONObject
from json.scanner import py_make_scanner

import numpy as np

from ..algebracore import (AlgebraError, FdModule, ModuleError, ModuleHom, build_monomial_quotient,
                           cokernel, direct_sum, explicit_algebra, ground_field_algebra, hom_module,
                           ideal_module, identity, image, k_dual, kernel, multiplication_map, power_module,
                           product_algebra, quotient_by_ideal, regular_module, residue_field, tensor_module,
                           zero_hom)
from ..exactlinalg import Field


class SessionError(ValueError):
    """A usage or parse problem, with an optional position in the source text."""

    def __init__(self, message, doc: str | None = None, pos: int | None = None):
        self.message = message
        self.line = self.column = None
        if doc is not None and pos is not None:
            self.line = doc.count("\n", 0, pos) + 1
            self.column = pos - doc.rfind("\n", 0, pos)
        super().__init__(self.__str__())

    def __str__(self):
        if self.line is None:
            return self.message
        return f"line {self.line}, column {self.column}: {self.message}"


# -- position-aware JSON -----------------------------------------------------

class Obj(dict):
    pos: int = 0


class Arr(list):
    pos: int = 0


class _Float(str):
    pass


def _reject_constant(name):
    return _Float(name)


class _Decoder(json.JSONDecoder):
    def __init__(self, doc):
        super().__init__(parse_float=_Float, parse_constant=_reject_constant)
        self.doc = doc
        self.parse_object = self._object
        self.parse_array = self._array
        self.scan_once = py_make_scanner(self)

    def _object(self, s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo=None, *args):
        start = s_and_end[1] - 1
        pairs, end = JSONObject(s_and_end, strict, scan_once, None, list, memo if memo is not None else {})
        out = Obj()
        out.pos = start
        for k, v in pairs:
            if k in out:
                raise SessionError(f"duplicate key {k!r}", self.doc, start)
            out[k] = v
        return out, end

    def _array(self, s_and_end, scan_once, *args):
        start = s_and_end[1] - 1
        values, end = JSONArray(s_and_end, scan_once)
        out = Arr(values)
        out.pos = start
        return out, end


def load_json(text: str):
    """Parse JSON keeping container positions; floats and NaN are rejected."""
    dec = _Decoder(text)
    try:
        value = dec.decode(text)
    except json.JSONDecodeError as e:
        raise SessionError(e.msg, text, e.pos) from None
    _no_floats(value, text, 0)
    return value


def _no_floats(v, doc, pos):
    if isinstance(v, _Float):
        raise SessionError(f"inexact number {str(v)!r}: write exact scalars as strings like \"-1/2\"", doc, pos)
    if isinstance(v, dict):
        for x in v.values():
            _no_floats(x, doc, getattr(v, "pos", pos))
    elif isinstance(v, list):
        for x in v:
            _no_floats(x, doc, getattr(v, "pos", pos))


# -- corpus ------------------------------------------------------------------

CORPUS = {
    "Rx2": {"monomial": {"variables": ["x"], "relations": ["x^2"]}},
    "Rx3": {"monomial": {"variables": ["x"], "relations": ["x^3"]}},
    "Rxy": {"monomial": {"variables": ["x", "y"], "relations": ["x^2", "y^2"]}},
    "Rm2": {"monomial": {"variables": ["x", "y"], "relations": ["x^2", "x*y", "y^2"]}},
    "Rprod": {"product": [{"monomial": {"variables": [], "relations": []}},
                          {"monomial": {"variables": [], "relations": []}}]},
}


def corpus(name: str) -> dict:
    """The session fragment defining a built-in ring, with its standard modules."""
    if name not in CORPUS:
        raise SessionError(f"unknown corpus ring {name!r} (known: {', '.join(sorted(CORPUS))})")
    alg = dict(CORPUS[name])
    alg["name"] = name
    mods = {"R": {"free": 1}}
    if name != "Rprod":
        mods["k"] = {"residue_field": None}
        mods["D"] = {"k_dual": "R"}
    else:
        mods["k1"] = {"residue_field": 0}
        mods["k2"] = {"residue_field": 1}
    return {"field": "F_5", "algebra": alg, "modules": mods, "morphisms": {}, "commands": []}


# -- session -------------------------------------------------------------------

COMMANDS = {
    # name: (module-valued parameters, other parameters)
    "check-semidualizing": (("C",), ("bound", "seed")),
    "bass": (("M", "C"), ("bound", "seed")),
    "totref": (("M", "C"), ("bound", "seed")),
    "gc-projective": (("M", "C"), ("bound", "seed", "window", "free_test_ranks")),
    "gcpd": (("M", "C"), ("bound", "seed")),
    "resolve": (("M",), ("bound",)),
    "complete-pc": (("M", "C"), ("bound", "seed", "window", "free_test_ranks")),
    "strict-resolve": (("M", "C"), ("bound", "seed", "length", "extra")),
    "approximate": (("M", "C"), ("bound", "seed", "length")),
    "minimal-pc": (("M", "C"), ("bound", "seed")),
    "minimal-proper-gc": (("M", "C"), ("bound", "seed", "length")),
    "rel-ext": (("M", "N", "C"), ("bound", "seed")),
    "rel-tor": (("M", "N", "C"), ("bound", "seed")),
    "verify-proper": (("M", "C"), ("bound", "seed", "length", "extra")),
    "depth": (("M",), ("bound",)),
    "ext": (("M", "N"), ("bound",)),
    "tor": (("M", "N"), ("bound",)),
}
OPTIONAL_MODULES = {("complete-pc", "M")}


@dataclass
class Session:
    field: Field
    algebra: object
    spec: dict                       # canonical form of the whole document
    modules: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    commands: list = field(default_factory=list)

    def module(self, name):
        return self.modules[name]

    def names_of(self):
        return {id(M): n for n, M in self.modules.items()}


def _fail(msg, node, doc):
    raise SessionError(msg, doc, getattr(node, "pos", None))


def _expect_keys(node, allowed, required, what, doc):
    if not isinstance(node, dict):
        _fail(f"{what} must be an object", node, doc)
    for k in node:
        if k not in allowed:
            _fail(f"unknown key {k!r} in {what}", node, doc)
    for k in required:
        if k not in node:
            _fail(f"missing key {k!r} in {what}", node, doc)


def _single(node, kinds, what, doc, extra=("name",)):
    """A one-tag object like {"free": 2}; returns (tag, value)."""
    _expect_keys(node, set(kinds) | set(extra), (), what, doc)
    tags = [k for k in node if k in kinds]
    if len(tags) != 1:
        _fail(f"{what} needs exactly one of {', '.join(sorted(kinds))}", node, doc)
    return tags[0], node[tags[0]]


def parse_field(node, doc) -> Field:
    if isinstance(node, str):
        m = re.fullmatch(r"F_(\d+)", node.strip())
        if m:
            p = int(m.group(1))
            try:
                return Field.prime(p)
            except ValueError as e:
                _fail(str(e), node, doc)
        if node.strip() in ("QQ", "Q"):
            return Field.rational()
    _fail(f"field must be \"F_p\" or \"QQ\", got {node!r}", node, doc)


def _scalar_canon(F, v, node, doc):
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        _fail(f"scalar entries must be strings or integers, got {v!r}", node, doc)
    try:
        return F.format(F.scalar(v))
    except (ValueError, ZeroDivisionError) as e:
        _fail(f"bad scalar {v!r}: {e}", node, doc)


def _tensor_canon(F, node, doc, depth):
    if depth == 0:
        return _scalar_canon(F, node, node, doc)
    if not isinstance(node, list):
        _fail("expected an array", node, doc)
    return [_tensor_canon(F, x, doc, depth - 1) if depth > 1 else _scalar_canon(F, x, node, doc) for x in node]


def _int(node, what, doc, minimum=0, parent=None):
    if isinstance(node, bool) or not isinstance(node, int) or node < minimum:
        _fail(f"{what} must be an integer >= {minimum}", parent if parent is not None else node, doc)
    return node


def _canon_algebra(F, node, doc):
    tag, val = _single(node, {"corpus", "monomial", "explicit", "product"}, "algebra", doc)
    out = {}
    if "name" in node:
        if not isinstance(node["name"], str):
            _fail("algebra name must be a string", node, doc)
        out["name"] = node["name"]
    if tag == "corpus":
        if val not in CORPUS:
            _fail(f"unknown corpus ring {val!r}", node, doc)
        out.update(json.loads(json.dumps(CORPUS[val])))
        out.setdefault("name", val)
        return out
    if tag == "monomial":
        _expect_keys(val, {"variables", "relations"}, ("variables", "relations"), "monomial algebra", doc)
        for key in ("variables", "relations"):
            if not isinstance(val[key], list) or not all(isinstance(s, str) for s in val[key]):
                _fail(f"{key} must be a list of strings", val, doc)
        out["monomial"] = {"variables": list(val["variables"]), "relations": list(val["relations"])}
    elif tag == "explicit":
        _expect_keys(val, {"labels", "structure", "unit", "maximal_ideal"}, ("labels", "structure", "unit"),
                     "explicit algebra", doc)
        if not isinstance(val["labels"], list) or not all(isinstance(s, str) for s in val["labels"]):
            _fail("labels must be a list of strings", val, doc)
        e = {"labels": list(val["labels"]), "structure": _tensor_canon(F, val["structure"], doc, 3),
             "unit": _tensor_canon(F, val["unit"], doc, 1)}
        if "maximal_ideal" in val:
            e["maximal_ideal"] = _tensor_canon(F, val["maximal_ideal"], doc, 2)
        out["explicit"] = e
    else:
        if not isinstance(val, list) or len(val) < 2:
            _fail("product needs a list of at least two algebras", node, doc)
        out["product"] = [_canon_algebra(F, a, doc) for a in val]
    return out


def build_algebra(F, spec, node=None, doc=None):
    name = spec.get("name")
    try:
        if "monomial" in spec:
            m = spec["monomial"]
            if not m["variables"]:
                return ground_field_algebra(F, name=name)
            return build_monomial_quotient(m["variables"], m["relations"], F, name=name)[0]
        if "explicit" in spec:
            e = spec["explicit"]
            n = len(e["labels"])
            s = F.array(np.array(e["structure"], dtype=object)) if n else F.zeros((0, 0, 0))
            mi = e.get("maximal_ideal")
            if mi is not None:
                mi = F.array(np.array(mi, dtype=object)) if len(mi) and len(mi[0]) else F.zeros((n, 0))
            A = explicit_algebra(F, e["labels"], s, F.array(np.array(e["unit"], dtype=object)), mi, name=name)
            return A
        return product_algebra(*(build_algebra(F, a, node, doc) for a in spec["product"]), name=name)
    except (AlgebraError, ModuleError, ValueError) as e:
        if isinstance(e, SessionError):
            raise
        raise SessionError(f"invalid algebra: {e}", doc, getattr(node, "pos", None)) from None


MODULE_KINDS = {"free", "residue_field", "k_dual", "hom", "tensor", "direct_sum", "power", "ideal",
                "quotient", "actions", "generators", "kernel", "image", "cokernel"}
MORPHISM_KINDS = {"matrix", "identity", "zero", "multiplication"}


def _element_canon(F, A, v, node, doc):
    if isinstance(v, str):
        if v not in A.labels:
            _fail(f"unknown basis label {v!r} (labels: {', '.join(A.labels)})", node, doc)
        return v
    if isinstance(v, list):
        if len(v) != A.dim:
            _fail(f"element needs {A.dim} coordinates", node, doc)
        return [_scalar_canon(F, x, node, doc) for x in v]
    if isinstance(v, dict):
        for k in v:
            if k not in A.labels:
                _fail(f"unknown basis label {k!r}", node, doc)
        return {k: _scalar_canon(F, x, node, doc) for k, x in v.items()}
    _fail("an algebra element is a basis label, a coordinate list, or a {label: coefficient} object", node, doc)


def _element(F, A, v):
    if isinstance(v, dict):
        r = F.zeros(A.dim)
        for k, c in v.items():
            r = F.add(r, F.scale(F.scalar(c), A.basis_vector(A.labels.index(k))))
        return r
    if isinstance(v, list):
        return F.array(np.array(v, dtype=object))
    return A.element(v)


def _names(v, count, what, node, doc):
    if isinstance(v, str):
        v = [v]
    if not isinstance(v, list) or not all(isinstance(s, str) for s in v) or (count and len(v) != count):
        _fail(f"{what} takes {'a list of ' + str(count) if count else 'a list of'} names", node, doc)
    return list(v)


def _canon_module(F, A, node, doc):
    tag, v = _single(node, MODULE_KINDS, "module", doc, extra=())
    if tag == "free":
        v = _int(v, "free rank", doc, parent=node)
    elif tag == "residue_field":
        if v is not None:
            v = _int(v, "residue_field factor", doc, parent=node)
    elif tag in ("k_dual", "kernel", "image", "cokernel"):
        if not isinstance(v, str):
            _fail(f"{tag} takes one name", node, doc)
    elif tag in ("hom", "tensor"):
        v = _names(v, 2, tag, node, doc)
    elif tag == "direct_sum":
        v = _names(v, 0, tag, node, doc)
        if not v:
            _fail("direct_sum needs at least one summand", node, doc)
    elif tag == "power":
        if not (isinstance(v, list) and len(v) == 2 and isinstance(v[0], str)):
            _fail("power takes [name, rank]", node, doc)
        v = [v[0], _int(v[1], "power rank", doc, parent=node)]
    elif tag in ("ideal", "quotient"):
        if not isinstance(v, list):
            _fail(f"{tag} takes a list of algebra elements", node, doc)
        v = [_element_canon(F, A, x, node, doc) for x in v]
    elif tag == "actions":
        v = _tensor_canon(F, v, doc, 3)
    elif tag == "generators":
        if not isinstance(v, dict) or A.variables is None:
            _fail("generators needs a monomial algebra and a {variable: matrix} object", node, doc)
        for k in v:
            if k not in A.variables:
                _fail(f"unknown variable {k!r}", v, doc)
        missing = [x for x in A.variables if x not in v]
        if missing:
            _fail(f"missing action of {missing[0]!r}", v, doc)
        v = {k: _tensor_canon(F, m, doc, 2) for k, m in v.items()}
    return {tag: v}


def _canon_morphism(F, A, node, doc):
    _expect_keys(node, MORPHISM_KINDS | {"source", "target"}, (), "morphism", doc)
    tags = [k for k in node if k in MORPHISM_KINDS]
    if len(tags) != 1:
        _fail(f"morphism needs exactly one of {', '.join(sorted(MORPHISM_KINDS))}", node, doc)
    tag = tags[0]
    out = {}
    for key in ("source", "target"):
        if key in node:
            if not isinstance(node[key], str):
                _fail(f"{key} must be a module name", node, doc)
            out[key] = node[key]
    if tag == "matrix":
        if "source" not in out or "target" not in out:
            _fail("a matrix morphism needs source and target", node, doc)
        out["matrix"] = _tensor_canon(F, node["matrix"], doc, 2)
    elif tag == "identity":
        if not isinstance(node[tag], str):
            _fail("identity takes one module name", node, doc)
        out["identity"] = node[tag]
    elif tag == "zero":
        if "source" not in out or "target" not in out:
            _fail("a zero morphism needs source and target", node, doc)
        out["zero"] = None
    else:
        mv = node[tag]
        _expect_keys(mv, {"module", "element"}, ("module", "element"), "multiplication", doc)
        out["multiplication"] = {"module": mv["module"], "element": _element_canon(F, A, mv["element"], mv, doc)}
    return out


def _canon_command(node, doc, index):
    if not isinstance(node, dict) or "command" not in node:
        _fail("each command needs a 'command' key", node, doc)
    name = node["command"]
    if name not in COMMANDS:
        _fail(f"unknown command {name!r}", node, doc)
    mods, opts = COMMANDS[name]
    allowed = {"command", *mods, *opts}
    required = [m for m in mods if (name, m) not in OPTIONAL_MODULES]
    _expect_keys(node, allowed, required, f"command {name}", doc)
    out = {"command": name}
    for m in mods:
        if m in node:
            if not isinstance(node[m], str):
                _fail(f"{m} must be a module name", node, doc)
            out[m] = node[m]
    for o in opts:
        if o not in node:
            continue
        v = node[o]
        if o in ("bound", "seed", "window", "length"):
            out[o] = _int(v, o, doc, minimum=1 if o == "window" else 0, parent=node)
        elif o == "free_test_ranks":
            if not isinstance(v, list) or not v:
                _fail("free_test_ranks must be a nonempty list", node, doc)
            out[o] = [_int(x, "free test rank", doc, minimum=1, parent=node) for x in v]
        elif o == "extra":
            out[o] = _names(v, 0, "extra", node, doc)
    return out


def parse_session(text: str) -> Session:
    """Parse, validate and build every object of a session document."""
    root = load_json(text)
    _expect_keys(root, {"field", "algebra", "modules", "morphisms", "commands"}, ("field", "algebra"),
                 "session", text)
    F = parse_field(root["field"], text)
    aspec = _canon_algebra(F, root["algebra"], text)
    A = build_algebra(F, aspec, root["algebra"], text)
    mods_node = root.get("modules", Obj())
    mors_node = root.get("morphisms", Obj())
    for what, n in (("modules", mods_node), ("morphisms", mors_node)):
        if not isinstance(n, dict):
            _fail(f"{what} must be an object", n, text)
    clash = set(mods_node) & set(mors_node)
    if clash:
        _fail(f"name {sorted(clash)[0]!r} is both a module and a morphism", root, text)
    mspec = {k: _canon_module(F, A, v, text) for k, v in mods_node.items()}
    fspec = {k: _canon_morphism(F, A, v, text) for k, v in mors_node.items()}
    cmds_node = root.get("commands", Arr())
    if not isinstance(cmds_node, list):
        _fail("commands must be a list", cmds_node, text)
    cmds = [_canon_command(c, text, i) for i, c in enumerate(cmds_node)]
    spec = {"field": f"F_{F.p}" if F.p else "QQ", "algebra": aspec,
            "modules": mspec, "morphisms": fspec, "commands": cmds}
    S = Session(F, A, spec)
    _Builder(S, mods_node, mors_node, text).build_all()
    for c, node in zip(cmds, cmds_node):
        for key in ("M", "N", "C"):
            if key in c and c[key] not in S.modules:
                _fail(f"command {c['command']} refers to undefined module {c[key]!r}", node, text)
        for x in c.get("extra", []):
            if x not in S.modules:
                _fail(f"command {c['command']} refers to undefined module {x!r}", node, text)
    S.commands = cmds
    return S


class _Builder:
    def __init__(self, S: Session, mnodes, fnodes, doc):
        self.S, self.mnodes, self.fnodes, self.doc = S, mnodes, fnodes, doc
        self.active = set()

    def build_all(self):
        for n in self.S.spec["modules"]:
            self.module(n, None)
        for n in self.S.spec["morphisms"]:
            self.morphism(n, None)

    def _enter(self, name, node):
        if name in self.active:
            _fail(f"circular definition involving {name!r}", node, self.doc)
        self.active.add(name)

    def module(self, name, ref_node):
        S = self.S
        if name in S.modules:
            return S.modules[name]
        if name not in S.spec["modules"]:
            _fail(f"undefined module {name!r}", ref_node, self.doc)
        node = self.mnodes[name]
        self._enter(name, node)
        try:
            M = self._make_module(S.spec["modules"][name], node)
        except (AlgebraError, ModuleError, ValueError) as e:
            if isinstance(e, SessionError):
                raise
            _fail(f"module {name!r}: {e}", node, self.doc)
        self.active.discard(name)
        if M.name is None:
            M.name = name
        S.modules[name] = M
        return M

    def morphism(self, name, ref_node):
        S = self.S
        if name in S.morphisms:
            return S.morphisms[name]
        if name not in S.spec["morphisms"]:
            _fail(f"undefined morphism {name!r}", ref_node, self.doc)
        node = self.fnodes[name]
        self._enter(name, node)
        spec = S.spec["morphisms"][name]
        F, A = S.field, S.algebra
        try:
            if "matrix" in spec:
                src, tgt = self.module(spec["source"], node), self.module(spec["target"], node)
                mat = F.array(np.array(spec["matrix"], dtype=object)).reshape(tgt.dim, src.dim) \
                    if tgt.dim and src.dim else F.zeros((tgt.dim, src.dim))
                f = ModuleHom(src, tgt, mat)
            elif "identity" in spec:
                f = identity(self.module(spec["identity"], node))
            elif "zero" in spec:
                f = zero_hom(self.module(spec["source"], node), self.module(spec["target"], node))
            else:
                mv = spec["multiplication"]
                M = self.module(mv["module"], node)
                f = multiplication_map(M, _element(F, A, mv["element"]))
        except (AlgebraError, ModuleError, ValueError) as e:
            if isinstance(e, SessionError):
                raise
            _fail(f"morphism {name!r}: {e}", node, self.doc)
        self.active.discard(name)
        S.morphisms[name] = f
        return f

    def _make_module(self, spec, node):
        S = self.S
        F, A = S.field, S.algebra
        (tag, v), = spec.items()
        m = lambda n: self.module(n, node)
        if tag == "free":
            # rank one is the regular module itself
            return regular_module(A) if v == 1 else power_module(regular_module(A), v)
        if tag == "residue_field":
            return residue_field(A, v)
        if tag == "k_dual":
            return k_dual(m(v))
        if tag == "hom":
            return hom_module(m(v[0]), m(v[1]))
        if tag == "tensor":
            return tensor_module(m(v[0]), m(v[1]))
        if tag == "direct_sum":
            return direct_sum(*(m(x) for x in v)).module
        if tag == "power":
            return power_module(m(v[0]), v[1])
        if tag == "ideal":
            return ideal_module(A, [_element(F, A, x) for x in v])
        if tag == "quotient":
            return quotient_by_ideal(A, [_element(F, A, x) for x in v])
        if tag == "actions":
            acts = np.array(v, dtype=object)
            if acts.ndim != 3 and not (acts.size == 0):
                raise ModuleError("actions must be a list of square matrices")
            return FdModule(A, F.array(acts) if acts.size else F.zeros((A.dim, 0, 0)))
        if tag == "generators":
            return FdModule(A, _actions_from_generators(F, A, v))
        f = self.morphism(v, node)
        if tag == "kernel":
            return kernel(f)[0]
        if tag == "image":
            return image(f)[0]
        return cokernel(f).module


def _actions_from_generators(F, A, gens):
    mats = {x: F.array(np.array(gens[x], dtype=object)) for x in A.variables}
    d = next(iter(mats.values())).shape[0] if mats else 0
    for x, g in mats.items():
        if g.shape != (d, d):
            raise ModuleError(f"action of {x} is not a {d}x{d} matrix")
    acts = []
    for e in [_exponents(l, A.variables) for l in A.labels]:
        a = F.eye(d)
        for x, k in zip(A.variables, e):
            for _ in range(k):
                a = F.matmul(a, mats[x])
        acts.append(a)
    return np.stack(acts) if acts else F.zeros((0, d, d))


def _exponents(label, variables):
    from ..algebracore.algebra import parse_monomial
    return (0,) * len(variables) if label == "1" else parse_monomial(label, variables)


def emit_session(spec: dict) -> str:
    """Canonical text of a session: sorted keys, two-space indent, trailing newline."""
    return json.dumps(spec, sort_keys=True, indent=2) + "\n"
