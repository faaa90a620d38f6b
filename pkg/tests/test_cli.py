import copy
import json

import numpy as np
import pytest

from gorenlab.cli import corpus, emit_session, parse_session, run_command, run_session, verify_artifact
from gorenlab.cli.main import main
from gorenlab.cli.session import SessionError


def session(alg="Rx2", commands=(), modules=None, **extra):
    doc = {"field": "F_5", "algebra": {"corpus": alg} if isinstance(alg, str) else alg,
           "modules": modules or {"R": {"free": 1}, "k": {"residue_field": None}, "D": {"k_dual": "R"}},
           "commands": list(commands)}
    doc.update(extra)
    return json.dumps(doc)


def socle_dim(A):
    F = A.field
    gens = A.local.generators
    rows = [A.mult_matrix(gens[:, j]) for j in range(gens.shape[1])]
    return A.dim - F.rank(np.concatenate(rows, axis=0))


ALL = [
    {"command": "check-semidualizing", "C": "R"},
    {"command": "check-semidualizing", "C": "D"},
    {"command": "check-semidualizing", "C": "k"},
    {"command": "bass", "M": "D", "C": "D"},
    {"command": "totref", "M": "k", "C": "R"},
    {"command": "gc-projective", "M": "k", "C": "R"},
    {"command": "gcpd", "M": "k", "C": "R"},
    {"command": "resolve", "M": "k", "bound": 4},
    {"command": "complete-pc", "M": "k", "C": "R"},
    {"command": "complete-pc", "C": "R"},
    {"command": "strict-resolve", "M": "k", "C": "R", "length": 2},
    {"command": "approximate", "M": "k", "C": "R", "length": 1},
    {"command": "minimal-pc", "M": "D", "C": "D"},
    {"command": "minimal-proper-gc", "M": "k", "C": "R", "length": 1},
    {"command": "rel-ext", "M": "k", "N": "k", "C": "R"},
    {"command": "rel-tor", "M": "k", "N": "k", "C": "R"},
    {"command": "verify-proper", "M": "k", "C": "R", "length": 1, "extra": ["k"]},
    {"command": "depth", "M": "k"},
    {"command": "ext", "M": "k", "N": "k", "bound": 3},
    {"command": "tor", "M": "k", "N": "k", "bound": 3},
]


@pytest.fixture(scope="module")
def full_report():
    text = session("Rx2", ALL)
    return text, run_session(parse_session(text), {"seed": 7}, text=text)


# -- parsing -------------------------------------------------------------------

def test_parse_corpus_ring():
    S = parse_session(session("Rx2"))
    assert S.algebra.dim == 2
    assert S.modules["k"].dim == 1 and S.modules["D"].dim == 2


def test_parse_monomial_and_explicit():
    S = parse_session(session({"monomial": {"variables": ["x"], "relations": ["x^3"]}}))
    assert S.algebra.dim == 3
    expl = {"explicit": {"labels": ["1", "a"], "unit": ["1", "0"],
                         "structure": [[["1", "0"], ["0", "1"]], [["0", "1"], ["0", "0"]]]}}
    S = parse_session(session(expl, modules={"R": {"free": 2}}))
    assert S.algebra.dim == 2 and S.modules["R"].dim == 4


@pytest.mark.parametrize("text, needle", [
    (session(modules={"M": {"k_dual": "Z"}}), "undefined module 'Z'"),
    (session(commands=[{"command": "depth", "M": "Q"}], modules={"R": {"free": 1}}), "undefined module 'Q'"),
    (session(modules={"M": {"free": 1.5}}), "inexact number"),
    (session(bogus=1), "unknown key 'bogus'"),
    (session(commands=[{"command": "frobnicate"}]), "frobnicate"),
    ('{"field": "F_6", "algebra": {"corpus": "Rx2"}}', "not a prime"),
    ('{"field": "F_5", "algebra": {"corpus": "Rx2"}', None),
    ('{"field": "F_5", "field": "F_7", "algebra": {"corpus": "Rx2"}}', "duplicate key 'field'"),
    ('{"field": "F_5", "algebra": {"corpus": "Rx2"}, "modules": {"M": {"free": NaN}}}', None),
])
def test_parse_errors(text, needle):
    with pytest.raises(SessionError) as e:
        parse_session(text)
    if needle:
        assert needle in str(e.value)


def test_nonassociative_is_rejected_with_position():
    expl = {"explicit": {"labels": ["1", "a", "b"], "unit": ["1", "0", "0"],
                         "structure": [[["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
                                       [["0", "1", "0"], ["0", "0", "1"], ["0", "0", "0"]],
                                       [["0", "0", "1"], ["0", "0", "0"], ["1", "0", "0"]]]}}
    with pytest.raises(SessionError) as e:
        parse_session(session(expl, modules={}))
    msg = str(e.value)
    assert "not associative" in msg and "line 1, column" in msg


def test_error_position_points_at_offending_line():
    text = '{"field": "F_5", "algebra": {"corpus": "Rx2"},\n "modules": {"M": {"k_dual": "Z"}}}'
    with pytest.raises(SessionError) as e:
        parse_session(text)
    assert "line 2" in str(e.value)


def test_rational_scalars():
    def doc(a):
        expl = {"explicit": {"labels": ["1", "a"], "unit": ["1", "0"],
                             "structure": [[["1", "0"], ["0", "1"]], [["0", "1"], [a, "0"]]]}}
        return json.dumps({"field": "QQ", "algebra": expl, "modules": {"R": {"free": 1}}})

    assert parse_session(doc("0")).algebra.dim == 2
    assert parse_session(doc("-3/6")).spec["algebra"] == parse_session(doc("-1/2")).spec["algebra"]
    with pytest.raises(SessionError):
        parse_session(doc("1/0"))


# -- corpus --------------------------------------------------------------------

@pytest.mark.parametrize("name, dim, soc", [("Rx2", 2, 1), ("Rx3", 3, 1), ("Rxy", 4, 1), ("Rm2", 3, 2)])
def test_corpus_rings(name, dim, soc):
    S = parse_session(emit_session(corpus(name)))
    assert S.algebra.dim == dim
    assert socle_dim(S.algebra) == soc


def test_corpus_product():
    S = parse_session(emit_session(corpus("Rprod")))
    assert S.algebra.dim == 2 and S.algebra.local is None
    assert set(S.modules) == {"R", "k1", "k2"}


def test_corpus_unknown():
    with pytest.raises(SessionError, match="unknown corpus ring"):
        corpus("Rzz")


def test_emit_round_trip():
    S = parse_session(session("Rxy", ALL[:3]))
    again = parse_session(emit_session(S.spec))
    assert again.spec == S.spec


# -- commands ------------------------------------------------------------------

def test_check_semidualizing_D_over_Rm2():
    S = parse_session(session("Rm2"))
    r = run_command(S, {"command": "check-semidualizing", "C": "D"})
    assert r["status"] == "pass"
    assert r["data"]["homothety_iso"] is True


def test_gcpd_k_over_Rm2_not_detected():
    S = parse_session(session("Rm2"))
    r = run_command(S, {"command": "gcpd", "M": "k", "C": "R"})
    assert r["status"] == "fail"
    assert r["verdict"] == "NotDetected(8)"
    assert r["data"]["checks"][0]["reason"].endswith("has dim 3")


def test_strict_resolve_length_two():
    S = parse_session(session("Rx2"))
    r = run_command(S, {"command": "strict-resolve", "M": "k", "C": "R", "length": 2})
    assert r["status"] == "pass"


def test_precondition_error_is_reported():
    S = parse_session(session("Rx2"))
    r = run_command(S, {"command": "rel-ext", "M": "k", "N": "k", "C": "k"})
    assert r["status"] == "error" and "error" in r["data"]


def test_overrides_are_defaults():
    S = parse_session(session("Rx2"))
    r = run_command(S, {"command": "ext", "M": "k", "N": "k", "bound": 3}, {"bound": 6})
    assert r["parameters"]["bound"] == 3
    r = run_command(S, {"command": "ext", "M": "k", "N": "k"}, {"bound": 2})
    assert r["parameters"]["bound"] == 2
    text = session("Rx2", [{"command": "depth", "M": "k"}])
    assert run_session(parse_session(text))["seed"] == 0
    assert run_session(parse_session(text), {"seed": 5})["seed"] == 5


def test_full_session(full_report):
    _, rep = full_report
    by = [(r["command"]["command"], r["status"]) for r in rep["results"]]
    assert ("check-semidualizing", "fail") in by          # C = k
    assert rep["summary"]["error"] == 0
    assert all(r["timing"] is None for r in rep["results"])
    assert [r["index"] for r in rep["results"]] == list(range(len(ALL)))


def test_report_certificates_verify(full_report):
    _, rep = full_report
    out = verify_artifact(json.loads(json.dumps(rep)))
    assert out["summary"]["fail"] == 0
    assert out["summary"]["pass"] > 0


def test_tampered_certificate_fails(full_report):
    _, rep = full_report
    rep = copy.deepcopy(rep)
    entry = next(r for r in rep["results"] if any(c["kind"] == "ext_dims" and "omitted" not in c
                                                   for c in r["certificates"]))
    cert = next(c for c in entry["certificates"] if c["kind"] == "ext_dims")
    key = next(k for k in ("dims", "claimed", "ext_dims") if k in cert)
    cert[key] = [d + 1 for d in cert[key]]
    out = verify_artifact(entry)
    assert out["summary"]["fail"] >= 1


def test_determinism_and_jobs(full_report):
    text, rep = full_report
    again = run_session(parse_session(text), {"seed": 7}, text=text)
    assert json.dumps(again, sort_keys=True) == json.dumps(rep, sort_keys=True)
    par = run_session(parse_session(text), {"seed": 7}, jobs=2, text=text)
    assert json.dumps(par, sort_keys=True) == json.dumps(rep, sort_keys=True)


# -- main ----------------------------------------------------------------------

def test_main_exit_codes(tmp_path, capsys):
    ok = tmp_path / "ok.json"
    ok.write_text(session("Rm2", [{"command": "check-semidualizing", "C": "D"}]))
    bad = tmp_path / "bad.json"
    bad.write_text(session("Rm2", [{"command": "gcpd", "M": "k", "C": "R"}]))
    broken = tmp_path / "broken.json"
    broken.write_text(session(modules={"M": {"k_dual": "Z"}}))
    assert main(["run", str(ok)]) == 0
    assert main(["run", str(bad)]) == 1
    assert main(["run", str(broken)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
    capsys.readouterr()


def test_main_output_and_verify(tmp_path, capsys):
    src = tmp_path / "s.json"
    src.write_text(session("Rx2", ALL[:8]))
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["run", str(src), "--seed", "3", "-o", str(out1)]) in (0, 1)
    assert main(["run", str(src), "--seed", "3", "-o", str(out2)]) in (0, 1)
    assert out1.read_bytes() == out2.read_bytes()
    assert main(["verify", str(out1)]) == 0
    assert main(["verify", str(out1), "--format", "text"]) == 0
    assert "failed" in capsys.readouterr().out


def test_main_text_and_timing(tmp_path, capsys):
    src = tmp_path / "s.json"
    src.write_text(session("Rx2", [{"command": "depth", "M": "k"}]))
    assert main(["run", str(src), "--format", "text"]) == 0
    assert "[pass] depth" in capsys.readouterr().out
    assert main(["run", str(src), "--timing"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert isinstance(rep["results"][0]["timing"], float)


def test_main_corpus(capsys):
    assert main(["corpus", "Rm2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["algebra"]["name"] == "Rm2"
    assert main(["corpus", "nope"]) == 2
