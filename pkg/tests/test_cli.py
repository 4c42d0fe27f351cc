import json
import subprocess
import sys
from pathlib import Path


from toric_poincare import cli, verify
from toric_poincare.constellation import StructuralClaimError

DATA = Path(__file__).resolve().parents[1] / "data"
FIVE_POINT = str(DATA / "five_point_d4.json")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constellation_text(capsys):
    code, out, _ = run(capsys, "--mode", "constellation", "--input", FIVE_POINT)
    assert code == 0
    assert "P(t) = 1/((1-t1t2t3^2t4t5^2)(1-t1t2^2t3t4^3t5^3)(1-t1t2^2t3^2t4^3t5^4)^2)" in out
    assert "degenerate: yes" in out and "regular: yes" in out


def test_constellation_json_with_box(capsys):
    code, out, _ = run(capsys, "--mode", "constellation", "--input", FIVE_POINT, "--box", "1,2,2,3,4", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["report"]["k"] == 2
    terms = {tuple(t["exponent"]): t["coef"] for t in doc["expansion"]["terms"]}
    assert terms[(1, 2, 2, 3, 4)] == 2


def test_duplicate_siblings_exit_2(capsys):
    code, out, err = run(capsys, "--mode", "constellation", "--input", str(DATA / "bad_siblings.json"))
    assert code == 2 and out == ""
    assert "duplicate sibling weight" in err and "point " in err


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "--mode", "constellation", "--input", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err


def test_semigroup_agree(capsys):
    code, out, _ = run(capsys, "--mode", "semigroup", "--input", str(DATA / "numerical_2_3.json"), "--box", "6")
    assert code == 0 and out.endswith("result: agree\n")
    assert "# diff\nresult: agree\n" in out


def test_semigroup_from_constellation_three_way(capsys):
    code, out, _ = run(capsys, "--mode", "semigroup", "--input", FIVE_POINT, "--box", "2,4,4,6,8", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["diff"] == [] and doc["factored_diff"] == []


def test_semigroup_disagreement_exit_1(capsys, monkeypatch):
    real = cli.poincare_by_definition

    def skewed(spec, box):
        p = real(spec, box)
        return p + type(p).one(p.box)

    monkeypatch.setattr(cli, "poincare_by_definition", skewed)
    code, out, _ = run(capsys, "--mode", "semigroup", "--input", str(DATA / "free_plane.json"), "--box", "3")
    assert code == 1 and "DISAGREE" in out


def test_invalid_spec_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"dimension": 1, "generators": [[2], [4]], "valuations": [[1]]}))
    code, _, err = run(capsys, "--mode", "semigroup", "--input", str(p), "--box", "3")
    assert code == 2 and "elementary divisors" in err


def test_rank_cap_exit_4(capsys, tmp_path):
    p = tmp_path / "wide.json"
    p.write_text(json.dumps({"dimension": 1, "generators": [[1]], "valuations": [[k] for k in range(1, 18)]}))
    code, _, err = run(capsys, "--mode", "semigroup", "--input", str(p), "--box", ",".join(["0"] * 17))
    assert code == 4 and "resource cap" in err


def test_structural_claim_exit_3(capsys, monkeypatch):
    def broken(m, c):
        raise StructuralClaimError("forced")

    monkeypatch.setattr(cli, "degeneracy_report", broken)
    code, _, err = run(capsys, "--mode", "constellation", "--input", FIVE_POINT)
    assert code == 3 and "forced" in err


def test_fibers_five_point_support(capsys):
    code, out, _ = run(
        capsys, "--mode", "fibers", "--input", FIVE_POINT, "--v", "6,11,10,14,18",
        "--support", "0,2,4,0;3,4,0,0;14,0,0,0", "--json",
    )
    doc = json.loads(out)
    assert code == 0
    pair = {(p["a"], p["b"]): p for p in doc["pairs"]}
    assert pair[(1, 4)]["splitting"] and pair[(1, 4)]["witness_D"] == [1, 2, 3, 5]
    assert not pair[(1, 3)]["lemma3"] and not pair[(1, 3)]["splitting"]
    assert pair[(1, 2)]["lemma3"] and not pair[(1, 2)]["splitting"]


def test_fibers_text_and_bad_v(capsys):
    code, out, _ = run(capsys, "--mode", "fibers", "--input", FIVE_POINT, "--v", "1,2,2,3,4")
    assert code == 0 and "chi(PF_v) = 2" in out and "N(v) = 2" in out
    code, _, err = run(capsys, "--mode", "fibers", "--input", FIVE_POINT, "--v", "1,2")
    assert code == 2 and "--v" in err


def test_verify_small_run_and_determinism(capsys):
    args = ("--mode", "verify", "--seed", "3", "--constellations", "6", "--semigroups", "4")
    code, first, _ = run(capsys, *args)
    assert code == 0 and first.startswith("# verify seed=3\n") and "result: ok" in first
    _, second, _ = run(capsys, *args)
    assert first == second


def test_verify_failure_replays(capsys, monkeypatch, tmp_path):
    real = verify.closed_form_N
    monkeypatch.setattr(verify, "closed_form_N", lambda m, rep, v: real(m, rep, v) + (not any(v)))
    out_file = tmp_path / "fail.json"
    args = ("--mode", "verify", "--seed", "5", "--constellations", "3", "--semigroups", "0")
    code, out, _ = run(capsys, *args, "--replay-out", str(out_file))
    assert code == 1 and "replay: " in out
    failures = json.loads(out_file.read_text())
    assert failures
    code, again, _ = run(capsys, "--mode", "verify", "--input", str(out_file), "--json")
    assert code == 1
    replayed = json.loads(again)["failures"]
    assert {json.dumps(f, sort_keys=True) for f in replayed} == {json.dumps(f, sort_keys=True) for f in failures}


def test_console_script_byte_identical():
    cmd = [sys.executable, "-m", "toric_poincare.cli", "--mode", "constellation", "--input", FIVE_POINT, "--box", "2,2,2,2,2"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b"# constellation d=4 r=5")
