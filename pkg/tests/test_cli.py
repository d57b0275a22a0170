from __future__ import annotations

import argparse
import json

import pytest

from intcomplexity.cli import DEFAULT_LIMIT, resolve_config, run

SMALL = ["--limit", "20000"]


def call(capsys, *argv, environ=None):
    code = run(list(argv), environ if environ is not None else {})
    out, err = capsys.readouterr()
    return code, out.strip(), err


def test_cpx(capsys):
    assert call(capsys, "cpx", "11", *SMALL) == (0, "8", "")
    code, out, _ = call(capsys, "cpx", "2", "3", "107", *SMALL)
    assert out.splitlines() == ["2 2", "3 3", "107 16"]


def test_cpx_json(capsys):
    code, out, _ = call(capsys, "cpx", "856", "--format", "json", *SMALL)
    assert code == 0 and json.loads(out) == {"n": "856", "complexity": 21}


def test_cpx_beyond_table(capsys):
    code, out, _ = call(capsys, "cpx", "2188", "--limit", "100")
    assert (code, out) == (0, "22")


def test_defect_and_expr(capsys):
    code, out, _ = call(capsys, "defect", "54", "--format", "json", *SMALL)
    assert json.loads(out)["C"] == 2 and json.loads(out)["n"] == "2"
    code, out, _ = call(capsys, "expr", "8", "--format", "json", *SMALL)
    assert json.loads(out)["ones"] == 6


def test_stable(capsys):
    code, out, _ = call(capsys, "stable", "1", *SMALL)
    assert out == "1: UnstableCertified K=1 stable_complexity=0 (certified)"
    code, out, _ = call(capsys, "stable", "8", "--format", "json", *SMALL)
    assert json.loads(out)["kind"] == "StableCertified"


def test_policy_exit_codes(capsys):
    code, out, err = call(capsys, "stable-cpx", "107", "--policy", "strict", "--horizon", "12", *SMALL)
    assert code == 3 and "107" in err
    code, out, _ = call(capsys, "stable-cpx", "107", "--horizon", "12", *SMALL)
    assert (code, out) == (0, "107: 15 (horizon-assumed)")


def test_usage_errors(capsys):
    assert call(capsys, "frobnicate")[0] == 2
    assert call(capsys, "dragons", "--a", "2", "--b", "1", "--k-max", "3", *SMALL)[0] == 2
    assert call(capsys, "cpx", "0")[0] == 2
    assert call(capsys, "leaders", *SMALL)[0] == 2
    assert call(capsys, "ldp", "parse", "(x+1)*x+1", *SMALL)[0] == 2
    assert call(capsys, "--help")[0] == 0


def test_counterexample(capsys):
    assert call(capsys, "counterexample", "--q", "64", "--m", "70") == (0, "none", "")
    code, out, _ = call(capsys, "counterexample", "--family", "1,5", "--family", "5,1", "--m", "1280", "--expect-none")
    assert (code, out) == (0, "none")
    code, out, _ = call(capsys, "counterexample", "--q", "2", "--m", "7", "--expect-none")
    assert (code, out) == (1, "1*(2*3^1+1)*3^0")


def test_env_precedence(capsys):
    env = {"INTCPX_FORMAT": "json", "INTCPX_LIMIT": "5000", "INTCPX_HORIZON": "7"}
    code, out, _ = call(capsys, "cpx", "11", environ=env)
    assert json.loads(out)["complexity"] == 8
    code, out, _ = call(capsys, "cpx", "11", "--format", "text", environ=env)
    assert out == "8"
    ns = argparse.Namespace(table_path=None, table_limit=None, horizon=3, policy=None, output=None, threads=None)
    cfg = resolve_config(ns, env)
    assert (cfg.table_limit, cfg.horizon, cfg.output, cfg.policy) == (5000, 3, "json", "assume")
    assert resolve_config(argparse.Namespace(), {}).table_limit == DEFAULT_LIMIT
    assert call(capsys, "cpx", "3", environ={"INTCPX_POLICY": "sloppy"})[0] == 2


def test_table_build_and_info(capsys, tmp_path):
    path = tmp_path / "t.npz"
    code, out, _ = call(capsys, "table", "build", "--limit", "3000", "--table", str(path))
    assert code == 0 and path.exists()
    code, out, _ = call(capsys, "table", "info", "--table", str(path), "--format", "json")
    info = json.loads(out)
    assert info["limit"] == 3000 and info["max_value"] > 0
    code, out, _ = call(capsys, "cpx", "2999", "--table", str(path))
    assert code == 0 and int(out) > 0
    assert call(capsys, "table", "info")[0] == 2


def test_verify_covering(capsys, tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps([{"expression": "2"}, {"expression": "3"}]))
    code, out, _ = call(capsys, "verify-covering", str(good), "--s", "2,2", "--N", "10000", "--format", "json", *SMALL)
    assert code == 0 and json.loads(out)["pass"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"expression": "3"}]))
    code, out, _ = call(capsys, "verify-covering", str(bad), "--s", "2,2", "--N", "10000", "--format", "json", *SMALL)
    assert code == 1 and json.loads(out)["uncovered_leaders"] == [2]


def test_enumerate_formats(capsys):
    code, out, _ = call(capsys, "enumerate", "--N", "100", "--s", "0", "--format", "json", *SMALL)
    data = json.loads(out)
    assert code == 0 and len(data["entries"]) == 1 and data["disjointness"]["pass"]
    code, out, _ = call(capsys, "enumerate", "--N", "1000", "--s", "1", "--format", "csv", "--classify", *SMALL)
    assert out.splitlines()[0] == "n,C,class,approx_value,limit_degree,stable_certificate"


@pytest.mark.parametrize("cmd", [["stable"], ["k-of"], ["stable-cpx"], ["defect"], ["cpx"]])
def test_threads_do_not_change_output(capsys, cmd):
    ns = [str(n) for n in range(1, 200, 7)]
    outs = {call(capsys, *cmd, *ns, "--threads", t, "--format", "json", *SMALL)[1] for t in ("1", "4")}
    assert len(outs) == 1


def test_ldp_commands(capsys):
    code, out, _ = call(capsys, "ldp", "delta", "2x+1", "--format", "json", *SMALL)
    assert code == 0 and json.loads(out)["C"] == 3
    code, out, _ = call(capsys, "ldp", "eval", "(2x1+1)(3x2+1)", "--at", "1,1", "--format", "json", *SMALL)
    assert json.loads(out)["value"] == "70"
    code, out, _ = call(capsys, "exceptions", "x+1", "--box", "3", "--format", "json", *SMALL)
    assert [1] in json.loads(out)["exceptional"]
    code, out, _ = call(capsys, "min-k", "2x+1", "--k-max", "8", "--format", "json", *SMALL)
    assert json.loads(out)["K_observed"] == 0


def test_structure_commands(capsys):
    code, out, _ = call(capsys, "converge", "--a", "2", "--k-max", "6", "--format", "json", *SMALL)
    data = json.loads(out)
    assert data["strictly_increasing"] and data["bounded_by_target"]
    code, out, _ = call(capsys, "dragons", "--a", "1094", "--b", "2", "--k-max", "3", "--format", "json")
    assert code == 0 and json.loads(out)["scanned"] is False
    code, out, _ = call(capsys, "leaders", "--decompose", "54", *SMALL)
    assert out == "54 = 3^3 * 2"
