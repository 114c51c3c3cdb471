"""CLI surface: exit codes, JSON shapes, determinism, config errors."""

import json

import numpy as np
import pytest

from minksub import cli
from minksub.pencil import CanonicalData, build_canonical

PARABOLOID = {
    "norm": {"kind": "euclidean", "dim": 3},
    "germ": {"n": 2, "p": 1,
             "d2": [[[1.0, 0.0], [0.0, 1.0]]],
             "d3": np.zeros((1, 2, 2, 2)).tolist()},
}

RANDERS = {
    "norm": {"kind": "randers",
             "a": np.eye(3).tolist(), "b": [0.2, 0.0, -0.1]},
    "germ": {"n": 2, "p": 1,
             "d2": [[[2.0, 0.5], [0.5, -1.0]]],
             "d3": (0.1 * np.ones((1, 2, 2, 2))).tolist()},
}


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, argv):
    code = cli.main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_check_norm_valid(tmp_path, capsys):
    cfg = write(tmp_path, "n.json", {"kind": "euclidean", "dim": 3})
    code, out, err = run(capsys, ["check-norm", "--config", cfg,
                                  "--grid", "64", "--seed", "5"])
    assert code == 0 and err == ""
    rep = json.loads(out)
    assert rep["valid"] is True
    assert rep["seed"] == 5
    assert rep["norm"] == {"kind": "euclidean", "dim": 3}
    assert list(rep) == sorted(rep)


def test_check_norm_invalid_exits_one(tmp_path, capsys):
    cfg = write(tmp_path, "n.json",
                {"kind": "expression", "dim": 2,
                 "text": "(y1^2 - y2^2) / 2"})
    code, out, _ = run(capsys, ["check-norm", "--config", cfg,
                                "--grid", "64"])
    assert code == 1
    assert json.loads(out)["valid"] is False


def test_curvature_report_shape(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", RANDERS)
    code, out, _ = run(capsys, ["curvature", "--config", cfg,
                                "--direction", "1,0.5"])
    assert code == 0
    rep = json.loads(out)
    assert set(rep["ricParts"]) == {"cubicGroup", "zetaGroup", "etaGroup",
                                    "rhoGroup"}
    assert rep["Ric"] == pytest.approx(sum(rep["ricParts"].values()),
                                       rel=1e-12)
    assert rep["tolerances"]["zetaDetRatioTol"] == 1e-10
    assert abs(rep["zetaDetRatioResidual"]) <= 1e-10
    assert len(rep["G"]) == 2 and len(rep["g"]) == 2


def test_curvature_deterministic_and_out_file(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", RANDERS)
    dest = tmp_path / "rep.json"
    code, out1, _ = run(capsys, ["curvature", "--config", cfg,
                                 "--direction", "1,0.5",
                                 "--out", str(dest)])
    assert code == 0
    assert dest.read_text() == out1
    _, out2, _ = run(capsys, ["curvature", "--config", cfg,
                              "--direction", "1,0.5"])
    assert out1 == out2


def test_ricci_grid_csv(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", PARABOLOID)
    code, out, _ = run(capsys, ["ricci-grid", "--config", cfg,
                                "--grid", "16"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("u_1,u_2,S,Ric")
    assert len(lines) == 17
    # paraboloid: Ric is n-1 = 1 in every direction
    ric_col = lines[0].split(",").index("Ric")
    for line in lines[1:]:
        assert float(line.split(",")[ric_col]) == pytest.approx(1.0,
                                                                rel=1e-12)


def test_invariants_report(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", PARABOLOID)
    code, out, _ = run(capsys, ["invariants", "--config", cfg])
    assert code == 0
    rep = json.loads(out)
    assert rep["mu"] == 0
    assert rep["tolerances"] == {"rankTol": 1e-9}


def test_pencil_type_spectral(tmp_path, capsys):
    cfg = write(tmp_path, "p.json",
                {"A1": [[2.0, 0.0], [0.0, 3.0]],
                 "A2": [[1.0, 0.0], [0.0, 1.0]]})
    code, out, _ = run(capsys, ["pencil", "type", "--file", cfg])
    assert code == 0
    rep = json.loads(out)
    assert rep["type"] == 0
    assert rep["method"] == "spectral"
    assert rep["samples"] is None


def test_pencil_type_sampled_fallback(tmp_path, capsys):
    # A2 singular on the pencil: det(A1 - t A2) has a root structure the
    # eigen route rejects, the sampler still answers
    cfg = write(tmp_path, "p.json",
                {"A1": [[1.0, 0.0], [0.0, 0.0]],
                 "A2": [[0.0, 0.0], [0.0, 0.0]]})
    code, out, _ = run(capsys, ["pencil", "type", "--file", cfg])
    rep = json.loads(out)
    assert rep["method"] == "sampled"
    assert rep["samples"] == 10000
    assert code == 0


def test_pencil_classify_canonical(tmp_path, capsys):
    pen = build_canonical(CanonicalData(l=1, n=(2,), s=1))
    cfg = write(tmp_path, "p.json",
                {"A1": pen.A1.tolist(), "A2": pen.A2.tolist()})
    code, out, _ = run(capsys, ["pencil", "classify", "--file", cfg])
    assert code == 0
    rep = json.loads(out)
    assert rep["canonical"] == {"l": 1, "n": [2], "s": 1}
    assert rep["topology"] is not None
    assert rep["genericity"]["semisimple"] is True
    assert rep["genericity"]["smoothIntersection"] is True
    assert rep["type"] is not None


def test_pencil_classify_off_canonical_still_reports(tmp_path, capsys):
    cfg = write(tmp_path, "p.json",
                {"A1": [[1.0, 0.0], [0.0, 1.0]],
                 "A2": [[1.0, 0.0], [0.0, -1.0]]})
    code, out, _ = run(capsys, ["pencil", "classify", "--file", cfg])
    assert code == 0
    rep = json.loads(out)
    assert rep["canonical"] is None
    assert any("canonical" in n for n in rep["notes"])
    assert rep["spectral"] is not None


def test_pencil_common_zero_found(tmp_path, capsys):
    cfg = write(tmp_path, "p.json",
                {"A1": [[1.0, 0, 0], [0, -1.0, 0], [0, 0, 0.0]],
                 "A2": [[0.0, 0, 0], [0, 1.0, 0], [0, 0, -1.0]]})
    code, out, _ = run(capsys, ["pencil", "common-zero", "--file", cfg])
    assert code == 0
    rep = json.loads(out)
    assert rep["found"] is True
    assert len(rep["point"]) == 3
    assert rep["residual"] <= 1e-8


def test_pencil_common_zero_not_found(tmp_path, capsys):
    cfg = write(tmp_path, "p.json",
                {"A1": np.eye(3).tolist(), "A2": np.diag([1.0, 2, 3]).tolist()})
    code, out, _ = run(capsys, ["pencil", "common-zero", "--file", cfg,
                                "--budget", "8"])
    assert code == 1
    rep = json.loads(out)
    assert rep["found"] is False and rep["point"] is None


def test_verify_example_success_and_csv(tmp_path, capsys):
    params = write(tmp_path, "params.json",
                   {"A": 10.0, "B": 10.0, "eps1": 0.1, "eps2": 0.1,
                    "eps3": 0.001, "C": 100.0})
    csv = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, ["verify-example", "--params", params,
                                "--grid", "360", "--csv", str(csv)])
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "SUCCESS"
    assert rep["tolerances"]["relTol"] == 1e-6
    assert csv.read_text().startswith("angle,ricClosed,ricPipeline\n")


def test_verify_example_failure_exit(tmp_path, capsys):
    params = write(tmp_path, "params.json",
                   {"A": 10.0, "B": 10.0, "eps1": 0.1, "eps2": 0.1,
                    "eps3": -0.001, "C": 100.0})
    code, out, _ = run(capsys, ["verify-example", "--params", params,
                                "--grid", "360"])
    assert code == 1
    assert json.loads(out)["verdict"] == "FAILURE"


def test_verify_example_needs_a_source(tmp_path, capsys):
    code, _, err = run(capsys, ["verify-example"])
    assert code == 2
    assert err.startswith("config error:")


def test_find_params(capsys):
    code, out, _ = run(capsys, ["find-params", "--budget", "7",
                                "--grid", "360"])
    assert code == 0
    rep = json.loads(out)
    assert rep["params"]["eps3"] == 0.001


def test_audit_hyper(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", PARABOLOID)
    code, out, _ = run(capsys, ["audit", "hyper", "--config", cfg,
                                "--grid", "72"])
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "CONSISTENT"
    assert rep["minRic"] == pytest.approx(1.0, rel=1e-12)


def test_audit_codim2(tmp_path, capsys):
    germ = {"n": 2, "p": 2,
            "d2": [[[2.0, 0.0], [0.0, 2.0]], [[0.0, 1.0], [1.0, 0.0]]],
            "d3": np.zeros((2, 2, 2, 2)).tolist()}
    cfg = write(tmp_path, "c.json",
                {"norm": {"kind": "euclidean", "dim": 4}, "germ": germ})
    code, out, _ = run(capsys, ["audit", "codim2", "--config", cfg,
                                "--grid", "72"])
    rep = json.loads(out)
    assert rep["verdict"] in ("CONSISTENT", "VACUOUS")
    assert code == 0


def test_audit_ruled_with_direction_and_tol(tmp_path, capsys):
    cylinder = {"norm": {"kind": "euclidean", "dim": 3},
                "germ": {"n": 2, "p": 1,
                         "d2": [[[0.0, 0.0], [0.0, 2.0]]],
                         "d3": np.zeros((1, 2, 2, 2)).tolist()}}
    cfg = write(tmp_path, "c.json", cylinder)
    code, out, _ = run(capsys, ["audit", "ruled", "--config", cfg,
                                "--direction", "1,0", "--grid", "72",
                                "--tol", "1e-7"])
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "CONSISTENT"
    assert rep["tolerances"]["ricNonnegTol"] == 1e-7


def test_config_error_unknown_kind(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"kind": "bogus", "dim": 3})
    code, _, err = run(capsys, ["check-norm", "--config", cfg])
    assert code == 2
    assert err.startswith("config error: /kind: unknown norm kind")


def test_config_error_pointer_paths(tmp_path, capsys):
    bad = {"norm": {"kind": "randers", "a": "oops", "b": [0, 0, 0]},
           "germ": PARABOLOID["germ"]}
    cfg = write(tmp_path, "c.json", bad)
    code, _, err = run(capsys, ["curvature", "--config", cfg,
                                "--direction", "1,0"])
    assert code == 2
    assert "/norm" in err

    cfg2 = write(tmp_path, "c2.json", {"norm": PARABOLOID["norm"]})
    code, _, err = run(capsys, ["curvature", "--config", cfg2,
                                "--direction", "1,0"])
    assert code == 2
    assert "/germ" in err and "missing" in err


def test_config_error_expression_syntax(tmp_path, capsys):
    cfg = write(tmp_path, "c.json",
                {"kind": "expression", "dim": 2, "text": "y1 ^^ 2"})
    code, _, err = run(capsys, ["check-norm", "--config", cfg])
    assert code == 2
    assert "/text" in err


def test_config_error_unreadable_and_malformed(tmp_path, capsys):
    code, _, err = run(capsys, ["check-norm", "--config",
                                str(tmp_path / "absent.json")])
    assert code == 2 and "cannot read" in err

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _, err = run(capsys, ["check-norm", "--config", str(broken)])
    assert code == 2 and "not valid JSON" in err


def test_direction_arity_error(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", PARABOLOID)
    code, _, err = run(capsys, ["curvature", "--config", cfg,
                                "--direction", "1,0,0"])
    assert code == 2
    assert "--direction" in err


def test_usage_errors_exit_two(capsys):
    assert cli.main([]) == 2
    capsys.readouterr()
    assert cli.main(["no-such-command"]) == 2
    capsys.readouterr()
    assert cli.main(["curvature"]) == 2  # missing required flags
    capsys.readouterr()
    assert cli.main(["pencil"]) == 2  # missing sub-subcommand
    capsys.readouterr()


def test_runtime_error_exits_one(tmp_path, capsys):
    # indefinite norm: the pipeline rejects the fundamental tensor
    bad = {"norm": {"kind": "expression", "dim": 3,
                    "text": "(y1^2 - y2^2 + 4*y3^2) / 2"},
           "germ": PARABOLOID["germ"]}
    cfg = write(tmp_path, "c.json", bad)
    code, _, err = run(capsys, ["curvature", "--config", cfg,
                                "--direction", "1,0"])
    assert code == 1
    assert err.startswith("error:")
