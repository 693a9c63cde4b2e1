import json

from mcmrep.cli import main

NODAL = "problems/nodal.toml"
REGULAR = "problems/regular.toml"


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_tangent_command(capsys):
    code, rep = run_json(
        capsys, ["tangent", NODAL, "--module", "MXplusMY", "--crosscheck"]
    )
    assert code == 0
    payload = rep["payload"]
    assert (
        payload["dim_end_A_0"],
        payload["dim_end_R_0"],
        payload["dim_tangent"],
        payload["dim_ext1_0_via_sequence"],
    ) == (2, 4, 2, 0)
    assert payload["rigid_degree_zero"] is True
    assert payload["dim_ext1_0_via_resolution"] == 0
    assert rep["field"] == 32003 and rep["truncation"] == 32
    assert rep["version"]


def test_ext_command_window(capsys):
    code, rep = run_json(
        capsys,
        ["ext", NODAL, "--source", "MX", "--target", "MY", "--window", "-5:5"],
    )
    assert code == 0
    assert rep["payload"]["dims"] == [0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0]


def test_equations_command_empty_for_regular(capsys):
    code, rep = run_json(capsys, ["equations", REGULAR, "--framing", "rank1"])
    assert code == 0
    assert rep["payload"]["total_dim"] == 0
    assert rep["payload"]["equations"] == []


def test_equations_command_nodal(capsys):
    code, rep = run_json(capsys, ["equations", NODAL, "--framing", "rank2"])
    assert code == 0
    assert rep["payload"]["total_dim"] == 4
    assert len(rep["payload"]["equations"]) == 4


def test_stats_command(capsys):
    code, rep = run_json(capsys, ["stats", NODAL, "--module", "MX"])
    assert code == 0
    st = rep["payload"]
    assert st["g_min"] == 0 and st["g_max"] == 0 and st["rank"] == 1
    assert st["dual"]["g_max"] == 0


def test_split_command(capsys, tmp_path):
    # build a gapped module on the fly
    from mcmrep.algebra import direct_sum, shift_module
    from mcmrep.problem import dump_problem_toml, parse_problem

    prob = parse_problem(NODAL)
    MX, MY = prob.module("MX"), prob.module("MY")
    gapped = direct_sum(MX, shift_module(MY, -3))
    path = tmp_path / "gapped.toml"
    path.write_text(
        dump_problem_toml(
            prob.p, prob.algebra, {"g": gapped.V}, {"gapped": gapped}
        )
    )
    code, rep = run_json(capsys, ["split", str(path), "--module", "gapped"])
    assert code == 0
    payload = rep["payload"]
    assert payload["gap_found"] and payload["A_stable"]
    assert payload["ext_obstruction_dim"] == 0
    assert payload["splitting_found"] and payload["split_verified"]


def test_classify_command(capsys):
    code, rep = run_json(
        capsys, ["classify", NODAL, "--framing", "rank2", "--samples", "24", "--seed", "7"]
    )
    assert code == 0
    classes = rep["payload"]["classes"]
    assert len(classes) == 3
    assert rep["seed"] == 7
    assert all("action" in c and "stats" in c for c in classes)


def test_classify_deterministic_bytes(capsys):
    _, rep1 = run_json(
        capsys, ["classify", NODAL, "--framing", "rank1", "--samples", "10", "--seed", "3"]
    )
    _, rep2 = run_json(
        capsys, ["classify", NODAL, "--framing", "rank1", "--samples", "10", "--seed", "3"]
    )
    assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2, sort_keys=True)


def test_bounds_command(capsys):
    code, rep = run_json(capsys, ["bounds", NODAL, "--max-rank", "2"])
    assert code == 0
    payload = rep["payload"]
    assert payload["alpha"] == 1
    assert payload["delta"] == {"1": 2, "2": 3}
    assert "beta_hat_estimate" in payload and "ESTIMATE" not in payload


def test_ade_emit_roundtrip(capsys, tmp_path):
    out = tmp_path / "a2.toml"
    code = main(["ade", "A", "2", "--emit", str(out)])
    assert code == 0
    capsys.readouterr()
    code2, rep = run_json(capsys, ["stats", str(out), "--module", "A2_phi1"])
    assert code2 == 0
    assert rep["payload"]["rank"] == 2


def test_out_file(capsys, tmp_path):
    out = tmp_path / "report.json"
    code = main(["tangent", NODAL, "--module", "MX", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["payload"]["rigid_degree_zero"] is True


def test_input_error_exit_code(capsys):
    assert main(["stats", NODAL, "--module", "missing"]) == 2
    assert main(["stats", "problems/no-such-file.toml", "--module", "x"]) == 2
    err = capsys.readouterr().err
    assert '"type": "input"' in err


def test_compute_error_exit_code(capsys, tmp_path):
    # a module framed beyond the truncation bound exhausts the syzygy scan
    from mcmrep.algebra import shift_module
    from mcmrep.problem import dump_problem_toml, parse_problem

    prob = parse_problem(NODAL)
    far = shift_module(prob.module("MX"), -(prob.algebra.D + 5))
    path = tmp_path / "far.toml"
    path.write_text(
        dump_problem_toml(prob.p, prob.algebra, {"far": far.V}, {"far": far})
    )
    code = main(["ext", str(path), "--source", "far", "--target", "far"])
    assert code == 1
    err = capsys.readouterr().err
    assert "WindowExhausted" in err
