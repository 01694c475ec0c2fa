"""End-to-end tests of the command-line interface via main(argv)."""

from __future__ import annotations

import json

import numpy as np
import pytest

from pinvkit.cli import main
from pinvkit.core import gen_random_matrix, pinv
from pinvkit.graphdist import tree_build, wheel_pinv
from pinvkit.matrix import (
    dumps_generator_json,
    dumps_matrix_json,
    loads_matrix_csv,
    loads_matrix_json,
    loads_tree_csv,
)


def write_matrix(path, a):
    path.write_text(dumps_matrix_json(np.asarray(a, dtype=np.complex128)))
    return str(path)


def read_matrix(path):
    return loads_matrix_json(path.read_text())


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


# --------------------------------------------------------------------------
# pinv


def test_pinv_svd_diag(tmp_path, capsys):
    a = write_matrix(tmp_path / "a.json", np.diag([2.0, 0.0]))
    out = tmp_path / "x.json"
    code, report = run(capsys, ["pinv", "--input", a, "--output", str(out)])
    assert code == 0
    assert report["passed"] is True
    assert report["rank"] == 1
    assert report["max_penrose_residual"] <= report["residual_bound"]
    np.testing.assert_allclose(read_matrix(out), np.diag([0.5, 0.0]), atol=1e-15)


@pytest.mark.parametrize("method", ["normal", "rank-completion"])
def test_pinv_methods_match_svd(tmp_path, capsys, method):
    a = gen_random_matrix(9, 6, 6, rank=4)
    path = write_matrix(tmp_path / "a.json", a)
    out = tmp_path / "x.json"
    code, report = run(capsys, ["pinv", "--input", path, "--method", method, "--output", str(out)])
    assert code == 0, report
    np.testing.assert_allclose(read_matrix(out), pinv(a), atol=1e-9)


def test_pinv_pair_method(tmp_path, capsys):
    a = write_matrix(tmp_path / "a.json", np.diag([1.0, 0.0]))
    b = write_matrix(tmp_path / "b.json", np.diag([0.0, 2.0]))
    out = tmp_path / "x.json"
    code, report = run(
        capsys, ["pinv", "--input", a, "--aux", b, "--method", "pair", "--output", str(out)]
    )
    assert code == 0
    assert report["method"] == "pair"
    np.testing.assert_allclose(read_matrix(out), np.diag([1.0, 0.0]), atol=1e-12)


def test_pinv_reports_digests_and_writes_deterministically(tmp_path, capsys):
    a = write_matrix(tmp_path / "a.json", gen_random_matrix(3, 5, 4))
    out = tmp_path / "x.json"
    code, first = run(capsys, ["pinv", "--input", a, "--output", str(out)])
    bytes_first = out.read_bytes()
    code, second = run(capsys, ["pinv", "--input", a, "--output", str(out)])
    assert code == 0
    assert bytes_first == out.read_bytes()
    assert first["input_digest"] == second["input_digest"]
    assert first["output_digest"] == second["output_digest"]


def test_pinv_tight_tolerance_fails_with_exit_2(tmp_path, capsys):
    a = write_matrix(tmp_path / "a.json", gen_random_matrix(4, 5, 5))
    code, report = run(capsys, ["pinv", "--input", a, "--tol-residual", "1e-30"])
    assert code == 2
    assert report["passed"] is False


# --------------------------------------------------------------------------
# circ


def test_circ_zero_sum_frozen(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, report = run(
        capsys,
        ["circ", "--gen", "1,-1,0", "--method", "zero-sum", "--alpha", "1",
         "--output", str(out)],
    )
    assert code == 0
    got = json.loads(out.read_text())
    values = [complex(re, im) for re, im in got["gen"]]
    np.testing.assert_allclose(values, [1 / 3, 0.0, -1 / 3], atol=1e-12)
    assert report["extras"]["support"] == [1, 2]


def test_circ_two_term_frozen(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, _ = run(
        capsys, ["circ", "--gen", "1,1,0,0", "--method", "two-term", "--output", str(out)]
    )
    assert code == 0
    got = json.loads(out.read_text())
    values = [complex(re, im) for re, im in got["gen"]]
    np.testing.assert_allclose(values, np.array([6, -2, -2, 6]) / 16.0, atol=1e-12)


def test_circ_two_term_from_flags(tmp_path, capsys):
    code, report = run(
        capsys,
        ["circ", "--method", "two-term", "--alpha", "1", "--beta", "1", "--n", "4"],
    )
    assert code == 0
    assert report["rank"] == 3


def test_circ_spectral_identity(capsys):
    code, report = run(capsys, ["circ", "--gen", "1,0,0", "--method", "spectral"])
    assert code == 0
    assert report["rank"] == 3
    assert report["extras"]["support"] == [0, 1, 2]


def test_circ_csv_output_materializes(tmp_path, capsys):
    out = tmp_path / "x.csv"
    code, _ = run(capsys, ["circ", "--gen", "2,0,1", "--output", str(out)])
    assert code == 0
    x = loads_matrix_csv(out.read_text())
    want = np.array([[4, 1, -2], [-2, 4, 1], [1, -2, 4]]) / 9.0
    np.testing.assert_allclose(x.real, want, atol=1e-12)


def test_circ_generator_json_input(tmp_path, capsys):
    src = tmp_path / "gen.json"
    src.write_text(dumps_generator_json(np.array([1.0, -1.0, 0.0])))
    code, report = run(capsys, ["circ", "--input", str(src), "--method", "spectral"])
    assert code == 0
    assert report["rank"] == 2


def test_circ_rejects_gen_and_input_together(tmp_path, capsys):
    src = tmp_path / "gen.json"
    src.write_text(dumps_generator_json(np.array([1.0, 0.0])))
    assert main(["circ", "--gen", "1,0", "--input", str(src)]) == 3


def test_circ_two_term_rejects_non_adjacent(capsys):
    assert main(["circ", "--gen", "1,0,1,0", "--method", "two-term"]) == 3


def test_circ_block_needs_all_params(capsys):
    assert main(["circ", "--method", "block", "--alpha", "1", "--beta", "1"]) == 3


def test_circ_block_runs(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, report = run(
        capsys,
        ["circ", "--method", "block", "--alpha", "1.5", "--beta", "0.5",
         "--k", "2", "--q", "2", "--output", str(out)],
    )
    assert code == 0
    assert report["rows"] == 6


# --------------------------------------------------------------------------
# tree and wheel


def test_tree_path3(tmp_path, capsys):
    src = tmp_path / "t.csv"
    src.write_text("1,2,1\n2,3,-1\n")
    out = tmp_path / "d.json"
    code, report = run(capsys, ["tree", "--input", str(src), "--output", str(out)])
    assert code == 0
    d = tree_build([(1, 2, 1.0), (2, 3, -1.0)]).D
    np.testing.assert_allclose(read_matrix(out).real, d / 2.0, atol=1e-12)
    np.testing.assert_allclose(report["extras"]["u"], [0.25, 0.0, -0.25], atol=1e-12)
    assert report["extras"]["dl_identity_residual"] < 1e-12


def test_tree_explicit_alpha(tmp_path, capsys):
    src = tmp_path / "t.csv"
    src.write_text("1,2,1\n2,3,-1\n")
    code, report = run(capsys, ["tree", "--input", str(src), "--alpha", "5"])
    assert code == 0
    assert report["extras"]["alpha"] == 5.0


def test_tree_nonzero_sum_exits_3(tmp_path, capsys):
    src = tmp_path / "t.csv"
    src.write_text("1,2,1\n2,3,2\n")
    assert main(["tree", "--input", str(src)]) == 3


def test_tree_bad_edge_file_exits_1(tmp_path):
    src = tmp_path / "t.csv"
    src.write_text("1,2\n")
    assert main(["tree", "--input", str(src)]) == 1


def test_wheel_5_matches_module(tmp_path, capsys):
    out = tmp_path / "w.json"
    code, report = run(capsys, ["wheel", "--n", "5", "--output", str(out)])
    assert code == 0
    _, dpinv = wheel_pinv(5)
    np.testing.assert_allclose(read_matrix(out).real, dpinv, atol=1e-13)
    assert report["extras"]["z24"] == [-72, -24, 120, -24]
    assert all(report["extras"]["z_identities"].values())
    assert report["extras"]["eigvector_residual"] <= 1e-10


def test_wheel_even_n_exits_3(capsys):
    assert main(["wheel", "--n", "4"]) == 3


# --------------------------------------------------------------------------
# verify


def test_verify_identity_passes(tmp_path, capsys):
    a = write_matrix(tmp_path / "a.json", np.eye(3))
    code, report = run(capsys, ["verify", "--input", a, "--aux", a])
    assert code == 0
    residuals = report["extras"]["residuals"]
    assert len(residuals) == 10
    assert max(residuals.values()) == 0.0


def test_verify_wrong_inverse_exits_2(tmp_path, capsys):
    a = write_matrix(tmp_path / "a.json", np.diag([2.0, 0.0]))
    x = write_matrix(tmp_path / "x.json", np.ones((2, 2)))
    code, report = run(capsys, ["verify", "--input", a, "--aux", x])
    assert code == 2
    assert report["passed"] is False


def test_verify_shape_mismatch_exits_3(tmp_path):
    a = write_matrix(tmp_path / "a.json", np.eye(3))
    x = write_matrix(tmp_path / "x.json", np.eye(2))
    assert main(["verify", "--input", a, "--aux", x]) == 3


def test_verify_pinv_of_every_method_passes(tmp_path, capsys):
    a = gen_random_matrix(17, 6, 4, rank=3)
    src = write_matrix(tmp_path / "a.json", a)
    out = tmp_path / "x.json"
    for method in ("svd", "normal", "rank-completion"):
        code, _ = run(capsys, ["pinv", "--input", src, "--method", method,
                               "--output", str(out)])
        assert code == 0
        code, _ = run(capsys, ["verify", "--input", src, "--aux", str(out)])
        assert code == 0


# --------------------------------------------------------------------------
# gen


def test_gen_sum_family_files_and_certificate(tmp_path, capsys):
    prefix = tmp_path / "fam"
    argv = ["gen", "sum-family", "--k", "3", "--rows", "6", "--cols", "5",
            "--seed", "42", "--output", str(prefix)]
    code, report = run(capsys, argv)
    assert code == 0
    assert report["extras"]["certificate_holds"] is True
    paths = [entry["path"] for entry in report["extras"]["files"]]
    assert len(paths) == 3
    first_bytes = [(tmp_path / f"fam_{i}.json").read_bytes() for i in (1, 2, 3)]
    code, _ = run(capsys, argv)
    assert code == 0
    assert first_bytes == [(tmp_path / f"fam_{i}.json").read_bytes() for i in (1, 2, 3)]


def test_gen_zero_sum_tree_roundtrip(tmp_path, capsys):
    prefix = tmp_path / "tree"
    code, report = run(capsys, ["gen", "zero-sum-tree", "--n", "9", "--seed", "3",
                                "--output", str(prefix)])
    assert code == 0
    edges = loads_tree_csv((tmp_path / "tree.csv").read_text())
    tree = tree_build(edges)
    assert tree.n == 9
    assert abs(tree.weight_sum) < 1e-9
    code, _ = run(capsys, ["tree", "--input", str(tmp_path / "tree.csv")])
    assert code == 0


def test_gen_rank_additive_pair(tmp_path, capsys):
    prefix = tmp_path / "pair"
    code, report = run(capsys, ["gen", "rank-additive-pair", "--n", "6", "--seed", "7",
                                "--output", str(prefix)])
    assert code == 0
    a = read_matrix(tmp_path / "pair_a.json")
    b = read_matrix(tmp_path / "pair_b.json")
    assert a.shape == b.shape == (6, 6)


def test_gen_random_matrix_with_rank(tmp_path, capsys):
    prefix = tmp_path / "m"
    code, _ = run(capsys, ["gen", "random-matrix", "--rows", "5", "--cols", "4",
                           "--k", "2", "--seed", "1", "--output", str(prefix)])
    assert code == 0
    a = read_matrix(tmp_path / "m.json")
    assert np.linalg.matrix_rank(a) == 2


# --------------------------------------------------------------------------
# plumbing: exit codes, tolerance resolution, pretty output


@pytest.mark.parametrize(
    "argv",
    [
        ["pinv", "--input", "no_such_file.json"],
        ["pinv", "--nonsense-flag"],
        ["no-such-command"],
        [],
        ["circ", "--gen", "1", "--method", "spectral"],
    ],
)
def test_parse_failures_exit_1(argv):
    assert main(argv) == 1


def test_malformed_matrix_json_exits_1(tmp_path):
    path = tmp_path / "a.json"
    path.write_text('{"rows": 2, "cols": 2, "data": [[0, 0]]}')
    assert main(["pinv", "--input", str(path)]) == 1


def test_env_var_sets_residual_bound(tmp_path, capsys, monkeypatch):
    a = write_matrix(tmp_path / "a.json", np.diag([2.0, 0.0]))
    x = write_matrix(tmp_path / "x.json", np.diag([0.5 + 1e-5, 0.0]))
    assert main(["verify", "--input", a, "--aux", x]) == 2
    capsys.readouterr()
    monkeypatch.setenv("PINVKIT_TOL_RESIDUAL", "0.1")
    code, report = run(capsys, ["verify", "--input", a, "--aux", x])
    assert code == 0
    assert report["residual_bound"] == pytest.approx(0.2)
    # explicit flag wins over the environment
    assert main(["verify", "--input", a, "--aux", x, "--tol-residual", "1e-9"]) == 2


def test_env_var_invalid_exits_1(tmp_path, monkeypatch):
    a = write_matrix(tmp_path / "a.json", np.eye(2))
    monkeypatch.setenv("PINVKIT_TOL_RESIDUAL", "not-a-float")
    assert main(["verify", "--input", a, "--aux", a]) == 1


def test_negative_tolerance_exits_3(tmp_path):
    a = write_matrix(tmp_path / "a.json", np.eye(2))
    assert main(["pinv", "--input", a, "--tol-residual", "-1"]) == 3


def test_pretty_output_is_table(tmp_path, capsys):
    a = write_matrix(tmp_path / "a.json", np.eye(2))
    code = main(["pinv", "--input", a, "--pretty"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("command")
    assert "passed" in out
    assert not out.lstrip().startswith("{")
