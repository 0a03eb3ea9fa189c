import json

import numpy as np
import pytest

from mixedframes import cli, fixtures, frames


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def write_fixture(tmp_path, name):
    pair, spec = fixtures.fixture(name)
    path = tmp_path / f"{name}.json"
    path.write_text(frames.document_to_json(frames.pair_to_document(pair, spec.alpha)))
    return path


def test_gen_fixture_round_trip(capsys):
    """gen output must parse and re-serialize byte-identically."""
    for name in fixtures.FIXTURE_NAMES:
        code, out = run(capsys, "gen", "fixture", name)
        assert code == 0
        doc = frames.document_from_json(out)
        assert frames.document_to_json(doc) == out


def test_gen_random_deterministic(capsys):
    args = ("gen", "random", "--field", "R", "--d", "2", "--N", "4", "--seed", "1")
    code1, out1 = run(capsys, *args)
    code2, out2 = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_gen_random_with_alpha_retracts(capsys):
    code, out = run(
        capsys, "gen", "random", "--field", "R", "--d", "2", "--N", "3",
        "--seed", "1", "--alpha", "1,1,1",
    )
    assert code == 0
    pair, spec = frames.pair_from_document(frames.document_from_json(out))
    assert spec is not None
    assert frames.constraint_residual(pair, spec).max() <= 1e-12


def test_gen_unknown_fixture_exits_2(capsys):
    assert run(capsys, "gen", "fixture", "FX-NOPE")[0] == 2


def test_potential_fixture(capsys, tmp_path):
    path = write_fixture(tmp_path, "FX-D1")
    code, out = run(capsys, "potential", str(path))
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "potential"
    assert report["outputs"]["fp_direct"] == [1.0, 0.0]
    assert report["outputs"]["fp_trace"] == [1.0, 0.0]
    assert report["tolerances"]["tol"] == 1e-9
    assert len(report["inputs_digest"]) == 64


def test_potential_reports_bf_when_self_paired(capsys, tmp_path):
    path = write_fixture(tmp_path, "FX-MB")
    _, out = run(capsys, "potential", str(path))
    assert json.loads(out)["outputs"]["bf_potential"] == pytest.approx(4.5)


def test_potential_malformed_input(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"field": "R", "d": 2,')  # truncated
    assert run(capsys, "potential", str(path))[0] == 2
    assert run(capsys, "potential", str(tmp_path / "missing.json"))[0] == 2


def test_reports_reproducible(capsys, tmp_path):
    path = write_fixture(tmp_path, "FX-MIX")
    _, out1 = run(capsys, "check", str(path))
    _, out2 = run(capsys, "check", str(path))
    assert out1 == out2


def test_check_critical_fixture(capsys, tmp_path):
    path = write_fixture(tmp_path, "FX-MB")
    code, out = run(capsys, "check", str(path))
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "critical"
    for re_im in report["outputs"]["critical"]["c"]:
        assert re_im == pytest.approx([0.5, 0.0], abs=1e-12)
    assert report["outputs"]["scaled_identity"]["is_scaled_identity"] is True
    assert report["outputs"]["scaled_identity"]["A"] == [1.5, 0.0]
    assert report["outputs"]["bound"]["bound_status"] == "EQUALITY"


def test_check_non_critical_exits_1(capsys, tmp_path):
    pair, spec = frames.retract_to_constraint(
        frames.random_pair(frames.Field.REAL, 2, 3, 6),
        frames.ConstraintSpec(np.ones(3)),
    ), None
    path = tmp_path / "rand.json"
    path.write_text(frames.document_to_json(frames.pair_to_document(pair, np.ones(3))))
    code, out = run(capsys, "check", str(path))
    assert code == 1
    assert json.loads(out)["status"] == "not_critical"


def test_check_constraint_violation_exits_2(capsys, tmp_path):
    path = write_fixture(tmp_path, "FX-MB")
    assert run(capsys, "check", str(path), "--alpha", "5,5,5")[0] == 2


def test_check_missing_alpha_exits_2(capsys, tmp_path):
    pair = frames.random_pair(frames.Field.REAL, 2, 2, 0)
    path = tmp_path / "noalpha.json"
    path.write_text(frames.document_to_json(frames.pair_to_document(pair)))
    assert run(capsys, "check", str(path))[0] == 2


def test_decompose_mix(capsys, tmp_path):
    path = write_fixture(tmp_path, "FX-MIX")
    code, out = run(capsys, "decompose", str(path))
    assert code == 0
    dec = json.loads(out)["outputs"]["decomposition"]
    assert dec["I"] == [2, 3, 4]  # 1-based
    assert dec["A"] == [1.5, 0.0]
    cls = json.loads(out)["outputs"]["classification"]
    assert cls["index_sets"] == [[1], [2, 3, 4]]


def test_decompose_single_group(capsys, tmp_path):
    path = write_fixture(tmp_path, "FX-ONB2")
    code, out = run(capsys, "decompose", str(path))
    assert code == 0
    assert json.loads(out)["outputs"]["decomposition"]["I_complement"] == []


def test_decompose_non_critical_exits_2_with_report(capsys, tmp_path):
    pair = frames.retract_to_constraint(
        frames.random_pair(frames.Field.REAL, 2, 4, 11),
        frames.ConstraintSpec(np.ones(4)),
    )
    path = tmp_path / "nc.json"
    path.write_text(frames.document_to_json(frames.pair_to_document(pair, np.ones(4))))
    code, out = run(capsys, "decompose", str(path))
    assert code == 2
    payload = json.loads(out)
    assert payload["critical_report"]["is_critical"] is False


def test_corollary_dual_fixture(capsys, tmp_path):
    path = write_fixture(tmp_path, "FX-ONB2")
    code, out = run(capsys, "corollary", str(path))
    assert code == 0
    assert json.loads(out)["outputs"]["verdict"] == "CONDITIONS_MET"


def test_corollary_imag_fixture_exits_1(capsys, tmp_path):
    path = write_fixture(tmp_path, "FX-IMAG")
    code, out = run(capsys, "corollary", str(path))
    assert code == 1
    assert json.loads(out)["outputs"]["spectrum_all_real"] is False


def test_corollary_alpha_only(capsys):
    code, out = run(capsys, "corollary", "--alpha-only", "1,1", "--d", "2", "--N", "3")
    assert code == 0
    outputs = json.loads(out)["outputs"]
    assert outputs["alpha_sum_equals_d"] is True
    assert outputs["dual_pair_exists"] is True

    code, out = run(capsys, "corollary", "--alpha-only", "1,0.5", "--d", "2", "--N", "3")
    assert code == 1
    assert json.loads(out)["outputs"]["alpha_sum_equals_d"] is False


def test_corollary_alpha_only_needs_dims(capsys):
    assert run(capsys, "corollary", "--alpha-only", "1,1")[0] == 2
    assert run(capsys, "corollary")[0] == 2


def test_optimize_trivial_converges(capsys, tmp_path):
    out_path = tmp_path / "final.json"
    code, out = run(
        capsys, "optimize", "--alpha", "1", "--field", "R", "--d", "1",
        "--seed", "0", "--output", str(out_path),
    )
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "CONVERGED"
    pair, spec = frames.pair_from_document(
        frames.document_from_json(out_path.read_text())
    )
    assert frames.constraint_residual(pair, spec).max() <= 1e-12


def test_optimize_max_iters_exits_1(capsys):
    code, out = run(
        capsys, "optimize", "--alpha", "1,1,1", "--field", "R", "--d", "2",
        "--seed", "7", "--max-iters", "2", "--merit-tol", "1e-30",
    )
    assert code == 1
    assert json.loads(out)["status"] == "MAX_ITERS"


def test_optimize_zero_alpha_exits_2(capsys):
    assert run(capsys, "optimize", "--alpha", "1,0", "--field", "R", "--d", "2")[0] == 2


def test_optimize_bad_flag_exits_2(capsys):
    assert run(capsys, "optimize", "--alpha", "1", "--field", "R", "--d", "1",
               "--mode", "sideways")[0] == 2


def test_real_alpha_guard(capsys):
    code, _ = run(
        capsys, "gen", "random", "--field", "R", "--d", "1", "--N", "1",
        "--seed", "0", "--alpha", "1+1j",
    )
    assert code == 2
