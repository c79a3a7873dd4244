import json
import subprocess
import sys

import numpy as np
import pytest

from sphereot.cli import main
from sphereot.constants import intrinsic_constants


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def write_cloud(path, seed, shift=0.0, count=40):
    rng = np.random.Generator(np.random.Philox(key=seed))
    pts = rng.normal(size=(count, 3)) + shift
    lines = ["x0,x1,x2"]
    lines += [",".join(repr(float(v)) for v in row) for row in pts]
    path.write_text("\n".join(lines) + "\n")


class TestConstantsCommand:
    def test_json_payload(self, capsys, tmp_path):
        out_path = tmp_path / "c.json"
        code, out = run_cli(
            ["constants", "--n", "3", "--p", "2", "--out", str(out_path)],
            capsys)
        assert code == 0
        data = json.loads(out)
        assert data == json.loads(out_path.read_text())
        assert data["intrinsic"]["a_p"] == 1.0 / 16
        assert data["intrinsic"]["I_p"] == 3
        assert data["extrinsic"]["J_p"] == 4
        assert data["residuals"]["a_p_defining"] == 0.0
        assert data["residuals"]["b_p_defining"] < 1e-12
        consts = intrinsic_constants(3, 2.0)
        assert data["intrinsic"]["alpha_np"] == consts.alpha_np


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """solve -> partition -> verify artifacts shared by the pipeline tests."""
    root = tmp_path_factory.mktemp("pipeline")
    weights = root / "weights.json"
    code = main(["--seed", "3", "solve", "--n", "3", "--L", "8", "--p", "2",
                 "--cost", "intrinsic", "--quad", "40000", "--tol", "6e-3",
                 "--out", str(weights)])
    assert code == 0
    part = root / "part.json"
    code = main(["partition", "--weights", str(weights), "--out", str(part)])
    assert code == 0
    return root, weights, part


class TestPipeline:
    def test_solve_payload(self, pipeline):
        _, weights, _ = pipeline
        data = json.loads(weights.read_text())
        assert data["L"] == 8
        assert len(data["directions"]) == 8
        assert min(data["lambda"]) == 0.0
        assert data["report"]["max_mass_error"] <= 6e-3
        assert data["report"]["mk_distance"] == pytest.approx(
            data["report"]["transport_cost_p"] ** 0.5)

    def test_partition_masses(self, pipeline):
        _, _, part = pipeline
        data = json.loads(part.read_text())
        masses = np.array(data["cell_mass"])
        assert masses.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(masses, 1.0 / 8, atol=6e-3)

    def test_partition_points_csv(self, pipeline, tmp_path, capsys):
        _, weights, _ = pipeline
        csv_path = tmp_path / "pts.csv"
        code, _ = run_cli(["partition", "--weights", str(weights),
                           "--points-csv", str(csv_path)], capsys)
        assert code == 0
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "x0,x1,x2,cell"
        assert len(lines) == 40001

    def test_verify_passes(self, pipeline, tmp_path, capsys):
        _, _, part = pipeline
        out_path = tmp_path / "verify.json"
        code, out = run_cli(["verify", "--partition", str(part),
                             "--out", str(out_path)], capsys)
        assert code == 0
        data = json.loads(out)
        rep = data["bound_report"]
        assert rep["satisfied_normalized"]
        assert rep["max_diam_geodesic"] <= rep["bound_normalized"]
        assert data["constants"]["n"] == 3

    def test_sliced_with_certificate_and_dense(self, pipeline, tmp_path, capsys):
        _, _, part = pipeline
        mu1, mu2 = tmp_path / "mu1.csv", tmp_path / "mu2.csv"
        write_cloud(mu1, 1)
        write_cloud(mu2, 2, shift=0.5)
        code, out = run_cli(
            ["--seed", "9", "sliced", "--mu1", str(mu1), "--mu2", str(mu2),
             "--p", "2", "--q", "2", "--partition", str(part),
             "--dense", "2000", "--breakdown"], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["value"] > 0
        assert len(data["per_direction"]) == 8
        assert abs(data["value"] - data["dense_value"]) <= data["certificate"]

    def test_sliced_q_inf(self, pipeline, tmp_path, capsys):
        _, _, part = pipeline
        mu1, mu2 = tmp_path / "mu1.csv", tmp_path / "mu2.csv"
        write_cloud(mu1, 1)
        write_cloud(mu2, 2, shift=0.5)
        code, out = run_cli(
            ["sliced", "--mu1", str(mu1), "--mu2", str(mu2), "--p", "2",
             "--q", "inf", "--partition", str(part), "--breakdown"], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["q"] == "inf"
        assert data["value"] == pytest.approx(max(data["per_direction"]))


class TestDeterminism:
    def test_solve_rerun_byte_identical(self, tmp_path):
        outs = []
        for tag in ("a", "b"):
            path = tmp_path / f"{tag}.json"
            main(["--seed", "7", "solve", "--n", "2", "--L", "4", "--p", "2",
                  "--cost", "extrinsic", "--quad", "4000", "--tol", "2e-2",
                  "--out", str(path)])
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_scaling_thread_independent(self, tmp_path):
        outs = []
        for threads, tag in [("1", "t1"), ("3", "t3")]:
            out_dir = tmp_path / tag
            code = main(["--seed", "11", "--threads", threads, "--out-dir",
                         str(out_dir), "scaling", "--n", "3", "--p", "2",
                         "--grid", "4,8", "--trials", "3", "--quad", "2000",
                         "--tol", "2e-2"])
            assert code == 0
            outs.append(((out_dir / "scaling.csv").read_bytes(),
                         (out_dir / "scaling_summary.json").read_bytes()))
        assert outs[0] == outs[1]

    def test_subprocess_entry_point(self, tmp_path):
        # exercise the installed console script end to end
        result = subprocess.run(
            [sys.executable, "-m", "sphereot.cli", "constants",
             "--n", "2", "--p", "3"],
            capture_output=True, text=True)
        assert result.returncode == 0
        data = json.loads(result.stdout)
        assert data["intrinsic"]["n"] == 2


class TestReportOnly:
    def test_verify_report_only_flag(self, pipeline, capsys):
        # with a passing bound both modes exit 0; the flag must parse globally
        _, _, part = pipeline
        code, out = run_cli(["--report-only", "verify",
                             "--partition", str(part)], capsys)
        assert code == 0
        assert json.loads(out)["bound_report"]["satisfied_normalized"]
