import json
import os

import numpy as np
import pytest

from liedouble import cli
from liedouble.algebra import get_algebra

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "configs")


def cfg_path(name):
    return os.path.join(CONFIGS, name)


def run(experiment, config, tmp_path, extra=()):
    return cli.main([experiment, "--config", str(config),
                     "--output", str(tmp_path), "--quiet", *extra])


def write_cfg(tmp_path, data, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


BASE_CFG = {
    "schema": 1,
    "algebra": "so3-cotangent",
    "cocycle": {"kind": "zero"},
    "seed": 0,
}


class TestExperiments:
    @pytest.mark.parametrize("experiment,config", [
        ("check", "so3_check.json"),
        ("brackets", "sl2_brackets.json"),
        ("flow", "sl2_flow.json"),
        ("collective", "sl2_collective.json"),
        ("legendre", "sl2_legendre.json"),
        ("loop", "loop_flow.json"),
        ("converge", "loop_converge.json"),
    ])
    def test_shipped_configs_pass(self, experiment, config, tmp_path):
        assert run(experiment, cfg_path(config), tmp_path) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["passed"]
        assert report["experiment"] == experiment
        for check in report["checks"]:
            assert {"name", "residual", "tolerance", "passed"} <= set(check)
        names = [c["name"] for c in report["checks"]]
        assert len(names) == len(set(names))

    def test_sigma_config_passes(self, tmp_path):
        # kept separate: the 100-point operator-identity sweep is slower
        assert run("sigma", cfg_path("sl2_sigma.json"), tmp_path) == 0

    def test_check_reports_many_checks(self, tmp_path):
        cfg = write_cfg(tmp_path, {
            "schema": 1,
            "algebra": "sl2c-iwasawa",
            "cocycle": {"kind": "coboundary",
                        "mu0": [0.0, 0.0, 0.0, 0.9, 0.0, 0.0]},
            "fiber": {"g_minus": [0, 0, 0, 0.3, 0, 0],
                      "eta_minus": [0, 0, 0, 0.7, 0, 0]},
            "seed": 1,
        })
        assert run("check", cfg, tmp_path) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert len(report["checks"]) >= 20

    def test_zero_hamiltonian_flow_is_constant(self, tmp_path):
        cfg = write_cfg(tmp_path, dict(
            BASE_CFG,
            fiber={"g_minus": [0, 0, 0, 0.3, 0, 0],
                   "eta_minus": [0, 0, 0, 0.4, 0, 0]},
            integrator={"dt": 0.01, "steps": 20},
            options={"hamiltonian": "zero"}))
        assert run("flow", cfg, tmp_path) == 0
        rows = (tmp_path / "trajectory.csv").read_text().splitlines()
        n_state = 32 + 6  # matrix re/im entries plus eta coordinates
        first = rows[1].split(",")[1:1 + n_state]
        last = rows[-1].split(",")[1:1 + n_state]
        assert first == last


class TestConfigErrors:
    def test_invalid_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run("check", bad, tmp_path) == 2

    def test_unknown_top_level_key(self, tmp_path):
        cfg = write_cfg(tmp_path, dict(BASE_CFG, typo_key=1))
        assert run("check", cfg, tmp_path) == 2

    def test_unknown_section_key(self, tmp_path):
        cfg = write_cfg(tmp_path, dict(BASE_CFG,
                                       cocycle={"kind": "zero", "oops": 1}))
        assert run("check", cfg, tmp_path) == 2

    def test_wrong_schema_version(self, tmp_path):
        cfg = write_cfg(tmp_path, dict(BASE_CFG, schema=99))
        assert run("check", cfg, tmp_path) == 2

    def test_experiment_mismatch(self, tmp_path):
        cfg = write_cfg(tmp_path, dict(BASE_CFG, experiment="flow"))
        assert run("check", cfg, tmp_path) == 2

    def test_unresolvable_algebra(self, tmp_path):
        cfg = write_cfg(tmp_path, dict(BASE_CFG, algebra="no-such-algebra"))
        assert run("check", cfg, tmp_path) == 2

    def test_missing_fiber_for_brackets(self, tmp_path):
        cfg = write_cfg(tmp_path, BASE_CFG)
        assert run("brackets", cfg, tmp_path) == 2

    def test_bad_mu0_length(self, tmp_path):
        cfg = write_cfg(tmp_path, dict(
            BASE_CFG, cocycle={"kind": "coboundary", "mu0": [1.0, 2.0]}))
        assert run("check", cfg, tmp_path) == 2


class TestFailureModes:
    def test_corrupted_structure_constants_fail_jacobi(self, tmp_path):
        a = get_algebra("so3-cotangent")
        entries = [[i, j, k, float(v)]
                   for (i, j, k), v in np.ndenumerate(a.structure_constants)
                   if v != 0.0]
        decl = {
            "name": "corrupted",
            "dim": a.dim,
            "labels": list(a.labels),
            "structure_constants": entries + [[0, 1, 2, 1.3], [1, 0, 2, -1.3]],
            "pairing": a.pairing.tolist(),
            "plus_indices": [int(i) for i in a.plus_indices],
            "minus_indices": [int(i) for i in a.minus_indices],
        }
        cfg = write_cfg(tmp_path, {"schema": 1, "algebra": decl, "seed": 0})
        assert run("check", cfg, tmp_path) == 1
        report = json.loads((tmp_path / "report.json").read_text())
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        assert "algebra/jacobi" in failed

    def test_cfl_violation_is_runtime_failure(self, tmp_path):
        cfg = json.loads(open(cfg_path("loop_flow.json")).read())
        cfg["integrator"]["dt"] = 10.0
        assert run("loop", write_cfg(tmp_path, cfg), tmp_path) == 3


class TestDeterminism:
    def test_same_seed_byte_identical_csv(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert run("flow", cfg_path("sl2_flow.json"), out1) == 0
        assert run("flow", cfg_path("sl2_flow.json"), out2) == 0
        assert (out1 / "trajectory.csv").read_bytes() \
            == (out2 / "trajectory.csv").read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert run("flow", cfg_path("sl2_flow.json"), out1) == 0
        assert run("flow", cfg_path("sl2_flow.json"), out2,
                   ("--seed", "99")) == 0
        assert (out1 / "trajectory.csv").read_bytes() \
            != (out2 / "trajectory.csv").read_bytes()
        report = json.loads((out2 / "report.json").read_text())
        assert report["seed"] == 99
