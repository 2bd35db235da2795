"""Config runner and CLI: exit codes, artifacts, manifests, determinism."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from oucutoff import runner


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


GAUSS_PROFILE = {
    "kind": "Profile",
    "model": {"drift": [0.0], "gaussian": [[1.0]]},
    "q": [[1.0]],
    "x0": [1.0],
    "eps_list": [1e-4],
    "grids": {"c": {"lo": -4, "hi": 4, "count": 25}},
    "seed": 321,
    "out_dir": "gauss_profile",
}


def test_minimal_profile_run(tmp_path):
    cfg = write_config(tmp_path, GAUSS_PROFILE)
    code = runner.run(cfg, out_dir=str(tmp_path / "out"))
    assert code == 0
    csv_path = tmp_path / "out" / "gauss_profile" / "profile.csv"
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "eps,t_or_c,value,stderr,method,flags"
    # 25 measured points plus 25 limit-profile points
    assert len(lines) == 1 + 50
    manifest = json.loads((tmp_path / "out" / "gauss_profile" /
                           "manifest.json").read_text())
    assert manifest["schema"] == "v1"
    assert manifest["seed"] == 321
    assert manifest["verdicts"]["log_moment"] == "pass_numeric"
    assert manifest["verdicts"]["exponent_hermitian"] is True


def test_epsilon_validation_exit_code(tmp_path):
    doc = dict(GAUSS_PROFILE, eps_list=[1.5])
    cfg = write_config(tmp_path, doc)
    assert runner.run(cfg, out_dir=str(tmp_path / "out")) == 2


def test_missing_seed_rejected(tmp_path):
    doc = {k: v for k, v in GAUSS_PROFILE.items() if k != "seed"}
    cfg = write_config(tmp_path, doc)
    assert runner.run(cfg, out_dir=str(tmp_path / "out")) == 2


def test_density_method_without_regime_exits_numeric(tmp_path):
    doc = dict(GAUSS_PROFILE)
    doc["model"] = {"jumps": [{"type": "compound_poisson", "rate": 1.0,
                               "law": {"type": "atoms", "positions": [1.0]}}]}
    doc["kind"] = "VerifyCutoff"
    doc["eps_list"] = [1e-2, 1e-4, 1e-6]
    cfg = write_config(tmp_path, doc)
    assert runner.run(cfg, out_dir=str(tmp_path / "out")) == 3


def test_describe_has_no_side_effects(tmp_path, capsys):
    cfg = write_config(tmp_path, GAUSS_PROFILE)
    assert runner.describe(cfg) == 0
    out = capsys.readouterr().out
    plan = json.loads(out)
    assert plan["gamma"] == 1.0
    assert plan["work_units"] == 25
    assert not (tmp_path / "gauss_profile").exists()


def test_distance_curve_run(tmp_path):
    doc = {
        "kind": "distance_curve",
        "model": {"gaussian": [[1.0]]},
        "q": [[1.0]],
        "x0": [1.0],
        "eps_list": [1e-4],
        "grids": {"t": [1.0, 3.0, 6.0]},
        "seed": 7,
        "workers": 1,
        "out_dir": "curve",
    }
    cfg = write_config(tmp_path, doc)
    assert runner.run(cfg, out_dir=str(tmp_path / "out")) == 0
    lines = (tmp_path / "out" / "curve" / "distance_curve.csv").read_text() \
        .strip().splitlines()
    assert len(lines) == 4
    values = [float(line.split(",")[2]) for line in lines[1:]]
    assert values[0] > values[1] > values[2]


def test_average_run(tmp_path):
    doc = {
        "kind": "Average",
        "average": {"alpha": 1.5, "gamma": 1.0, "x0": 1.0, "n": 10000,
                    "eps_n": 1e-4},
        "grids": {"c": {"lo": -2, "hi": 2, "count": 3}},
        "paths": 20000,
        "seed": 99,
        "out_dir": "avg",
    }
    cfg = write_config(tmp_path, doc)
    assert runner.run(cfg, out_dir=str(tmp_path / "out")) == 0
    manifest = json.loads((tmp_path / "out" / "avg" / "manifest.json").read_text())
    want = math.log((10**4) ** (2.0 - 2.0 / 1.5) / 1e-4) / 2.0
    assert manifest["schedule"]["t"] == pytest.approx(want, rel=1e-6)


def test_superposition_run(tmp_path):
    doc = {
        "kind": "Superposition",
        "blocks": [
            {"weight": 0.5, "rate": 1.0, "x": 1.0,
             "model": {"gaussian": [[1.0]]}},
            {"weight": 0.5, "rate": 2.0, "x": 1.0,
             "model": {"gaussian": [[1.0]]}},
        ],
        "eps_list": [1e-4],
        "grids": {"c": {"lo": -3, "hi": 3, "count": 7}},
        "seed": 4,
        "out_dir": "sup",
    }
    cfg = write_config(tmp_path, doc)
    assert runner.run(cfg, out_dir=str(tmp_path / "out")) == 0
    manifest = json.loads((tmp_path / "out" / "sup" / "manifest.json").read_text())
    assert manifest["limit_triple"]["sigma_inf_stated"] == pytest.approx(0.1875)


def test_condition_checks_run(tmp_path):
    doc = {
        "kind": "ConditionChecks",
        "model": {"jumps": [{"type": "factorial_atoms"}]},
        "q": [[1.0]],
        "x0": [1.0],
        "seed": 11,
        "cf_tail": False,
        "out_dir": "checks",
    }
    cfg = write_config(tmp_path, doc)
    assert runner.run(cfg, out_dir=str(tmp_path / "out")) == 0
    manifest = json.loads((tmp_path / "out" / "checks" /
                           "manifest.json").read_text())
    assert manifest["verdicts"]["bk_1d"] == "pass_numeric"
    assert manifest["verdicts"]["kallenberg"] == "fail_numeric"


def test_jump_table_config(tmp_path):
    (tmp_path / "jumps.csv").write_text("x,weight\n1.0,0.5\n-0.5,0.5\n")
    doc = {
        "kind": "condition_checks",
        "model": {"jumps": [{"type": "compound_poisson", "rate": 2.0,
                             "law": {"type": "table", "path": "jumps.csv"}}]},
        "q": [[1.0]],
        "x0": [1.0],
        "seed": 3,
        "cf_tail": False,
        "out_dir": "table",
    }
    cfg = write_config(tmp_path, doc)
    assert runner.run(cfg, out_dir=str(tmp_path / "out")) == 0


def test_seed_override_changes_manifest(tmp_path):
    cfg = write_config(tmp_path, GAUSS_PROFILE)
    runner.run(cfg, out_dir=str(tmp_path / "a"), seed_override=999)
    manifest = json.loads((tmp_path / "a" / "gauss_profile" /
                           "manifest.json").read_text())
    assert manifest["seed"] == 999


def test_byte_identical_reruns(tmp_path):
    """Identical config and seed produce byte-identical CSV and manifest."""
    cfg = write_config(tmp_path, GAUSS_PROFILE)
    runner.run(cfg, out_dir=str(tmp_path / "a"))
    runner.run(cfg, out_dir=str(tmp_path / "b"))
    for name in ("profile.csv", "plot_profile.csv", "manifest.json"):
        a = (tmp_path / "a" / "gauss_profile" / name).read_bytes()
        b = (tmp_path / "b" / "gauss_profile" / name).read_bytes()
        assert a == b, name


def test_cli_entry_point(tmp_path):
    cfg = write_config(tmp_path, dict(GAUSS_PROFILE,
                                      grids={"c": {"lo": -1, "hi": 1,
                                                   "count": 3}}))
    proc = subprocess.run(
        [sys.executable, "-m", "oucutoff.cli", "run", cfg,
         "--out-dir", str(tmp_path / "cli_out"), "--workers", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    payload = json.loads(proc.stdout.strip().splitlines()[-1])
    assert payload["ok"] is True


def test_parallel_workers_match_serial(tmp_path):
    doc = {
        "kind": "distance_curve",
        "model": {"gaussian": [[1.0]]},
        "q": [[1.0]],
        "x0": [1.0],
        "eps_list": [1e-4],
        "grids": {"t": [0.5, 2.0, 4.0, 8.0]},
        "seed": 7,
        "out_dir": "curve",
    }
    cfg1 = write_config(tmp_path, dict(doc, workers=1), "serial.json")
    cfg2 = write_config(tmp_path, dict(doc, workers=2), "parallel.json")
    runner.run(cfg1, out_dir=str(tmp_path / "s"))
    runner.run(cfg2, out_dir=str(tmp_path / "p"))
    a = (tmp_path / "s" / "curve" / "distance_curve.csv").read_text()
    b = (tmp_path / "p" / "curve" / "distance_curve.csv").read_text()
    assert a == b


def test_model_document_round_trip():
    doc = {
        "drift": [0.1],
        "gaussian": [[0.5]],
        "jumps": [
            {"type": "stable", "alpha": 1.5, "c": 1.0, "beta": 0.3},
            {"type": "compound_poisson", "rate": 2.0,
             "law": {"type": "exponential", "rate": 1.5}},
        ],
    }
    model = runner.model_from_doc(doc)
    assert model.dim == 1
    z = np.linspace(-2, 2, 5)
    psi = __import__("oucutoff").char_exponent(model, z)
    assert np.all(np.isfinite(psi.real))


def test_model_describe_round_trip():
    """Serializing a model and re-parsing it reproduces the exponent."""
    import oucutoff as oc

    model = oc.LevyModel(
        drift=[0.2], gaussian=[[0.4]],
        jumps=[oc.StableJumps(oc.StableParams(1.3, 0.9, -0.2, 0.1)),
               oc.CompoundPoissonJumps(1.5, oc.AtomLaw([1.0, -2.0], [0.7, 0.3])),
               oc.CompoundPoissonJumps(0.5, oc.ParetoLaw(1.2, 2.0))],
        name="roundtrip")
    clone = runner.model_from_doc(model.describe())
    z = np.linspace(-3.0, 3.0, 11)
    assert np.allclose(oc.char_exponent(model, z),
                       oc.char_exponent(clone, z), atol=1e-12)


def test_grid_and_batch_exports(tmp_path):
    import oucutoff as oc
    from oucutoff.charfn import export_grid_csv
    from oucutoff.sampling import save_batch_csv

    grid, dens = oc.density_from_cf(lambda lam: np.exp(-lam**2 / 2), 1,
                                    n=2**10, lam_max=30.0)
    export_grid_csv(grid, tmp_path / "cf.csv")
    export_grid_csv(dens, tmp_path / "density.csv")
    side = json.loads((tmp_path / "cf.csv.json").read_text())
    assert side["invariants"]["max_abs"] <= 1.0 + 1e-12
    lines = (tmp_path / "density.csv").read_text().strip().splitlines()
    assert lines[0] == "x,value"
    assert len(lines) == 1 + 2**10

    stream = oc.RngStream(5, 2)
    batch = oc.sample_stable(oc.StableParams(1.5), 2000, stream)
    save_batch_csv(batch, tmp_path / "batch.csv", stream=stream)
    meta = json.loads((tmp_path / "batch.csv.json").read_text())
    assert meta["seed"] == 5 and meta["stream_id"] == 2
    assert len((tmp_path / "batch.csv").read_text().strip().splitlines()) == 2001


def test_tv_estimate_csv_row(normal_density):
    import oucutoff as oc

    est = oc.tv_shift(normal_density, 1.0)
    method, value, stderr, resolution, clipped = est.csv_row()
    assert method == "density_shift"
    assert 0 < value < 1 and stderr == 0.0
    assert resolution == normal_density.step
    assert clipped != ""


def test_asymptotic_data_export():
    import oucutoff as oc

    spec = oc.validate_mplus([[1.0, -1.0], [1.0, 1.0]])
    asym = oc.asymptotic_decomposition(spec, [1.0, 0.0])
    doc = asym.export()
    assert doc["gamma"] == pytest.approx(1.0)
    assert doc["ell"] == 1
    assert len(doc["thetas"]) == 2
    assert len(doc["vs"][0][0]) == 2          # [re, im] pairs
    assert all(r >= 0 for _, r in doc["residual_curve"])
