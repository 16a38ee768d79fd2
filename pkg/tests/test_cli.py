"""Command line driver: config parsing, artifacts, determinism, exit codes.

Solve-backed commands run on a reduced grid (R = 20, M = 800) so the whole
module stays fast; the artifact values are checked against the same frozen
levels used by the solver tests.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from neharipde.cli import DEFAULT_LAMBDAS, SWEEP_COLUMNS, main, run_sweep
from neharipde.config import RunConfig, default_config, parse_config

M_G_FROZEN = -0.02292822717421047
M_1G_FROZEN = 0.6218655772798732
M_V_FROZEN = 0.9799310691155384
M_0_FROZEN = 2.5728157187617864

MED_LINES = "R_max = 20.0\nM = 800\n"


def write_cfg(tmp_path: Path, body: str, name: str = "run.cfg") -> Path:
    path = tmp_path / name
    path.write_text(body)
    return path


@pytest.fixture(scope="module")
def med_cfg_file(tmp_path_factory) -> Path:
    return write_cfg(tmp_path_factory.mktemp("cfg"), MED_LINES)


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    lines = path.read_text().splitlines()
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return lines[0].split(","), data


class TestConfigParsing:
    def test_defaults(self):
        cfg = default_config()
        assert cfg == RunConfig()
        assert cfg.N == 3 and cfg.M == 3000

    def test_overrides_and_comments(self, tmp_path):
        cfg = parse_config(write_cfg(tmp_path, (
            "# experiment grid\n"
            "\n"
            "M = 500   # nodes\n"
            "g_amplitude = 0.01\n"
            "V_profile = compact_bump\n")))
        assert cfg.M == 500
        assert cfg.g_amplitude == 0.01
        assert cfg.V_profile == "compact_bump"
        assert cfg.R_max == RunConfig().R_max

    def test_unknown_key_names_the_allowed_set(self, tmp_path):
        with pytest.raises(ValueError, match="allowed keys.*g_amplitude"):
            parse_config(write_cfg(tmp_path, "g_amp = 0.1\n"))

    def test_duplicate_key(self, tmp_path):
        with pytest.raises(ValueError, match="duplicate key 'M'"):
            parse_config(write_cfg(tmp_path, "M = 100\nM = 200\n"))

    def test_bad_value(self, tmp_path):
        with pytest.raises(ValueError):
            parse_config(write_cfg(tmp_path, "M = many\n"))

    def test_line_without_assignment(self, tmp_path):
        with pytest.raises(ValueError, match="expected 'key = value'"):
            parse_config(write_cfg(tmp_path, "just words\n"))


class TestExitCodes:
    def test_missing_config_file(self, tmp_path, capsys):
        rc = main(["--config", str(tmp_path / "nope.cfg"),
                   "--out", str(tmp_path / "o"), "verify-f"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_positive_potential_rejected(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, MED_LINES + "V_amplitude = 0.4\n")
        rc = main(["--config", str(cfg), "--out", str(tmp_path / "o"), "solve"])
        assert rc == 1
        assert "V must be <= 0" in capsys.readouterr().err

    def test_overstrong_potential_rejected(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, MED_LINES + "V_amplitude = -8.0\nV_width = 3.0\n")
        rc = main(["--config", str(cfg), "--out", str(tmp_path / "o"), "solve"])
        assert rc == 1
        assert "Sobolev" in capsys.readouterr().err

    def test_bad_lambda_list(self, med_cfg_file, tmp_path, capsys):
        rc = main(["--config", str(med_cfg_file), "--out", str(tmp_path / "o"),
                   "--lambda-list", "1.0,abc", "sweep"])
        assert rc == 1
        assert "lambda-list" in capsys.readouterr().err

    def test_negative_lambda(self, med_cfg_file, tmp_path, capsys):
        rc = main(["--config", str(med_cfg_file), "--out", str(tmp_path / "o"),
                   "--lambda-list", "0.5,-0.5", "sweep"])
        assert rc == 1
        assert "nonnegative" in capsys.readouterr().err

    def test_bad_grid_refine(self, med_cfg_file, tmp_path, capsys):
        rc = main(["--config", str(med_cfg_file), "--out", str(tmp_path / "o"),
                   "--grid-refine", "0", "fiber"])
        assert rc == 1
        assert "grid_refine" in capsys.readouterr().err


class TestVerifyCommand:
    def test_default_params_pass(self, tmp_path):
        out = tmp_path / "o"
        assert main(["--out", str(out), "verify-f"]) == 0
        payload = json.loads((out / "hypotheses.json").read_text())
        assert payload["passed"] is True
        assert payload["failures"] == []
        assert payload["checked_points"] >= 1000
        assert set(payload["margins"]) == {
            "growth_lower", "growth_second", "superquadratic",
            "second_order", "third_positive", "eps_window"}
        assert all(m > 0.0 for m in payload["margins"].values())
        coeff = payload["coefficients"]
        total = coeff["A"] + coeff["B"] + coeff["C"] + coeff["D"]
        assert total == pytest.approx(5.5 * 4.5 * 3.5, rel=1e-12)

    def test_failing_params_exit_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, "mu1 = 5.6\n")
        out = tmp_path / "o"
        rc = main(["--config", str(cfg), "--out", str(out), "verify-f"])
        assert rc == 2
        assert "FAILED" in capsys.readouterr().out
        payload = json.loads((out / "hypotheses.json").read_text())
        assert payload["passed"] is False
        assert any(f["hypothesis"] == "superquadratic" for f in payload["failures"])

    def test_bracket_failures_serialize_without_sample(self, tmp_path):
        # eps past the exponent bracket fails with no sample point attached;
        # the JSON slot must hold null, not NaN.
        cfg = write_cfg(tmp_path, "eps = 2.6\n")
        out = tmp_path / "o"
        assert main(["--config", str(cfg), "--out", str(out), "verify-f"]) == 2
        payload = json.loads((out / "hypotheses.json").read_text())
        assert payload["passed"] is False
        assert any(f["s"] is None and "eps_window[" in f["hypothesis"]
                   for f in payload["failures"])


@pytest.fixture(scope="module")
def out_dir(med_cfg_file, tmp_path_factory):
    out = tmp_path_factory.mktemp("solve_out")
    assert main(["--config", str(med_cfg_file), "--out", str(out),
                 "--seed", "7", "solve"]) == 0
    return out


@pytest.fixture(scope="module")
def sweep_out(med_cfg_file, tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep_out")
    assert main(["--config", str(med_cfg_file), "--out", str(out),
                 "--lambda-list", "0.5,1.0,0.5,0.0", "sweep"]) == 0
    return out


class TestSolveCommand:
    def test_artifacts_exist(self, out_dir):
        for name in ("solve_plus.json", "solve_minus.json", "solve_plus.csv",
                      "solve_minus.csv", "levels.json"):
            assert (out_dir / name).is_file()

    def test_levels_payload(self, out_dir):
        levels = json.loads((out_dir / "levels.json").read_text())
        assert levels["m_g"] == pytest.approx(M_G_FROZEN, rel=1e-9)
        assert levels["m_1g"] == pytest.approx(M_1G_FROZEN, rel=1e-9)
        assert levels["m_V"] == pytest.approx(M_V_FROZEN, rel=1e-9)
        assert levels["m_0"] == pytest.approx(M_0_FROZEN, rel=1e-9)
        gap = levels["m_g"] + levels["m_0"] - levels["m_1g"]
        assert levels["splitting_gap"] == pytest.approx(gap, abs=1e-15)
        assert levels["splitting_gap"] > 0.0
        assert levels["seed"] == 7

    def test_report_payloads(self, out_dir):
        plus = json.loads((out_dir / "solve_plus.json").read_text())
        minus = json.loads((out_dir / "solve_minus.json").read_text())
        assert plus["branch"] == "plus" and minus["branch"] == "minus"
        assert plus["energy"] < 0.0 < minus["energy"]
        scale = 1.0 + 0.04
        assert plus["residual"] <= 1e-8 * scale
        assert minus["residual"] <= 1e-8 * scale
        assert plus["second_variation_along_ray"] > 0.0
        assert minus["second_variation_along_ray"] < 0.0
        assert isinstance(plus["iterations"], int)
        assert plus["seed"] == minus["seed"] == 7

    def test_profile_csv_schema(self, out_dir):
        header, data = read_csv(out_dir / "solve_plus.csv")
        assert header == ["r", "value"]
        assert data.shape == (800, 2)
        h = 20.0 / 800
        assert data[0, 0] == pytest.approx(0.5 * h, rel=1e-15)
        assert np.all(np.diff(data[:, 0]) > 0.0)
        assert np.all(data[:, 1] >= -1e-8)

    def test_byte_determinism(self, out_dir, med_cfg_file, tmp_path):
        again = tmp_path / "again"
        assert main(["--config", str(med_cfg_file), "--out", str(again),
                     "--seed", "7", "solve"]) == 0
        for name in ("solve_plus.json", "solve_minus.json", "solve_plus.csv",
                      "solve_minus.csv", "levels.json"):
            assert (again / name).read_bytes() == (out_dir / name).read_bytes()


class TestSweepCommand:
    def test_schema_order_and_dedupe(self, sweep_out):
        header, data = read_csv(sweep_out / "sweep.csv")
        assert header == SWEEP_COLUMNS
        assert list(data[:, 0]) == [1.0, 0.5, 0.0]

    def test_zero_row_is_the_unforced_limit(self, sweep_out):
        _, data = read_csv(sweep_out / "sweep.csv")
        row = dict(zip(SWEEP_COLUMNS, data[-1]))
        assert row["lambda"] == 0.0
        assert row["m_g"] == 0.0
        assert row["m_1g"] == row["m_V"]
        assert row["u_plus_norm"] == 0.0
        assert row["residual_plus"] == row["residual_minus"] == 0.0
        assert row["iterations_plus"] == row["iterations_minus"] == 0
        assert row["u_minus_norm"] > 0.0
        assert row["margin_minus"] > 0.0

    def test_iterations_serialize_as_integers(self, sweep_out):
        lines = (sweep_out / "sweep.csv").read_text().splitlines()
        i_plus = SWEEP_COLUMNS.index("iterations_plus")
        for line in lines[1:]:
            token = line.split(",")[i_plus]
            assert "." not in token

    def test_levels_move_monotonically_with_scale(self, sweep_out):
        _, data = read_csv(sweep_out / "sweep.csv")
        rows = {row[0]: dict(zip(SWEEP_COLUMNS, row)) for row in data}
        assert rows[1.0]["m_g"] < rows[0.5]["m_g"] < 0.0
        assert rows[1.0]["m_1g"] < rows[0.5]["m_1g"] < rows[0.5]["m_V"]
        assert rows[1.0]["margin_minus"] > 0.0

    def test_byte_determinism(self, sweep_out, med_cfg_file, tmp_path):
        again = tmp_path / "again"
        assert main(["--config", str(med_cfg_file), "--out", str(again),
                     "--lambda-list", "0.5,1.0,0.5,0.0", "sweep"]) == 0
        assert ((again / "sweep.csv").read_bytes()
                == (sweep_out / "sweep.csv").read_bytes())

    def test_negative_scale_rejected_in_library(self, tmp_path):
        with pytest.raises(ValueError, match="nonnegative"):
            run_sweep(RunConfig(R_max=20.0, M=800), tmp_path, lambdas=[-1.0])

    def test_default_scales_are_halving(self):
        assert DEFAULT_LAMBDAS[0] == 1.0
        assert len(DEFAULT_LAMBDAS) == 11
        assert all(b == 0.5 * a for a, b in zip(DEFAULT_LAMBDAS, DEFAULT_LAMBDAS[1:]))


class TestFiberCommand:
    def test_samples_and_shape(self, med_cfg_file, tmp_path, capsys):
        out = tmp_path / "o"
        assert main(["--config", str(med_cfg_file), "--out", str(out), "fiber"]) == 0
        assert "case=positive_pairing_two_roots" in capsys.readouterr().out
        header, data = read_csv(out / "fiber.csv")
        assert header == ["t", "phi", "dphi"]
        assert data.shape == (512, 3)
        assert data[0, 0] == 0.0 and data[0, 1] == 0.0
        assert np.all(np.diff(data[:, 0]) > 0.0)
        # Two interior Nehari roots leave exactly two sign changes in dphi.
        signs = np.sign(data[1:, 2])
        assert int(np.sum(np.abs(np.diff(signs)) > 0)) == 2


class TestOrliczCommand:
    def test_payload_relations(self, med_cfg_file, tmp_path):
        out = tmp_path / "o"
        assert main(["--config", str(med_cfg_file), "--out", str(out),
                     "--seed", "3", "orlicz"]) == 0
        payload = json.loads((out / "orlicz.json").read_text())
        d = payload["direction"]
        # The canonical direction never exceeds the unit threshold, so the
        # superlevel set is empty and the level-set lower bound degenerates.
        assert d["gamma_measure"] == 0.0
        assert 0.0 == d["lower"] <= d["tightened_upper"] <= d["upper"]
        assert d["upper"] > 0.0 and d["tau"] > 0.0
        f = payload["forcing"]
        assert f["dual_norm"] == pytest.approx(
            max(f["norm_p_conj"], f["norm_q_conj"]), rel=1e-15)
        assert payload["small_branch_norm_bound"] > 0.0
        assert payload["sobolev_constant"] > 0.0
        assert payload["seed"] == 3
