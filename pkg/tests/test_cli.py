import json
import math
from pathlib import Path

import pytest

import zenoauger as za
from zenoauger.cli import main
from zenoauger.config import (build_config, canonical_text, expand,
                              format_float, parse_config_text)

FAST_DRIVEN = [
    "--override", "model.N=101",
    "--override", "propagation.T_total=6 fs",
    "--override", "propagation.sample_stride=0.5 fs",
]
FAST = ["--override", "drive.mode=off", *FAST_DRIVEN]

GOOD_CONFIG = """
# minimal explicit configuration
model.E1 = 52.0 eV
model.E2 = 54.5 eV
model.eps_c = 0.0 eV
model.tau1 = 10.0 fs
model.tau2 = inf
model.W = 2.0 eV
model.N = 101
model.n_exponent = 1
drive.mode = off
propagation.T_total = 6.0 fs
propagation.sample_stride = 0.5 fs
"""


def read_all(out_dir: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(out_dir.glob("*"))
            if p.is_file()}


class TestConfigParsing:
    def test_round_trip_of_expanded_form(self):
        cfg = expand(build_config(parse_config_text(GOOD_CONFIG)))
        text = canonical_text(cfg)
        again = expand(build_config(parse_config_text(text)))
        assert canonical_text(again) == text

    def test_preset_expansion_is_idempotent(self):
        cfg = za.preset_config("li")
        text = canonical_text(cfg)
        again = build_config(parse_config_text(text))
        assert canonical_text(again) == text

    def test_missing_unit_suffix_names_key(self):
        bad = GOOD_CONFIG.replace("model.tau1 = 10.0 fs", "model.tau1 = 10.0")
        with pytest.raises(za.ConfigError, match="model.tau1"):
            build_config(parse_config_text(bad))

    def test_wrong_unit_names_key(self):
        bad = GOOD_CONFIG.replace("model.E1 = 52.0 eV", "model.E1 = 52.0 fs")
        with pytest.raises(za.ConfigError, match="model.E1"):
            build_config(parse_config_text(bad))

    def test_unknown_key_rejected(self):
        with pytest.raises(za.ConfigError, match="model.mass"):
            parse_config_text("model.mass = 1.0 au")

    def test_intensity_and_dipole_derive_rabi(self):
        cfg = expand(za.preset_config("li"))
        assert za.au_to_ev(cfg.Omega) == pytest.approx(0.3, rel=1e-3)
        assert abs(cfg.delta) < 1e-12

    def test_omega_and_delta_conflict(self):
        raw = parse_config_text(GOOD_CONFIG)
        raw["drive.mode"] = "pulsed"
        raw["drive.Omega"] = "0.5 eV"
        raw["drive.omega"] = "3.0 eV"
        raw["drive.delta"] = "1.0 eV"
        with pytest.raises(za.ConfigError, match="delta"):
            expand(build_config(raw))

    def test_format_float_17_digits(self):
        assert format_float(1.0) == "1.0000000000000000e+00"
        assert format_float(math.pi) == "3.1415926535897931e+00"
        assert float(format_float(0.1)) == 0.1


class TestRunCommand:
    def test_run_emits_standard_files(self, tmp_path):
        out = tmp_path / "run"
        code = main(["run", "--preset", "li", *FAST, "--out", str(out)])
        assert code == 0
        names = set(read_all(out))
        assert names == {"trace.csv", "spectrum.csv", "summary.json",
                         "config.expanded", "provenance.json"}
        summary = json.loads((out / "summary.json").read_text())
        assert summary["fit"]["r_squared"] > 0.98
        assert summary["norm_error"] < 1e-9

    def test_reruns_are_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["run", "--preset", "li", *FAST, "--out", str(out1)])
        main(["run", "--preset", "li", *FAST, "--out", str(out2)])
        assert read_all(out1) == read_all(out2)

    def test_expanded_config_reruns_identically(self, tmp_path):
        out1 = tmp_path / "a"
        main(["run", "--preset", "li", *FAST, "--out", str(out1)])
        echoed = out1 / "config.expanded"
        out2 = tmp_path / "b"
        code = main(["run", "--config", str(echoed), "--out", str(out2)])
        assert code == 0
        assert read_all(out1) == read_all(out2)

    def test_config_file_loading(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text(GOOD_CONFIG)
        out = tmp_path / "out"
        assert main(["run", "--config", str(path), "--out", str(out)]) == 0

    def test_malformed_unit_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.conf"
        path.write_text(GOOD_CONFIG + "drive.t_m = 0.32 picoseconds\n")
        code = main(["run", "--config", str(path), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "drive.t_m" in capsys.readouterr().err

    def test_recurrence_violation_exits_2(self, tmp_path, capsys):
        code = main(["run", "--preset", "li", "--override", "model.N=41",
                     "--out", str(tmp_path / "o")])
        assert code == 2
        assert "recurrence" in capsys.readouterr().err

    def test_trace_csv_schema(self, tmp_path):
        out = tmp_path / "run"
        main(["run", "--preset", "li", *FAST, "--out", str(out)])
        lines = (out / "trace.csv").read_text().splitlines()
        assert lines[0] == "t_fs,n_c,n_v1,n_v2,n_v3,P1,P2,P_bound,cycle_boundary"
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[7]) == 1.0


class TestSweepCommand:
    def test_sweep_table_and_points(self, tmp_path):
        out = tmp_path / "sweep"
        code = main(["sweep", "--preset", "li", *FAST_DRIVEN, "--out",
                     str(out), "--axis", "t_m", "--values", "0.16,0.32"])
        assert code == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "t_m,tau_eff_envelope_fs,tau_eff_1e_fs,r_squared,status"
        assert len(lines) == 3
        assert (out / "points" / "000" / "summary.json").exists()
        assert (out / "points" / "001" / "summary.json").exists()

    def test_single_value_matches_run(self, tmp_path):
        out_sweep = tmp_path / "sweep"
        out_run = tmp_path / "run"
        main(["sweep", "--preset", "li", *FAST_DRIVEN, "--out",
              str(out_sweep), "--axis", "intensity", "--values", "5.1"])
        main(["run", "--preset", "li", *FAST_DRIVEN, "--out", str(out_run)])
        point = json.loads(
            (out_sweep / "points" / "000" / "summary.json").read_text())
        direct = json.loads((out_run / "summary.json").read_text())
        assert point["fit"] == direct["fit"]

    def test_failed_point_recorded_sweep_continues(self, tmp_path):
        out = tmp_path / "sweep"
        # an omega below the level splitting of the li preset detunes the
        # drive hugely but still runs; a negative one is rejected
        code = main(["sweep", "--preset", "li", *FAST_DRIVEN, "--out",
                     str(out), "--axis", "Omega2", "--values=-1.0,0.09"])
        assert code == 1
        lines = (out / "sweep.csv").read_text().splitlines()
        assert "error" in lines[1]
        assert lines[2].endswith("ok")

    def test_zero_intensity_point_runs_field_free(self, tmp_path):
        out = tmp_path / "sweep"
        code = main(["sweep", "--preset", "li", *FAST_DRIVEN, "--out",
                     str(out), "--axis", "intensity", "--values", "0.0,5.1"])
        assert code == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[1].endswith("ok") and lines[2].endswith("ok")

    def test_parallel_workers_match_sequential(self, tmp_path):
        args = ["sweep", "--preset", "li", *FAST_DRIVEN, "--axis", "t_m",
                "--values", "0.2,0.4"]
        out1, out2 = tmp_path / "seq", tmp_path / "par"
        main(args + ["--out", str(out1), "--workers", "1"])
        main(args + ["--out", str(out2), "--workers", "2"])
        assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()


class TestOtherCommands:
    def test_presets_lists_all(self, capsys):
        assert main(["presets"]) == 0
        out = capsys.readouterr().out
        for name in ("li", "li_plus", "fig3_circles", "fig3_squares", "fig4"):
            assert name in out

    def test_validate_ok_with_linewidth_note(self, capsys):
        code = main(["validate", "--preset", "li"])
        assert code == 0
        out = capsys.readouterr().out
        assert "ok" in out

    def test_validate_fails_on_recurrence(self, capsys):
        code = main(["validate", "--preset", "li",
                     "--override", "model.N=41"])
        assert code == 2
        assert "recurrence" in capsys.readouterr().out

    def test_run_requires_config_or_preset(self, capsys):
        assert main(["run", "--out", "/tmp/never"]) == 2
