import csv
import json
import subprocess
import sys

import pytest

from sswm.cli import main
from sswm.export import sha256


def run(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--out", str(out)])
    return code, out


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def assert_no_orphans(out):
    listed = {o["path"] for o in manifest(out)["outputs"]}
    on_disk = {p.name for p in out.iterdir()} - {"manifest.json"}
    assert listed == on_disk
    for o in manifest(out)["outputs"]:
        assert sha256(out / o["path"]) == o["sha256"]


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_spectra_fig2a_peaks(tmp_path):
    code, out = run(tmp_path, "spectra", "--preset", "fig2a", "--quantity", "chi5_he", "--peaks")
    assert code == 0
    peaks = rows(out / "peaks.csv")
    assert len(peaks) == 4
    assert {p["pathway"] for p in peaks} == {"1", "2", "3", "4"}
    assert all(float(p["distance"]) < 0.12 for p in peaks)
    assert len(rows(out / "predictions.csv")) == 4
    m = manifest(out)
    assert m["n_peaks"] == 4 and m["quantity"] == "chi5_he" and m["preset"] == "fig2a"
    with open(out / "spectrum_chi5_he.csv") as fh:
        assert fh.readline().strip() == "nu1,nu2,re,im,abs"
    assert_no_orphans(out)


def test_spectra_figS2d_two_peaks(tmp_path):
    cfg = tmp_path / "s2d.toml"
    cfg.write_text('preset = "figS2d"\n[grid]\nnu1_center = -100.0\nnu1_span = 64.0\nn1 = 1024\n'
                   'nu2_center = 100.0\nnu2_span = 64.0\nn2 = 1024\n')
    code, out = run(tmp_path, "spectra", "--config", str(cfg), "--quantity", "chi5_he", "--peaks")
    assert code == 0
    assert len(rows(out / "peaks.csv")) == 2


def test_missing_quantity_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectra", "--preset", "fig2a"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_preset_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectra", "--preset", "fig9", "--quantity", "chi5_he"])
    assert exc.value.code == 2


def test_no_preset_or_config_exit_2(tmp_path, capsys):
    code, _ = run(tmp_path, "compare-pcr")
    assert code == 2
    assert "--preset" in capsys.readouterr().err


def test_bad_config_exit_2(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("delta_p = 'far'\n")
    code, _ = run(tmp_path, "compare-pcr", "--config", str(cfg))
    assert code == 2


def test_malformed_grid_flag_exit_2(tmp_path):
    code, _ = run(tmp_path, "compare-pcr", "--preset", "fig2a", "--grid", "big")
    assert code == 2


def test_degenerate_grid_exit_3(tmp_path):
    code, _ = run(tmp_path, "compare-pcr", "--preset", "fig2a", "--grid", "1x1")
    assert code == 3


def test_grid_too_coarse_exit_3(tmp_path):
    code, _ = run(tmp_path, "spectra", "--preset", "fig2a", "--quantity", "chi5_he", "--peaks",
                  "--grid", "128x128")
    assert code == 3


def test_compare_pcr_fig2a(tmp_path):
    code, out = run(tmp_path, "compare-pcr", "--preset", "fig2a")
    assert code == 0
    report = rows(out / "pcr_report.csv")
    assert report[0]["metric"] == "max_rel_dev" and float(report[0]["value"]) < 1e-12
    dists = [float(r["value"]) for r in report[1:]]
    assert len(dists) == 6 and min(dists) > 1e-2
    assert_no_orphans(out)


def test_correlations_fig3c_regime(tmp_path):
    code, out = run(tmp_path, "correlations", "--preset", "fig3c")
    assert code == 0
    assert manifest(out)["regime"]["regime"] == "GroupDelay"
    r2 = rows(out / "r2_s1.csv")
    assert r2[0].keys() == {"tau", "r2", "traced_over"} and r2[0]["traced_over"] == "s1"
    with open(out / "r3.csv") as fh:
        assert fh.readline().strip() == "tau31,tau32,r3"
    assert_no_orphans(out)


def test_correlations_figS3_exported(tmp_path):
    code, out = run(tmp_path, "correlations", "--preset", "figS3", "--grid", "512x1024")
    assert code == 0
    summary = json.loads((out / "regime.json").read_text())
    assert summary["preset"] == "figS3"
    assert summary["traces"]["s1"]["oscillation_period"] is not None
    assert {o["kind"] for o in manifest(out)["outputs"]} == {"r3", "r2", "regime"}


def test_correlations_fig3a_oracle(tmp_path):
    code, out = run(tmp_path, "correlations", "--preset", "fig3a", "--oracle", "8")
    assert code == 0
    table = rows(out / "oracle.csv")
    assert len(table) == 8
    assert all(float(r["rel_dev"]) < 1e-3 for r in table)
    assert manifest(out)["regime"]["regime"] == "DampedRabi"
    assert_no_orphans(out)


def test_flags_reach_params(tmp_path):
    code, out = run(tmp_path, "compare-pcr", "--preset", "fig3a", "--halve-absorption",
                    "--literal-omega-tr", "--grid", "64x64")
    assert code == 0
    params = manifest(out)["params"]
    assert params["halve_absorption"] is True and params["literal_omega_tr"] is True


def test_config_file_with_preset_flag(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("units = 'gamma31'\noptical_depth = 20.0\n")
    code, out = run(tmp_path, "compare-pcr", "--preset", "fig3a", "--config", str(cfg), "--grid", "64x64")
    assert code == 0
    m = manifest(out)
    assert m["preset"] == "fig3a" and m["params"]["optical_depth"] == 20.0
    assert m["params"]["omega_c1"] == 5.0


def test_rerun_reproduces_csv_bytes(tmp_path):
    args = ["spectra", "--preset", "fig3e", "--quantity", "kernel", "--grid", "128x128"]
    main([*args, "--out", str(tmp_path / "a")])
    main([*args, "--out", str(tmp_path / "b")])
    for name in ("spectrum_kernel.csv", "spectrum_kernel.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "sswm.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
