import importlib.util

import pytest

from noma_ra import cli
from noma_ra.config import ConfigError, parse_config, parse_config_text, spec_to_config
from noma_ra.experiments import ExperimentSpec

has_mpl = importlib.util.find_spec("matplotlib") is not None


def test_empty_config_gives_defaults():
    s = parse_config_text("")
    assert s == ExperimentSpec()
    assert s.channel.path_loss_exponent == 2.5 and s.transmit_power_w == 1.0


def test_constraint_error_names_key_and_line():
    text = "[experiment]\nseed = 3\ntrials = -1\n"
    with pytest.raises(ConfigError) as e:
        parse_config_text(text)
    assert e.value.key == "trials" and e.value.line == 3
    assert "trials" in str(e.value)


def test_unknown_key_and_type_mismatch():
    with pytest.raises(ConfigError) as e:
        parse_config_text("[channel]\nnum_users = 16\nradius = 5\n")
    assert (e.value.key, e.value.line) == ("radius", 3)
    with pytest.raises(ConfigError) as e:
        parse_config_text("\n[qos]\nmin_rate_bps_hz = fast\n")
    assert (e.value.key, e.value.line) == ("min_rate_bps_hz", 3)
    with pytest.raises(ConfigError):
        parse_config_text("[nonsense]\na = 1\n")
    with pytest.raises(ConfigError):
        parse_config_text("no section header\n")


def test_channel_constraint_attributed():
    with pytest.raises(ConfigError) as e:
        parse_config_text("[channel]\n\nnum_users = 15\n")
    assert (e.value.key, e.value.line) == ("num_users", 3)


def test_flag_overrides_file(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[experiment]\nseed = 3\npairing = nbd\n")
    assert parse_config(p, {"seed": 7}).seed == 7
    assert parse_config(p).seed == 3
    assert parse_config(p, {"seed": None}).pairing_algorithms == ("nbd",)


def test_spec_round_trips_through_config():
    s = ExperimentSpec(kind="gain_vs_distance", seed=2**63 + 5, trials=17, z=2,
                       power_grid_dbm=(0.5, 7.25))
    assert parse_config_text(spec_to_config(s, {"command": "x"})) == s


def test_outage_csv_schema_and_created_dir(tmp_path):
    out = tmp_path / "new" / "dir"
    assert cli.main(["outage", "--trials", "20", "--out", str(out)]) == 0
    header = (out / "outage.csv").read_text().splitlines()[0]
    assert header == "power,scheme,role,outage_prob,stderr,trials"
    assert (out / "manifest.ini").exists()
    assert not (out / "sumrate.csv").exists()


def test_uncreatable_output_dir(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["sumrate", "--trials", "5", "--out", str(blocker / "sub")]) == 1
    assert "error" in capsys.readouterr().err


def test_config_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.ini"
    p.write_text("[experiment]\ntrials = -1\n")
    assert cli.main(["outage", "--config", str(p), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "trials" in err and ":2:" in err
    assert cli.main(["outage", "--config", str(tmp_path / "missing.ini")]) == 2


def test_pairing_and_z_flags(tmp_path):
    assert cli.main(["gain-index", "--trials", "10", "--pairing", "dnlupa", "--z", "2",
                     "--out", str(tmp_path)]) == 0
    s = parse_config(tmp_path / "manifest.ini")
    assert s.pairing_algorithms == ("dnlupa",) and s.sweep_pairing == "dnlupa" and s.z == 2
    rows = (tmp_path / "gain_index.csv").read_text().splitlines()[1:]
    assert len(rows) == 8 and all(r.startswith("dnlupa,") for r in rows)


def test_manifest_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["all", "--seed", "9", "--trials", "60", "--out", str(a)]) == 0
    assert cli.main(["all", "--config", str(a / "manifest.ini"), "--out", str(b)]) == 0
    for name in ("gain_distance", "gain_index", "outage", "sumrate"):
        assert (a / f"{name}.csv").read_bytes() == (b / f"{name}.csv").read_bytes()


@pytest.mark.skipif(not has_mpl, reason="matplotlib not installed")
def test_plot_writes_svg(tmp_path):
    assert cli.main(["all", "--trials", "10", "--plot", "--out", str(tmp_path)]) == 0
    for name in ("gain_distance", "gain_index", "outage", "sumrate"):
        assert (tmp_path / f"{name}.svg").read_text().lstrip().startswith("<?xml")


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "noma_ra", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "noma-ra" in out.stdout
