import json

from lppsim.cli import main


def test_tail_happy_path(tmp_path):
    rc = main([
        "tail", "--geometry", "p2p", "--direction", "upper", "--N", "30",
        "--t", "1.0", "--n-samples", "50", "--seed", "7", "--out", str(tmp_path),
    ])
    assert rc == 0
    data = json.loads((tmp_path / "tail-seed7.json").read_text())
    assert data["config"]["geometry"] == "p2p"
    assert (tmp_path / "tail-seed7.csv").exists()


def test_missing_seed_exit_2(capsys):
    rc = main(["tail", "--N", "30", "--t", "1.0", "--n-samples", "10"])
    assert rc == 2
    assert "seed" in capsys.readouterr().err


def test_invalid_field_named(capsys):
    rc = main([
        "tail", "--geometry", "p2l", "--s", "0.5", "--t", "1.0",
        "--N", "30", "--n-samples", "10", "--seed", "1",
    ])
    assert rc == 2
    assert "'s'" in capsys.readouterr().err


def test_dry_run_prints_resolved_config(capsys):
    rc = main([
        "tail", "--N", "40", "--t", "1.0", "--n-samples", "10", "--seed", "3",
        "--dry-run",
    ])
    assert rc == 0
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["N"] == 40 and cfg["seed"] == 3
    assert cfg["trunc_const"] == 6.0 and cfg["checkpoint_stride"] == 64


def test_config_file_flag_precedence(tmp_path, capsys):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({
        "experiment": "tail", "seed": 5, "N": 500, "n_samples": 10, "t": 1.0,
    }))
    rc = main(["tail", "--config", str(cfgfile), "--N", "1000", "--dry-run"])
    assert rc == 0
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["N"] == 1000  # flag overrides file
    assert cfg["seed"] == 5


def test_unknown_config_key_exit_2(tmp_path, capsys):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({
        "experiment": "tail", "seed": 5, "N": 50, "n_samples": 10, "t": 1.0,
        "wibble": True,
    }))
    rc = main(["tail", "--config", str(cfgfile)])
    assert rc == 2
    assert "wibble" in capsys.readouterr().err


def test_oracle_check_cli(capsys):
    rc = main(["oracle-check", "--max-steps", "8", "--cases", "25", "--seed", "1"])
    assert rc == 0
    assert "bitwise equal" in capsys.readouterr().out


def test_profile_dump(tmp_path):
    rc = main([
        "profile", "--geometry", "p2p", "--N", "20", "--s-lo", "0",
        "--s-hi", "0.5", "--seed", "2", "--out", str(tmp_path),
    ])
    assert rc == 0
    csv = (tmp_path / "profile-p2p-N20-seed2.csv").read_text()
    assert csv.startswith("level,psi,value,reachable")
    assert all(line.split(",")[0] == "40" for line in csv.strip().split("\n")[1:])


def test_geodesic_dump(tmp_path):
    rc = main([
        "geodesic", "--geometry", "p2p", "--N", "15", "--s", "0.0",
        "--seed", "2", "--out", str(tmp_path),
    ])
    assert rc == 0
    csv = (tmp_path / "geodesic-p2p-N15-seed2.csv").read_text()
    lines = csv.strip().split("\n")
    assert lines[0] == "step,x,y,phi,psi"
    assert lines[1] == "0,0,0,0,0"
    assert lines[-1].endswith("15,15,30,0")


def test_experiment_without_out_prints_json(capsys):
    rc = main([
        "association", "--N", "30", "--s1", "0.0", "--s2", "0.25",
        "--n-samples", "40", "--seed", "9",
    ])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["format_version"] == 1
