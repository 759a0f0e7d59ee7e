from __future__ import annotations

import csv
import json
import math
import shutil

import pytest

from collisional_dicke import cli
from collisional_dicke.cli import (
    EXIT_CAPACITY,
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_QUALITY,
    ResultRecord,
    RunConfig,
    TableRow,
    bundled_table,
    load_table,
    main,
    parse_config_text,
    row_status,
    verify_row,
)
from collisional_dicke.errors import ConfigError
from collisional_dicke.noise import SWEEP_COLUMNS

FAST = "grid_spacing = 0.8\nrounds_max = 60\nalign_candidates = 3\nalign_rounds = 3\n"


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def fast_cfg(tmp_path):
    path = tmp_path / "fast.cfg"
    path.write_text("target = 4,2\n" + FAST)
    return str(path)


def test_config_text_parses_typed_values():
    values = parse_config_text("target = 6,3  # comment\n\ngrid_spacing=0.1\nnoise = pmiss=0.1,dephasing=0.02\n")
    assert values == {"target": (6, 3), "grid_spacing": 0.1, "noise": (("pmiss", 0.1), ("dephasing", 0.02))}


@pytest.mark.parametrize("text", ["bogus = 1", "target 4,2", "rounds_max = many", "target = 4"])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_unknown_key_exits_with_config_code(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("target = 5,2\nfoo = 1\n")
    assert main(["simulate", "--config", str(path), "--gamma-in", "0", "--gamma-sh", "1"]) == EXIT_CONFIG


@pytest.mark.parametrize(
    "text",
    ["target = 4,4", "schedule = zigzag", "noise = pmiss=1.5", "noise = dephasing=0.1,damping=0.1", "engine = gpu"],
)
def test_invalid_run_config_exits_2(tmp_path, text):
    path = tmp_path / "c.cfg"
    path.write_text(text + "\n")
    assert main(["landscape", "--config", str(path), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_resolved_config_round_trips():
    cfg = RunConfig(target=(6, 3), grid_spacing=0.1, noise=(("pmiss", 0.05),), levels=(0.0, 0.5), engine="traj:20")
    again = RunConfig(**parse_config_text(cfg.to_text()))
    assert again == cfg
    assert again.config_hash() == cfg.config_hash()


def test_config_hash_ignores_workers_and_output():
    a = RunConfig(workers=1, out="a")
    b = RunConfig(workers=4, out="b")
    assert a.config_hash() == b.config_hash()
    assert RunConfig(seed=1).config_hash() != a.config_hash()


def test_flags_override_config_file(tmp_path, fast_cfg):
    args = cli.build_parser().parse_args(["optimize", "--config", fast_cfg, "--target", "5,2", "--seed", "7"])
    cfg = cli.resolve_config(args)
    assert cfg.target == (5, 2)
    assert cfg.seed == 7
    assert cfg.grid_spacing == 0.8


def test_noise_flag_is_repeatable():
    args = cli.build_parser().parse_args(["simulate", "--noise", "pmiss=0.1", "--noise", "damping=0.2"])
    noise = cli.resolve_config(args).noise_config()
    assert noise.p_miss == 0.1
    assert noise.channel == "amplitude_damping"
    assert noise.q == 0.2


def test_simulate_trivial_trace(tmp_path):
    out = tmp_path / "s"
    code = main(["simulate", "--target", "3,1", "--gamma-sh", str(math.pi / 2), "--gamma-in", "0",
                 "--rounds", "5", "--out", str(out)])
    assert code == EXIT_OK
    rows = _rows(out / "trace.csv")
    assert len(rows) == 5
    for r in rows:
        assert 0.0 <= float(r["fidelity_phase"]) <= 1.0
        assert 0.0 <= float(r["fidelity_magnitude"]) <= 1.0
    assert (out / cli.RESOLVED_CONFIG).exists()


def test_simulate_is_byte_identical(tmp_path):
    argv = ["simulate", "--target", "6,2", "--gamma-sh", "0.7", "--gamma-in", "0.3", "--rounds", "40"]
    main(argv + ["--out", str(tmp_path / "a")])
    main(argv + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()


def test_csv_uses_lf_and_twelve_digits(tmp_path):
    main(["simulate", "--target", "6,2", "--gamma-sh", "0.7", "--gamma-in", "0.3", "--rounds", "5",
          "--out", str(tmp_path)])
    raw = (tmp_path / "trace.csv").read_bytes()
    assert b"\r" not in raw
    value = raw.decode().splitlines()[1].split(",")[1]
    assert len(value.lstrip("0.").replace(".", "")) <= 12


def test_simulate_table_row_reports_round_three(tmp_path, capsys):
    # the D_6^(3) row lists 3 rounds
    main(["simulate", "--target", "6,3", "--gamma-sh", "0.475", "--gamma-in", "0.243", "--rounds", "10",
          "--out", str(tmp_path)])
    assert "magnitude round 3 " in capsys.readouterr().out


def test_simulate_requires_strengths(tmp_path):
    assert main(["simulate", "--target", "4,2", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_simulate_capacity_exit(tmp_path):
    code = main(["simulate", "--target", "14,5", "--gamma-sh", "0.4", "--gamma-in", "0.2", "--rounds", "2",
                 "--noise", "damping=0.1", "--out", str(tmp_path)])
    assert code == EXIT_CAPACITY


def test_simulate_with_trajectories(tmp_path):
    code = main(["simulate", "--target", "5,2", "--gamma-sh", "2.0", "--gamma-in", "2.0", "--rounds", "6",
                 "--noise", "pmiss=0.2", "--engine", "traj:50", "--out", str(tmp_path)])
    assert code == EXIT_OK
    rows = _rows(tmp_path / "trace.csv")
    assert all(float(r["stderr"]) >= 0 for r in rows)


def test_optimize_rejects_trajectory_engine(tmp_path, fast_cfg):
    assert main(["optimize", "--config", fast_cfg, "--engine", "traj:10", "--out", str(tmp_path)]) == EXIT_CONFIG


def _record(path):
    lines = path.read_text().splitlines()
    assert len(lines) == 1
    return json.loads(lines[0])


def test_optimize_record_is_deterministic(tmp_path, fast_cfg):
    for name, workers in (("a", "1"), ("b", "2")):
        assert main(["optimize", "--config", fast_cfg, "--workers", workers, "--out", str(tmp_path / name)]) == EXIT_OK
    a = _record(tmp_path / "a" / "records.jsonl")
    b = _record(tmp_path / "b" / "records.jsonl")
    a.pop("wall_time")
    b.pop("wall_time")
    assert a == b
    assert a["schema_version"] == cli.SCHEMA_VERSION
    assert len(a["rz_angles"]) == 4
    assert 0.0 <= a["fidelity_phase_aligned"] <= 1.0


def test_optimize_quality_gate(tmp_path, fast_cfg):
    assert main(["optimize", "--config", fast_cfg, "--fidelity-floor", "1.01", "--out", str(tmp_path)]) == EXIT_QUALITY


def test_record_json_round_trip():
    rec = ResultRecord((5, 2), "interleaved", "shuttle", 1.0, 0.5, 7, (0.1, -0.2, 0.3, 0.0, 1.0), 0.01, 0.98,
                       "pmiss=0.1", 1.5, "abc")
    assert ResultRecord.from_json(rec.to_json()) == rec
    bad = json.loads(rec.to_json())
    bad["schema_version"] = 99
    with pytest.raises(ConfigError):
        ResultRecord.from_json(json.dumps(bad))


def test_records_reverify_to_their_fidelity(tmp_path, fast_cfg):
    main(["optimize", "--config", fast_cfg, "--out", str(tmp_path)])
    rec = ResultRecord.from_json((tmp_path / "records.jsonl").read_text())
    (row,) = load_table(tmp_path / "records.jsonl")
    results = verify_row(row, rounds_max=60)
    own = [r for r in results if r.variant == "interleaved" and r.sign == rec.rz_sign]
    assert own[0].fidelity_table_round == pytest.approx(rec.fidelity_phase_aligned, abs=1e-8)
    assert verify_row(row, rounds_max=60) == results


def test_sweep_zero_level_matches_optimize(tmp_path, fast_cfg):
    main(["optimize", "--config", fast_cfg, "--out", str(tmp_path / "opt")])
    assert main(["sweep", "--config", fast_cfg, "--levels", "0", "--out", str(tmp_path / "sw")]) == EXIT_OK
    rows = _rows(tmp_path / "sw" / "sweep.csv")
    assert len(rows) == 1
    rec = _record(tmp_path / "opt" / "records.jsonl")
    assert float(rows[0]["gamma_sh"]) == pytest.approx(rec["gamma_sh"], abs=1e-11)
    assert float(rows[0]["fidelity"]) == pytest.approx(rec["fidelity_phase_aligned"], abs=1e-11)
    assert float(rows[0]["baseline"]) == pytest.approx(rec["fidelity_phase_aligned"], abs=1e-11)
    assert list(rows[0]) == list(SWEEP_COLUMNS) + ["baseline", "baseline_round"]


def test_sweep_reoptimized_beats_frozen(tmp_path, fast_cfg):
    code = main(["sweep", "--config", fast_cfg, "--axis", "pmiss", "--levels", "0,0.2", "--out", str(tmp_path)])
    assert code == EXIT_OK
    rows = _rows(tmp_path / "sweep.csv")
    assert [float(r["q_or_pmiss"]) for r in rows] == [0.0, 0.2]
    for r in rows:
        assert float(r["fidelity"]) >= float(r["baseline"]) - 1e-12
    assert len((tmp_path / "records.jsonl").read_text().splitlines()) == 2


def test_sweep_rejects_out_of_range_levels(tmp_path, fast_cfg):
    assert main(["sweep", "--config", fast_cfg, "--levels", "0,1.5", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_landscape_grid(tmp_path):
    code = main(["landscape", "--target", "4,2", "--rounds-max", "40", "--out", str(tmp_path)])
    assert code == EXIT_OK
    rows = _rows(tmp_path / "landscape.csv")
    assert len(rows) == 256
    losses = [float(r["loss"]) for r in rows]
    assert all(0.0 <= v <= 1.0 for v in losses)
    assert sum(int(r["incumbent_start"]) for r in rows) == 1
    (inc,) = _rows(tmp_path / "incumbent.csv")
    assert min(losses) >= float(inc["loss"])


def test_bundled_table_rows():
    rows = load_table(bundled_table())
    assert len(rows) == 31
    first = rows[0]
    assert (first.n, first.m, first.gamma_sh, first.gamma_in, first.rounds) == (5, 2, 1.624, 0.0, 174)
    assert first.rz == (-0.856, 1.413, -0.884, -0.936, 1.263)
    d84 = next(r for r in rows if (r.n, r.m) == (8, 4))
    assert (d84.gamma_sh, d84.gamma_in, d84.rounds) == (2.736, 3.142, 4)


def test_tampered_table_fails_checksum(tmp_path):
    dst = tmp_path / "table1.csv"
    shutil.copy(bundled_table(), dst)
    shutil.copy(str(bundled_table()) + ".sha256", str(dst) + ".sha256")
    dst.write_text(dst.read_text().replace("1.624", "1.625"))
    with pytest.raises(ConfigError):
        load_table(dst)


@pytest.mark.parametrize(
    "body",
    ["n,m,x\n1,2,3\n", "n,m,gamma_sh,gamma_in,rounds,rz\n5,2,1.6,0,10,0.1 0.2\n",
     "n,m,gamma_sh,gamma_in,rounds,rz\n5,two,1.6,0,10,0 0 0 0 0\n"],
)
def test_malformed_table_exits_2(tmp_path, body):
    path = tmp_path / "t.csv"
    path.write_text(body)
    assert main(["verify", "--table", str(path), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_verify_negative_control_is_flagged_fail():
    row = TableRow(6, 2, 0.0, 0.0, 12, (0.3, -0.1, 0.2, 0.5, -0.4, 0.0))
    results = verify_row(row, rounds_max=20)
    for r in results:
        assert r.fidelity_table_round == pytest.approx(1 / math.comb(6, 2), abs=1e-12)
        assert r.fidelity_own_alignment == pytest.approx(1 / math.comb(6, 2), abs=1e-12)
    assert row_status(results, 0.9)[0] == "fail"


def test_verify_writes_report(tmp_path, capsys):
    assert main(["verify", "--max-n", "6", "--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "verify.csv")
    # three rows with n <= 6, two variants, two signs each
    assert len(rows) == 12
    assert {r["status"] for r in rows} <= {"pass", "warn", "fail"}
    assert "D_6^3" in capsys.readouterr().out


def test_schedule_command(capsys):
    assert main(["schedule", "--target", "4,2"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert len(data) == 2
