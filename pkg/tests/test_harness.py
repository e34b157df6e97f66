import json
import time

import pytest

from radproj.constructions import FamilySpec
from radproj.geom import space
from radproj.harness import cli
from radproj.harness.config import (
    ConfigError,
    SweepConfig,
    apply_settings,
    parse_family,
    read_config_file,
    smoke_config,
    validate,
)
from radproj.harness.report import reports_csv, reports_json, strip_timing
from radproj.harness.runner import (
    cell_seed,
    default_hunt_config,
    load_witnesses,
    recheck_witness,
    run_hunt,
    run_stats,
    run_verify,
)
from radproj.radial import PointSet
from radproj.theorems import Witness, conjecture_count


def test_smoke_run_is_fast_and_clean():
    t0 = time.perf_counter()
    result = run_verify(smoke_config())
    assert time.perf_counter() - t0 < 10
    assert result.reports and result.exit_code == 0
    assert {r.theorem for r in result.reports} == {"line_sum_identity", "line_variance"}


def test_empty_selection():
    cfg = smoke_config()
    cfg.theorems = []
    result = run_verify(cfg)
    assert result.reports == [] and result.exit_code == 0


def test_over_cap_rejected_naming_cell():
    cfg = SweepConfig(fields=[(1031, 1)], dims=[2])
    with pytest.raises(ConfigError, match="F_1031"):
        run_verify(cfg)


def test_preflight_rejects_bad_family_cell():
    cfg = SweepConfig(fields=[(5, 1)], families=[FamilySpec("subplane")])
    with pytest.raises(ConfigError, match="F_5.*subplane"):
        validate(cfg)


@pytest.mark.parametrize(
    "change",
    [{"theorems": "bogus"}, {"M": "0"}, {"C": "1"}, {"format": "xml"}, {"jobs": "0"}],
)
def test_preflight_rejects_bad_settings(change):
    cfg = apply_settings(SweepConfig(), change)
    with pytest.raises(ConfigError):
        validate(cfg)


def test_unknown_key():
    with pytest.raises(ConfigError):
        apply_settings(SweepConfig(), {"colour": "red"})


def test_cell_seed_is_stable():
    assert cell_seed(0, 3, 1, 2, "random", 0) == cell_seed(0, 3, 1, 2, "random", 0)
    assert cell_seed(0, 3, 1, 2, "random", 0) != cell_seed(0, 3, 1, 2, "random", 1)
    assert cell_seed(0, 3, 1, 2, "random", 0) != cell_seed(1, 3, 1, 2, "random", 0)


def _full_cfg(jobs):
    return SweepConfig(
        fields=[(3, 1), (5, 1), (2, 2)],
        dims=[2],
        families=[parse_family("random"), parse_family("concurrent_lines(m=2)")],
        theorems=["identity", "et", "large_e_general", "few_directions", "four_m_squared",
                  "unique_bad_point", "on_line", "off_line"],
        M=[1, 2],
        C=[2],
        trials=6,
        seed=42,
        jobs=jobs,
    )


def test_reproducible_across_parallelism():
    serial = run_verify(_full_cfg(1))
    parallel = run_verify(_full_cfg(2))
    a = json.dumps(strip_timing(json.loads(reports_json(serial.reports, serial.manifest))), sort_keys=True)
    b = json.dumps(strip_timing(json.loads(reports_json(parallel.reports, parallel.manifest))), sort_keys=True)
    assert a == b
    assert serial.manifest["cells"] == parallel.manifest["cells"]


def test_exit_code_tracks_failures():
    cfg = SweepConfig(fields=[(3, 1)], families=[parse_family("collinear(n=3)")], theorems=["et"], M=[1], trials=1)
    result = run_verify(cfg)
    assert any(r.theorem == "pair_upper_large_e" and r.failed for r in result.reports)
    assert result.exit_code == 1


def test_csv_has_digest_header():
    result = run_verify(smoke_config())
    text = reports_csv(result.reports, result.manifest)
    first, header = text.splitlines()[:2]
    assert first == f"# config_digest={smoke_config().digest()}"
    assert header.startswith("theorem,q,d,e,family,sizeE")


def test_digest_ignores_output_settings():
    a, b = smoke_config(), smoke_config()
    b.jobs, b.out, b.format = 4, "x.json", "csv"
    assert a.digest() == b.digest()
    b.seed = 1
    assert a.digest() != b.digest()


def test_family_parsing():
    fam = parse_family("random(n=5:20, cap=3)")
    assert fam.kind == "random" and fam.params == {"n": [5, 20], "cap": 3}
    assert parse_family("subspace(k=2)").params == {"k": 2}
    with pytest.raises(ConfigError):
        parse_family("random(n)")
    with pytest.raises(ConfigError):
        parse_family("lattice")


def test_config_file_formats(tmp_path):
    flat = tmp_path / "sweep.cfg"
    flat.write_text("fields = 3, 5, 2^2  # grid\nfamilies = random(n=2:6); subspace(k=1)\ntrials = 3\nC = 3/2, 2\n")
    cfg = apply_settings(SweepConfig(), read_config_file(flat))
    assert cfg.fields == [(3, 1), (5, 1), (2, 2)]
    assert [f.label() for f in cfg.families] == ["random(n=2:6)", "subspace(k=1)"]
    assert cfg.trials == 3 and [str(c) for c in cfg.C] == ["3/2", "2"]
    js = tmp_path / "sweep.json"
    js.write_text(json.dumps({"fields": [[7, 1]], "dims": [2, 3], "M": [1, 3]}))
    cfg = apply_settings(SweepConfig(), read_config_file(js))
    assert cfg.fields == [(7, 1)] and cfg.dims == [2, 3] and cfg.M == [1, 3]
    bad = tmp_path / "bad.cfg"
    bad.write_text("trials\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)


# -- hunt --


def _small_hunt():
    cfg = default_hunt_config()
    cfg.fields, cfg.trials = [(3, 1), (5, 1)], 4
    return cfg


def test_hunt_resumes_from_checkpoint(tmp_path):
    out = tmp_path / "w.jsonl"
    first = run_hunt(_small_hunt(), out)
    assert first["cells_run"] > 0 and first["witnesses"] == 0
    again = run_hunt(_small_hunt(), out)
    assert again["cells_run"] == 0 and again["cells_resumed"] == first["cells_run"]
    # drop the last half of the log: only those cells rerun
    ckpt = tmp_path / "w.jsonl.ckpt"
    lines = ckpt.read_text().splitlines()
    ckpt.write_text("\n".join(lines[: len(lines) // 2]) + "\n")
    partial = run_hunt(_small_hunt(), out)
    assert partial["cells_run"] == len(lines) - len(lines) // 2


def test_witness_round_trip(tmp_path):
    sp = space(3, 1, 2)
    E = PointSet(sp, [0, 1, 4])
    w = Witness(sp, E, 1, conjecture_count(E), [0] * sp.n_points, "random", 7)
    path = tmp_path / "w.jsonl"
    path.write_text(json.dumps(w.to_json()) + "\n")
    (loaded,) = load_witnesses(path)
    assert PointSet.from_points(sp, loaded["points"]) == E
    assert recheck_witness(loaded) == (conjecture_count(E) > 10 * 3)


# -- stats --


def test_stats_row():
    cfg = SweepConfig(fields=[(13, 1)], families=[parse_family("random(n=40)")], M=[5], trials=1)
    (row,) = run_stats(cfg)
    assert row["sizeE"] == 40 and row["M"] == 5
    assert all(v != "" and v is not None for v in row.values())
    assert run_stats(cfg) == [row]


def test_stats_prime_only():
    cfg = SweepConfig(fields=[(3, 2)], families=[parse_family("product(m=3,n=3)")], trials=1)
    with pytest.raises(ConfigError, match="prime"):
        run_stats(cfg)
    cfg = SweepConfig(fields=[(3, 1)], dims=[3], trials=1)
    with pytest.raises(ConfigError):
        run_stats(cfg)


# -- command line --


def test_cli_verify(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["verify", "--smoke", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    manifest = json.loads((tmp_path / "r.json.manifest.json").read_text())
    assert doc["config_digest"] == manifest["config_digest"]
    assert len(manifest["cells"]) == 2 * 3 * 25


def test_cli_verify_failure_exit(tmp_path):
    code = cli.main(["verify", "--p", "3", "--d", "2", "--family", "collinear(n=3)", "--theorem", "et",
                     "--M", "1", "--trials", "1", "--out", str(tmp_path / "r.csv"), "--format", "csv"])
    assert code == 1
    assert (tmp_path / "r.csv").read_text().startswith("# config_digest=")


def test_cli_rejects_over_cap(capsys):
    assert cli.main(["verify", "--p", "1031", "--d", "2"]) == 2
    assert "F_1031^1, d=2" in capsys.readouterr().err


def test_cli_construct_text(tmp_path):
    out = tmp_path / "E.txt"
    assert cli.main(["construct", "--p", "3", "--e", "2", "--d", "2", "--family", "subplane", "--out", str(out)]) == 0
    sp = space(3, 2, 2)
    from radproj.constructions import subfield_subplane

    assert PointSet.from_text(sp, out.read_text()) == subfield_subplane(3)


def test_cli_construct_json(tmp_path):
    out = tmp_path / "E.json"
    assert cli.main(["construct", "--p", "7", "--d", "2", "--family", "random(cap=3)", "--size", "12",
                     "--seed", "1", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["field"] == {"field": "7^1", "modulus": [0, 1]} and len(doc["points"]) == 12


def test_cli_construct_needs_single_cell():
    assert cli.main(["construct", "--p", "3,5", "--d", "2", "--family", "random"]) == 2


def test_cli_stats_and_hunt(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert cli.main(["stats", "--p", "13", "--family", "random(n=40)", "--M", "5", "--trials", "1",
                     "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 3
    w = tmp_path / "w.jsonl"
    assert cli.main(["hunt", "--p", "3", "--d", "2,3", "--trials", "3", "--out", str(w)]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["witnesses"] == 0


def test_cli_config_file(tmp_path):
    cfgfile = tmp_path / "c.cfg"
    cfgfile.write_text("fields = 3\ntheorems = identity\ntrials = 2\n")
    out = tmp_path / "r.json"
    assert cli.main(["verify", "--config", str(cfgfile), "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["reports"]) == 4
