import json
import subprocess
import sys

import pytest

from conegen import cli
from conegen import instance_io as io
from conegen.certify import VerifyReport


def _files(d):
    return sorted(p.name for p in d.iterdir())


def test_gen_lo_both_writes_and_verifies(tmp_path, capsys):
    d = tmp_path / "d"
    rc = cli.run(["gen", "lo", "--mode", "both", "--m", "3", "--n", "6", "--seed", "7",
                  "--out", str(d), "--format", "mps"])
    assert rc == 0
    assert _files(d) == ["lo_both_s7_i0000.manifest.json", "lo_both_s7_i0000.mps"]
    out = capsys.readouterr().out
    assert "PASS" in out
    rc = cli.run(["verify", str(d / "lo_both_s7_i0000.manifest.json")])
    assert rc == 0


def test_same_argv_byte_identical(tmp_path):
    args = ["gen", "soco", "--mode", "both", "--m", "2", "--cone-dims", "3,2",
            "--seed", "9"]
    d1, d2 = tmp_path / "a", tmp_path / "b"
    assert cli.run(args + ["--out", str(d1)]) == 0
    assert cli.run(args + ["--out", str(d2)]) == 0
    for name in _files(d1):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_batch_uses_stream_ids(tmp_path):
    d = tmp_path / "d"
    rc = cli.run(["gen", "lo", "--mode", "optimal", "--m", "2", "--n", "5", "--seed", "3",
                  "--batch", "3", "--out", str(d)])
    assert rc == 0
    manifests = sorted(d.glob("*.manifest.json"))
    assert len(manifests) == 3
    seen = set()
    for k, mp in enumerate(manifests):
        ref, cert, _ = io.read_manifest(mp)
        assert ref.stream_id == k
        seen.add(cert.optimal[0].tobytes())
    assert len(seen) == 3  # distinct stream ids give distinct instances


def test_env_var_default_out(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "envout"))
    rc = cli.run(["gen", "lo", "--mode", "interior", "--m", "2", "--n", "4", "--seed", "1"])
    assert rc == 0
    assert (tmp_path / "envout" / "lo_interior_s1_i0000.mps").exists()


def test_config_file_with_flag_override(tmp_path):
    cfg = {"mode": "optimal", "m": 2, "n": 5, "seed": 11, "batch": 1}
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps(cfg))
    d = tmp_path / "d"
    rc = cli.run(["gen", "lo", "--config", str(cfg_path), "--seed", "12", "--out", str(d)])
    assert rc == 0
    ref, _, _ = io.read_manifest(next(iter(d.glob("*.manifest.json"))))
    assert ref.seed == 12  # flag wins over config


def test_format_family_mismatch_is_usage_error(tmp_path):
    rc = cli.run(["gen", "lo", "--mode", "interior", "--m", "2", "--n", "4",
                  "--out", str(tmp_path), "--format", "sdpa"])
    assert rc == 2


def test_maxcomp_requires_conic_family():
    assert cli.run(["gen", "lo", "--mode", "maxcomp", "--m", "2", "--n", "4"]) == 2


def test_unknown_flag_exits_2():
    assert cli.run(["gen", "lo", "--definitely-not-a-flag"]) == 2


def test_missing_required_dims():
    assert cli.run(["gen", "soco", "--mode", "interior", "--m", "2"]) == 2
    assert cli.run(["gen", "sdo", "--mode", "optimal", "--m", "2", "--n", "4"]) == 2


def test_mu_registered_and_restricted(tmp_path):
    d = tmp_path / "d"
    rc = cli.run(["gen", "lo", "--mode", "interior", "--m", "2", "--n", "4",
                  "--mu", "1.0", "--seed", "2", "--out", str(d)])
    assert rc == 0
    assert cli.run(["gen", "lo", "--mode", "optimal", "--m", "2", "--n", "4", "--mu", "1.0"]) == 2


def test_sdo_bempty_route(tmp_path):
    d = tmp_path / "d"
    rc = cli.run(["gen", "sdo", "--mode", "maxcomp", "--nB", "0", "--nN", "3",
                  "--m", "2", "--n", "5", "--seed", "4", "--out", str(d)])
    assert rc == 0
    ref, cert, _ = io.read_manifest(next(iter(d.glob("*.manifest.json"))))
    assert ref.dimensions == {"m": 2, "n": 5}
    inst = io.load_instance(ref)
    assert not inst.b.any()


def test_sdo_structure_flag(tmp_path):
    d = tmp_path / "d"
    rc = cli.run(["gen", "sdo", "--mode", "both", "--structure", "eig", "--nB", "1",
                  "--nN", "2", "--m", "2", "--n", "4", "--seed", "5", "--out", str(d)])
    assert rc == 0
    _, cert, _ = io.read_manifest(next(iter(d.glob("*.manifest.json"))))
    assert cert.basis is not None


def test_verify_tampered_instance_fails(tmp_path):
    d = tmp_path / "d"
    cli.run(["gen", "lo", "--mode", "both", "--m", "2", "--n", "5", "--seed", "6", "--out", str(d)])
    mps = next(iter(d.glob("*.mps")))
    mps.write_text(mps.read_text().replace("1", "2", 1))
    rc = cli.run(["verify", str(d / "lo_both_s6_i0000.manifest.json")])
    assert rc == 1


def test_failed_internal_verification_writes_nothing(tmp_path, monkeypatch):
    def bad_verifier(inst, cert, tol=None):
        rep = VerifyReport()
        rep.checks["primal_residual"] = False
        return rep.finalize()

    monkeypatch.setitem(cli._VERIFIERS, "lo", bad_verifier)
    d = tmp_path / "d"
    rc = cli.run(["gen", "lo", "--mode", "interior", "--m", "2", "--n", "4", "--out", str(d)])
    assert rc == 1
    assert not d.exists() or _files(d) == []


def test_report_outputs(tmp_path):
    d = tmp_path / "d"
    cli.run(["gen", "soco", "--mode", "optimal", "--m", "2", "--cone-dims", "3,2",
             "--seed", "8", "--batch", "2", "--out", str(d)])
    rep_dir = tmp_path / "rep"
    rc = cli.run(["report", str(d), "--out", str(rep_dir)])
    assert rc == 0
    assert (rep_dir / "report.csv").exists()
    assert (rep_dir / "residuals.png").exists()
    assert (rep_dir / "margins.png").exists()
    header, *rows = (rep_dir / "report.csv").read_text().splitlines()
    assert header.startswith("manifest,family,mode")
    assert len(rows) == 2 and all(",True," in r for r in rows)


def test_report_empty_input(tmp_path):
    assert cli.run(["report", str(tmp_path), "--out", str(tmp_path / "r")]) == 1


def test_console_script_subprocess(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "conegen.cli", "gen", "lo", "--mode", "optimal",
         "--m", "2", "--n", "5", "--seed", "1", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "PASS" in proc.stdout


def test_lo_partition_flag(tmp_path):
    d = tmp_path / "d"
    rc = cli.run(["gen", "lo", "--mode", "optimal", "--m", "2", "--n", "5",
                  "--partition", "0,3", "--seed", "2", "--out", str(d)])
    assert rc == 0
    _, cert, _ = io.read_manifest(next(iter(d.glob("*.manifest.json"))))
    assert cert.partition[0].tolist() == [0, 3]


def test_soco_partition_flag(tmp_path):
    d = tmp_path / "d"
    rc = cli.run(["gen", "soco", "--mode", "optimal", "--m", "2", "--cone-dims", "3,2,2",
                  "--partition", "B,N,R", "--seed", "2", "--out", str(d)])
    assert rc == 0
    _, cert, _ = io.read_manifest(next(iter(d.glob("*.manifest.json"))))
    assert cert.partition == ("B", "N", "R")


def test_sdo_diagonal_interior(tmp_path):
    d = tmp_path / "d"
    rc = cli.run(["gen", "sdo", "--mode", "interior", "--m", "2", "--n", "4",
                  "--mu", "1.0", "--diagonal", "--seed", "3", "--out", str(d)])
    assert rc == 0
    _, cert, _ = io.read_manifest(next(iter(d.glob("*.manifest.json"))))
    X0 = cert.interior[0]
    import numpy as np
    assert np.array_equal(X0, np.diag(np.diag(X0)))
