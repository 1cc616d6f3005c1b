import filecmp
import json

from elqadash.cli import main


def test_gen_reports_json_and_is_reproducible(tmp_path, capsys):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["gen", "--seed", "0", "--out", str(out_a), "--circuits", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["counts"]["measurements"] == 12
    assert main(["gen", "--seed", "0", "--out", str(out_b), "--circuits", "3"]) == 0
    for name in ("circuits.csv", "campaigns.csv", "measurements.csv", "samples.csv"):
        assert filecmp.cmp(out_a / name, out_b / name, shallow=False), name


def test_features_byte_stable(tmp_path):
    data = tmp_path / "data"
    main(["gen", "--seed", "1", "--out", str(data), "--circuits", "2", "--missing-rate", "0.05"])
    f1 = tmp_path / "f1.csv"
    f2 = tmp_path / "f2.csv"
    assert main(["features", "--data", str(data), "--out", str(f1)]) == 0
    assert main(["features", "--data", str(data), "--out", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()
    lines = f1.read_text().splitlines()
    assert lines[0] == (
        "measurement_id,mean,min,max,skewness,kurtosis_excess,slope,slope_stderr,capacitance_F"
    )
    assert len(lines) == 1 + 8  # header + one row per measurement


def test_cluster_kmeans_byte_stable(tmp_path):
    data = tmp_path / "data"
    main(["gen", "--seed", "2", "--out", str(data), "--circuits", "4", "--noise-rate", "0.25"])
    feats = tmp_path / "features.csv"
    main(["features", "--data", str(data), "--out", str(feats)])
    l1 = tmp_path / "l1.csv"
    l2 = tmp_path / "l2.csv"
    args = ["cluster", "--features", str(feats), "--method", "kmeans", "--k", "2", "--seed", "7"]
    assert main(args + ["--out", str(l1)]) == 0
    assert main(args + ["--out", str(l2)]) == 0
    assert l1.read_bytes() == l2.read_bytes()
    rows = l1.read_text().splitlines()
    assert rows[0] == "measurement_id,label"
    assert len(rows) == 1 + 16
    labels = {int(r.split(",")[1]) for r in rows[1:]}
    assert labels <= {0, 1}


def test_cluster_dbscan(tmp_path):
    data = tmp_path / "data"
    main(["gen", "--seed", "3", "--out", str(data), "--circuits", "3"])
    feats = tmp_path / "features.csv"
    main(["features", "--data", str(data), "--out", str(feats)])
    out = tmp_path / "labels.csv"
    assert main([
        "cluster", "--features", str(feats), "--method", "dbscan",
        "--eps", "1.5", "--min-pts", "2", "--out", str(out),
    ]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 1 + 12


def test_cli_error_paths(tmp_path, capsys):
    # ingest failure surfaces as a named error and exit code 2
    assert main(["features", "--data", str(tmp_path), "--out", "-"]) == 2
    err = capsys.readouterr().err
    assert "MissingFile" in err


def test_gen_invalid_config(tmp_path, capsys):
    assert main(["gen", "--seed", "0", "--out", str(tmp_path / "x"), "--missing-rate", "2.0"]) == 2
    assert "InvalidConfig" in capsys.readouterr().err
