import json

import pytest

from twistpoints.cache import dumps, read_cache
from twistpoints.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


FAST = ("--x-bound", 10000, "--X-bound", 100)


def test_points(capsys):
    code, out, _ = run(capsys, "points", "--d", 5)
    assert code == 0 and "(-4, 6)" in out and "(45, 300)" in out


def test_invalid_inputs(capsys):
    assert run(capsys, "points", "--d", 12)[0] == 2
    assert run(capsys, "quartic", "--d", 5, "--x", 1, "--y", 1)[0] == 2
    code, _, err = run(capsys, "descend", "--d", 5, "--x", 5, "--y", 0)
    assert code == 2 and "torsion" in err
    assert run(capsys, "scan", "--nmax", 0, "--out", "unused")[0] == 2


def test_quartic(capsys):
    code, out, _ = run(capsys, "quartic", "--d", 5, "--x", -4, "--y", 6)
    assert code == 0
    assert "a = 1, H = -4, R = 12" in out and "syzygy holds: True" in out


def test_descend(capsys):
    code, out, _ = run(capsys, "descend", "--d", 5, "--x", -4, "--y", 6, "--M", 5)
    assert code == 0
    assert "F = 5*X^4 + 44*X^3*Y + 150*X^2*Y^2 + 236*X*Y^3 + 145*Y^4" in out
    code, out, _ = run(capsys, "descend", "--d", 5, "--x", 45, "--y", 300)
    assert code == 0 and "quadruple = (1,10,2,1) FOUR_D" in out


def test_descend_bad_M(capsys):
    code, _, err = run(capsys, "descend", "--d", 5, "--x", -4, "--y", 6, "--M", 3)
    assert code == 1 and "stage psi" in err


def test_selmer(capsys):
    code, out, _ = run(capsys, "selmer", "--d", 5)
    assert code == 0 and "8 locally solvable quadruples" in out


def test_scan_resume_and_corruption(tmp_path, capsys):
    out = tmp_path / "scan"
    code, first, _ = run(capsys, "scan", "--nmax", 100, "--out", out, *FAST)
    assert code == 0 and "sum of #E*_D(Z) = 84" in first and "0 cached" in first
    summary = json.loads((out / "summary.json").read_text())
    assert summary["total_points"] == "84" and summary["schema"] == 1
    before = (out / "cache.jsonl").read_text()

    code, again, _ = run(capsys, "scan", "--nmax", 100, "--out", out, *FAST)
    assert code == 0 and "0 computed" in again
    assert (out / "cache.jsonl").read_text() == before

    with open(out / "cache.jsonl", "a") as fh:
        fh.write("{not json\n")
    code, _, err = run(capsys, "scan", "--nmax", 100, "--out", out, *FAST)
    assert code == 3 and "corrupt cache line" in err
    assert (out / "cache.jsonl").read_text() == before
    assert run(capsys, "scan", "--nmax", 100, "--out", out, *FAST)[0] == 0


def test_scan_recomputes_on_config_change(tmp_path, capsys):
    out = tmp_path / "scan"
    run(capsys, "scan", "--nmax", 30, "--out", out, *FAST)
    code, text, _ = run(capsys, "scan", "--nmax", 30, "--out", out, *FAST, "--eps", 0.2)
    assert code == 0 and "0 cached" in text
    recs = read_cache(out / "cache.jsonl").records
    assert all(r["config"]["eps"] == 0.2 for r in recs.values())


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "scan.ini"
    cfg.write_text("[scan]\nx_bound = 1e4\nX_bound = 100\neps = 0.2\n")
    out = tmp_path / "scan"
    assert run(capsys, "scan", "--nmax", 30, "--out", out, "--config", cfg)[0] == 0
    conf = json.loads((out / "summary.json").read_text())["config"]
    assert conf["x_bound"] == 10000 and conf["X_bound"] == 100 and conf["eps"] == 0.2
    bad = tmp_path / "bad.ini"
    bad.write_text("[scan]\nwidth = 3\n")
    assert run(capsys, "scan", "--nmax", 30, "--out", out, "--config", bad)[0] == 2
    assert run(capsys, "scan", "--nmax", 30, "--out", out, "--eps", 0.7)[0] == 2


def test_merge(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "scan", "--nmax", 30, "--out", a, *FAST)
    run(capsys, "scan", "--nmax", 30, "--out", b, *FAST)
    lines = (a / "cache.jsonl").read_text().splitlines()
    (a / "cache.jsonl").write_text("\n".join(lines[::2]) + "\n")
    (b / "cache.jsonl").write_text("\n".join(lines[1::2]) + "\n")
    merged = tmp_path / "merged.jsonl"
    code, out, _ = run(capsys, "merge", "--out", merged, a / "cache.jsonl", b / "cache.jsonl")
    assert code == 0 and merged.read_text().splitlines() == lines

    rec = json.loads(lines[0])
    rec["points"] = [{"bogus": 1}]
    (b / "cache.jsonl").write_text(dumps(rec) + "\n")
    assert run(capsys, "merge", "--out", merged, a / "cache.jsonl", b / "cache.jsonl")[0] == 1


def test_sharded_scan_matches_direct(tmp_path, capsys):
    direct = tmp_path / "direct"
    run(capsys, "scan", "--nmax", 60, "--out", direct, *FAST)
    shards = []
    for k in range(3):
        d = tmp_path / f"shard{k}"
        code, text, _ = run(capsys, "scan", "--nmax", 60, "--out", d, "--shard", f"{k}/3", *FAST)
        assert code == 0 and f"shard {k}/3" in text and not (d / "summary.json").exists()
        shards.append(d / "cache.jsonl")
    final = tmp_path / "final"
    final.mkdir()
    assert run(capsys, "merge", "--out", final / "cache.jsonl", *shards)[0] == 0
    code, text, _ = run(capsys, "scan", "--nmax", 60, "--out", final, *FAST)
    assert code == 0 and "0 computed" in text
    assert (final / "summary.json").read_text() == (direct / "summary.json").read_text()
    assert (final / "cache.jsonl").read_text() == (direct / "cache.jsonl").read_text()


def test_bad_shard(capsys):
    with pytest.raises(SystemExit):
        main(["scan", "--nmax", "30", "--shard", "3/3"])
