"""Run a scan as parallel shards, merge them, and write the summary.

    python scripts/run_scan.py --nmax 10000 --out runs/n10k --jobs 4

Extra flags after ``--`` go to every ``twistpoints scan`` call.
"""
import argparse
import subprocess
import sys
from pathlib import Path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nmax", type=int, required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--jobs", type=int, default=2)
    ap.add_argument("extra", nargs=argparse.REMAINDER)
    args = ap.parse_args(argv)
    extra = [a for a in args.extra if a != "--"]
    out = Path(args.out)
    base = [sys.executable, "-m", "twistpoints", "scan", "--nmax", str(args.nmax)]

    procs = []
    for k in range(args.jobs):
        cmd = base + ["--out", str(out / f"shard{k}"), "--shard", f"{k}/{args.jobs}"] + extra
        procs.append(subprocess.Popen(cmd))
    codes = [p.wait() for p in procs]
    if any(c not in (0, 3) for c in codes):
        print(f"shard exit codes {codes}", file=sys.stderr)
        return 1

    out.mkdir(parents=True, exist_ok=True)
    shards = [str(out / f"shard{k}" / "cache.jsonl") for k in range(args.jobs)]
    merge = [sys.executable, "-m", "twistpoints", "merge", "--out", str(out / "cache.jsonl")] + shards
    if subprocess.call(merge) not in (0, 3):
        return 1
    # every record is cached now, so this only writes summary.json and table.csv
    return subprocess.call(base + ["--out", str(out)] + extra)


if __name__ == "__main__":
    sys.exit(main())
