"""Run every config under configs/ and print one summary row per run.

    python3 scripts/run_all_configs.py [--out runs] [--only PATTERN]

Reports land in ``<out>/<config stem>/``.  The exit status is the worst CLI
exit code seen; the running-minimum Lipschitz config exits 2 by design.
"""
import argparse
import contextlib
import io
import json
import time
from pathlib import Path

from fpfree.cli import main

ROOT = Path(__file__).resolve().parents[1]


def run(cfg: Path, out: Path) -> tuple[int, float, str]:
    t0 = time.perf_counter()
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["run", str(cfg), "--out", str(out)])
    elapsed = time.perf_counter() - t0
    failed = [ln for ln in buf.getvalue().splitlines() if ln.startswith("FAIL")]
    return code, elapsed, failed[0] if failed else ""


def cli():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(ROOT / "runs"))
    ap.add_argument("--only", default="*", help="glob over config stems")
    args = ap.parse_args()
    rows = []
    for cfg in sorted((ROOT / "configs").glob(f"{args.only}.yaml")):
        code, elapsed, failed = run(cfg, Path(args.out) / cfg.stem)
        rows.append({"config": cfg.stem, "exit": code, "seconds": round(elapsed, 2), "first_fail": failed})
        print(f"{cfg.stem:36s} exit {code}  {elapsed:7.1f}s  {failed}")
    Path(args.out).mkdir(parents=True, exist_ok=True)
    (Path(args.out) / "summary.json").write_text(json.dumps(rows, indent=2) + "\n")
    return max((r["exit"] for r in rows), default=0)


if __name__ == "__main__":
    raise SystemExit(cli())
