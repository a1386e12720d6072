"""Run `jetlc verify` on a config and print per-suite timings.

    python3 scripts/run_suite.py [configs/default.json] [--dim N] [--seed S]
"""
import argparse
import logging
import sys
import time
from pathlib import Path

from jetlc import cli

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config", nargs="?", default=str(ROOT / "configs" / "default.json"))
    ap.add_argument("--dim", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    a = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    argv = ["verify", "--config", a.config]
    for flag in ("dim", "seed", "out"):
        if getattr(a, flag) is not None:
            argv += [f"--{flag}", str(getattr(a, flag))]
    t0 = time.perf_counter()
    code = cli.main(argv)
    print(f"wall time {time.perf_counter() - t0:.1f}s, exit {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
