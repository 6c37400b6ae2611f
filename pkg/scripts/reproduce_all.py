"""Run every report and write the JSON and CSV artifacts to one directory.

    python scripts/reproduce_all.py [--config CONFIG.json] [--out DIR]

Each command's JSON report goes to ``DIR/<name>.json``. Exit status is
the largest status of any command, so a single failed check gives 1.
"""

import argparse
import contextlib
import io
import json
import sys
from pathlib import Path

from nlbox.cli import main as nlbox_main
from nlbox.config import ReproConfig


def jobs(cfg: ReproConfig, out: Path):
    yield "inputs", ["inputs", "--n", str(cfg.n), "--out", str(out / f"inputs_n{cfg.n}.txt")]
    yield "partition", ["partition", "--n", str(cfg.n), "--verify", "--out", str(out / f"partition_n{cfg.n}.txt")]
    yield "fixtures", ["fixtures", "--verify"]
    yield "tradeoff", ["tradeoff", "--steps", str(cfg.tradeoff_steps), "--out", str(out / "tradeoff.csv")]
    yield "tsirelson", ["tsirelson"]
    yield "variance", ["variance", "--n", "6"]
    yield "uncertainty", ["uncertainty", "--n", "6"]
    yield "chsh", ["chsh", "--p", "1"]
    yield "tripartite_I", ["tripartite", "--parameter", "I"]
    j = ["tripartite", "--parameter", "J"]
    if cfg.j_budget is not None:
        j += ["--budget", str(cfg.j_budget)]
    yield "tripartite_J", j
    for i, p in enumerate(cfg.mc.ps):
        yield f"mc_{i}", ["mc", "--p", p, "--trials", str(cfg.mc.trials), "--seed", str(cfg.mc.seed + i)]
    yield "invariant", ["invariant", "--grid", str(cfg.invariant_grid), "--out", str(out / "invariant_scan.csv")]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--out")
    args = ap.parse_args(argv)
    cfg = ReproConfig.load(args.config) if args.config else ReproConfig()
    out = Path(args.out or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(cfg.as_dict(), indent=2, sort_keys=True) + "\n")
    worst = 0
    for name, cmd in jobs(cfg, out):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = nlbox_main(["--json", *cmd])
        (out / f"{name}.json").write_text(buf.getvalue())
        print(f"{'ok  ' if code == 0 else f'exit {code}'} {name}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
