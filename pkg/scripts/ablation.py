"""Ablation sweep over the bundled suite: default vs sample1 / nodelay / nobinary."""

import argparse
import json
from pathlib import Path

from maxsat_bandit.harness import family_reports, format_table, run_suite

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=Path, default=ROOT / "data" / "suite40")
    ap.add_argument("--variants", default="default,sample1,nodelay,nobinary")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cutoff", type=float, default=5.0)
    ap.add_argument("--max-steps", type=int, default=None)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "ablation")
    args = ap.parse_args()

    variants = args.variants.split(",")
    res = run_suite(
        args.instances, variants, [args.seed], cutoff=args.cutoff,
        jobs=args.jobs, max_steps=args.max_steps, out_dir=args.out,
    )
    reports = family_reports(res.records) + [res.report]
    table = format_table(reports)
    (args.out / "ablation.txt").write_text(table + "\n")
    (args.out / "ablation.json").write_text(json.dumps([r.to_dict() for r in reports], indent=2))
    print(table)
    mc = res.report.mean_cost
    if "default" in mc and "sample1" in mc and mc["default"] > mc["sample1"]:
        print("warning: default mean cost exceeds sample1 on this run")


if __name__ == "__main__":
    main()
