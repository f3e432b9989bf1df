"""Regenerate the bundled 40-variable ablation suite under data/suite40."""

import argparse
from pathlib import Path

from maxsat_bandit.harness import gen_suite40

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "data" / "suite40")
    args = ap.parse_args()
    paths = gen_suite40(args.out)
    print(f"wrote {len(paths)} instances to {args.out}")


if __name__ == "__main__":
    main()
