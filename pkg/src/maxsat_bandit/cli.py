"""Command-line entry points: the solver and the benchmark harness."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .formula import INFEASIBLE, WCNFError, load_wcnf
from .harness import (
    InstanceSpec,
    format_table,
    gen_instances,
    read_records,
    run_suite,
    score_records,
)
from .search import VARIANTS, SolveConfig, solve


def _range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    return int(lo), int(hi or lo)


def solver_main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="maxsat-bandit",
        description="Bandit-guided local search for (weighted) partial MaxSAT",
    )
    ap.add_argument("instance", help="WCNF file (classic or modern dialect, optionally gzipped)")
    ap.add_argument("--cutoff", type=float, default=300.0, help="wall-clock seconds")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, default=15, help="BMS samples")
    ap.add_argument("--d", type=int, default=20, help="reward delay window")
    ap.add_argument("--gamma", type=float, default=0.9, help="reward discount")
    ap.add_argument("--armnum", type=int, default=20, help="sampled arms per pull")
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0, help="exploration bias")
    ap.add_argument("--sp", type=float, default=SolveConfig.sp, help="smoothing probability")
    ap.add_argument("--soft-cap", type=int, default=SolveConfig.soft_cap)
    ap.add_argument("--variant", choices=VARIANTS, default="default")
    ap.add_argument("--max-steps", type=int, default=None, help="flip budget; overrides --cutoff")
    ap.add_argument("--json", dest="json_path", default=None, help="write the result as JSON")
    args = ap.parse_args(argv)

    try:
        f = load_wcnf(args.instance)
    except (WCNFError, OSError) as e:
        print(f"c error: {e}", file=sys.stderr)
        return 2
    cfg = SolveConfig.for_variant(
        args.variant,
        k=args.k,
        d=args.d,
        gamma=args.gamma,
        arm_num=args.armnum,
        lam=args.lam,
        cutoff=args.cutoff,
        seed=args.seed,
        max_steps=args.max_steps,
        sp=args.sp,
        soft_cap=args.soft_cap,
    )
    print(f"c vars {f.num_vars} hard {f.num_hard} soft {f.num_soft}", flush=True)
    res = solve(f, cfg, on_improve=lambda imp: print(f"o {imp.cost}", flush=True))

    if res.best_cost is INFEASIBLE:
        print("s UNKNOWN")
    else:
        print("s OPTIMUM FOUND" if res.best_cost == 0 else "s SATISFIABLE")
        print("v " + "".join("1" if b else "0" for b in res.best_assignment))
    print(f"c steps {res.steps} local_optima {res.local_optima_count} elapsed {res.elapsed:.3f}")

    if args.json_path:
        out = {
            "instance": args.instance,
            "status": res.status,
            "best_cost": None if res.best_cost is INFEASIBLE else res.best_cost,
            "model": None
            if res.best_assignment is None
            else "".join("1" if b else "0" for b in res.best_assignment),
            "time_to_best": res.time_to_best,
            "steps": res.steps,
            "local_optima_count": res.local_optima_count,
            "improvement_trace": [list(t) for t in res.improvement_trace],
            "config": cfg.__dict__,
        }
        Path(args.json_path).write_text(json.dumps(out, indent=2) + "\n")
    return 0


def _cmd_run(args) -> int:
    bks = json.loads(Path(args.bks).read_text()) if args.bks else None
    res = run_suite(
        args.instances,
        variants=args.variants.split(","),
        seeds=[int(s) for s in args.seeds.split(",")],
        cutoff=args.cutoff,
        jobs=args.jobs,
        max_steps=args.max_steps,
        out_dir=args.out,
        bks=bks,
        keep_models=args.keep_models,
    )
    if res.report is not None:
        sys.stdout.write(res.report.table())
    print(f"# {len(res.records)} runs, {len(res.errors)} unreadable instances; results in {args.out}")
    return 0


def _cmd_score(args) -> int:
    records = read_records(args.records)
    bks = json.loads(Path(args.bks).read_text()) if args.bks else None
    rep = score_records(records, bks, benchmark=args.benchmark)
    if args.out:
        Path(args.out).write_text(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n")
    sys.stdout.write(format_table([rep]))
    return 0


def _cmd_gen(args) -> int:
    lo_len, hi_len = _range(args.len)
    lo_w, hi_w = _range(args.weights)
    spec = InstanceSpec(
        num_vars=args.vars,
        num_hard=args.hard,
        num_soft=args.soft,
        min_len=lo_len,
        max_len=hi_len,
        min_weight=lo_w,
        max_weight=hi_w,
        planted=args.planted,
    )
    paths = gen_instances(spec, args.seed, args.count, args.out, prefix=args.prefix)
    print(f"wrote {len(paths)} instances to {args.out}")
    return 0


def harness_main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="maxsat-bandit-bench", description="Benchmark harness")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="solve a directory of instances with several variants")
    run.add_argument("--instances", required=True)
    run.add_argument("--variants", default="default", help="comma-separated, from " + ",".join(VARIANTS))
    run.add_argument("--seeds", default="0", help="comma-separated")
    run.add_argument("--cutoff", type=float, default=300.0)
    run.add_argument("--max-steps", type=int, default=None)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--bks", default=None, help="JSON sidecar of best-known costs")
    run.add_argument("--keep-models", action="store_true")
    run.set_defaults(fn=_cmd_run)

    score = sub.add_parser("score", help="score a records.jsonl file")
    score.add_argument("--records", required=True)
    score.add_argument("--bks", default=None)
    score.add_argument("--benchmark", default="suite")
    score.add_argument("--out", default=None, help="write the report JSON here")
    score.set_defaults(fn=_cmd_score)

    gen = sub.add_parser("gen", help="generate random WCNF instances")
    gen.add_argument("--out", required=True)
    gen.add_argument("--count", type=int, default=10)
    gen.add_argument("--vars", type=int, required=True)
    gen.add_argument("--hard", type=int, required=True)
    gen.add_argument("--soft", type=int, required=True)
    gen.add_argument("--len", default="3", help="clause length or range, e.g. 2-4")
    gen.add_argument("--weights", default="1", help="soft weight or range, e.g. 1-10")
    gen.add_argument("--planted", action=argparse.BooleanOptionalAction, default=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--prefix", default="inst")
    gen.set_defaults(fn=_cmd_gen)

    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(solver_main())
