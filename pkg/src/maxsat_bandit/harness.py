"""Benchmark runner, MSE-style scoring, win counting and instance generation."""

from __future__ import annotations

import json
import logging
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import mean
from typing import Iterable, Mapping, Optional, Sequence

from .formula import INFEASIBLE, Cost, FormulaBuilder, WCNFError, load_wcnf, serialize_wcnf, validate_model
from .search import VARIANTS, SolveConfig, solve

log = logging.getLogger(__name__)

TIE_NOTE = "ties: every solver reaching the best cost on an instance is credited with a win"


# -- scoring -------------------------------------------------------------------


def mse_score(c_bks: Optional[int], costs: Sequence[Cost]) -> list[float]:
    """MaxSAT Evaluation score of each solver on one instance.

    ``(best + 1) / (cost_i + 1)`` where ``best`` is the minimum over the
    best-known cost (if given) and every feasible solver cost; infeasible
    solvers score 0.
    """
    finite = [c for c in costs if c is not INFEASIBLE]
    if c_bks is not None:
        finite.append(c_bks)
    if not finite:
        return [0.0] * len(costs)
    best = min(finite)
    return [0.0 if c is INFEASIBLE else (best + 1) / (c + 1) for c in costs]


def count_wins(
    by_instance: Mapping[str, Mapping[str, tuple[Cost, Optional[float]]]],
) -> dict[str, tuple[int, Optional[float]]]:
    """Per solver: number of instances won and mean time-to-best over those.

    ``by_instance[inst][solver] = (cost, time_to_best)``. A solver wins when
    its cost is feasible and equal to the minimum feasible cost on the
    instance, so ties make several winners.
    """
    solvers = list(dict.fromkeys(s for runs in by_instance.values() for s in runs))
    won_times: dict[str, list[float]] = {s: [] for s in solvers}
    wins = {s: 0 for s in solvers}
    for runs in by_instance.values():
        finite = [c for c, _ in runs.values() if c is not INFEASIBLE]
        if not finite:
            continue
        best = min(finite)
        for s, (c, t) in runs.items():
            if c is not INFEASIBLE and c == best:
                wins[s] += 1
                if t is not None:
                    won_times[s].append(t)
    return {s: (wins[s], mean(won_times[s]) if won_times[s] else None) for s in solvers}


# -- records -------------------------------------------------------------------


@dataclass
class RunRecord:
    instance: str
    solver: str
    seed: int
    best_cost: Cost
    steps: int
    cutoff: float
    max_steps: Optional[int] = None
    time_to_best: Optional[float] = None
    elapsed: Optional[float] = None
    model: Optional[str] = None

    def to_json(self) -> str:
        """One JSON line; wall-clock fields live under ``timing``."""
        d = {
            "instance": self.instance,
            "solver": self.solver,
            "seed": self.seed,
            "best_cost": None if self.best_cost is INFEASIBLE else self.best_cost,
            "steps": self.steps,
            "cutoff": self.cutoff,
            "max_steps": self.max_steps,
            "model": self.model,
            "timing": {"time_to_best": self.time_to_best, "elapsed": self.elapsed},
        }
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        d = json.loads(line)
        timing = d.pop("timing", {}) or {}
        cost = d.pop("best_cost")
        return cls(best_cost=INFEASIBLE if cost is None else cost, **d, **timing)


@dataclass
class ScoreReport:
    benchmark: str
    solvers: list[str]
    instances: list[str]
    scores: dict[str, dict[str, float]]
    mean_score: dict[str, float]
    wins: dict[str, int]
    mean_time_won: dict[str, Optional[float]]
    mean_cost: dict[str, Optional[float]]
    common_feasible: int
    notes: list[str] = field(default_factory=lambda: [TIE_NOTE])

    def to_dict(self) -> dict:
        return asdict(self)

    def table(self) -> str:
        return format_table([self])


def score_records(
    records: Iterable[RunRecord],
    bks: Optional[Mapping[str, int]] = None,
    benchmark: str = "suite",
) -> ScoreReport:
    """Aggregate run records into scores, win counts and mean costs.

    ``mean_cost`` averages over the instances on which every solver found a
    feasible model, so the solvers are compared on the same set.
    """
    bks = bks or {}
    by_instance: dict[str, dict[str, tuple[Cost, Optional[float]]]] = {}
    for r in records:
        by_instance.setdefault(r.instance, {})[r.solver] = (r.best_cost, r.time_to_best)
    instances = sorted(by_instance)
    solvers = list(dict.fromkeys(s for runs in by_instance.values() for s in runs))

    scores: dict[str, dict[str, float]] = {}
    for inst in instances:
        runs = by_instance[inst]
        missing = [s for s in solvers if s not in runs]
        if missing:
            raise ValueError(f"instance {inst} lacks runs for {missing}")
        vals = mse_score(bks.get(inst), [runs[s][0] for s in solvers])
        scores[inst] = dict(zip(solvers, vals))

    wins = count_wins(by_instance)
    common = [
        inst
        for inst in instances
        if all(by_instance[inst][s][0] is not INFEASIBLE for s in solvers)
    ]
    return ScoreReport(
        benchmark=benchmark,
        solvers=solvers,
        instances=instances,
        scores=scores,
        mean_score={s: mean(scores[i][s] for i in instances) if instances else 0.0 for s in solvers},
        wins={s: wins[s][0] for s in solvers},
        mean_time_won={s: wins[s][1] for s in solvers},
        mean_cost={
            s: mean(by_instance[i][s][0] for i in common) if common else None for s in solvers
        },
        common_feasible=len(common),
    )


def _fmt(x, nd=2) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.{nd}f}"
    return str(x)


def format_table(reports: Sequence[ScoreReport]) -> str:
    """Aligned text table: benchmark and instance count, then for every solver
    its #win., mean time over won instances, mean score and mean cost."""
    solvers = list(reports[0].solvers) if reports else []
    head1 = ["", ""]
    head2 = ["Benchmark", "#inst."]
    for s in solvers:
        head1 += [s, "", "", ""]
        head2 += ["#win.", "time", "score", "cost"]
    rows = []
    for rep in reports:
        row = [rep.benchmark, str(len(rep.instances))]
        for s in solvers:
            row += [
                str(rep.wins[s]),
                _fmt(rep.mean_time_won[s], 3),
                _fmt(rep.mean_score[s], 4),
                _fmt(rep.mean_cost[s]),
            ]
        rows.append(row)
    ncol = len(head2)
    widths = [max(len(r[i]) for r in [head1, head2] + rows) for i in range(ncol)]
    # a solver name may be wider than its four columns together; widen the first
    for j in range(len(solvers)):
        i = 2 + 4 * j
        group = sum(widths[i : i + 4]) + 3 * 2
        if len(solvers[j]) > group:
            widths[i] += len(solvers[j]) - group

    def line(cells, first_left=True):
        out = []
        for i, (cell, w) in enumerate(zip(cells, widths)):
            out.append(cell.ljust(w) if i == 0 and first_left else cell.rjust(w))
        return "  ".join(out).rstrip()

    group_line = []
    for i in range(ncol):
        if i >= 2 and (i - 2) % 4 == 0:
            span = sum(widths[i : i + 4]) + 3 * 2
            group_line.append(head1[i].center(span))
        elif i < 2:
            group_line.append(" " * widths[i])
    lines = [
        "  ".join(group_line).rstrip(),
        line(head2),
        "-" * (sum(widths) + 2 * (ncol - 1)),
    ]
    lines += [line(r) for r in rows]
    lines.append("")
    lines.append(f"# {TIE_NOTE}")
    lines.append("# time: mean seconds to reach the best cost over won instances")
    lines.append("# cost: mean cost over instances where every solver was feasible")
    return "\n".join(lines) + "\n"


# -- suite runner ----------------------------------------------------------------


@dataclass(frozen=True)
class Task:
    path: str
    instance: str
    variant: str
    seed: int
    cutoff: float
    max_steps: Optional[int]
    keep_models: bool
    label: str


def _run_task(task: Task) -> tuple[Task, Optional[RunRecord], Optional[dict]]:
    try:
        f = load_wcnf(task.path)
    except (WCNFError, OSError, UnicodeDecodeError) as e:
        return task, None, {"instance": task.instance, "solver": task.label, "seed": task.seed, "error": str(e)}
    cfg = SolveConfig.for_variant(
        task.variant, cutoff=task.cutoff, seed=task.seed, max_steps=task.max_steps
    )
    res = solve(f, cfg)
    model = None
    if res.best_assignment is not None:
        if validate_model(f, res.best_assignment) != res.best_cost:
            raise AssertionError(f"{task.instance}: reported cost does not re-validate")
        if task.keep_models:
            model = "".join("1" if b else "0" for b in res.best_assignment)
    rec = RunRecord(
        instance=task.instance,
        solver=task.label,
        seed=task.seed,
        best_cost=res.best_cost,
        steps=res.steps,
        cutoff=task.cutoff,
        max_steps=task.max_steps,
        time_to_best=res.time_to_best,
        elapsed=res.elapsed,
        model=model,
    )
    return task, rec, None


@dataclass
class SuiteResult:
    records: list[RunRecord]
    errors: list[dict]
    report: Optional[ScoreReport]


def instance_files(directory: str | os.PathLike) -> list[Path]:
    d = Path(directory)
    return sorted(
        p for p in d.iterdir() if p.is_file() and (p.suffix in (".wcnf", ".gz") or p.name.endswith(".wcnf.gz"))
    )


def _instance_name(p: Path) -> str:
    name = p.name
    for suf in (".gz", ".wcnf"):
        if name.endswith(suf):
            name = name[: -len(suf)]
    return name


def run_suite(
    instance_dir: str | os.PathLike,
    variants: Sequence[str] = ("default",),
    seeds: Sequence[int] = (0,),
    cutoff: float = 300.0,
    jobs: int = 1,
    max_steps: Optional[int] = None,
    out_dir: Optional[str | os.PathLike] = None,
    bks: Optional[Mapping[str, int]] = None,
    keep_models: bool = False,
) -> SuiteResult:
    """Solve every (instance, variant, seed) independently and score the runs.

    With several seeds each (variant, seed) pair is scored as its own solver,
    labelled ``variant#seed``. Results are ordered by task key whatever the
    completion order. When ``out_dir`` is given, ``records.jsonl``,
    ``errors.jsonl``, ``report.json`` and ``report.txt`` are written there.
    """
    for v in variants:
        if v not in VARIANTS:
            raise ValueError(f"unknown variant {v!r}")
    files = instance_files(instance_dir)
    tasks = []
    for p in files:
        for v in variants:
            for s in seeds:
                label = v if len(seeds) == 1 else f"{v}#{s}"
                tasks.append(Task(str(p), _instance_name(p), v, s, cutoff, max_steps, keep_models, label))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_task, tasks))
    else:
        outcomes = [_run_task(t) for t in tasks]

    # pool.map keeps task order: (instance, variant, seed) as requested
    records = [rec for _, rec, _ in outcomes if rec is not None]
    errors = [err for _, _, err in outcomes if err is not None]
    # drop duplicate error entries (one per failing file)
    seen = set()
    uniq_errors = []
    for e in errors:
        if e["instance"] not in seen:
            seen.add(e["instance"])
            uniq_errors.append(e)
    for e in uniq_errors:
        log.warning("skipping %s: %s", e["instance"], e["error"])

    report = None
    if records:
        report = score_records(records, bks, benchmark=Path(instance_dir).name or "suite")

    if out_dir is not None:
        write_outputs(out_dir, records, uniq_errors, report)
    return SuiteResult(records, uniq_errors, report)


def write_outputs(out_dir, records, errors, report) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.jsonl").write_text("".join(r.to_json() + "\n" for r in records))
    (out / "errors.jsonl").write_text("".join(json.dumps(e, sort_keys=True) + "\n" for e in errors))
    if report is not None:
        (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        (out / "report.txt").write_text(report.table(), encoding="utf-8")


def read_records(path: str | os.PathLike) -> list[RunRecord]:
    with open(path) as fh:
        return [RunRecord.from_json(line) for line in fh if line.strip()]


# -- instance generation -------------------------------------------------------------


@dataclass(frozen=True)
class InstanceSpec:
    num_vars: int
    num_hard: int
    num_soft: int
    min_len: int = 3
    max_len: int = 3
    min_weight: int = 1
    max_weight: int = 1
    planted: bool = True

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        if self.num_hard < 0 or self.num_soft < 0:
            raise ValueError("clause counts must be >= 0")
        if not 1 <= self.min_len <= self.max_len:
            raise ValueError("need 1 <= min_len <= max_len")
        if self.max_len > self.num_vars:
            raise ValueError("clause length exceeds num_vars")
        if not 1 <= self.min_weight <= self.max_weight:
            raise ValueError("need 1 <= min_weight <= max_weight")


def random_instance(spec: InstanceSpec, rng: random.Random):
    """Random formula plus the hidden assignment (``None`` unless planted).

    Planted hard clauses get one literal flipped to agree with the hidden
    assignment whenever they would otherwise be falsified by it.
    """
    n = spec.num_vars
    hidden = [rng.random() < 0.5 for _ in range(n)] if spec.planted else None

    def clause():
        size = rng.randint(spec.min_len, spec.max_len)
        vs = rng.sample(range(1, n + 1), size)
        return [v if rng.random() < 0.5 else -v for v in vs]

    b = FormulaBuilder(n)
    for _ in range(spec.num_hard):
        lits = clause()
        if hidden is not None and not any(hidden[abs(x) - 1] == (x > 0) for x in lits):
            i = rng.randrange(len(lits))
            lits[i] = -lits[i]
        b.add(lits)
    for _ in range(spec.num_soft):
        b.add(clause(), rng.randint(spec.min_weight, spec.max_weight))
    return b.build(), hidden


def gen_instances(
    spec: InstanceSpec,
    seed: int,
    count: int,
    out_dir: str | os.PathLike,
    prefix: str = "inst",
) -> list[Path]:
    """Write ``count`` seed-deterministic instances in the classic dialect."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        rng = random.Random(seed * 1_000_003 + i)
        f, hidden = random_instance(spec, rng)
        comments = [f"random instance seed={seed} index={i} {spec}"]
        if hidden is not None:
            comments.append("hidden " + "".join("1" if b else "0" for b in hidden))
        p = out / f"{prefix}{i:03d}.wcnf"
        p.write_text(serialize_wcnf(f, comments=comments))
        paths.append(p)
    return paths


# Bundled 40-variable ablation suite: (prefix, spec, seed), 50 instances each.
SUITE40 = (
    ("pms", InstanceSpec(40, 160, 300, 2, 3, 1, 1), 40_001),
    ("wpms", InstanceSpec(40, 160, 300, 2, 3, 1, 20), 40_002),
)
SUITE40_PER_FAMILY = 50


def gen_suite40(out_dir: str | os.PathLike) -> list[Path]:
    paths = []
    for prefix, spec, seed in SUITE40:
        paths += gen_instances(spec, seed, SUITE40_PER_FAMILY, out_dir, prefix=prefix)
    return paths


def family_reports(records: Sequence[RunRecord], bks=None) -> list[ScoreReport]:
    """One report per instance family (name prefix before the digits)."""
    fams: dict[str, list[RunRecord]] = {}
    for r in records:
        fams.setdefault(r.instance.rstrip("0123456789") or r.instance, []).append(r)
    return [score_records(rs, bks, benchmark=name) for name, rs in sorted(fams.items())]
