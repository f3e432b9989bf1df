"""Main local-search loop.

Off local optima a variable is chosen by best-from-multiple-selections (BMS).
At a local optimum the clause weights are updated first; then an infeasible
state repairs a random falsified hard clause, while a feasible one credits the
bandit with the reward of the previous pulls and pulls a new arm. Either way,
the highest-scoring variable of the chosen clause is flipped.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

from .bandit import BanditState, reward
from .formula import INFEASIBLE, Cost, Formula
from .hydeci import hydeci
from .state import DEFAULT_SOFT_CAP, DEFAULT_SOFT_WEIGHT_INIT_CAP, DEFAULT_SP, SearchState

VARIANTS = ("default", "sample1", "sampleall", "nodelay", "nobinary", "fast")

# wall clock is read once per this many flips
CLOCK_CHECK_MASK = 1023


@dataclass(frozen=True)
class SolveConfig:
    k: int = 15
    d: int = 20
    gamma: float = 0.9
    arm_num: int = 20
    lam: float = 1.0
    cutoff: float = 300.0
    seed: int = 0
    max_steps: Optional[int] = None
    sp: float = DEFAULT_SP
    soft_cap: int = DEFAULT_SOFT_CAP
    soft_weight_init_cap: int = DEFAULT_SOFT_WEIGHT_INIT_CAP
    sample_one: bool = False
    sample_all: bool = False
    no_delay: bool = False
    no_binary: bool = False
    fast: bool = False

    def __post_init__(self):
        if self.k < 1 or self.d < 1 or self.arm_num < 1:
            raise ValueError("k, d and arm_num must be >= 1")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be > 0")
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if self.sample_one and self.sample_all:
            raise ValueError("sample_one and sample_all are mutually exclusive")

    @property
    def effective_arm_num(self) -> int:
        return 1 if self.sample_one else self.arm_num

    @property
    def effective_d(self) -> int:
        return 1 if self.no_delay else self.d

    @classmethod
    def for_variant(cls, variant: str, **kwargs) -> "SolveConfig":
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")
        flags = {
            "default": {},
            "sample1": {"sample_one": True},
            "sampleall": {"sample_all": True},
            "nodelay": {"no_delay": True},
            "nobinary": {"no_binary": True},
            "fast": {"fast": True},
        }[variant]
        return cls(**{**kwargs, **flags})

    def with_(self, **kwargs) -> "SolveConfig":
        return replace(self, **kwargs)


class Improvement(NamedTuple):
    elapsed: float
    step: int
    cost: int


@dataclass
class SolveResult:
    best_cost: Cost
    best_assignment: Optional[list[bool]]
    time_to_best: Optional[float]
    steps: int
    local_optima_count: int
    improvement_trace: list[Improvement] = field(default_factory=list)
    elapsed: float = 0.0
    hard_repairs: int = 0
    arm_pulls: int = 0

    @property
    def feasible(self) -> bool:
        return self.best_cost is not INFEASIBLE

    @property
    def status(self) -> str:
        return "Feasible" if self.feasible else "NoFeasibleFound"


def _better(score, age, x: int, y: int) -> bool:
    """Whether ``x`` beats ``y``: higher score, then older flip, then smaller index."""
    sx, sy = score[x], score[y]
    if sx != sy:
        return sx > sy
    if age[x] != age[y]:
        return age[x] < age[y]
    return x < y


def bms_pick(s: SearchState, k: int, rng: random.Random) -> int:
    """Best of ``k`` uniform draws (with replacement) from the improving variables."""
    if not s.good_vars:
        raise ValueError("bms_pick needs a non-empty set of improving variables")
    score, age = s.score, s.flip_age
    it = iter(rng.choices(s.good_vars, k=k))
    best = next(it)
    for x in it:
        if x != best and _better(score, age, x, best):
            best = x
    return best


def best_var_in_clause(s: SearchState, c: int) -> int:
    score, age = s.score, s.flip_age
    vs = s.formula.clause_vars[c]
    best = vs[0]
    for x in vs[1:]:
        if _better(score, age, x, best):
            best = x
    return best


Observer = Callable[[str, SearchState, BanditState], None]


def solve(
    f: Formula,
    cfg: SolveConfig = SolveConfig(),
    *,
    on_improve: Optional[Callable[[Improvement], None]] = None,
    observer: Optional[Observer] = None,
) -> SolveResult:
    """Run the bandit-guided local search on ``f``.

    Stops at the step budget if ``cfg.max_steps`` is set (the wall-clock
    cutoff is then ignored), otherwise at ``cfg.cutoff`` seconds, which
    include the decimation. Stops early on a zero-cost model, or on the first
    feasible model when ``cfg.fast``. ``observer`` is called with ``"bms"``,
    ``"hard"`` or ``"arm"`` before each flip, for instrumentation.
    """
    t0 = time.monotonic()
    rng = random.Random(cfg.seed)
    s = SearchState(
        f,
        hydeci(f, rng, no_binary=cfg.no_binary),
        soft_cap=cfg.soft_cap,
        soft_weight_init_cap=cfg.soft_weight_init_cap,
    )
    bandit = BanditState(f.num_soft, d=cfg.effective_d)
    k, gamma, lam, sp = cfg.k, cfg.gamma, cfg.lam, cfg.sp
    arm_num = cfg.effective_arm_num
    sample_all = cfg.sample_all
    max_steps = cfg.max_steps
    cutoff = cfg.cutoff
    soft_clause_ids = f.soft_clause_ids

    trace: list[Improvement] = []
    steps = 0
    hard_repairs = 0
    while True:
        if not s.falsified_hard and s.record_best():
            imp = Improvement(time.monotonic() - t0, steps, s.soft_cost)
            trace.append(imp)
            if on_improve is not None:
                on_improve(imp)
            if s.soft_cost == 0 or cfg.fast:
                break
        if max_steps is not None:
            if steps >= max_steps:
                break
        elif steps & CLOCK_CHECK_MASK == 0 and time.monotonic() - t0 >= cutoff:
            break

        if s.good_vars:
            v = bms_pick(s, k, rng)
            kind = "bms"
        else:
            s.update_clause_weights(rng, sp)
            if s.falsified_hard:
                c = rng.choice(s.falsified_hard)
                hard_repairs += 1
                kind = "hard"
            else:
                if bandit.last_feasible_cost is not None:
                    r = reward(bandit.last_feasible_cost, s.soft_cost, s.best_cost)
                    bandit.update_estimated_values(r, gamma)
                bandit.N += 1
                bandit.last_feasible_cost = s.soft_cost
                c = soft_clause_ids[
                    bandit.pick_arm(s.falsified_soft, arm_num, lam, rng, sample_all)
                ]
                kind = "arm"
            v = best_var_in_clause(s, c)
        if observer is not None:
            observer(kind, s, bandit)
        s.flip(v)
        steps += 1

    elapsed = time.monotonic() - t0
    return SolveResult(
        best_cost=s.best_cost,
        best_assignment=s.best_assignment,
        time_to_best=trace[-1].elapsed if trace else None,
        steps=steps,
        local_optima_count=bandit.N,
        improvement_trace=trace,
        elapsed=elapsed,
        hard_repairs=hard_repairs,
        arm_pulls=sum(bandit.t),
    )
