"""Multi-armed bandit over soft clauses.

Every soft clause is an arm. At a feasible local optimum the solver samples a
few falsified soft clauses, keeps the one with the largest upper confidence
bound ``V + lam * sqrt(ln N / (t + 1))`` and satisfies it. Once the next
feasible local optimum is reached, the cost change is normalized by the
distance to the best cost seen so far and credited, with geometric discount,
to the most recently pulled arms.
"""

from __future__ import annotations

import math
import random
from collections import deque
from typing import Callable, Optional, Sequence


def reward(cost_prev: int, cost_now: int, cost_best: int) -> float:
    """Normalized improvement between consecutive feasible local optima.

    ``(cost_prev - cost_now) / (cost_prev - cost_best + 1)``; positive when the
    cost went down, and larger the closer ``cost_prev`` already was to the best.
    """
    return (cost_prev - cost_now) / (cost_prev - cost_best + 1)


class BanditState:
    """Estimated values ``V``, pull counts ``t`` and the delayed-reward window.

    Attributes:
        V: per soft clause estimated value, initialized to 1.
        t: per soft clause pull count.
        N: number of feasible local optima seen so far.
        window: the last ``d`` pulled arms, oldest first.
        last_feasible_cost: cost of the previous feasible local optimum.
    """

    def __init__(self, num_arms: int, d: int = 20):
        if d < 1:
            raise ValueError("d must be >= 1")
        self.V = [1.0] * num_arms
        self.t = [0] * num_arms
        self.N = 0
        self.d = d
        self.window: deque[int] = deque(maxlen=d)
        self.last_feasible_cost: Optional[int] = None

    def ucb(self, i: int, lam: float, log: Callable[[float], float] = math.log) -> float:
        assert self.N >= 1, "ucb needs at least one feasible local optimum"
        return self.V[i] + lam * math.sqrt(log(self.N) / (self.t[i] + 1))

    def pick_arm(
        self,
        falsified_soft: Sequence[int],
        arm_num: int,
        lam: float,
        rng: random.Random,
        sample_all: bool = False,
    ) -> int:
        """Pull an arm among the falsified soft clauses.

        Draws ``arm_num`` candidates with replacement (or takes every falsified
        clause once when ``sample_all``) and returns the first candidate with
        the maximal bound.
        """
        if not falsified_soft:
            raise ValueError("pick_arm needs at least one falsified soft clause")
        if sample_all:
            candidates: Sequence[int] = falsified_soft
        else:
            candidates = rng.choices(falsified_soft, k=arm_num)
        if len(candidates) == 1:
            best = candidates[0]
        else:
            assert self.N >= 1
            V, t = self.V, self.t
            explore = math.log(self.N)
            best = -1
            best_u = -math.inf
            for j in candidates:
                u = V[j] + lam * math.sqrt(explore / (t[j] + 1))
                if u > best_u:
                    best_u = u
                    best = j
        self.t[best] += 1
        self.window.append(best)
        return best

    def update_estimated_values(self, r: float, gamma: float) -> None:
        """Credit ``r`` to the windowed arms; the newest gets ``r``, the one
        before it ``gamma * r``, and so on."""
        if r == 0:
            return
        V = self.V
        m = len(self.window)
        for j, arm in enumerate(self.window):
            V[arm] += gamma ** (m - 1 - j) * r
