"""Incremental local-search state with dynamic clause weights.

Scores follow the make/break convention: ``score[x]`` is the change in the
total dynamic weight of satisfied clauses if ``x`` were flipped. Each clause
tracks its number of true literals and, when exactly one literal is true, the
variable owning it (the "critical" variable).

Clause weighting: hard clauses start at 1, soft clauses at
``min(weight, soft_weight_init_cap)``. At a local optimum, with probability
``sp`` every satisfied clause above its initial weight is decremented
(smoothing); otherwise every falsified hard clause gains 1 and every falsified
soft clause gains 1 up to ``initial + soft_cap``.
"""

from __future__ import annotations

import random
from typing import Sequence

from .formula import INFEASIBLE, Cost, Formula

DEFAULT_SP = 0.0003
DEFAULT_SOFT_CAP = 100
DEFAULT_SOFT_WEIGHT_INIT_CAP = 100


class SearchState:
    """Assignment plus everything needed for O(occurrences) flips.

    Variables are 1-based; index 0 of per-variable lists is unused.
    ``falsified_hard`` holds clause ids, ``falsified_soft`` holds soft ids.
    """

    def __init__(
        self,
        formula: Formula,
        assignment: Sequence[int | bool],
        *,
        soft_cap: int = DEFAULT_SOFT_CAP,
        soft_weight_init_cap: int = DEFAULT_SOFT_WEIGHT_INIT_CAP,
    ):
        f = formula
        if len(assignment) != f.num_vars:
            raise ValueError("assignment length does not match num_vars")
        self.formula = f
        self.soft_cap = soft_cap
        self.soft_weight_init_cap = soft_weight_init_cap
        self.assignment = [0] + [1 if b else 0 for b in assignment]
        self.init_weight = [
            1 if f.is_hard[c] else min(f.weights[c], soft_weight_init_cap)
            for c in range(len(f.clauses))
        ]
        self.dyn_weight = list(self.init_weight)
        self.flip_age = [0] * (f.num_vars + 1)
        self.step = 0
        self.best_assignment: list[bool] | None = None
        self.best_cost: Cost = INFEASIBLE
        self.recompute()

    # -- bulk (re)construction -------------------------------------------------

    def recompute(self) -> None:
        """Rebuild counts, scores and registries from assignment and dyn_weight."""
        f = self.formula
        n, m = f.num_vars, len(f.clauses)
        assign = self.assignment
        self.sat_count = [0] * m
        self.sat_var = [0] * m
        self.score = [0] * (n + 1)
        self.good_vars: list[int] = []
        self.good_pos = [-1] * (n + 1)
        self.falsified_hard: list[int] = []
        self.falsified_soft: list[int] = []
        self._fpos = [-1] * m
        self.soft_cost = 0
        for c in range(m):
            cnt = 0
            last = 0
            for x, p in zip(f.clause_vars[c], f.clause_pols[c]):
                if assign[x] == p:
                    cnt += 1
                    last = x
            self.sat_count[c] = cnt
            w = self.dyn_weight[c]
            if cnt == 0:
                for x in f.clause_vars[c]:
                    self.score[x] += w
                self._falsify(c)
            elif cnt == 1:
                self.sat_var[c] = last
                self.score[last] -= w
        for x in range(1, n + 1):
            if self.score[x] > 0:
                self._add_good(x)

    # -- registries --------------------------------------------------------------

    def _add_good(self, x: int) -> None:
        self.good_pos[x] = len(self.good_vars)
        self.good_vars.append(x)

    def _remove_good(self, x: int) -> None:
        good, pos = self.good_vars, self.good_pos
        i = pos[x]
        last = good.pop()
        if last != x:
            good[i] = last
            pos[last] = i
        pos[x] = -1

    def _refresh_good(self, xs) -> None:
        score, pos = self.score, self.good_pos
        for x in xs:
            if score[x] > 0:
                if pos[x] < 0:
                    self._add_good(x)
            elif pos[x] >= 0:
                self._remove_good(x)

    def _falsify(self, c: int) -> None:
        f = self.formula
        if f.is_hard[c]:
            self._fpos[c] = len(self.falsified_hard)
            self.falsified_hard.append(c)
        else:
            self._fpos[c] = len(self.falsified_soft)
            self.falsified_soft.append(f.clauses[c].soft_id)
            self.soft_cost += f.weights[c]

    def _unfalsify(self, c: int) -> None:
        f = self.formula
        i = self._fpos[c]
        self._fpos[c] = -1
        if f.is_hard[c]:
            reg = self.falsified_hard
            last = reg.pop()
            if last != c:
                reg[i] = last
                self._fpos[last] = i
        else:
            reg = self.falsified_soft
            last = reg.pop()
            if last != f.clauses[c].soft_id:
                reg[i] = last
                self._fpos[f.soft_clause_ids[last]] = i
            self.soft_cost -= f.weights[c]

    # -- queries -----------------------------------------------------------------

    @property
    def feasible(self) -> bool:
        return not self.falsified_hard

    @property
    def cost(self) -> Cost:
        return INFEASIBLE if self.falsified_hard else self.soft_cost

    def model(self) -> list[bool]:
        return [bool(b) for b in self.assignment[1:]]

    def is_true(self, lit: int) -> bool:
        return self.assignment[abs(lit)] == (1 if lit > 0 else 0)

    def record_best(self) -> bool:
        """Store the current assignment as best if it is feasible and cheaper."""
        if self.falsified_hard:
            return False
        if self.best_cost is INFEASIBLE or self.soft_cost < self.best_cost:
            self.best_cost = self.soft_cost
            self.best_assignment = self.model()
            return True
        return False

    # -- moves -------------------------------------------------------------------

    def flip(self, v: int) -> None:
        f = self.formula
        assign = self.assignment
        score = self.score
        dyn = self.dyn_weight
        sat_count = self.sat_count
        sat_var = self.sat_var
        clause_vars = f.clause_vars

        self.step += 1
        self.flip_age[v] = self.step
        if assign[v]:
            assign[v] = 0
            made_true, made_false = f.neg_occ[v], f.pos_occ[v]
        else:
            assign[v] = 1
            made_true, made_false = f.pos_occ[v], f.neg_occ[v]

        for c in made_true:
            w = dyn[c]
            cnt = sat_count[c] + 1
            sat_count[c] = cnt
            if cnt == 1:
                for x in clause_vars[c]:
                    score[x] -= w
                score[v] -= w
                sat_var[c] = v
                self._unfalsify(c)
            elif cnt == 2:
                score[sat_var[c]] += w

        for c in made_false:
            w = dyn[c]
            cnt = sat_count[c] - 1
            sat_count[c] = cnt
            if cnt == 0:
                score[v] += w
                for x in clause_vars[c]:
                    score[x] += w
                self._falsify(c)
            elif cnt == 1:
                for x, p in zip(clause_vars[c], f.clause_pols[c]):
                    if assign[x] == p:
                        break
                sat_var[c] = x
                score[x] -= w

        self._refresh_good(f.neighbors[v])

    def increase_weights(self) -> None:
        """Bump falsified hard clauses by 1 and falsified soft ones by 1 up to their cap."""
        f = self.formula
        dyn, score = self.dyn_weight, self.score
        touched = set()
        for c in self.falsified_hard:
            dyn[c] += 1
            for x in f.clause_vars[c]:
                score[x] += 1
            touched.update(f.clause_vars[c])
        cap = self.soft_cap
        init = self.init_weight
        for sid in self.falsified_soft:
            c = f.soft_clause_ids[sid]
            if dyn[c] < init[c] + cap:
                dyn[c] += 1
                for x in f.clause_vars[c]:
                    score[x] += 1
                touched.update(f.clause_vars[c])
        self._refresh_good(touched)

    def smooth_weights(self) -> None:
        """Decrement every satisfied clause whose weight exceeds its initial value."""
        dyn, init, score = self.dyn_weight, self.init_weight, self.score
        sat_count, sat_var = self.sat_count, self.sat_var
        touched = []
        for c in range(len(dyn)):
            if sat_count[c] > 0 and dyn[c] > init[c]:
                dyn[c] -= 1
                if sat_count[c] == 1:
                    score[sat_var[c]] += 1
                    touched.append(sat_var[c])
        self._refresh_good(touched)

    def update_clause_weights(self, rng: random.Random, sp: float = DEFAULT_SP) -> bool:
        """One weighting step; returns True if it was a smoothing step."""
        if rng.random() < sp:
            self.smooth_weights()
            return True
        self.increase_weights()
        return False

    # -- diagnostics ---------------------------------------------------------------

    def snapshot(self) -> dict:
        """Canonical view of all derived fields, for comparing against a rebuild."""
        return {
            "assignment": list(self.assignment),
            "sat_count": list(self.sat_count),
            "sat_var": {c: self.sat_var[c] for c, k in enumerate(self.sat_count) if k == 1},
            "dyn_weight": list(self.dyn_weight),
            "score": list(self.score),
            "good_vars": sorted(self.good_vars),
            "falsified_hard": sorted(self.falsified_hard),
            "falsified_soft": sorted(self.falsified_soft),
            "cost": self.cost,
        }

    def check_registries(self) -> None:
        """Assert position indices agree with the dense registries."""
        for i, x in enumerate(self.good_vars):
            assert self.good_pos[x] == i
        assert sum(1 for p in self.good_pos if p >= 0) == len(self.good_vars)
        for i, c in enumerate(self.falsified_hard):
            assert self._fpos[c] == i
        for i, sid in enumerate(self.falsified_soft):
            assert self._fpos[self.formula.soft_clause_ids[sid]] == i


def init_state(formula: Formula, assignment: Sequence[int | bool], **kwargs) -> SearchState:
    return SearchState(formula, assignment, **kwargs)


def rebuild(state: SearchState) -> SearchState:
    """Fresh state on the same assignment and dynamic weights."""
    fresh = SearchState(
        state.formula,
        state.assignment[1:],
        soft_cap=state.soft_cap,
        soft_weight_init_cap=state.soft_weight_init_cap,
    )
    fresh.dyn_weight = list(state.dyn_weight)
    fresh.recompute()
    return fresh
