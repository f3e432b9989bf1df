"""Independent reference computations used by the tests.

Nothing here calls into the incremental code paths under test; everything is
recomputed from the clause lists with numpy or plain enumeration.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from maxsat_bandit.formula import INFEASIBLE, Formula, FormulaBuilder
from maxsat_bandit.hydeci import HARD_BINARY, HARD_UNIT, RANDOM, SOFT_BINARY, SOFT_UNIT


def brute_cost(clauses, bits):
    """``clauses``: list of (lits, weight or None). Clause-by-clause evaluation."""
    total = 0
    for lits, w in clauses:
        sat = False
        for x in lits:
            val = bits[abs(x) - 1]
            if (x > 0 and val) or (x < 0 and not val):
                sat = True
        if not sat:
            if w is None:
                return INFEASIBLE
            total += w
    return total


def as_pairs(f: Formula):
    return [(c.lits, None if c.hard else c.weight) for c in f.clauses]


def enumerate_optimum(f: Formula):
    """Exact optimum over all 2^n assignments (vectorized); INFEASIBLE if none."""
    n = f.num_vars
    idx = np.arange(1 << n, dtype=np.int64)
    bits = ((idx[:, None] >> np.arange(n)) & 1).astype(bool)
    feasible = np.ones(1 << n, dtype=bool)
    cost = np.zeros(1 << n, dtype=np.int64)
    for c in f.clauses:
        sat = np.zeros(1 << n, dtype=bool)
        for x in c.lits:
            col = bits[:, abs(x) - 1]
            sat |= col if x > 0 else ~col
        if c.hard:
            feasible &= sat
        else:
            cost += np.where(sat, 0, c.weight)
    if not feasible.any():
        return INFEASIBLE
    return int(cost[feasible].min())


def enumerate_optimum_small(f: Formula):
    """Pure-Python enumeration for tiny instances."""
    pairs = as_pairs(f)
    best = INFEASIBLE
    for bits in itertools.product([0, 1], repeat=f.num_vars):
        c = brute_cost(pairs, bits)
        if c is not INFEASIBLE and (best is INFEASIBLE or c < best):
            best = c
    return best


class ClauseMatrix:
    """Padded clause matrices for vectorized state reconstruction."""

    def __init__(self, f: Formula):
        m = len(f.clauses)
        width = max((len(c) for c in f.clauses), default=1)
        self.n = f.num_vars
        self.vars = np.zeros((m, width), dtype=np.int64)
        self.pols = np.zeros((m, width), dtype=np.int64)
        self.mask = np.zeros((m, width), dtype=bool)
        for c in f.clauses:
            k = len(c.lits)
            self.vars[c.id, :k] = [abs(x) for x in c.lits]
            self.pols[c.id, :k] = [1 if x > 0 else 0 for x in c.lits]
            self.mask[c.id, :k] = True
        self.hard = np.array([c.hard for c in f.clauses], dtype=bool)
        self.weight = np.array([0 if c.hard else c.weight for c in f.clauses], dtype=np.int64)
        self.soft_id = np.array([-1 if c.hard else c.soft_id for c in f.clauses], dtype=np.int64)

    def reconstruct(self, assignment, dyn_weight):
        """Derived fields from an assignment (index 0 unused) and dynamic weights.

        ``sat_var`` holds the critical variable for clauses with one true
        literal and 0 elsewhere; the registries are sorted id arrays.
        """
        a = np.asarray(assignment, dtype=np.int64)
        w = np.asarray(dyn_weight, dtype=np.int64)
        true = (a[self.vars] == self.pols) & self.mask
        count = true.sum(axis=1)
        fals = count == 0
        one = count == 1
        # falsified clauses credit every variable in them, critical ones debit
        make = np.where(self.mask & fals[:, None], w[:, None], 0)
        score = np.bincount(self.vars.ravel(), weights=make.ravel(), minlength=self.n + 1)
        crit = self.vars[np.arange(len(count)), np.argmax(true, axis=1)]
        score -= np.bincount(crit[one], weights=w[one], minlength=self.n + 1)
        fh = np.flatnonzero(fals & self.hard)
        return {
            "sat_count": count,
            "sat_var": np.where(one, crit, 0),
            "score": score.astype(np.int64),
            "good_vars": np.flatnonzero(score[1:] > 0) + 1,
            "falsified_hard": fh,
            "falsified_soft": np.sort(self.soft_id[fals & ~self.hard]),
            "cost": INFEASIBLE if len(fh) else int(self.weight[fals].sum()),
        }


def state_mismatches(s, cm: ClauseMatrix) -> list[str]:
    """Names of SearchState fields that disagree with a from-scratch rebuild."""
    exp = cm.reconstruct(s.assignment, s.dyn_weight)
    count = np.asarray(s.sat_count)
    got = {
        "sat_count": count,
        "sat_var": np.where(count == 1, np.asarray(s.sat_var), 0),
        "score": np.asarray(s.score),
        "good_vars": np.sort(np.asarray(s.good_vars, dtype=np.int64)),
        "falsified_hard": np.sort(np.asarray(s.falsified_hard, dtype=np.int64)),
        "falsified_soft": np.sort(np.asarray(s.falsified_soft, dtype=np.int64)),
    }
    bad = [k for k, v in got.items() if not np.array_equal(v, exp[k])]
    if s.cost != exp["cost"]:
        bad.append("cost")
    try:
        s.check_registries()
    except AssertionError:
        bad.append("registries")
    return bad


def trajectory_mismatches(cm: ClauseMatrix, frames) -> dict[str, int]:
    """Vectorized rebuild over many recorded states at once.

    ``frames`` come from :func:`frame`; returns per-field counts of steps
    whose recorded value differs from the from-scratch reconstruction.
    """
    T, m = len(frames), len(cm.hard)
    A = np.array([fr[0] for fr in frames], dtype=np.int64)
    W = np.array([fr[1] for fr in frames], dtype=np.int64).reshape(T, m)
    true = (A[:, cm.vars] == cm.pols) & cm.mask
    count = true.sum(axis=2)
    fals, one = count == 0, count == 1
    make = np.where(cm.mask & fals[:, :, None], W[:, :, None], 0)
    offs = (np.arange(T) * (cm.n + 1))[:, None, None]
    idx = (cm.vars[None] + offs).ravel()
    score = np.bincount(idx, weights=make.ravel(), minlength=T * (cm.n + 1))
    crit = np.take_along_axis(np.broadcast_to(cm.vars, true.shape), np.argmax(true, axis=2)[:, :, None], 2)[:, :, 0]
    cidx = (crit + offs[:, :, 0])[one]
    score -= np.bincount(cidx, weights=W[one], minlength=T * (cm.n + 1))
    score = score.reshape(T, cm.n + 1).astype(np.int64)
    cost = np.where((fals & cm.hard).any(axis=1), -1, (fals * cm.weight).sum(axis=1))

    good = np.zeros((T, cm.n + 1), dtype=bool)
    fh = np.zeros((T, m), dtype=bool)
    fs = np.zeros((T, max(int(cm.soft_id.max(initial=-1)) + 1, 1)), dtype=bool)
    for t, fr in enumerate(frames):
        good[t, list(fr[5])] = True
        fh[t, list(fr[6])] = True
        fs[t, list(fr[7])] = True
    exp_fs = np.zeros_like(fs)
    soft = ~cm.hard
    exp_fs[:, cm.soft_id[soft]] = fals[:, soft]
    got_count = np.array([fr[2] for fr in frames], dtype=np.int64).reshape(T, m)
    got_var = np.array([fr[3] for fr in frames], dtype=np.int64).reshape(T, m)
    got_score = np.array([fr[4] for fr in frames], dtype=np.int64)
    got_cost = np.array([-1 if fr[8] is INFEASIBLE else fr[8] for fr in frames], dtype=np.int64)
    good_exp = score > 0
    good_exp[:, 0] = False
    # registries must also be duplicate-free
    dup = np.array([len(set(fr[5])) != len(fr[5]) or len(set(fr[6])) != len(fr[6])
                    or len(set(fr[7])) != len(fr[7]) for fr in frames])
    return {
        "sat_count": int((got_count != count).any(axis=1).sum()),
        "sat_var": int((np.where(one, got_var, 0) != np.where(one, crit, 0)).any(axis=1).sum()),
        "score": int((got_score != score).any(axis=1).sum()),
        "good_vars": int((good != good_exp).any(axis=1).sum()),
        "falsified_hard": int((fh != (fals & cm.hard)).any(axis=1).sum()),
        "falsified_soft": int((fs != exp_fs).any(axis=1).sum()),
        "cost": int((got_cost != cost).sum()),
        "duplicates": int(dup.sum()),
    }


def frame(s):
    """Cheap copy of the fields checked by :func:`trajectory_mismatches`."""
    return (
        tuple(s.assignment), tuple(s.dyn_weight), tuple(s.sat_count), tuple(s.sat_var),
        tuple(s.score), tuple(s.good_vars), tuple(s.falsified_hard), tuple(s.falsified_soft), s.cost,
    )


def random_formula(
    rng: random.Random,
    num_vars: int,
    num_hard: int,
    num_soft: int,
    max_len: int = 4,
    max_weight: int = 10,
    min_len: int = 1,
) -> Formula:
    """Random formula; clauses may repeat and need not be feasible."""
    b = FormulaBuilder(num_vars)

    def clause():
        k = rng.randint(min_len, min(max_len, num_vars))
        return [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, num_vars + 1), k)]

    for _ in range(num_hard):
        b.add(clause())
    for _ in range(num_soft):
        b.add(clause(), rng.randint(1, max_weight))
    return b.build()


# -- decimation replay --------------------------------------------------------------


def residual_view(f, value):
    """From-scratch (alive, residual length) per clause for a partial assignment."""
    out = []
    for c in f.clauses:
        vals = [value[abs(x)] for x in c.lits]
        true = any(v != -1 and v == (1 if x > 0 else 0) for x, v in zip(c.lits, vals))
        free = sum(1 for v in vals if v == -1)
        out.append((not true and free > 0, free))
    return out


def categories(f, value):
    view = residual_view(f, value)
    cats = {k: set() for k in (HARD_UNIT, SOFT_UNIT, HARD_BINARY, SOFT_BINARY)}
    for c, (alive, free) in zip(f.clauses, view):
        if not alive:
            continue
        if free == 1:
            cats[HARD_UNIT if c.hard else SOFT_UNIT].add(c.id)
        elif free == 2:
            cats[HARD_BINARY if c.hard else SOFT_BINARY].add(c.id)
    return cats


def expected_branch(cats, no_binary):
    order = (HARD_UNIT, SOFT_UNIT) if no_binary else (HARD_UNIT, SOFT_UNIT, HARD_BINARY, SOFT_BINARY)
    for k in order:
        if cats[k]:
            return k
    return RANDOM


def check_trace(f, trace, no_binary=False):
    """Replay decisions from scratch and certify the priority order."""
    value = [-1] * (f.num_vars + 1)
    assert len(trace) == f.num_vars
    for dec in trace:
        cats = categories(f, value)
        assert dec.branch == expected_branch(cats, no_binary)
        if dec.branch != RANDOM:
            assert dec.clause in cats[dec.branch]
            assert dec.lit in f.clauses[dec.clause].lits
        v = abs(dec.lit)
        assert value[v] == -1
        value[v] = 1 if dec.lit > 0 else 0
    assert all(x != -1 for x in value[1:])
    return value
