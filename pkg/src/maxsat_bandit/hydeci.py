"""Hybrid decimation: build an initial assignment one variable at a time.

Each iteration satisfies, in priority order, a random alive hard unit clause,
soft unit clause, hard binary clause or soft binary clause (binary clauses
choose their literal greedily by the alive soft weight it would satisfy), and
otherwise assigns a random unassigned variable a random value. Unit/binary is
judged on the residual clause, i.e. after removing false literals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .formula import Formula

HARD_UNIT, SOFT_UNIT, HARD_BINARY, SOFT_BINARY, RANDOM = range(5)
BRANCH_NAMES = ("hard-unit", "soft-unit", "hard-binary", "soft-binary", "random")

UNSET = -1


@dataclass(frozen=True)
class Decision:
    """One decimation iteration: which branch fired, on what, and the literal set true."""

    branch: int
    clause: Optional[int]
    lit: int


class _Registry:
    """Dense set of clause ids with O(1) insert, remove and uniform sampling."""

    __slots__ = ("items", "pos")

    def __init__(self, size: int):
        self.items: list[int] = []
        self.pos = [-1] * size

    def add(self, c: int) -> None:
        self.pos[c] = len(self.items)
        self.items.append(c)

    def remove(self, c: int) -> None:
        i = self.pos[c]
        last = self.items.pop()
        if last != c:
            self.items[i] = last
            self.pos[last] = i
        self.pos[c] = -1

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, c: int) -> bool:
        return self.pos[c] >= 0


class Decimator:
    """Decimation state; call :meth:`step` until :attr:`done`."""

    def __init__(self, formula: Formula, rng: random.Random, no_binary: bool = False):
        f = formula
        m = len(f.clauses)
        self.formula = f
        self.rng = rng
        self.no_binary = no_binary
        self.value = [UNSET] * (f.num_vars + 1)
        self.residual = [len(c) for c in f.clauses]
        self.alive = [True] * m
        # indexed by branch constant
        self.registries = [_Registry(m) for _ in range(4)]
        self.unassigned = list(range(1, f.num_vars + 1))
        self._upos = list(range(-1, f.num_vars))
        for c in range(m):
            self._register(c)

    # -- bookkeeping -------------------------------------------------------------

    def _kind(self, c: int) -> Optional[int]:
        r = self.residual[c]
        if r == 1:
            return HARD_UNIT if self.formula.is_hard[c] else SOFT_UNIT
        if r == 2:
            return HARD_BINARY if self.formula.is_hard[c] else SOFT_BINARY
        return None

    def _register(self, c: int) -> None:
        k = self._kind(c)
        if k is not None:
            self.registries[k].add(c)

    def _unregister(self, c: int) -> None:
        k = self._kind(c)
        if k is not None:
            self.registries[k].remove(c)

    def assign(self, var: int, val: int) -> None:
        """Set ``var`` and SIMPLIFY: kill satisfied clauses, shorten the others."""
        f = self.formula
        assert self.value[var] == UNSET
        self.value[var] = val
        i = self._upos[var]
        last = self.unassigned.pop()
        if last != var:
            self.unassigned[i] = last
            self._upos[last] = i
        self._upos[var] = -1

        sat, unsat = (f.pos_occ[var], f.neg_occ[var]) if val else (f.neg_occ[var], f.pos_occ[var])
        for c in sat:
            if self.alive[c]:
                self._unregister(c)
                self.alive[c] = False
        for c in unsat:
            if self.alive[c]:
                self._unregister(c)
                self.residual[c] -= 1
                if self.residual[c] == 0:
                    self.alive[c] = False
                else:
                    self._register(c)

    def satisfy(self, lit: int) -> None:
        self.assign(abs(lit), 1 if lit > 0 else 0)

    def free_literals(self, c: int) -> list[int]:
        return [x for x in self.formula.clauses[c].lits if self.value[abs(x)] == UNSET]

    def alive_soft_weight(self, lit: int) -> int:
        """Total original weight of alive soft clauses that ``lit`` would satisfy."""
        f = self.formula
        return sum(
            f.weights[c] for c in f.occurrences(lit) if self.alive[c] and not f.is_hard[c]
        )

    # -- iteration -----------------------------------------------------------------

    @property
    def done(self) -> bool:
        return not self.unassigned

    def step(self) -> Decision:
        rng = self.rng
        regs = self.registries
        for branch in (HARD_UNIT, SOFT_UNIT):
            if regs[branch]:
                c = rng.choice(regs[branch].items)
                (lit,) = self.free_literals(c)
                self.satisfy(lit)
                return Decision(branch, c, lit)
        if not self.no_binary:
            for branch in (HARD_BINARY, SOFT_BINARY):
                if regs[branch]:
                    c = rng.choice(regs[branch].items)
                    lit = greedy_binary_literal(self, c, rng)
                    self.satisfy(lit)
                    return Decision(branch, c, lit)
        var = rng.choice(self.unassigned)
        lit = var if rng.random() < 0.5 else -var
        self.satisfy(lit)
        return Decision(RANDOM, None, lit)

    def result(self) -> list[bool]:
        assert self.done
        return [v == 1 for v in self.value[1:]]


def greedy_binary_literal(d: Decimator, c: int, rng: random.Random) -> int:
    """Of the two free literals of residual-binary clause ``c``, the one whose
    satisfaction covers more alive soft weight; ties are broken uniformly."""
    l1, l2 = d.free_literals(c)
    w1, w2 = d.alive_soft_weight(l1), d.alive_soft_weight(l2)
    if w1 > w2:
        return l1
    if w2 > w1:
        return l2
    return l1 if rng.random() < 0.5 else l2


def hydeci(
    formula: Formula,
    rng: random.Random,
    no_binary: bool = False,
    trace: Optional[list[Decision]] = None,
) -> list[bool]:
    """Complete assignment (index i is variable i+1) from hybrid decimation."""
    d = Decimator(formula, rng, no_binary)
    while not d.done:
        dec = d.step()
        if trace is not None:
            trace.append(dec)
    return d.result()
