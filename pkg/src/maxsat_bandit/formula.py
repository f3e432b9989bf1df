"""Parsing, representation and evaluation of (weighted) partial MaxSAT instances.

Two WCNF dialects are accepted:

* classic: ``p wcnf <nvars> <nclauses> <top>`` header, every clause line starts
  with a weight and clauses whose weight reaches ``top`` are hard;
* modern (MSE 2022+): no header, hard clauses start with ``h``.

Input may be gzip-compressed; this is detected from the magic bytes.
"""

from __future__ import annotations

import enum
import gzip
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence, Union

MAX_WEIGHT = 2**64 - 1
_GZIP_MAGIC = b"\x1f\x8b"


class WCNFError(ValueError):
    """Raised for malformed WCNF input."""


class Infeasible(enum.Enum):
    """Cost of an assignment that falsifies a hard clause."""

    INFEASIBLE = "infeasible"

    def __repr__(self) -> str:
        return "INFEASIBLE"


INFEASIBLE = Infeasible.INFEASIBLE
Cost = Union[int, Infeasible]


def is_feasible(cost: Cost) -> bool:
    return cost is not INFEASIBLE


class Literal(NamedTuple):
    var: int
    negated: bool

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        return cls(abs(lit), lit < 0)

    def to_int(self) -> int:
        return -self.var if self.negated else self.var

    def __neg__(self) -> "Literal":
        return Literal(self.var, not self.negated)


@dataclass(frozen=True)
class Clause:
    """A clause with literals stored as signed DIMACS integers.

    ``weight`` and ``soft_id`` are ``None`` for hard clauses.
    """

    lits: tuple[int, ...]
    hard: bool
    weight: int | None
    id: int
    soft_id: int | None = None

    @property
    def literals(self) -> tuple[Literal, ...]:
        return tuple(Literal.from_int(x) for x in self.lits)

    @property
    def soft(self) -> bool:
        return not self.hard

    def __len__(self) -> int:
        return len(self.lits)


class Formula:
    """Immutable (W)PMS instance.

    ``tautology_weight`` is the total weight of soft clauses that were dropped
    because they contain both polarities of a variable; they are satisfied by
    every assignment and never contribute to cost.
    """

    def __init__(self, num_vars: int, clauses: Sequence[Clause], tautology_weight: int = 0):
        self.num_vars = num_vars
        self.clauses: tuple[Clause, ...] = tuple(clauses)
        self.tautology_weight = tautology_weight
        self.num_hard = sum(1 for c in self.clauses if c.hard)
        self.num_soft = len(self.clauses) - self.num_hard
        self.total_soft_weight = sum(c.weight for c in self.clauses if not c.hard)
        if self.total_soft_weight > MAX_WEIGHT:
            raise WCNFError("total soft weight overflows 64 bits")
        self.soft_clause_ids: tuple[int, ...] = tuple(c.id for c in self.clauses if not c.hard)

        # flat per-clause arrays used by the hot loops
        self.clause_vars: tuple[tuple[int, ...], ...] = tuple(
            tuple(abs(x) for x in c.lits) for c in self.clauses
        )
        self.clause_pols: tuple[tuple[int, ...], ...] = tuple(
            tuple(1 if x > 0 else 0 for x in c.lits) for c in self.clauses
        )
        self.is_hard: tuple[bool, ...] = tuple(c.hard for c in self.clauses)
        self.weights: tuple[int, ...] = tuple(0 if c.hard else c.weight for c in self.clauses)

        pos: list[list[int]] = [[] for _ in range(num_vars + 1)]
        neg: list[list[int]] = [[] for _ in range(num_vars + 1)]
        for c in self.clauses:
            for x in c.lits:
                if x > 0:
                    pos[x].append(c.id)
                else:
                    neg[-x].append(c.id)
        self.pos_occ: tuple[tuple[int, ...], ...] = tuple(map(tuple, pos))
        self.neg_occ: tuple[tuple[int, ...], ...] = tuple(map(tuple, neg))

    def occurrences(self, lit: int | Literal) -> tuple[int, ...]:
        """Ids of the clauses containing ``lit``."""
        if isinstance(lit, Literal):
            lit = lit.to_int()
        return self.pos_occ[lit] if lit > 0 else self.neg_occ[-lit]

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        """For each variable, the sorted variables sharing a clause with it (itself included)."""
        out = []
        for v in range(self.num_vars + 1):
            if v == 0:
                out.append(())
                continue
            seen = {v}
            for c in self.pos_occ[v]:
                seen.update(self.clause_vars[c])
            for c in self.neg_occ[v]:
                seen.update(self.clause_vars[c])
            out.append(tuple(sorted(seen)))
        return tuple(out)

    @property
    def is_weighted(self) -> bool:
        return any(c.weight != 1 for c in self.clauses if not c.hard)

    def hard_clauses(self) -> list[Clause]:
        return [c for c in self.clauses if c.hard]

    def soft_clauses(self) -> list[Clause]:
        return [c for c in self.clauses if not c.hard]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Formula):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.clauses == other.clauses
            and self.tautology_weight == other.tautology_weight
        )

    def __hash__(self) -> int:
        return hash((self.num_vars, self.clauses, self.tautology_weight))

    def __repr__(self) -> str:
        return (
            f"Formula(num_vars={self.num_vars}, num_hard={self.num_hard}, "
            f"num_soft={self.num_soft}, total_soft_weight={self.total_soft_weight})"
        )


class FormulaBuilder:
    """Accumulates clauses, normalizing them the way the parser does."""

    def __init__(self, num_vars: int = 0):
        self.num_vars = num_vars
        self._clauses: list[Clause] = []
        self._num_soft = 0
        self.tautology_weight = 0

    def add(self, lits: Iterable[int], weight: int | None = None) -> None:
        """Add a clause; ``weight=None`` makes it hard."""
        seen: dict[int, None] = {}
        for x in lits:
            if x == 0:
                raise WCNFError("literal 0 inside a clause")
            seen.setdefault(x, None)
        norm = tuple(seen)
        if not norm:
            raise WCNFError("clause with zero literals")
        if weight is not None and weight <= 0:
            raise WCNFError(f"soft clause weight must be positive, got {weight}")
        if weight is not None and weight > MAX_WEIGHT:
            raise WCNFError(f"weight {weight} does not fit in 64 bits")
        self.num_vars = max(self.num_vars, max(abs(x) for x in norm))
        if any(-x in seen for x in norm):
            if weight is not None:
                self.tautology_weight += weight
            return
        cid = len(self._clauses)
        if weight is None:
            self._clauses.append(Clause(norm, True, None, cid))
        else:
            self._clauses.append(Clause(norm, False, weight, cid, self._num_soft))
            self._num_soft += 1

    def build(self) -> Formula:
        return Formula(self.num_vars, self._clauses, self.tautology_weight)


def from_clauses(
    num_vars: int,
    hard: Iterable[Iterable[int]] = (),
    soft: Iterable[tuple[Iterable[int], int]] = (),
) -> Formula:
    """Convenience constructor: all hard clauses first, then soft ones."""
    b = FormulaBuilder(num_vars)
    for lits in hard:
        b.add(lits)
    for lits, w in soft:
        b.add(lits, w)
    return b.build()


def _to_text(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    if data[:2] == _GZIP_MAGIC:
        data = gzip.decompress(data)
    return data.decode("utf-8")


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise WCNFError(f"line {lineno}: expected an integer, got {tok!r}") from None


def parse_wcnf(data: bytes | str) -> Formula:
    """Parse a WCNF instance in either dialect (bytes may be gzipped)."""
    text = _to_text(data)
    builder: FormulaBuilder | None = None
    declared_vars: int | None = None
    top: int | None = None
    dialect: str | None = None
    total = 0

    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if not toks or toks[0].startswith("c"):
            continue
        if toks[0] == "p":
            if dialect is not None:
                raise WCNFError(f"line {lineno}: unexpected header after clauses")
            if len(toks) != 5 or toks[1] != "wcnf":
                raise WCNFError(f"line {lineno}: malformed header {raw.strip()!r}")
            declared_vars = _int(toks[2], lineno)
            _int(toks[3], lineno)
            top = _int(toks[4], lineno)
            if declared_vars < 0 or top <= 0:
                raise WCNFError(f"line {lineno}: malformed header {raw.strip()!r}")
            dialect = "classic"
            builder = FormulaBuilder(declared_vars)
            continue

        if dialect is None:
            dialect = "modern"
            builder = FormulaBuilder(0)
        assert builder is not None

        if toks[-1] != "0":
            raise WCNFError(f"line {lineno}: clause not terminated by 0")
        body = toks[:-1]
        if dialect == "modern" and toks[0] == "h":
            weight = None
            lit_toks = body[1:]
        else:
            if toks[0] == "h":
                raise WCNFError(f"line {lineno}: 'h' clause in classic dialect")
            if not body:
                raise WCNFError(f"line {lineno}: missing weight")
            weight = _int(body[0], lineno)
            lit_toks = body[1:]
            if weight <= 0:
                raise WCNFError(f"line {lineno}: weight must be positive, got {weight}")
            if top is not None and weight >= top:
                weight = None
        lits = [_int(t, lineno) for t in lit_toks]
        if not lits:
            raise WCNFError(f"line {lineno}: clause with zero literals")
        if declared_vars is not None:
            for x in lits:
                if x == 0 or abs(x) > declared_vars:
                    raise WCNFError(
                        f"line {lineno}: literal {x} outside declared range 1..{declared_vars}"
                    )
        if weight is not None:
            total += weight
            if total > MAX_WEIGHT:
                raise WCNFError(f"line {lineno}: total soft weight overflows 64 bits")
        try:
            builder.add(lits, weight)
        except WCNFError as e:
            raise WCNFError(f"line {lineno}: {e}") from None

    if builder is None:
        return Formula(0, [])
    return builder.build()


def load_wcnf(path: str | os.PathLike) -> Formula:
    with open(path, "rb") as fh:
        return parse_wcnf(fh.read())


def serialize_wcnf(f: Formula, dialect: str = "classic", comments: Sequence[str] = ()) -> str:
    """Render ``f`` as WCNF text.

    The classic dialect uses ``top = total soft weight + 1``. Dropped soft
    tautologies are emitted as a single ``x1 -x1`` clause carrying their total
    weight so that a round trip preserves ``tautology_weight``.
    """
    lines = [f"c {c}" for c in comments]
    taut = f.tautology_weight if f.num_vars >= 1 else 0
    if dialect == "classic":
        top = f.total_soft_weight + taut + 1
        n = len(f.clauses) + (1 if taut else 0)
        lines.append(f"p wcnf {f.num_vars} {n} {top}")
        for c in f.clauses:
            w = top if c.hard else c.weight
            lines.append(f"{w} {' '.join(map(str, c.lits))} 0")
    elif dialect == "modern":
        for c in f.clauses:
            head = "h" if c.hard else str(c.weight)
            lines.append(f"{head} {' '.join(map(str, c.lits))} 0")
    else:
        raise ValueError(f"unknown dialect {dialect!r}")
    if taut:
        lines.append(f"{taut} 1 -1 0")
    return "\n".join(lines) + "\n"


def validate_model(f: Formula, bits: Sequence[int | bool]) -> Cost:
    """Cost of a complete assignment; ``bits[i]`` is the value of variable i+1."""
    if len(bits) != f.num_vars:
        raise ValueError(f"assignment has {len(bits)} values, formula has {f.num_vars} variables")
    cost = 0
    for c in f.clauses:
        if any(bool(bits[abs(x) - 1]) == (x > 0) for x in c.lits):
            continue
        if c.hard:
            return INFEASIBLE
        cost += c.weight
    return cost
