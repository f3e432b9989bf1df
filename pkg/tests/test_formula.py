import gzip
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import formulas
from maxsat_bandit.formula import (
    INFEASIBLE,
    MAX_WEIGHT,
    Literal,
    WCNFError,
    from_clauses,
    parse_wcnf,
    serialize_wcnf,
    validate_model,
)
from oracles import as_pairs, brute_cost

CLASSIC = "p wcnf 2 2 10\n10 1 2 0\n3 -1 0\n"
MODERN = "h 1 2 0\n3 -1 0\n"


def test_classic_example():
    f = parse_wcnf(CLASSIC)
    assert f.num_vars == 2
    assert f.num_hard == 1 and f.num_soft == 1
    hard, soft = f.clauses
    assert hard.hard and hard.lits == (1, 2) and hard.weight is None
    assert soft.soft and soft.lits == (-1,) and soft.weight == 3 and soft.soft_id == 0
    assert f.total_soft_weight == 3


def test_modern_matches_classic():
    assert parse_wcnf(MODERN) == parse_wcnf(CLASSIC)


def test_bytes_and_gzip():
    f = parse_wcnf(CLASSIC)
    assert parse_wcnf(CLASSIC.encode()) == f
    assert parse_wcnf(gzip.compress(CLASSIC.encode())) == f


@pytest.mark.parametrize(
    "text",
    [
        "p wcnf 1 1 5\n0 1 0\n",
        "p wcnf 1 1 5\n-2 1 0\n",
        "p wcnf 2 1 5\n3 1 3 0\n",
        "p wcnf 2 1\n3 1 0\n",
        "p cnf 2 1\n1 2 0\n",
        "p wcnf 2 1 5\n3 0\n",
        "h 0\n",
        "p wcnf 2 1 5\n3 1 2\n",
        "p wcnf 2 1 5\n3 x 2 0\n",
        "p wcnf 2 1 5\nh 1 2 0\n",
        "3 1 0\np wcnf 2 1 5\n",
        f"{MAX_WEIGHT + 1} 1 0\n",
        f"{MAX_WEIGHT} 1 0\n{MAX_WEIGHT} 2 0\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(WCNFError):
        parse_wcnf(text)


def test_comments_and_blank_lines():
    f = parse_wcnf("c hello\n\nc another\np wcnf 2 2 10\nc mid\n10 1 2 0\n  3   -1   0  \n")
    assert f == parse_wcnf(CLASSIC)


def test_weight_at_or_above_top_is_hard():
    f = parse_wcnf("p wcnf 2 2 10\n10 1 0\n11 2 0\n")
    assert f.num_hard == 2


def test_duplicate_literals_deduplicated():
    f = parse_wcnf("h 1 1 2 1 0\n2 -2 -2 0\n")
    assert f.clauses[0].lits == (1, 2)
    assert f.clauses[1].lits == (-2,)


def test_tautologies_dropped():
    f = parse_wcnf("h 1 -1 0\n4 2 -2 3 0\n5 3 0\n")
    assert f.num_hard == 0 and f.num_soft == 1
    assert f.tautology_weight == 4
    assert f.total_soft_weight == 5
    assert f.clauses[0].soft_id == 0
    assert parse_wcnf(serialize_wcnf(f)) == f
    assert validate_model(f, [0, 0, 0]) == 5


def test_duplicate_clauses_kept():
    f = parse_wcnf("2 1 0\n2 1 0\n")
    assert f.num_soft == 2
    assert validate_model(f, [0]) == 4


def test_unused_variables_allowed():
    f = parse_wcnf("p wcnf 5 1 10\n3 1 0\n")
    assert f.num_vars == 5
    assert validate_model(f, [1, 0, 1, 0, 1]) == 0


def test_literal_type():
    f = parse_wcnf(CLASSIC)
    assert f.clauses[1].literals == (Literal(1, True),)
    assert Literal.from_int(-3).to_int() == -3
    assert -Literal(2, False) == Literal(2, True)


def test_validate_model_examples():
    f = parse_wcnf(CLASSIC)
    assert validate_model(f, (1, 0)) == 3
    assert validate_model(f, (0, 1)) == 0
    assert validate_model(f, (0, 0)) is INFEASIBLE
    with pytest.raises(ValueError):
        validate_model(f, (0,))


def test_infeasible_sentinel_has_no_arithmetic():
    with pytest.raises(TypeError):
        INFEASIBLE + 1
    with pytest.raises(TypeError):
        INFEASIBLE < 3


def test_serialize_top():
    f = from_clauses(2, [[1, 2]], [([1], 1)] * 40)
    text = serialize_wcnf(f)
    assert "p wcnf 2 41 41" in text


@given(formulas())
def test_round_trip(f):
    assert parse_wcnf(serialize_wcnf(f)) == f
    assert parse_wcnf(serialize_wcnf(f, "modern")).clauses == f.clauses


@given(formulas())
def test_dialects_agree(f):
    # the modern dialect infers num_vars from the literals
    g = parse_wcnf(serialize_wcnf(f, "modern"))
    h = parse_wcnf(serialize_wcnf(f, "classic").replace(f"p wcnf {f.num_vars} ", f"p wcnf {g.num_vars} ", 1))
    assert g == h


@given(formulas())
def test_counts_and_soft_ids(f):
    assert f.num_hard + f.num_soft == len(f.clauses)
    assert sorted(c.soft_id for c in f.clauses if c.soft) == list(range(f.num_soft))
    assert [c.id for c in f.clauses] == list(range(len(f.clauses)))
    for c in f.clauses:
        assert len({abs(x) for x in c.lits}) == len(c.lits)


@given(formulas())
def test_occurrence_index_is_inverse_of_membership(f):
    rebuilt = {}
    for c in f.clauses:
        for x in c.lits:
            rebuilt.setdefault(x, []).append(c.id)
    for v in range(1, f.num_vars + 1):
        for lit in (v, -v):
            assert list(f.occurrences(lit)) == rebuilt.get(lit, [])
            assert f.occurrences(Literal.from_int(lit)) == f.occurrences(lit)


@given(formulas(), st.randoms(use_true_random=False))
def test_validate_model_matches_brute_force(f, rnd):
    bits = [rnd.random() < 0.5 for _ in range(f.num_vars)]
    assert validate_model(f, bits) == brute_cost(as_pairs(f), bits)


def test_validate_model_random_many():
    rng = random.Random(5)
    from oracles import random_formula

    for _ in range(200):
        f = random_formula(rng, rng.randint(1, 12), rng.randint(0, 10), rng.randint(0, 20))
        bits = [rng.random() < 0.5 for _ in range(f.num_vars)]
        assert validate_model(f, bits) == brute_cost(as_pairs(f), bits)
