import random

import pytest

from semiinv.catalog import enumerate_alphas, parse_descriptor, sigma_star, spanning_element
from semiinv.ring import GF
from semiinv.separator import (
    STRATEGIES,
    evaluate_set,
    irredundancy_witness,
    kaygorodov_preimages,
    kaygorodov_set,
    reference_agrees,
    sample_pair,
    separating_fuzz,
    separating_system,
)
from semiinv.verifier import random_pair, random_tuple

F = GF(101)


def test_evaluate_simple():
    cat = separating_system(4)
    zero = tuple(((0, 0), (0, 0)) for _ in range(4))
    assert set(evaluate_set(cat, zero, F)) == {0}
    assert evaluate_set([parse_descriptor("det(1)", 1)], (((1, 0), (0, 1)),), F) == (1,)


def test_evaluate_constant_on_orbits():
    cat = separating_system(5)
    rng = random.Random(0)
    for _ in range(20):
        a = random_tuple(F, 5, rng)
        b = random_pair(F, rng).act(a)
        assert evaluate_set(cat, a, F) == evaluate_set(cat, b, F)


def test_evaluate_rejects_extra_slots():
    with pytest.raises(ValueError):
        evaluate_set([parse_descriptor("det(3)", 3)], (((1, 0), (0, 1)),), F)


def test_reference_agreement_oracle():
    rng = random.Random(1)
    a = random_tuple(F, 3, rng)
    assert reference_agrees(a, random_pair(F, rng).act(a), 6, F, rng) is None
    b = random_tuple(F, 3, rng)
    assert reference_agrees(a, b, 6, F, rng) == 1


def test_strategies_sample():
    rng = random.Random(2)
    for s in STRATEGIES:
        a, b = sample_pair(s, 5, F, rng)
        assert len(a) == len(b) == 5
    with pytest.raises(ValueError):
        sample_pair("nope", 2, F, rng)


def test_fuzz_full_system_small():
    rep = separating_fuzz(separating_system(5), 6, 5, F, 300, seed=3)
    assert rep["status"] == "pass" and rep["counterexample_count"] == 0
    assert "caveat" in rep
    assert sum(s["candidate_agreements"] for s in rep["strategies"].values()) > 100


def test_fuzz_empty_candidate_finds_counterexamples():
    rep = separating_fuzz([], 6, 3, F, 20, seed=0, strategies=("vs_zero",))
    assert rep["status"] == "fail" and rep["counterexample_count"] == 20
    cx = rep["witnesses"][0]
    assert cx["reference_values"][0] != cx["reference_values"][1]


def test_fuzz_reference_set_self_consistent():
    m = 2
    ref = [(str(a), spanning_element(a, m)) for q in (1, 2) for a in enumerate_alphas(q, m)]
    ref = [(l, p) for l, p in ref if p]
    rep = separating_fuzz(ref, 4, m, F, 200, seed=4)
    assert rep["counterexample_count"] == 0


def test_fuzz_quadratics_only_fail_on_transposes():
    quad = [d for d in separating_system(4) if d.kind != "xi"]
    rep = separating_fuzz(quad, 4, 4, F, 40, seed=5, strategies=("orbit", "uniform"))
    assert rep["status"] == "pass"
    # quadratics cannot tell A from its transpose once four slots are active
    rng = random.Random(6)
    a = random_tuple(F, 4, rng)
    at = tuple(((x[0][0], x[1][0]), (x[0][1], x[1][1])) for x in a)
    assert evaluate_set(quad, a, F) == evaluate_set(quad, at, F)
    assert reference_agrees(a, at, 4, F, rng) == 2


def test_fuzz_precondition():
    with pytest.raises(ValueError):
        separating_fuzz([], 8, 2, F, 1)
    with pytest.raises(ValueError):
        separating_fuzz([], 3, 2, F, 1)


def test_irredundancy_bracket_m2():
    cat = separating_system(2)
    w = irredundancy_witness(cat, parse_descriptor("br(1,2)", 2), 2, GF(2))
    assert w is not None and w["search"] == "exhaustive" and w["field"] == "GF(2)"
    a, b = (tuple(tuple(map(tuple, x)) for x in w[k]) for k in "AB")
    rest = [d for d in cat if d.token != "br(1,2)"]
    assert evaluate_set(rest, a, GF(2)) == evaluate_set(rest, b, GF(2))
    removed = [parse_descriptor("br(1,2)", 2)]
    assert evaluate_set(removed, a, GF(2)) != evaluate_set(removed, b, GF(2))


def test_irredundancy_xi():
    cat = separating_system(5)
    w = irredundancy_witness(cat, parse_descriptor("xi(2,3,4,5)", 5), 5, budget=50_000)
    assert w is not None
    a = tuple(tuple(map(tuple, x)) for x in w["A"])
    assert a[0] == ((0, 0), (0, 0))


def test_irredundancy_absent():
    with pytest.raises(ValueError):
        irredundancy_witness(separating_system(3), parse_descriptor("xi(1,2,3,4)", 4), 4)


def test_irredundancy_budget_exhausted():
    assert irredundancy_witness(separating_system(4), parse_descriptor("xi(1,2,3,4)", 4), 4, budget=5) is None


def test_kaygorodov_counts():
    assert len(kaygorodov_set(3)) == 10
    assert [lab for lab, _ in kaygorodov_set(1)] == ["tr(1)", "det(1)"]
    with pytest.raises(ValueError):
        kaygorodov_set(0)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_kaygorodov_preimages_exact(m):
    for (_, target), (_, pre) in zip(kaygorodov_set(m), kaygorodov_preimages(m)):
        assert sigma_star(pre, m + 1) == target


def test_sigma_star_compatibility_numeric():
    rng = random.Random(8)
    ident = ((1, 0), (0, 1))
    for _ in range(20):
        a = random_tuple(F, 3, rng)
        assert evaluate_set(kaygorodov_set(3), a, F) == evaluate_set(kaygorodov_preimages(3), a + (ident,), F)
