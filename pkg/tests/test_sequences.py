"""Prefix sequences: tail functional, ratio analysis, block construction."""

import random
from fractions import Fraction as F

import pytest

from waug.sequences import (PrefixSequence, build_block_sequence,
                            check_prefix_tp, failure_witness, growth_check,
                            norm_tau, tail_functional, vector_from_json,
                            vector_to_json)
from waug.structures import InvalidInput


def geometric(N, base=2):
    return PrefixSequence([F(base) ** n for n in range(1, N + 1)])


def ones(N):
    return PrefixSequence([F(1)] * N)


def test_prefix_sequence_basics():
    seq = geometric(5)
    assert seq.N == 5
    assert seq.tau(3) == 8
    assert seq.prefix_sums()[3] == 2 + 4 + 8
    with pytest.raises(InvalidInput):
        PrefixSequence([F(1)])          # need at least two entries
    with pytest.raises(InvalidInput):
        PrefixSequence([F(1), F(1, 2)])  # below 1


def test_csv_round_trip():
    seq = geometric(6, 3)
    rows = list(seq.to_csv_rows())
    back = PrefixSequence.from_csv_rows(rows)
    assert back.values == seq.values
    with pytest.raises(InvalidInput):
        PrefixSequence.from_csv_rows([(1, 2, 1), (3, 4, 1)])  # gap in indices


def test_tail_functional_on_basis_vectors():
    seq = ones(30)
    # T(e^(1)) = 0; T(e^(J)) = sum of tau_1..tau_(J-1)
    assert tail_functional(seq, {1: F(1)}) == 0
    assert tail_functional(seq, {7: F(1)}) == 6
    g = geometric(10)
    assert tail_functional(g, {4: F(1)}) == 2 + 4 + 8


def test_tail_functional_matches_definition():
    # T(x) = sum_n tau_n |sum_{j>n} x_j| against a direct double loop
    rng = random.Random(501)
    seq = geometric(12)
    for _ in range(50):
        x = {j: F(rng.randrange(-5, 6), rng.randrange(1, 7))
             for j in rng.sample(range(1, 13), 5)}
        direct = F(0)
        for n in range(1, 13):
            tail = sum((c for j, c in x.items() if j > n), F(0))
            direct += seq.tau(n) * abs(tail)
        assert tail_functional(seq, x) == direct


def test_norm_tau():
    seq = geometric(5)
    assert norm_tau(seq, {1: F(1, 2), 3: F(-1, 4)}) == F(1, 2) * 2 + F(1, 4) * 8


def test_check_prefix_tp_geometric_consistent():
    rep = check_prefix_tp(geometric(10))
    assert rep["D_hat"] == F(512, 511)
    assert rep["classification"] == "prefix-consistent"
    # ratio_n = tau_(n+1)/sum_(j<=n) tau_j; first one is 4/2 = 2
    assert rep["ratios"][0] == 2


def test_check_prefix_tp_flat_suspect():
    rep = check_prefix_tp(ones(100))
    assert rep["D_hat"] == F(1, 99)
    assert rep["classification"] == "suspect-fail"


def test_check_prefix_tp_polynomial_suspect():
    # tau_n = n^2 decays like 3/n: strictly decreasing with >5% decay
    rep = check_prefix_tp(PrefixSequence([F(n * n) for n in range(1, 41)]))
    assert rep["classification"] == "suspect-fail"


def test_failure_witness_flat():
    rep = failure_witness(ones(100), F(10))
    assert rep["found"]
    x = rep["x"]
    assert len(x) <= 25
    assert rep["norm"] <= 1
    assert rep["T"] >= 10
    # independently recheck T and the norm
    seq = ones(100)
    assert tail_functional(seq, x) == rep["T"]
    assert norm_tau(seq, x) == rep["norm"]


def test_failure_witness_not_found_for_geometric():
    rep = failure_witness(geometric(30), F(10))
    assert not rep["found"]
    assert rep["note"]


def test_growth_check_geometric():
    rep = growth_check(geometric(20), F(1))
    assert rep["hypothesis_ok"] and rep["conclusion_ok"]
    rep2 = growth_check(ones(20), F(1))
    assert not rep2["hypothesis_ok"]
    # tau_3 = 1 < 1 * (tau_1 + tau_2) = 2 is the first violation
    assert rep2["hypothesis_first_failure"] == 3


def test_growth_conclusion_bound():
    # tau_(j+1) >= D (D+1)^(j-1) tau_1 for sequences satisfying the hypothesis
    seq = PrefixSequence([F(3) ** n for n in range(1, 15)])
    rep = growth_check(seq, F(2))
    assert rep["hypothesis_ok"] and rep["conclusion_ok"]


def test_block_sequence_markers_and_values():
    rep = build_block_sequence(F(2), 5)
    assert rep["markers"] == [1, 4, 8, 13, 19]
    seq = rep["sequence"]
    # block 1 covers j = 1, 2 at rho^(n_1+1) = 4
    assert seq.tau(1) == 4 and seq.tau(2) == 4
    # block 2 covers j = 3..5 at rho^(n_2+1) = 32
    assert seq.tau(3) == 32 and seq.tau(5) == 32
    assert rep["tau_geq_rho_pow_j"]
    assert rep["boundary_all_ok"]
    first = rep["boundary_ratios"][0]
    assert first["ratio"] == 1 and first["bound"] == 1


def test_block_sequence_boundary_ratio_is_exactly_one_over_k():
    # past k = 1 the ratio over the block j in [n_(k-1)+2, n_k] alone is
    # exactly 1/k; against the full prefix it is smaller, and <= 1/k is what
    # the report records
    rep = build_block_sequence(F(2), 8)
    seq, markers = rep["sequence"], rep["markers"]
    for k in range(2, 9):
        nk = markers[k - 1]
        if nk + 1 > seq.N:
            continue
        top = seq.tau(nk + 1)
        block_sum = sum(seq.tau(j) for j in range(markers[k - 2] + 2, nk + 1))
        assert top / block_sum == F(1, k)


def test_block_sequence_rejects_bad_input():
    with pytest.raises(InvalidInput):
        build_block_sequence(F(1), 5)
    with pytest.raises(InvalidInput):
        build_block_sequence(F(2), 1)


def test_vector_json_round_trip():
    x = {3: F(1, 2), 7: F(-2, 5)}
    assert vector_from_json(vector_to_json(x)) == x


def test_prefix_consistent_bound_property():
    # for nonnegative x with ||x||_tau <= 1, T(x) <= 1/D_hat
    rng = random.Random(502)
    seq = geometric(16)
    rep = check_prefix_tp(seq)
    dhat = rep["D_hat"]
    for _ in range(100):
        raw = {j: F(rng.randrange(0, 5), rng.randrange(1, 9))
               for j in rng.sample(range(1, 17), 6)}
        nrm = norm_tau(seq, raw)
        if nrm == 0:
            continue
        x = {j: c / nrm for j, c in raw.items()}
        assert tail_functional(seq, x) <= 1 / dhat
