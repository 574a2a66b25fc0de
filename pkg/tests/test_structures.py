"""Structures, division balls, ancestries, geodesic words."""

import random
from fractions import Fraction as F

import pytest

from waug.structures import (InvalidInput, ResourceLimit, UNIVERSE,
                             FreeStructure, IntegerGroup, IntegerLattice,
                             TableMonoid, ZeroAdjoinedMonoid, bfs_words,
                             closed_form_ball_size, division_balls,
                             find_ancestry, geodesic_word, h_x_fixpoint,
                             pseudo_finite_within, set_contains,
                             structure_from_spec)


def brute_division_balls(s, gens, depth):
    """Independent oracle: the level-closure recursion done naively."""
    e = s.identity()
    balls = [frozenset([e])]
    for _ in range(depth):
        prev = balls[-1]
        acc = set(prev)
        for x in gens:
            for u in prev:
                acc.add(s.multiply(u, x))
            # division: all v with v*x in prev, found by scanning candidates
            # built from everything seen plus one more multiplication layer
            for v in _candidates(s, gens, prev):
                if s.multiply(v, x) in prev:
                    acc.add(v)
        balls.append(frozenset(acc))
    return balls


def _candidates(s, gens, prev):
    out = set(prev)
    for u in prev:
        for x in gens:
            out.add(s.multiply(u, x))
            inv = None
            try:
                inv = s.invert(x)
            except Exception:
                inv = None
            if inv is not None:
                out.add(s.multiply(u, inv))
    return out


# ---------------------------------------------------------------------------
# families and their standard balls
# ---------------------------------------------------------------------------

def test_integer_group_balls():
    s, gens = structure_from_spec({"family": "Z"})
    bt = division_balls(s, gens, 6)
    assert bt.sizes() == [2 * n + 1 for n in range(7)]
    assert sorted(bt.ball(2)) == [-2, -1, 0, 1, 2]
    assert closed_form_ball_size(s, gens, 5) == 11


def test_integer_lattice_balls():
    s, gens = structure_from_spec({"family": "Zd", "params": {"d": 2}})
    bt = division_balls(s, gens, 4)
    # l1 balls in Z^2: 1, 5, 13, 25, 41
    assert bt.sizes() == [1, 5, 13, 25, 41]
    assert closed_form_ball_size(s, gens, 4) == 41


def test_free_group_balls():
    s, gens = structure_from_spec(
        {"family": "free", "params": {"rank": 2, "inverses": True}})
    bt = division_balls(s, gens, 5)
    assert bt.sizes() == [2 * 3**n - 1 for n in range(6)]
    assert closed_form_ball_size(s, gens, 6) == 2 * 3**6 - 1


def test_free_monoid_balls_include_divisions():
    s, gens = structure_from_spec(
        {"family": "free", "params": {"rank": 2, "inverses": False}})
    bt = division_balls(s, gens, 4)
    # suffix-division keeps the ball equal to all words of length <= n
    assert bt.sizes() == [2 ** (n + 1) - 1 for n in range(5)]
    assert (1, 2) in bt.ball(2)


@pytest.mark.parametrize("family,params,depth", [
    ("Z", {}, 3),
    ("Zd", {"d": 2}, 2),
    ("free", {"rank": 2, "inverses": True}, 3),
    ("free", {"rank": 2, "inverses": False}, 3),
])
def test_balls_match_brute_force(family, params, depth):
    s, gens = structure_from_spec({"family": family, "params": params})
    bt = division_balls(s, gens, depth)
    brute = brute_division_balls(s, gens, depth)
    for n in range(depth + 1):
        assert bt.ball(n) == brute[n]


def test_zero_adjoined_universal_ball():
    s, _ = structure_from_spec({"family": "zero_adjoined", "params": {"rank": 2}})
    theta = "theta"
    bt = division_balls(s, [theta], 3)
    assert bt.sizes() == [1, 2, "all", "all"]
    assert bt.universal_at() == 2
    assert set_contains(bt.ball(2), (1, 2, 1))
    with pytest.raises(ResourceLimit):
        bt.sphere(2)


def test_zero_adjoined_absorbs():
    s = ZeroAdjoinedMonoid(2)
    th = "theta"
    assert s.multiply(th, (1,)) == th
    assert s.multiply((1,), th) == th
    assert s.multiply((1,), (2,)) == (1, 2)


def test_table_monoid_validation():
    # 0 must be a two-sided identity
    with pytest.raises(InvalidInput):
        TableMonoid([[1, 0], [0, 1]])
    # non-associative at (1,1,2): 1*(1*2) = 2 but (1*1)*2 = 1
    with pytest.raises(InvalidInput):
        TableMonoid([[0, 1, 2], [1, 2, 2], [2, 2, 1]])
    # valid: C3
    t = TableMonoid([[(i + j) % 3 for j in range(3)] for i in range(3)])
    assert t.is_group
    assert t.multiply(1, 2) == 0
    assert t.invert(1) == 2


def test_cyclic_group_pseudofinite():
    T5 = [[(i + j) % 5 for j in range(5)] for i in range(5)]
    s, gens = structure_from_spec(
        {"family": "table", "params": {"table": T5}, "generators": [1, 4]})
    rep = pseudo_finite_within(s, gens, 5)
    assert rep.found and rep.n == 2
    assert rep.ball_sizes == [1, 3, 5]


def test_free_monoid_not_pseudofinite_within_50():
    s, gens = structure_from_spec(
        {"family": "free", "params": {"rank": 2, "inverses": False}})
    rep = pseudo_finite_within(s, gens, 50)
    assert not rep.found
    assert rep.reason  # explains why without enumerating 2^51 words


def test_zero_adjoined_pseudofinite_at_2():
    s, _ = structure_from_spec({"family": "zero_adjoined", "params": {"rank": 2}})
    rep = pseudo_finite_within(s, ["theta"], 4)
    assert rep.found and rep.n == 2


def test_stall_is_permanent():
    # C2 x C2 with the single generator a: B_1 = {e,a} and it never grows
    T = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
    s, gens = structure_from_spec(
        {"family": "table", "params": {"table": T}, "generators": [1]})
    bt, stable = h_x_fixpoint(s, gens, 6)
    assert stable == 2
    assert all(bt.ball(n) == bt.ball(1) for n in range(1, 7))


# ---------------------------------------------------------------------------
# ancestry chains
# ---------------------------------------------------------------------------

def _replay(s, chain):
    """Check the chain invariant: each step recovers the previous element."""
    for prev, step in zip(chain, chain[1:]):
        if step.op == "mul":
            assert s.multiply(step.elem, step.x) == prev.elem
        else:
            assert step.op == "div"
            assert s.multiply(prev.elem, step.x) == step.elem
    assert chain[-1].elem == s.identity()


@pytest.mark.parametrize("family,params", [
    ("Z", {}),
    ("free", {"rank": 2, "inverses": True}),
    ("free", {"rank": 2, "inverses": False}),
])
def test_ancestry_chains_replay(family, params):
    s, gens = structure_from_spec({"family": family, "params": params})
    bt = division_balls(s, gens, 4)
    rng = random.Random(901)
    pool = [u for n in range(5) for u in bt.sphere(n)]
    for u in rng.sample(pool, min(20, len(pool))):
        chain, _ = find_ancestry(s, gens, u, 4)
        assert chain is not None
        assert chain[0].elem == u
        _replay(s, chain)


def test_ancestry_not_found_outside_ball():
    s, gens = structure_from_spec({"family": "Z"})
    chain, _ = find_ancestry(s, gens, 10, 3)
    assert chain is None


def test_ancestry_through_universal_ball():
    s, _ = structure_from_spec({"family": "zero_adjoined", "params": {"rank": 2}})
    chain, _ = find_ancestry(s, ["theta"], (1, 2, 1), 3)
    assert chain is not None
    _replay(s, chain)


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

def test_bfs_words_shortest_and_least():
    s, gens = structure_from_spec(
        {"family": "free", "params": {"rank": 2, "inverses": True}})
    _, words = bfs_words(s, gens, 3)
    # gens order [a, a^-1, b, b^-1]; ab has the unique word (0, 2)
    assert words[(1, 2)] == (0, 2)
    assert words[s.identity()] == ()
    assert len(words[(1, 1, 2)]) == 3


def test_geodesic_word_closed_forms_match_bfs():
    rng = random.Random(902)
    for spec in ({"family": "Z"}, {"family": "Zd", "params": {"d": 2}},
                 {"family": "free", "params": {"rank": 2, "inverses": True}}):
        s, gens = structure_from_spec(spec)
        _, words = bfs_words(s, gens, 4)
        pool = sorted(words, key=s.elem_key)
        for u in rng.sample(pool, min(25, len(pool))):
            w = geodesic_word(s, gens, u, 6)
            assert len(w) == len(words[u])
            # replaying the word reaches u
            v = s.identity()
            for i in w:
                v = s.multiply(v, gens[i])
            assert v == u


def test_word_length_closed_forms():
    s, gens = structure_from_spec(
        {"family": "free", "params": {"rank": 2, "inverses": True}})
    assert s.word_length((1, 2, -1)) == 3
    z, _ = structure_from_spec({"family": "Z"})
    assert z.word_length(-7) == 7
    zd, _ = structure_from_spec({"family": "Zd", "params": {"d": 3}})
    assert zd.word_length((1, -2, 3)) == 6


def test_free_reduction_on_multiply():
    s = FreeStructure(2, True)
    assert s.multiply((1, 2), (-2,)) == (1,)
    assert s.multiply((1,), (-1,)) == ()
    assert s.invert((1, 2)) == (-2, -1)


def test_elem_json_round_trip():
    cases = [
        ({"family": "Z"}, [0, 5, -3]),
        ({"family": "Zd", "params": {"d": 2}}, [(0, 0), (1, -2)]),
        ({"family": "free", "params": {"rank": 2, "inverses": True}},
         [(), (1, 2, -1)]),
        ({"family": "zero_adjoined", "params": {"rank": 2}},
         [(), (1, 2), "theta"]),
    ]
    for spec, elems in cases:
        s, _ = structure_from_spec(spec)
        for u in elems:
            assert s.elem_from_json(s.elem_to_json(u)) == u


def test_structure_spec_errors():
    with pytest.raises(InvalidInput):
        structure_from_spec({"family": "nope"})
    with pytest.raises(InvalidInput):
        structure_from_spec({"family": "free", "params": {}})
    with pytest.raises(InvalidInput):
        # identity among the generators
        structure_from_spec({"family": "Z", "generators": [0, 1]})
    s, _ = structure_from_spec({"family": "free",
                                "params": {"rank": 2, "inverses": True}})
    with pytest.raises(InvalidInput):
        s.elem_from_json([1, -1])     # unreduced word
    with pytest.raises(InvalidInput):
        s.elem_from_json("theta")     # theta outside zero-adjoined


def test_ball_cap_respected():
    s, gens = structure_from_spec(
        {"family": "free", "params": {"rank": 2, "inverses": True}})
    with pytest.raises(ResourceLimit):
        division_balls(s, gens, 6, cap=100)
