from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unate.boolfn import (
    DOWN,
    UP,
    ContractError,
    TruthTable,
    all_up,
    directions_from_mask,
    generate,
    members,
    parse_directions,
)
from unate.exact import (
    all_tables,
    brute_force_distance_to_monotone,
    brute_force_is_monotone,
    distance,
    distance_to_monotone,
    distance_to_unate,
    exact_cvar,
    is_monotone_wrt,
    is_unate,
    maj_restriction,
    monotone_functions,
    restriction_distances,
    restriction_table,
    violating_edge_fraction,
)

XOR01 = {"family": "xor_pair", "params": {"i": 0, "j": 1}}


def spec(n, **kw):
    return {**kw, "n": n}


def tables_n4(count, seed=0):
    gen = np.random.default_rng(seed)
    return [TruthTable(4, gen.integers(0, 2, 16, dtype=np.uint8)) for _ in range(count)]


# ---------------------------------------------------------------- distance

def test_distance_basics():
    p = generate(spec(5, family="parity"))
    assert distance(p, p) == 0
    assert distance(p, p.negated()) == 1
    xor = generate(spec(2, **XOR01))
    orf = TruthTable(2, [0, 1, 1, 1])
    assert distance(xor, orf) == Fraction(1, 4)
    assert distance(orf, xor) == distance(xor, orf)
    with pytest.raises(ContractError):
        distance(xor, p)


# ------------------------------------------------------------ monotonicity

def test_is_monotone_examples():
    assert is_monotone_wrt(generate(spec(5, family="majority")), all_up(5)) == (True, None)
    d = generate(spec(3, family="dictator", params={"i": 0}))
    ok, edge = is_monotone_wrt(d, {0: DOWN, 1: UP, 2: UP})
    assert not ok and edge.coordinate == 0 and edge.orientation is UP


def test_edge_decision_matches_pair_definition_n3():
    for f in all_tables(3):
        for down in range(8):
            B = directions_from_mask(down, 3)
            ok, edge = is_monotone_wrt(f, B)
            assert ok == brute_force_is_monotone(f, B)
            if not ok:
                assert f.values[edge.lower] == edge.value_at_lower
                assert f.values[edge.upper] == edge.value_at_upper
                assert edge.orientation is not B[edge.coordinate]


def test_monotone_function_counts():
    # Dedekind numbers
    assert [len(monotone_functions(n)) for n in range(5)] == [2, 3, 6, 20, 168]


# ---------------------------------------------------------------- unateness

def test_is_unate_examples():
    ok, coord = is_unate(generate(spec(2, **XOR01)))
    assert not ok and coord in (0, 1)
    assert not is_unate(generate(spec(6, **XOR01)))[0]
    ok, B = is_unate(generate(spec(4, family="constant", params={"b": 1})))
    assert ok and B == all_up(4)
    ok, B = is_unate(generate(spec(3, family="anti_dictator", params={"i": 1})))
    assert ok and B[1] is DOWN
    assert is_monotone_wrt(generate(spec(3, family="anti_dictator", params={"i": 1})), B)[0]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_is_unate_against_definition(n):
    for f in all_tables(n):
        defn = any(brute_force_is_monotone(f, directions_from_mask(d, n)) for d in range(1 << n))
        ok, cert = is_unate(f)
        assert ok == defn
        if ok:
            assert is_monotone_wrt(f, cert)[0]


def test_unate_count_n3():
    assert sum(is_unate(f)[0] for f in all_tables(3)) == 104


# ------------------------------------------------------- distance to monotone

def test_distance_to_monotone_examples():
    maj = generate(spec(5, family="majority"))
    rep = distance_to_monotone(maj)
    assert rep.distance == 0 and rep.witness == maj
    f = TruthTable(2, [1, 0, 0, 0])
    rep = distance_to_monotone(f)
    assert rep.distance == Fraction(1, 4)
    assert list(rep.witness.values) == [0, 0, 0, 0]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_min_cut_equals_brute_force_exhaustive(n):
    for f in all_tables(n):
        assert distance_to_monotone(f).distance == brute_force_distance_to_monotone(f)


def test_min_cut_equals_brute_force_random_n4():
    for i, f in enumerate(tables_n4(300, seed=1)):
        B = directions_from_mask(i % 16, 4)
        rep = distance_to_monotone(f, B)
        assert rep.distance == brute_force_distance_to_monotone(f, B)
        assert is_monotone_wrt(rep.witness, B)[0]
        assert distance(rep.witness, f) == rep.distance


def test_witness_report_invariants():
    f = generate(spec(10, family="random_uniform"), 9)
    B = parse_directions("ududuuddud", 10)
    rep = distance_to_monotone(f, B)
    assert (rep.distance * 1024).denominator == 1
    assert is_monotone_wrt(rep.witness, B)[0]
    assert distance(rep.witness, f) == rep.distance
    assert "directions" in rep.to_json_obj()


def test_dimension_caps():
    with pytest.raises(ContractError):
        distance_to_monotone(generate(spec(17, family="majority")))
    with pytest.raises(ContractError):
        distance_to_unate(generate(spec(13, family="majority")))


# ----------------------------------------------------------- distance to unate

def test_distance_to_unate_of_unate_is_zero():
    for seed in range(10):
        f = generate(spec(7, family="random_unate"), seed)
        assert distance_to_unate(f).distance == 0


def test_xor_pair_distance_n2_cross_checked():
    f = generate(spec(2, **XOR01))
    rep = distance_to_unate(f)
    assert rep.distance == Fraction(1, 4)
    # independent route: nearest unate function among all 16 at n = 2
    unate = [g for g in all_tables(2) if is_unate(g)[0]]
    assert min(distance(f, g) for g in unate) == Fraction(1, 4)
    assert is_unate(rep.witness)[0]


@pytest.mark.parametrize("n", [3, 4, 6, 8])
def test_xor_pair_distance_is_quarter(n):
    assert distance_to_unate(generate(spec(n, **XOR01))).distance == Fraction(1, 4)


def test_parity_regression_constants():
    # 1/2 - C(n, n/2) / 2^(n+1) for even n
    expected = {2: Fraction(1, 4), 4: Fraction(5, 16), 6: Fraction(11, 32), 8: Fraction(93, 256)}
    for n, d in expected.items():
        assert distance_to_unate(generate(spec(n, family="parity"))).distance == d


def test_parity_all_direction_maps_agree_n4():
    f = generate(spec(4, family="parity"))
    assert {distance_to_monotone(f, directions_from_mask(d, 4)).distance for d in range(16)} == {Fraction(5, 16)}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_zero_unate_distance_iff_unate(n):
    for f in all_tables(n):
        assert (distance_to_unate(f, shortcut=False).distance == 0) == is_unate(f)[0]


def test_distance_to_unate_is_a_minimum():
    rng = np.random.default_rng(3)
    for f in tables_n4(40, seed=2):
        du = distance_to_unate(f).distance
        for d in rng.integers(0, 16, 4):
            assert du <= distance_to_monotone(f, directions_from_mask(int(d), 4)).distance


def test_generator_outputs_zero_unate_distance():
    for fam in ("random_unate", "random_monotone"):
        for seed in range(5):
            f = generate(spec(6, family=fam), seed)
            assert distance_to_unate(f, shortcut=False).distance == 0


# -------------------------------------------------------- restriction variance

def test_exact_cvar_examples():
    p = generate(spec(6, family="parity"))
    assert exact_cvar(p, []) == Fraction(1, 2)
    assert exact_cvar(p, range(6)) == 0
    junta = generate(spec(6, family="xor_pair", params={"i": 1, "j": 4}))
    assert exact_cvar(junta, [1, 4]) == 0
    assert exact_cvar(junta, [1]) == Fraction(1, 2)


@settings(max_examples=50)
@given(st.integers(0, 2**16 - 1), st.integers(0, 15))
def test_exact_cvar_matches_pair_enumeration(code, tmask):
    f = TruthTable(4, [(code >> j) & 1 for j in range(16)])
    free = 15 & ~tmask
    # enumerate every (x, y) with x_T = y_T, uniformly weighted
    diff = total = 0
    for x in range(16):
        for r in range(16):
            y = (x & tmask) | (r & free)
            if r & tmask:
                continue
            total += 1
            diff += f.values[x] != f.values[y]
    assert exact_cvar(f, members(tmask)) == Fraction(diff, total)


def test_maj_restriction_examples():
    f = generate(spec(5, family="random_uniform"), 2)
    assert maj_restriction(f, range(5)) == f
    d = generate(spec(4, family="dictator", params={"i": 2}))
    assert maj_restriction(d, [0, 1, 3]).weight() == 0
    maj = generate(spec(3, family="majority"))
    # fibers over x2: p = 0, 1/2, 1/2, 1 -> ties to 0 -> AND(x0, x1)
    assert list(maj_restriction(maj, [0, 1]).values) == [0, 0, 0, 1, 0, 0, 0, 1]


def test_restriction_distances_match_tables():
    f = generate(spec(5, family="random_uniform"), 8)
    T = [0, 3]
    ws, d = restriction_distances(f, T)
    for w, dist in zip(ws, d):
        assert distance(restriction_table(f, T, w), f) == Fraction(int(dist), 32)


def test_claim2_chain_tight_form():
    """E_w[dist(f_{T,w}, Maj_T)] = E_z[min(p, 1-p)] <= CVar for every (f, T)."""
    for i, f in enumerate(tables_n4(200, seed=5)):
        T = members(i % 16)
        _, d = restriction_distances(f, T, maj_restriction(f, T))
        mean = Fraction(int(d.sum()), 16 * len(d))
        assert mean <= exact_cvar(f, T)
        assert distance(f, maj_restriction(f, T)) == mean


def test_violating_edge_fraction():
    ad = generate(spec(4, family="anti_dictator", params={"i": 0}))
    assert violating_edge_fraction(ad, [0], {0: UP}) == 1
    assert violating_edge_fraction(ad, range(4), all_up(4)) == Fraction(1, 4)
    assert violating_edge_fraction(ad, [], {}) == 0
