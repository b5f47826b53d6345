import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_antisymmetric
from spinning_top.games import LayeredSpec, elo_game, layered_game, rps, standardize
from spinning_top.nash import (
    NashSolverError,
    brute_force_nash,
    exploitability,
    matrix_game_value,
    max_entropy_nash,
    nash_clustering,
    rpp,
    rpp_matrix,
    solve_matrix_game,
)


def test_rps_uniform():
    ms = max_entropy_nash(rps().payoff)
    np.testing.assert_allclose(ms.dense(3), [1 / 3] * 3, atol=1e-8)


def test_dominant_strategy():
    P = standardize(elo_game(10, 1).payoff)
    ms = max_entropy_nash(P)
    assert ms.support.tolist() == [int(np.argmax(P.mean(axis=1)))]


def test_single_strategy_and_empty():
    assert max_entropy_nash(np.zeros((1, 1))).support.tolist() == [0]
    with pytest.raises(ValueError):
        max_entropy_nash(rps().payoff, restriction=[])


def test_zero_game_is_uniform():
    ms = max_entropy_nash(np.zeros((5, 5)))
    np.testing.assert_allclose(ms.dense(5), np.full(5, 0.2), atol=1e-8)


def test_max_entropy_on_continuum():
    # two copies of rock: the equilibrium face is a segment, max entropy splits rock evenly
    P = np.array([[0, 0, 1, -1], [0, 0, 1, -1], [-1, -1, 0, 1], [1, 1, -1, 0]], dtype=float)
    x = max_entropy_nash(P).dense(4)
    np.testing.assert_allclose(x, [1 / 6, 1 / 6, 1 / 3, 1 / 3], atol=1e-6)


def test_restriction_uses_original_ids():
    P = standardize(elo_game(6, 3).payoff)
    strength = P.mean(axis=1)
    R = [1, 3, 5]
    ms = max_entropy_nash(P, restriction=R)
    assert ms.support.tolist() == [R[int(np.argmax(strength[R]))]]


def test_small_weight_with_nearly_binding_outsider():
    # unique equilibrium with a 2.5% weight, and the excluded strategy is only 8e-5 short of tying
    P = random_antisymmetric(np.random.default_rng(8486), 4)
    x = max_entropy_nash(P).dense(4)
    np.testing.assert_allclose(x, brute_force_nash(P).dense(4), atol=1e-8)
    assert exploitability(P, x) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1), st.booleans())
def test_matches_brute_force(n, seed, sign):
    P = random_antisymmetric(np.random.default_rng(seed), n, sign)
    a = max_entropy_nash(P).dense(n)
    b = brute_force_nash(P).dense(n)
    assert np.abs(a - b).max() <= 1e-4
    assert exploitability(P, a) <= 1e-4


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 25), st.integers(0, 2**32 - 1), st.booleans())
def test_clustering_partitions(n, seed, sign):
    P = random_antisymmetric(np.random.default_rng(seed), n, sign)
    cl = nash_clustering(P)
    members = np.concatenate([c.members for c in cl.clusters])
    assert sorted(members.tolist()) == list(range(n))
    assert np.all(cl.labels() >= 0)
    for c in cl.clusters:
        assert c.exploitability <= 1e-4
        assert abs(c.weights.sum() - 1) <= 1e-9


def test_elo_clusters_are_singletons_in_rating_order():
    g = elo_game(50, 7)
    P = standardize(g.payoff)
    cl = nash_clustering(P)
    assert cl.sizes == [1] * 50
    order = [int(c.members[0]) for c in cl.clusters]
    assert order == np.argsort(-P.mean(axis=1), kind="stable").tolist()


def test_layered_clusters_follow_layers():
    g = layered_game(LayeredSpec((1, 3, 1)), 0)
    cl = nash_clustering(g.payoff)
    layer = np.array(g.provenance["layer_of"])
    assert cl.sizes == [1, 3, 1]
    for k, c in enumerate(cl.clusters):
        assert set(layer[c.members]) == {k}


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=6), st.integers(0, 2**16))
def test_layered_rpp_is_ordered(raw, seed):
    # make the layer sizes unimodal by sorting around the largest
    peak = int(np.argmax(raw))
    sizes = tuple(sorted(raw[:peak]) + [raw[peak]] + sorted(raw[peak + 1:], reverse=True))
    g = layered_game(LayeredSpec(sizes), seed)
    cl = nash_clustering(g.payoff)
    R, _ = rpp_matrix(g.payoff, cl)
    iu = np.triu_indices(len(cl), 1)
    assert np.all(R[iu] >= -1e-4)


def test_rpp_examples():
    P = rps().payoff
    assert rpp(P, [0], [1]).value == 1
    assert rpp(P, [0, 1], [2]).value == pytest.approx(1.0)  # scissors beats paper
    assert rpp(P, [0], [1, 2]).value == pytest.approx(-1.0)
    assert rpp(P, [0, 1, 2], [0, 1, 2]).value == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        rpp(P, [], [0])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_rpp_antisymmetric(n, seed):
    g = np.random.default_rng(seed)
    P = random_antisymmetric(g, n)
    A = g.choice(n, size=int(g.integers(1, n + 1)), replace=False)
    B = g.choice(n, size=int(g.integers(1, n + 1)), replace=False)
    assert rpp(P, A, B).value == pytest.approx(-rpp(P, B, A).value, abs=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_solve_matrix_game_certified(a, b, seed):
    M = np.random.default_rng(seed).uniform(-1, 1, size=(a, b))
    x, y, v = solve_matrix_game(M)
    assert v == pytest.approx(matrix_game_value(M), abs=1e-6)
    assert (M @ y).max() <= v + 1e-4
    assert (x @ M).min() >= v - 1e-4
    assert abs(x.sum() - 1) < 1e-9 and abs(y.sum() - 1) < 1e-9


def test_solver_error_carries_partial():
    err = NashSolverError("boom", partial=[1])
    assert err.partial == [1] and "boom" in str(err)


def test_clustering_json_roundtrip():
    import json

    cl = nash_clustering(rps().payoff)
    d = json.loads(cl.to_json(rps().labels))
    assert d["n"] == 3 and d["clusters"][0]["labels"] == ["rock", "scissors", "paper"]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=2, max_size=6), st.integers(0, 2**16))
def test_beating_a_full_cluster_means_a_stronger_cluster(raw, seed):
    peak = int(np.argmax(raw))
    sizes = tuple(sorted(raw[:peak]) + [raw[peak]] + sorted(raw[peak + 1:], reverse=True))
    P = layered_game(LayeredSpec(sizes), seed).payoff
    cl = nash_clustering(P)
    label = cl.labels()
    for i, c in enumerate(cl.clusters):
        for s in range(len(P)):
            if np.all(P[s, c.members] > 0):
                assert label[s] < i


@pytest.mark.parametrize("seed", range(5))
def test_random_gos_clusters_have_narrow_skill_range(seed):
    from spinning_top.games.normal_form import RandomGoSSpec, random_gos_components, random_gos_payoff

    W, S = random_gos_components(RandomGoSSpec(60, 0.3, 1.0, seed))
    Wt = 0.5 * (W - W.T)
    alpha = 2 * np.abs(Wt).max() * (1 + 1e-9)
    cl = nash_clustering(standardize(random_gos_payoff(W, S)))
    for c in cl.clusters:
        assert np.ptp(S[c.members]) <= alpha
