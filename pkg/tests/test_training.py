import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinning_top import rng
from spinning_top.games import LayeredSpec, RandomGoSSpec, elo_game, layered_game, rps, standardize
from spinning_top.training import (
    CONVERGED,
    NO_CANDIDATE,
    STEP_CAP,
    drift_from_components,
    non_improving_runs,
    oracle_beat_all,
    oracle_beat_average,
    population_sweep,
    random_gos_drift,
    run_training,
    weakest,
)

P_RPS = rps().payoff  # rock, scissors, paper


def test_oracle_examples():
    assert oracle_beat_average(P_RPS, [1]) == 0  # rock beats scissors
    assert oracle_beat_all(P_RPS, [0, 1]) is None
    # against {rock, scissors} the summed payoffs are paper 0, so nobody qualifies
    assert oracle_beat_average(P_RPS, [0, 1]) is None


def test_oracle_is_pessimistic():
    P = standardize(elo_game(10, 0).payoff)
    strength = P.mean(axis=1)
    w = weakest(P, 1)
    cand = oracle_beat_all(P, w)
    better = [i for i in range(10) if P[i, w[0]] > 0]
    assert cand == min(better, key=lambda i: strength[i])


def test_oracle_ties_go_to_lowest_index():
    P = np.zeros((4, 4))
    P[1:, 0] = 1
    P[0, 1:] = -1
    assert oracle_beat_all(P, [0]) == 1


def test_rps_cycles_forever():
    t = run_training(P_RPS, 1, step_cap=30)
    assert t.terminal_status == STEP_CAP and t.steps == 30


def test_elo_self_play_converges():
    P = standardize(elo_game(50, 3).payoff)
    t = run_training(P, 1)
    assert t.terminal_status == CONVERGED
    assert t.final_population == [int(np.argmax(P.mean(axis=1)))]
    strengths = [r.mean_strength for r in t.records]
    assert all(a < b for a, b in zip(strengths, strengths[1:]))


def test_no_candidate_status():
    assert run_training(np.zeros((3, 3)), 1).terminal_status == CONVERGED  # one cluster of ties
    # 1 beats 2 but only ties 0, so nothing beats both members of {0, 2}; neither is in the top cluster
    P = np.array([[0, 0, -1, -1, -1, -1], [0, 0, 1, 0, 1, 0], [1, -1, 0, 0, 0, 0],
                  [1, 0, 0, 0, -1, 0], [1, -1, 0, 1, 0, 1], [1, 0, 0, 0, -1, 0]], dtype=float)
    t = run_training(P, 2, "beat_all")
    assert t.terminal_status == NO_CANDIDATE
    assert sorted(t.final_population) == [0, 2]


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 20), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_every_step_obeys_its_oracle(n, k, seed):
    g = np.random.default_rng(seed)
    A = g.uniform(-1, 1, size=(n, n))
    P = A - A.T
    k = min(k, n)
    t = run_training(P, k, "beat_average", step_cap=3 * n, seed=seed, replacement="random")
    for r in t.records:
        if r.candidate is not None:
            assert r.candidate not in r.population
            assert P[r.candidate, r.population].sum() > 0
        else:
            outside = [i for i in range(n) if i not in r.population]
            assert all(P[i, r.population].sum() <= 0 for i in outside)
    assert len(t.final_population) == k


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=7), st.integers(0, 2**16))
def test_layered_training_reaches_top(raw, seed):
    peak = int(np.argmax(raw))
    sizes = tuple(sorted(raw[:peak]) + [raw[peak]] + sorted(raw[peak + 1:], reverse=True))
    g = layered_game(LayeredSpec(sizes), seed)
    layer = np.array(g.provenance["layer_of"])
    for pop in {max(sizes), max(sizes) + 1}:
        if pop > g.n:
            continue
        t = run_training(g.payoff, pop, "beat_all")
        assert t.terminal_status == CONVERGED
        assert np.any(layer[t.final_population] == 0)
        assert max(non_improving_runs(t, layer)) < pop


def test_non_improving_runs_counting():
    from spinning_top.training import StepRecord, Trajectory

    level = [0, 1, 1, 2]
    recs = [StepRecord([3], 0.0, 2, False), StepRecord([2], 0.0, 1, False),
            StepRecord([1], 0.0, 0, False), StepRecord([0], 0.0, None, True)]
    t = Trajectory(recs, CONVERGED, 1, 0, [0], 0.0)
    assert non_improving_runs(t, level) == [0, 1, 0]


def test_sweep_validation_and_csv():
    with pytest.raises(ValueError):
        population_sweep(P_RPS, [4])
    with pytest.raises(ValueError):
        run_training(P_RPS, 1, replacement="best")
    sw = population_sweep(P_RPS, [1, 3], step_cap=10, seeds=(0, 1))
    lines = sw.to_csv().splitlines()
    assert lines[0] == "size,seed,steps,terminal_status,final_mean_strength"
    assert len(lines) == 5
    frac = sw.convergence_fraction()
    assert frac[1] == 0.0 and frac[3] == 1.0


def test_sweep_deterministic():
    P = standardize(elo_game(30, 1).payoff)
    a = population_sweep(P, [1, 2], seeds=(0, 1), replacement="random").to_csv()
    b = population_sweep(P, [1, 2], seeds=(0, 1), replacement="random").to_csv()
    assert a == b


def test_drift_without_noise_is_positive():
    g = rng.stream(5, 0)
    S = g.normal(size=200)
    incs, stalled = drift_from_components(np.zeros((200, 200)), S, 4, 30, g)
    assert incs.size > 0 and np.all(incs > 0)


def test_drift_stats_shape():
    d = random_gos_drift(RandomGoSSpec(100, 1.0, 1.0, 0), 2, 5, 4, seed=0)
    assert d.m == 2 and d.increments.size + d.stalled_trials > 0
    with pytest.raises(ValueError):
        random_gos_drift(RandomGoSSpec(10, 1.0, 1.0, 0), 11, 5, 1, 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 16), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_beat_all_never_moves_down_the_cluster_order(n, k, seed):
    from spinning_top.nash import nash_clustering

    g = np.random.default_rng(seed)
    A = np.sign(g.uniform(-1, 1, size=(n, n)))
    P = np.triu(A, 1) - np.triu(A, 1).T
    cl = nash_clustering(P)
    label = cl.labels()
    t = run_training(P, min(k, n), "beat_all", step_cap=4 * n, clustering=cl)
    for r in t.records:
        if r.candidate is None:
            continue
        full = [i for i, c in enumerate(cl.clusters) if set(c.members.tolist()) <= set(r.population)]
        if full:
            assert label[r.candidate] < min(full)


def test_trajectories_bit_identical():
    g = np.random.default_rng(3)
    A = g.uniform(-1, 1, (30, 30))
    P = A - A.T
    a = run_training(P, 3, seed=9, replacement="random").to_dict()
    b = run_training(P, 3, seed=9, replacement="random").to_dict()
    assert a == b
