import numpy as np
import pytest

import hubnet.ga as ga
from hubnet.assignment import feasibility_violations
from hubnet.errors import ConfigError, InfeasibleError
from hubnet.ga import (
    GaConfig,
    crossover,
    initialize_population,
    mutate,
    repair,
    run_ga,
    tournament_select,
)
from hubnet.model import Constraints

from conftest import matrix_problem, synthetic


def line_problem(constraints, fixed=(), flows=None):
    """Five sites on a line at 0, 10, 20, 100, 110 km."""
    pos = [0, 10, 20, 100, 110]
    d = [[abs(a - b) for b in pos] for a in pos]
    ids = ["A", "B", "C", "D", "E"]
    flows = flows if flows is not None else [("A", "D", 5), ("B", "E", 40), ("C", "A", 10), ("D", "B", 20), ("E", "C", 1)]
    return matrix_problem(ids, d, flows, constraints, fixed=fixed)


def b(p, hubs):
    return np.isin(np.array(p.ids), list(hubs))


# ---------------------------------------------------------------- repair


def test_feasible_chromosome_is_a_fixed_point():
    p = line_problem(Constraints(hub_count_min=1, hub_count_max=3, min_inter_hub_km=15))
    x = b(p, ["A", "D"])
    out = repair(x, p)
    assert out.feasible and np.array_equal(out.bits, x)


def test_all_zero_with_two_fixed_raises_count():
    p = line_problem(Constraints(hub_count_min=3, hub_count_max=4), fixed=["A", "E"])
    out = repair(np.zeros(p.n, dtype=bool), p)
    assert out.feasible
    assert out.bits[[0, 4]].all()
    assert out.bits.sum() == 3
    # spoke km after opening B: C 10 + D 10 = 20; C: B 10 + D 10 = 20; D: B 10 + C 20 = 30.
    # B and C tie, the smaller index wins
    assert out.bits[1]


def test_spacing_closes_lighter_hub_of_closest_pair():
    # A-B 10 km apart; B handles more than A, so A closes
    p = line_problem(Constraints(hub_count_min=1, hub_count_max=5, min_inter_hub_km=15))
    out = repair(b(p, ["A", "B", "D"]), p)
    assert out.feasible
    assert p.ids[0] not in [p.ids[i] for i in np.flatnonzero(out.bits)]
    assert list(np.flatnonzero(out.bits)) == [1, 3]


def test_spacing_exempts_fixed_pairs_but_closes_free_partner():
    p = line_problem(Constraints(hub_count_min=1, hub_count_max=5, min_inter_hub_km=15), fixed=["A", "B"])
    out = repair(b(p, ["A", "B", "C"]), p)
    assert list(np.flatnonzero(out.bits)) == [0, 1]


def test_over_count_closes_lowest_throughput():
    p = line_problem(Constraints(hub_count_min=1, hub_count_max=2))
    out = repair(np.ones(5, dtype=bool), p)
    assert out.feasible and out.bits.sum() == 2


def test_volume_floor_closes_small_hubs():
    p = line_problem(Constraints(hub_count_min=1, hub_count_max=5, min_volume_per_hub=60))
    out = repair(b(p, ["A", "C", "E"]), p)
    assert out.feasible
    assert feasibility_violations(out.bits, p) == []


def test_unsatisfiable_floor_is_flagged():
    p = line_problem(Constraints(hub_count_min=2, hub_count_max=2, min_dcs_per_hub=4))
    out = repair(b(p, ["A", "D"]), p)
    assert not out.feasible


@pytest.mark.parametrize("seed", range(4))
def test_random_repairs_satisfy_checker(seed):
    p = synthetic(10, 3, 200 + seed,
                  Constraints(hub_count_min=2, hub_count_max=4, min_inter_hub_km=30, min_dcs_per_hub=2,
                              min_volume_per_hub=200))
    rng = np.random.default_rng(seed)
    for _ in range(100):
        out = repair(rng.random(p.n) < rng.random(), p)
        assert out.feasible == (feasibility_violations(out.bits, p) == [])


# ---------------------------------------------------------------- operators


def test_initial_population():
    p = synthetic(12, 3, 8, Constraints(hub_count_min=2, hub_count_max=6))
    cfg = GaConfig(population_size=10, rng_seed=5)
    pop = initialize_population(p, cfg)
    assert len(pop) == 10
    assert pop[0][p.existing_mask].all()
    assert all(feasibility_violations(x, p) == [] for x in pop)
    again = initialize_population(p, cfg)
    assert all(np.array_equal(x, y) for x, y in zip(pop, again))


def test_full_tournament_picks_global_best():
    fit = [5.0, 3.0, 9.0, 1.0, 4.0]
    rng = np.random.default_rng(0)
    # k draws with replacement may miss the best; a huge k makes a miss negligible
    assert tournament_select(fit, fit, 200, rng) == 3


def test_tournament_ties_go_to_smaller_index():
    fit = [2.0, 1.0, 1.0]
    rng = np.random.default_rng(4)
    picks = {tournament_select(fit, fit, 300, rng) for _ in range(20)}
    assert picks == {1}


def test_tournament_k1_is_uniform():
    fit = np.arange(4.0)
    counts = np.bincount(ga._tournament(fit, 1, np.random.default_rng(2), 40000), minlength=4)
    assert np.allclose(counts / 40000, 0.25, atol=0.01)


def test_selection_pressure():
    fit = np.arange(10.0)
    picks = ga._tournament(fit, 3, np.random.default_rng(3), 20000)
    counts = np.bincount(picks, minlength=10)
    assert counts[0] > counts[9]
    # P(best wins a 3-draw tournament) = 1 - 0.9**3
    assert counts[0] / 20000 == pytest.approx(1 - 0.9**3, abs=0.01)


def test_crossover_identical_and_zero_rate():
    rng = np.random.default_rng(0)
    a = rng.random(30) < 0.5
    c1, c2 = crossover(a, a.copy(), 1.0, rng)
    assert np.array_equal(c1, a) and np.array_equal(c2, a)
    other = ~a
    c1, c2 = crossover(a, other, 0.0, rng)
    assert np.array_equal(c1, a) and np.array_equal(c2, other)


def test_uniform_crossover_frequency():
    rng = np.random.default_rng(1)
    a = np.zeros((10000, 20), dtype=bool)
    c1, c2 = crossover(a, ~a, 1.0, rng)
    share = (c1 == a).mean()
    assert share == pytest.approx(0.5, abs=0.05)
    assert np.array_equal(c1, ~c2)


def test_mutation():
    rng = np.random.default_rng(0)
    fixed = np.zeros(40, dtype=bool)
    fixed[[3, 7]] = True
    x = rng.random(40) < 0.5
    assert np.array_equal(mutate(x, 0.0, rng, fixed), x)
    flipped = mutate(x, 1.0, rng, fixed)
    assert np.array_equal(flipped[fixed], x[fixed])
    assert np.array_equal(flipped[~fixed], ~x[~fixed])
    many = mutate(np.zeros((5000, 40), dtype=bool), 0.1, rng, fixed)
    assert not many[:, fixed].any()
    assert many[:, ~fixed].mean() == pytest.approx(0.10, abs=0.01)


# ---------------------------------------------------------------- loop


def test_config_validation():
    with pytest.raises(ConfigError):
        GaConfig(population_size=7)
    with pytest.raises(ConfigError):
        GaConfig(elite_count=200)
    with pytest.raises(ConfigError):
        GaConfig(crossover_rate=1.5)


def test_too_many_fixed_hubs_is_rejected_before_loop():
    p = line_problem(Constraints(hub_count_min=1, hub_count_max=1), fixed=["A", "D"])
    with pytest.raises(InfeasibleError):
        run_ga(p, GaConfig(population_size=4, generations=1))


def test_single_generation():
    p = synthetic(12, 3, 9, Constraints(hub_count_min=2, hub_count_max=4))
    r = run_ga(p, GaConfig(population_size=20, generations=1, rng_seed=3))
    assert r.generations_run == 1
    assert len(r.history) == 2
    assert r.best_cost.total == min(h[0] for h in r.history)


def test_same_seed_same_result_and_thread_independent():
    p = synthetic(25, 4, 12, Constraints(hub_count_min=2, hub_count_max=8, min_inter_hub_km=20))
    cfg = GaConfig(population_size=30, generations=25, rng_seed=99)
    r1, r2 = run_ga(p, cfg), run_ga(p, cfg)
    r3 = run_ga(p, GaConfig(population_size=30, generations=25, rng_seed=99, workers=4))
    for other in (r2, r3):
        assert np.array_equal(r1.best_chromosome, other.best_chromosome)
        assert r1.history == other.history
        assert r1.best_cost == other.best_cost


def test_elitism_and_fixed_bits_in_every_evaluation(monkeypatch):
    p = synthetic(20, 4, 13, Constraints(hub_count_min=3, hub_count_max=7), n_fixed=2)
    seen = []
    real = ga.decode

    def spy(bits, problem):
        seen.append(np.array(bits, dtype=bool))
        return real(bits, problem)

    monkeypatch.setattr(ga, "decode", spy)
    r = run_ga(p, GaConfig(population_size=20, generations=40, rng_seed=1))
    assert seen
    assert all(x[p.fixed_mask].all() for x in seen)
    best = [h[0] for h in r.history]
    assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
    assert r.best_feasible and feasibility_violations(r.best_chromosome, p) == []


def test_stall_stops_early():
    p = synthetic(8, 2, 3, Constraints(hub_count_min=1, hub_count_max=3))
    r = run_ga(p, GaConfig(population_size=10, generations=500, stall_generations=5))
    assert r.generations_run < 500
