"""Genetic algorithm over open-hub bit vectors.

Every offspring is passed through :func:`repair` before evaluation, so the
search only visits designs that meet the business constraints (or are flagged
as dead ends and surcharged). Breeding draws from one random stream per
generation, seeded from ``(rng_seed, generation)``; fitness evaluation uses no
randomness, so results do not depend on how many worker threads evaluate.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .assignment import as_chromosome, decode, nearest_hub
from .costs import evaluate
from .errors import ConfigError
from .model import check_constraints_satisfiable

log = logging.getLogger(__name__)

INFEASIBLE_FALLBACK = 1e12


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 200
    generations: int = 300
    crossover_rate: float = 0.9
    mutation_rate_per_bit: Optional[float] = None  # None: 1 / number of sites
    tournament_size: int = 3
    elite_count: int = 2
    rng_seed: int = 0
    stall_generations: int = 50
    workers: int = 1

    def __post_init__(self):
        p = self.population_size
        if not (isinstance(p, int) and p >= 4 and p % 2 == 0):
            raise ConfigError(f"population_size must be an even integer >= 4, got {p!r}")
        if not (isinstance(self.generations, int) and self.generations >= 1):
            raise ConfigError(f"generations must be an integer >= 1, got {self.generations!r}")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigError(f"crossover_rate must lie in [0, 1], got {self.crossover_rate!r}")
        m = self.mutation_rate_per_bit
        if m is not None and not 0.0 <= m <= 1.0:
            raise ConfigError(f"mutation_rate_per_bit must lie in [0, 1], got {m!r}")
        if not (isinstance(self.tournament_size, int) and self.tournament_size >= 2):
            raise ConfigError(f"tournament_size must be an integer >= 2, got {self.tournament_size!r}")
        if not (isinstance(self.elite_count, int) and 1 <= self.elite_count < p):
            raise ConfigError(f"elite_count must be in [1, population_size), got {self.elite_count!r}")
        if not (isinstance(self.rng_seed, int) and 0 <= self.rng_seed < 2**64):
            raise ConfigError(f"rng_seed must be a 64-bit unsigned integer, got {self.rng_seed!r}")
        if not (isinstance(self.stall_generations, int) and self.stall_generations >= 1):
            raise ConfigError(f"stall_generations must be an integer >= 1, got {self.stall_generations!r}")
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise ConfigError(f"workers must be an integer >= 1, got {self.workers!r}")


class Repaired(NamedTuple):
    bits: np.ndarray
    feasible: bool


@dataclass
class GaResult:
    best_chromosome: np.ndarray
    best_design: object
    best_cost: object
    best_feasible: bool
    history: list = field(default_factory=list)  # (best fitness, mean fitness) per generation
    generations_run: int = 0
    evaluations: int = 0


def _hub_loads(problem, hubs):
    hub_of = nearest_hub(problem.distances, hubs)
    per_site = np.bincount(hub_of, weights=problem.outbound + problem.inbound, minlength=problem.n)
    return hub_of, per_site


def _weakest(candidates, per_site):
    """Candidate with the smallest load; ties go to the larger index (larger id)."""
    loads = per_site[candidates]
    low = loads == loads.min()
    return int(candidates[low][-1])


def repair(chromosome, problem, rng=None):
    """Turn any bit vector into one meeting the business constraints.

    Steps, in order: force fixed hubs open; enforce inter-hub spacing; clamp the
    hub count; close hubs under the DC-count or volume floors. Returns
    ``Repaired(bits, feasible)``; ``feasible`` is False when the floors or the
    count cannot be met. The procedure is deterministic; ``rng`` is accepted
    for interface symmetry with the other operators and not used.
    """
    c = problem.constraints
    d = problem.distances
    fixed = problem.fixed_mask
    bits = as_chromosome(chromosome, problem.n).copy()
    bits |= fixed

    # spacing: close one hub of the closest offending pair at a time
    min_sep = c.min_inter_hub_km
    if min_sep > 0:
        while True:
            hubs = np.flatnonzero(bits)
            if hubs.size < 2:
                break
            sub = d[np.ix_(hubs, hubs)]
            both_fixed = fixed[hubs][:, None] & fixed[hubs][None, :]
            bad = np.triu(sub < min_sep, 1) & ~both_fixed
            if not bad.any():
                break
            masked = np.where(bad, sub, np.inf)
            i, j = np.unravel_index(np.argmin(masked), masked.shape)
            a, b = hubs[i], hubs[j]
            if fixed[a]:
                victim = b
            elif fixed[b]:
                victim = a
            else:
                _, per_site = _hub_loads(problem, hubs)
                victim = _weakest(np.array([a, b]), per_site)
            bits[victim] = False

    # hub count range
    while bits.sum() > problem.hub_count_max:
        hubs = np.flatnonzero(bits)
        free = hubs[~fixed[hubs]]
        if free.size == 0:
            return Repaired(bits, False)
        _, per_site = _hub_loads(problem, hubs)
        bits[_weakest(free, per_site)] = False
    while bits.sum() < c.hub_count_min:
        hubs = np.flatnonzero(bits)
        spoke = d[:, hubs].min(axis=1) if hubs.size else np.full(problem.n, np.inf)
        eligible = ~bits
        if min_sep > 0 and hubs.size:
            eligible &= (d[:, hubs] >= min_sep).all(axis=1)
        if not eligible.any():
            return Repaired(bits, False)
        totals = np.minimum(spoke[:, None], d).sum(axis=0)
        totals[~eligible] = np.inf
        bits[int(np.argmin(totals))] = True

    # per-hub floors
    while True:
        hubs = np.flatnonzero(bits)
        hub_of, per_site = _hub_loads(problem, hubs)
        counts = np.bincount(hub_of, minlength=problem.n)
        failing = (counts[hubs] < c.min_dcs_per_hub) | (per_site[hubs] < c.min_volume_per_hub)
        failing &= ~fixed[hubs]
        if not failing.any():
            return Repaired(bits, True)
        if hubs.size <= c.hub_count_min:
            return Repaired(bits, False)
        bits[_weakest(hubs[failing], per_site)] = False


def _generation_rng(seed, generation):
    return np.random.default_rng([seed, generation])


def initialize_population(problem, config, rng=None):
    """Repaired starting population.

    Individual 0 is the current network (all existing hubs open); the others
    open each site with probability ``midpoint of hub range / n``.
    """
    rng = rng if rng is not None else _generation_rng(config.rng_seed, 0)
    n = problem.n
    p_open = min(1.0, 0.5 * (problem.constraints.hub_count_min + problem.hub_count_max) / n)
    raw = rng.random((config.population_size, n)) < p_open
    raw[0] = problem.existing_mask
    return [repair(row, problem).bits for row in raw]


def _tournament(fitnesses, k, rng, count):
    fitnesses = np.asarray(fitnesses, dtype=float)
    size = fitnesses.size
    order = np.lexsort((np.arange(size), fitnesses))
    rank = np.empty(size, dtype=np.intp)
    rank[order] = np.arange(size)
    draws = rng.integers(0, size, size=(count, k))
    return draws[np.arange(count), np.argmin(rank[draws], axis=1)]


def tournament_select(population, fitnesses, k, rng):
    """Index of the lowest-cost entrant among ``k`` uniform draws with replacement
    (ties to the smaller index)."""
    if len(fitnesses) != len(population):
        raise ValueError("population and fitnesses differ in length")
    return int(_tournament(fitnesses, k, rng, 1)[0])


def crossover(parent_a, parent_b, rate, rng):
    """Uniform crossover applied with probability ``rate``.

    Works on single chromosomes or on stacks of them (leading batch axes), one
    crossover decision per pair.
    """
    a = np.asarray(parent_a, dtype=bool)
    b = np.asarray(parent_b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError("parents differ in shape")
    do = rng.random(a.shape[:-1]) < rate
    swap = (rng.random(a.shape) < 0.5) & np.asarray(do)[..., None]
    return np.where(swap, b, a), np.where(swap, a, b)


def mutate(chromosome, rate_per_bit, rng, fixed_mask):
    """Flip every non-fixed bit independently with probability ``rate_per_bit``."""
    x = np.asarray(chromosome, dtype=bool)
    flips = (rng.random(x.shape) < rate_per_bit) & ~np.asarray(fixed_mask, dtype=bool)
    return x ^ flips


class _Evaluator:
    """Repair + decode + evaluate with a cache keyed by the raw bit pattern."""

    def __init__(self, problem, workers=1):
        self.problem = problem
        self.workers = workers
        self.cache = {}
        self.evaluations = 0

    def _work(self, raw):
        fixed = repair(raw, self.problem)
        total = evaluate(decode(fixed.bits, self.problem), self.problem).total
        return np.packbits(fixed.bits), fixed.feasible, total

    def __call__(self, rows):
        keys = [np.packbits(r).tobytes() for r in rows]
        todo = {}
        for key, row in zip(keys, rows):
            if key not in self.cache and key not in todo:
                todo[key] = row
        if todo:
            if self.workers > 1 and len(todo) > 1:
                with ThreadPoolExecutor(self.workers) as pool:
                    done = list(pool.map(self._work, todo.values()))
            else:
                done = [self._work(r) for r in todo.values()]
            self.evaluations += len(done)
            if len(self.cache) > 500_000:
                self.cache.clear()
            self.cache.update(zip(todo.keys(), done))
        n = self.problem.n
        out = [self.cache[k] for k in keys]
        bits = np.array([np.unpackbits(p, count=n).astype(bool) for p, _, _ in out])
        feasible = np.array([f for _, f, _ in out], dtype=bool)
        totals = np.array([t for _, _, t in out], dtype=float)
        return bits, feasible, totals


def _fitness(feasible, totals):
    if feasible.any():
        best = totals[feasible].min()
        surcharge = 10.0 * best if best > 0 else INFEASIBLE_FALLBACK
    else:
        surcharge = INFEASIBLE_FALLBACK
    return np.where(feasible, totals, totals + surcharge)


def run_ga(problem, config=GaConfig()):
    """Run the GA and return the best individual ever seen.

    Raises :class:`~hubnet.errors.InfeasibleError` before the loop when the
    constraints contradict each other (e.g. more fixed hubs than allowed).
    """
    check_constraints_satisfiable(problem)
    n = problem.n
    rate = config.mutation_rate_per_bit if config.mutation_rate_per_bit is not None else 1.0 / n
    ev = _Evaluator(problem, config.workers)
    fixed = problem.fixed_mask
    P, E = config.population_size, config.elite_count

    pop, feasible, totals = ev(initialize_population(problem, config))
    fit = _fitness(feasible, totals)
    history = [(float(fit.min()), float(fit.mean()))]
    best_i = int(np.lexsort((np.arange(P), fit))[0])
    best = (pop[best_i].copy(), bool(feasible[best_i]), float(totals[best_i]))
    best_fit = fit[best_i]
    stall = 0
    gens = 0

    for gen in range(1, config.generations + 1):
        rng = _generation_rng(config.rng_seed, gen)
        order = np.lexsort((np.arange(P), fit))
        elites = pop[order[:E]]
        n_children = P - E
        n_pairs = (n_children + 1) // 2
        parents = _tournament(fit, config.tournament_size, rng, 2 * n_pairs)
        ca, cb = crossover(pop[parents[0::2]], pop[parents[1::2]], config.crossover_rate, rng)
        children = np.empty((2 * n_pairs, n), dtype=bool)
        children[0::2], children[1::2] = ca, cb
        children = mutate(children, rate, rng, fixed)[:n_children]

        pop, feasible, totals = ev(np.concatenate([elites, children]))
        fit = _fitness(feasible, totals)
        gens = gen
        i = int(np.lexsort((np.arange(P), fit))[0])
        history.append((float(fit[i]), float(fit.mean())))
        if (not best[1] and feasible[i]) or (feasible[i] == best[1] and totals[i] < best[2]):
            best = (pop[i].copy(), bool(feasible[i]), float(totals[i]))
        if fit[i] < best_fit:
            best_fit, stall = fit[i], 0
        else:
            stall += 1
        log.debug("generation %d best %.6g mean %.6g", gen, history[-1][0], history[-1][1])
        if stall >= config.stall_generations:
            break

    design = decode(best[0], problem)
    cost = evaluate(design, problem)
    return GaResult(best[0], design, cost, best[1], history, gens, ev.evaluations)
