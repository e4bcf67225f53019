"""Randomized oracle-equivalence suite.

Draws random well-posed scenarios (R <= 3 modes, d <= 3 sources, 4..16 grid
points, pairwise-distinct rotation phases modulo pi, correlation magnitude
at most 0.95) and checks that the closed-form strictly non-circular bound and
the brute-force Fisher-information oracle agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import det_crb, det_nc_crb, fim_assemble, fim_mu_block_inverse
from .geometry import SamplingGrid, build_steering_set
from .signals import SourceScenario, exact_covariance_symbols, rotated_covariance

__all__ = ["RandomScenario", "random_scenario", "oracle_equivalence_suite", "SelftestReport"]


@dataclass
class RandomScenario:
    grid: SamplingGrid
    scenario: SourceScenario
    seed: int


def _spaced_sample(rng, low, high, count, min_gap):
    """Sorted uniform sample with a minimum pairwise gap (rejection loop)."""
    while True:
        vals = np.sort(rng.uniform(low, high, count))
        if count == 1 or np.min(np.diff(vals)) >= min_gap:
            return vals


def _random_grid(rng) -> SamplingGrid:
    n_modes = int(rng.integers(1, 4))
    while True:
        sizes = [int(rng.integers(2, 5)) for _ in range(n_modes)]
        if n_modes == 1:
            sizes = [int(rng.integers(4, 17))]
        total = int(np.prod(sizes))
        if 4 <= total <= 16:
            break
    modes = []
    for m in sizes:
        style = rng.integers(0, 3)
        if style == 0:
            coords = np.arange(m, dtype=float)
        elif style == 1:
            coords = np.arange(m, dtype=float) - (m - 1) / 2
        else:
            coords = np.cumsum(rng.uniform(0.6, 1.4, m))
            coords -= coords[0]
        modes.append(tuple(coords))
    return SamplingGrid(tuple(modes))


def random_scenario(seed: int) -> RandomScenario:
    """One random well-posed scenario; deterministic in the seed."""
    rng = np.random.default_rng(seed)
    grid = _random_grid(rng)
    d = int(rng.integers(1, 4))
    mu = np.vstack([_spaced_sample(rng, -2.0, 2.0, d, 0.4) for _ in range(grid.n_modes)])
    phi = _spaced_sample(rng, 0.05, np.pi - 0.05, d, 0.25)
    rho = float(rng.uniform(0.0, 0.9))
    powers = rng.uniform(0.5, 2.0, d)
    scenario = SourceScenario(
        mu=mu, phi=phi, powers=powers, corr=rho,
        n_snapshots=20, sigma2=float(rng.uniform(0.05, 1.0)),
    )
    return RandomScenario(grid=grid, scenario=scenario, seed=seed)


@dataclass
class SelftestReport:
    n_scenarios: int
    max_rel_deviation: float
    worst_seed: int
    tolerance: float
    nc_never_worse: bool

    @property
    def passed(self) -> bool:
        return self.max_rel_deviation <= self.tolerance and self.nc_never_worse

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict}: {self.n_scenarios} scenarios, "
            f"max |closed form - oracle| / oracle = {self.max_rel_deviation:.3e} "
            f"(tolerance {self.tolerance:.1e}, worst seed {self.worst_seed}), "
            f"nc_crb <= crb everywhere: {self.nc_never_worse}"
        )


def oracle_equivalence_suite(n_scenarios: int = 200, seed: int = 0,
                             tolerance: float = 1e-8) -> SelftestReport:
    """Compare the closed-form NC bound trace against the oracle trace."""
    worst = 0.0
    worst_seed = -1
    never_worse = True
    for k in range(n_scenarios):
        case = random_scenario(seed * 100003 + k)
        sc = case.scenario
        block = exact_covariance_symbols(sc, case.seed)
        steering = build_steering_set(case.grid, sc.mu)
        closed = det_nc_crb(steering, sc.phi, block.rhat_s0, sc.sigma2, sc.n_snapshots)
        oracle = fim_mu_block_inverse(fim_assemble(steering, sc.phi, block.s0, sc.sigma2))
        if closed.is_singular or oracle.is_singular:
            # well-posed scenarios must never be singular; flag loudly
            return SelftestReport(n_scenarios=k + 1, max_rel_deviation=np.inf,
                                  worst_seed=case.seed, tolerance=tolerance,
                                  nc_never_worse=never_worse)
        rel = abs(closed.trace - oracle.trace) / oracle.trace
        if rel > worst:
            worst, worst_seed = rel, case.seed
        crb = det_crb(steering, rotated_covariance(block.rhat_s0, sc.phi),
                      sc.sigma2, sc.n_snapshots)
        if not crb.is_singular and closed.trace > crb.trace * (1 + 1e-9):
            never_worse = False
    return SelftestReport(n_scenarios=n_scenarios, max_rel_deviation=worst,
                          worst_seed=worst_seed, tolerance=tolerance,
                          nc_never_worse=never_worse)
