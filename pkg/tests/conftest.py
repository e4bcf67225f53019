import numpy as np
import pytest

from ncbounds.geometry import SamplingGrid, is_centro_symmetric


def spaced_sample(rng, low, high, count, min_gap):
    """Sorted uniform draw with a minimum pairwise gap."""
    while True:
        vals = np.sort(rng.uniform(low, high, count))
        if count == 1 or np.min(np.diff(vals)) >= min_gap:
            return vals


def random_symmetric_centered_grid(rng, n_modes=None, min_half=1, max_half=2) -> SamplingGrid:
    """Random non-uniform grid, centered and centro-symmetric in every mode.

    Each mode holds ``half`` mirrored coordinate pairs (occasionally plus a
    zero), with ``half`` drawn from [min_half, max_half].
    """
    if n_modes is None:
        n_modes = int(rng.integers(1, 4))
    modes = []
    for _ in range(n_modes):
        half = int(rng.integers(min_half, max_half + 1))
        pos = np.cumsum(rng.uniform(0.4, 1.2, half))
        coords = np.concatenate([-pos[::-1], pos])
        if rng.integers(0, 2):
            coords = np.concatenate([coords[:half], [0.0], coords[half:]])
        modes.append(tuple(coords))
    return SamplingGrid(tuple(modes))


def random_asymmetric_grid(rng, m: int) -> SamplingGrid:
    """1-D grid with distinct irregular coordinates, not centro-symmetric."""
    while True:
        coords = np.cumsum(rng.uniform(0.4, 1.6, m))
        coords -= coords[0]
        grid = SamplingGrid((tuple(coords),))
        if not is_centro_symmetric(grid):
            return grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
