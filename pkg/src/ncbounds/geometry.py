"""Separable R-D sampling grids, steering matrices and their derivatives.

A separable R-D grid is the outer product of R one-dimensional coordinate
lists.  Mode ``r`` holds ``M_r`` real coordinates ``k`` (sensor positions on a
half-wavelength grid, or sample times for frequency estimation).  The full
steering vector of a source with spatial frequencies ``mu = (mu_1, ..., mu_R)``
is the Kronecker product of the per-mode vectors ``exp(j*k*mu_r)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SamplingGrid",
    "CenteredDecomposition",
    "SteeringSet",
    "ula",
    "uniform_grid",
    "steering_vector_mode",
    "build_steering_set",
    "phase_reference",
    "center_grid",
    "is_centro_symmetric",
]

# Absolute tolerance for centro-symmetry; coordinates are exact inputs.
CENTRO_SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class SamplingGrid:
    """Separable R-D sampling grid given as per-mode coordinate tuples.

    Coordinates are arbitrary reals; non-uniform grids are allowed.  Every
    mode needs at least two distinct coordinates.
    """

    modes: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        modes = tuple(tuple(float(c) for c in mode) for mode in self.modes)
        object.__setattr__(self, "modes", modes)
        if len(modes) < 1:
            raise ValueError("grid needs at least one mode")
        for r, mode in enumerate(modes):
            if len(mode) < 2:
                raise ValueError(f"mode {r} has {len(mode)} coordinates, need >= 2")
            if len(set(mode)) != len(mode):
                raise ValueError(f"mode {r} has duplicate coordinates")

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def mode_sizes(self) -> tuple[int, ...]:
        return tuple(len(mode) for mode in self.modes)

    @property
    def size(self) -> int:
        """Total number of grid points M = prod(M_r)."""
        return int(np.prod(self.mode_sizes))

    def mode_array(self, r: int) -> np.ndarray:
        return np.asarray(self.modes[r], dtype=float)


@dataclass(frozen=True)
class CenteredDecomposition:
    """A grid shifted to zero per-mode mean, plus the removed shifts.

    ``original coordinate = centered coordinate + deltas[r]`` holds for every
    element.  For source ``i`` the steering-column phase shift of mode ``r``
    is ``exp(j * deltas[r] * mu[r, i])``.
    """

    grid: SamplingGrid
    deltas: tuple[float, ...]

    def source_shifts(self, mu: np.ndarray) -> np.ndarray:
        """Total reference shift per source: ``sum_r deltas[r] * mu[r, i]``."""
        mu = np.atleast_2d(np.asarray(mu, dtype=float))
        return np.asarray(self.deltas) @ mu


@dataclass(frozen=True)
class SteeringSet:
    """Steering matrix A (M x d) and derivative matrix D (M x R*d).

    D is ordered mode-major, ``D = [D_1 ... D_R]``, where column ``i`` of
    ``D_r`` is the partial derivative of steering column ``i`` with respect
    to its r-th mode frequency.  This layout is the binding ordering for all
    (R*d) x (R*d) bound matrices downstream.
    """

    A: np.ndarray
    D: np.ndarray
    n_modes: int
    mu: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.A, self.D, self.mu):
            arr.flags.writeable = False

    @property
    def n_sources(self) -> int:
        return self.A.shape[1]

    @property
    def n_elements(self) -> int:
        return self.A.shape[0]


def ula(m: int, reference: str = "centroid") -> SamplingGrid:
    """1-D uniform linear array with M elements.

    ``reference="first"`` places coordinates at 0..M-1; ``"centroid"`` uses
    the centered grid -(M-1)/2 .. (M-1)/2 (half-integers for even M).
    """
    if m < 2:
        raise ValueError("ULA needs at least 2 elements")
    if reference == "first":
        coords = np.arange(m, dtype=float)
    elif reference == "centroid":
        coords = np.arange(m, dtype=float) - (m - 1) / 2
    else:
        raise ValueError(f"unknown reference {reference!r}, use 'first' or 'centroid'")
    return SamplingGrid((tuple(coords),))


def uniform_grid(sizes, reference: str = "centroid") -> SamplingGrid:
    """Separable R-D grid with a ULA of the given size in each mode."""
    return SamplingGrid(tuple(ula(m, reference).modes[0] for m in sizes))


def steering_vector_mode(coords, mu: float) -> np.ndarray:
    """Per-mode steering vector, element m equal to exp(j * k_m * mu)."""
    coords = np.asarray(coords, dtype=float)
    if coords.size == 0:
        raise ValueError("empty coordinate list")
    return np.exp(1j * coords * mu)


def _khatri_rao(mats: list[np.ndarray]) -> np.ndarray:
    """Column-wise Kronecker product of a list of (M_r x d) matrices."""
    out = mats[0]
    for m in mats[1:]:
        out = (out[:, None, :] * m[None, :, :]).reshape(-1, out.shape[1])
    return out


def _check_mu(grid: SamplingGrid, mu) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    if mu.ndim == 1:
        if grid.n_modes != 1:
            raise ValueError(
                f"mu is 1-D but grid has {grid.n_modes} modes; pass an R x d matrix"
            )
        mu = mu.reshape(1, -1)
    if mu.ndim != 2 or mu.shape[0] != grid.n_modes:
        raise ValueError(
            f"mu has shape {mu.shape}, expected ({grid.n_modes}, d) to match the grid"
        )
    return mu


def build_steering_set(grid: SamplingGrid, mu) -> SteeringSet:
    """Build the steering matrix A and its mode-major derivative matrix D.

    Parameters
    ----------
    grid : SamplingGrid
    mu : array, shape (R, d)
        Spatial frequencies in radians; row r holds the r-th mode frequency
        of every source.

    Returns
    -------
    SteeringSet
        ``A[:, i]`` is the Kronecker product over modes of the per-mode
        steering vectors of source i (unit-modulus entries).  ``D`` stacks
        the R per-mode derivative blocks; each block replaces factor r of
        the Kronecker product by ``j * k * exp(j*k*mu)``.
    """
    mu = _check_mu(grid, mu)
    R, d = mu.shape
    a_modes = []
    dt_modes = []
    for r in range(R):
        coords = grid.mode_array(r)
        a_r = np.exp(1j * np.outer(coords, mu[r]))
        a_modes.append(a_r)
        dt_modes.append(1j * coords[:, None] * a_r)
    A = _khatri_rao(a_modes)
    blocks = []
    for r in range(R):
        factors = [dt_modes[p] if p == r else a_modes[p] for p in range(R)]
        blocks.append(_khatri_rao(factors))
    D = np.concatenate(blocks, axis=1)
    return SteeringSet(A=A, D=D, n_modes=R, mu=mu.copy())


def phase_reference(coords) -> float:
    """Phase reference of one mode: the mean of its coordinates."""
    coords = np.asarray(coords, dtype=float)
    if coords.size == 0:
        raise ValueError("empty coordinate list")
    return float(np.mean(coords))


def center_grid(grid: SamplingGrid) -> CenteredDecomposition:
    """Shift every mode to zero mean and record the removed references."""
    deltas = []
    centered = []
    for r in range(grid.n_modes):
        coords = grid.mode_array(r)
        delta = float(np.mean(coords))
        deltas.append(delta)
        centered.append(tuple(coords - delta))
    return CenteredDecomposition(grid=SamplingGrid(tuple(centered)), deltas=tuple(deltas))


def is_centro_symmetric(grid: SamplingGrid, tol: float = CENTRO_SYMMETRY_TOL) -> bool:
    """True iff each mode's centered coordinate multiset equals its negation."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    for r in range(grid.n_modes):
        coords = grid.mode_array(r)
        centered = np.sort(coords - np.mean(coords))
        if not np.allclose(centered, -centered[::-1], rtol=0.0, atol=tol):
            return False
    return True
