"""Strictly non-circular source symbols, sample statistics and noisy snapshots.

A strictly non-circular (rectilinear) source transmits real-valued symbols
rotated by a per-source phase: row i of the complex symbol matrix is
``exp(j*phi_i) * s0_i`` with ``s0_i`` real, so every symbol of a source lies
on one line through the origin and the non-circularity coefficient has unit
magnitude.

All generators are pure functions of (inputs, seed).  Sub-streams are derived
from the master seed with fixed spawn keys (see ``substream``), so parallel
evaluation cannot change any result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import SteeringSet

__all__ = [
    "SourceScenario",
    "SymbolBlock",
    "SnapshotMatrix",
    "substream",
    "generate_symbols",
    "exact_covariance_symbols",
    "coherent_symbols",
    "unit_power_symbols",
    "sample_covariance",
    "empirical_correlation",
    "rotate_symbols",
    "rotated_covariance",
    "noncircularity_coefficient",
    "synthesize_snapshots",
    "effective_snr",
    "sigma2_from_snr_db",
]

# Fixed spawn keys of the documented RNG sub-streams.
SYMBOL_STREAM = 0
NOISE_STREAM = 1
PHASE_STREAM = 2
POINT_STREAM = 3

# Eigenvalues of a target correlation matrix may dip this far below zero
# before factorization is refused.
_PSD_CLIP = -1e-12


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (master seed, fixed jump key)."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def _corr_matrix(corr, d: int) -> np.ndarray:
    corr = np.asarray(corr, dtype=float)
    if corr.ndim == 0:
        rho = float(corr)
        corr = np.full((d, d), rho)
        np.fill_diagonal(corr, 1.0)
    return corr


@dataclass(frozen=True)
class SourceScenario:
    """Source parameters for bound evaluation and snapshot synthesis.

    Attributes
    ----------
    mu : (R, d) spatial frequencies in radians
    phi : (d,) rotation phases in radians
    powers : (d,) source powers, all positive
    corr : (d, d) target correlation matrix (symmetric, unit diagonal, PSD)
    n_snapshots : number of time snapshots N
    sigma2 : noise power
    """

    mu: np.ndarray
    phi: np.ndarray
    powers: np.ndarray
    corr: np.ndarray
    n_snapshots: int
    sigma2: float

    def __post_init__(self):
        mu = np.atleast_2d(np.asarray(self.mu, dtype=float))
        d = mu.shape[1]
        phi = np.asarray(self.phi, dtype=float).reshape(-1)
        powers = np.asarray(self.powers, dtype=float).reshape(-1)
        corr = _corr_matrix(self.corr, d)
        if d < 1:
            raise ValueError("need at least one source")
        if phi.shape != (d,):
            raise ValueError(f"phi has shape {phi.shape}, expected ({d},)")
        if powers.shape != (d,):
            raise ValueError(f"powers has shape {powers.shape}, expected ({d},)")
        if np.any(powers <= 0):
            raise ValueError("powers must be positive")
        if corr.shape != (d, d):
            raise ValueError(f"corr has shape {corr.shape}, expected ({d}, {d})")
        if not np.allclose(corr, corr.T, atol=1e-12):
            raise ValueError("corr must be symmetric")
        if not np.allclose(np.diag(corr), 1.0, atol=1e-12):
            raise ValueError("corr must have unit diagonal")
        if np.any(np.abs(corr) > 1 + 1e-12):
            raise ValueError("corr entries must be in [-1, 1]")
        if np.linalg.eigvalsh(corr)[0] < _PSD_CLIP:
            raise ValueError("corr is not positive semidefinite")
        if self.n_snapshots < 1:
            raise ValueError("n_snapshots must be >= 1")
        # zero is admitted for noiseless snapshot synthesis; SNR-style
        # quantities check positivity themselves
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")
        for name, arr in (("mu", mu), ("phi", phi), ("powers", powers), ("corr", corr)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "n_snapshots", int(self.n_snapshots))
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def n_sources(self) -> int:
        return self.mu.shape[1]

    @property
    def n_modes(self) -> int:
        return self.mu.shape[0]

    def target_covariance(self) -> np.ndarray:
        """diag(sqrt(P)) @ corr @ diag(sqrt(P))."""
        s = np.sqrt(self.powers)
        return self.corr * np.outer(s, s)


@dataclass(frozen=True)
class SymbolBlock:
    """Realized real symbols with their empirical statistics.

    The deterministic bounds condition on the realized symbol sequence, so
    ``rhat_s0``, ``powers_hat`` and ``rho_hat`` are always recomputed from
    the actual ``s0`` rather than copied from the requested targets.
    """

    s0: np.ndarray
    rhat_s0: np.ndarray
    powers_hat: np.ndarray
    rho_hat: np.ndarray

    def __post_init__(self):
        for arr in (self.s0, self.rhat_s0, self.powers_hat, self.rho_hat):
            arr.flags.writeable = False


@dataclass(frozen=True)
class SnapshotMatrix:
    """Complex observations X (M x N)."""

    X: np.ndarray

    def __post_init__(self):
        self.X.flags.writeable = False


def _block_from(s0: np.ndarray) -> SymbolBlock:
    return SymbolBlock(
        s0=s0,
        rhat_s0=sample_covariance(s0),
        powers_hat=np.sum(s0 * s0, axis=1) / s0.shape[1],
        rho_hat=empirical_correlation(s0),
    )


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    """Symmetric PSD factor L with L @ L.T = cov, tolerant of tiny negatives."""
    vals, vecs = np.linalg.eigh(cov)
    if vals[0] < _PSD_CLIP * max(1.0, vals[-1]):
        raise ValueError(f"target covariance is not PSD (min eigenvalue {vals[0]:.3e})")
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


def generate_symbols(scenario: SourceScenario, seed: int) -> SymbolBlock:
    """Draw real Gaussian symbol rows with the scenario's target covariance."""
    d, N = scenario.n_sources, scenario.n_snapshots
    L = _psd_factor(scenario.target_covariance())
    z = substream(seed, SYMBOL_STREAM).standard_normal((d, N))
    return _block_from(L @ z)


def exact_covariance_symbols(scenario: SourceScenario, seed: int) -> SymbolBlock:
    """Deterministic symbols whose *empirical* covariance equals the target.

    Rows of a seeded random orthonormal basis (scaled so each row has squared
    norm N) are mixed by a factor of the target covariance, making
    ``rhat_s0`` equal the target to machine precision.  Requires d <= N and a
    nonsingular target.  Used wherever tests or sweeps need exact powers and
    correlations instead of sampled ones.
    """
    d, N = scenario.n_sources, scenario.n_snapshots
    if d > N:
        raise ValueError(f"exact covariance construction needs d <= N, got d={d}, N={N}")
    z = substream(seed, SYMBOL_STREAM).standard_normal((N, d))
    q, _ = np.linalg.qr(z)
    u = q.T * np.sqrt(N)  # rows orthonormal up to the sqrt(N) scale
    L = _psd_factor(scenario.target_covariance())
    return _block_from(L @ u)


def coherent_symbols(powers, n_snapshots: int, seed: int) -> SymbolBlock:
    """Exactly coherent rows: every source transmits the same unit-power
    waveform scaled by sqrt(P_i), so all empirical correlations are 1."""
    powers = np.asarray(powers, dtype=float).reshape(-1)
    rng = substream(seed, SYMBOL_STREAM)
    base = rng.standard_normal(n_snapshots)
    base /= np.sqrt(np.mean(base * base))
    return _block_from(np.sqrt(powers)[:, None] * base[None, :])


def unit_power_symbols(d: int, n_snapshots: int, seed: int) -> SymbolBlock:
    """Independent Gaussian rows normalized to exact unit empirical power.

    Correlations stay random (order 1/sqrt(N)); only the powers are pinned.
    """
    rng = substream(seed, SYMBOL_STREAM)
    s0 = rng.standard_normal((d, n_snapshots))
    s0 /= np.sqrt(np.mean(s0 * s0, axis=1))[:, None]
    return _block_from(s0)


def sample_covariance(s0: np.ndarray) -> np.ndarray:
    """S0 @ S0.T / N, symmetrized to remove round-off asymmetry."""
    s0 = np.atleast_2d(s0)
    cov = s0 @ s0.T / s0.shape[1]
    return (cov + cov.T) / 2


def empirical_correlation(s0: np.ndarray) -> np.ndarray:
    """Normalized correlation of the symbol rows; unit diagonal by construction."""
    s0 = np.atleast_2d(s0)
    norms = np.sqrt(np.sum(s0 * s0, axis=1))
    if np.any(norms == 0):
        raise ValueError("zero-power symbol row")
    rho = (s0 @ s0.T) / np.outer(norms, norms)
    rho = (rho + rho.T) / 2
    np.fill_diagonal(rho, 1.0)
    return rho


def rotate_symbols(s0: np.ndarray, phi) -> np.ndarray:
    """Multiply row i by exp(j*phi_i); output rows are rectilinear."""
    s0 = np.atleast_2d(s0)
    phi = np.asarray(phi, dtype=float).reshape(-1)
    return np.exp(1j * phi)[:, None] * s0


def rotated_covariance(rhat_s0: np.ndarray, phi) -> np.ndarray:
    """Conjugated sample covariance of the rotated symbols.

    Returns ``Psi^* @ rhat_s0 @ Psi`` with ``Psi = diag(exp(j*phi))``, which
    equals ``conj(S) @ S.T / N`` for ``S = Psi @ S0`` -- i.e. the transpose of
    the Hermitian covariance ``S @ S^H / N``.  This is the exact quantity the
    arbitrary-signal bound consumes; see ``bounds.det_crb``.
    """
    psi = np.exp(1j * np.asarray(phi, dtype=float).reshape(-1))
    return np.conj(psi)[:, None] * rhat_s0 * psi[None, :]


def noncircularity_coefficient(row: np.ndarray) -> complex:
    """Empirical non-circularity coefficient sum(z^2)/sum(|z|^2) of one row."""
    row = np.asarray(row).reshape(-1)
    denom = np.sum(np.abs(row) ** 2)
    if denom == 0:
        raise ValueError("zero-power row")
    return complex(np.sum(row * row) / denom)


def synthesize_snapshots(
    steering: SteeringSet, scenario: SourceScenario, s0: np.ndarray, seed: int
) -> SnapshotMatrix:
    """X = A @ Psi @ S0 + noise with i.i.d. circular complex Gaussian noise.

    The total noise variance per entry is ``sigma2`` (real and imaginary
    parts each carry half).
    """
    s0 = np.atleast_2d(s0)
    if steering.n_sources != s0.shape[0]:
        raise ValueError(
            f"steering has {steering.n_sources} sources, symbols have {s0.shape[0]} rows"
        )
    if s0.shape[1] != scenario.n_snapshots:
        raise ValueError("symbol block length does not match scenario n_snapshots")
    s = rotate_symbols(s0, scenario.phi)
    mean = steering.A @ s
    rng = substream(seed, NOISE_STREAM)
    scale = np.sqrt(scenario.sigma2 / 2)
    noise = scale * (rng.standard_normal(mean.shape) + 1j * rng.standard_normal(mean.shape))
    return SnapshotMatrix(X=mean + noise)


def effective_snr(power_hat: float, n_snapshots: int, sigma2: float) -> float:
    """Effective SNR: N * P_hat / sigma2."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    return n_snapshots * power_hat / sigma2


def sigma2_from_snr_db(snr_db: float, powers) -> float:
    """Noise power from SNR_dB = 10*log10(P_min / sigma2)."""
    p_min = float(np.min(np.asarray(powers, dtype=float)))
    return p_min * 10.0 ** (-snr_db / 10.0)
