"""Analytic special cases of the bounds: single source, two close sources,
NC gain, and the small-separation Taylor machinery behind them.

The two-source expressions hold for an M-element ULA and become accurate as
the separation ``delta_mu`` shrinks (the derivation truncates a Taylor series
beyond fourth order).  The measured 1%-accuracy radius at M = 15 is
``delta_mu <= 0.05`` rad; the library never enforces a radius, tests do.

Phase separation convention: ``delta_phi = |phi_2 - phi_1| + delta * |mu_2 -
mu_1|`` where ``delta`` is the array phase reference (0 when the reference is
the centroid, (M-1)/2 at the first element of a ULA).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import det_nc_crb
from .geometry import SamplingGrid, build_steering_set, center_grid, is_centro_symmetric
from .signals import SourceScenario

__all__ = [
    "TwoSourceParams",
    "AlphaBetaGamma",
    "single_source_nc_crb",
    "single_source_ula_nc_crb",
    "two_source_nc_crb",
    "two_source_crb",
    "nc_crb_limit_zero_sep",
    "nc_gain",
    "alpha_beta_gamma",
    "dirichlet_alpha",
    "two_groups_decoupling_check",
]


@dataclass(frozen=True)
class TwoSourceParams:
    """Physical parameters of the two-source closed forms.

    snr1/snr2 are effective SNRs ``N * P_hat / sigma2``.  rho is the empirical
    correlation of the real symbol rows.
    """

    m_sensors: int
    delta_mu: float
    delta_phi: float
    rho: float
    snr1: float
    snr2: float

    def __post_init__(self):
        if self.m_sensors < 4:
            raise ValueError("closed forms need at least 4 sensors")
        if self.delta_mu < 0:
            raise ValueError("delta_mu must be >= 0")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        if self.snr1 <= 0 or self.snr2 <= 0:
            raise ValueError("effective SNRs must be positive")

    @classmethod
    def from_rotation(cls, m_sensors: int, delta_mu: float, delta_phi_rot: float,
                      reference_delta: float, rho: float, snr1: float, snr2: float):
        """Combine rotation-phase and reference contributions:
        ``delta_phi = |delta_phi_rot| + reference_delta * |delta_mu|``."""
        delta_mu = abs(delta_mu)
        return cls(m_sensors=m_sensors, delta_mu=delta_mu,
                   delta_phi=abs(delta_phi_rot) + reference_delta * delta_mu,
                   rho=rho, snr1=snr1, snr2=snr2)

    @property
    def snr_factor(self) -> float:
        return (self.snr1 + self.snr2) / (self.snr1 * self.snr2)


@dataclass(frozen=True)
class AlphaBetaGamma:
    """Cross terms of two steering columns on a centered M-element ULA.

    alpha = a1^H a2, beta = d1^H a2, gamma = d1^H d2 (exact, mathematically
    real for the centered grid) together with their truncated Taylor values.
    """

    alpha: complex
    beta: complex
    gamma: complex
    alpha_taylor: float
    beta_taylor: float
    gamma_taylor: float
    order: int


def single_source_nc_crb(grid: SamplingGrid, snr: float) -> np.ndarray:
    """Per-mode single-source bound on a centered centro-symmetric grid.

    Mode r evaluates to ``(1/snr) * M_r / (2M) / sum(k^2)`` with the sum over
    that mode's (centered) coordinates.  Identical to the arbitrary-signal
    bound: a single source gains nothing from rectilinearity.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    dec = center_grid(grid)
    if max(abs(x) for x in dec.deltas) > 1e-9:
        raise ValueError("grid must be centered (zero per-mode phase reference)")
    if not is_centro_symmetric(grid):
        raise ValueError("grid must be centro-symmetric")
    m_total = grid.size
    out = np.empty(grid.n_modes)
    for r in range(grid.n_modes):
        coords = grid.mode_array(r)
        k2 = float(np.sum(coords**2))
        if k2 == 0:
            raise ValueError(f"mode {r} has zero squared-coordinate sum")
        out[r] = (1.0 / snr) * (coords.size / (2.0 * m_total)) / k2
    return out


def single_source_ula_nc_crb(m_total: int, m_r: int, snr: float) -> float:
    """Single-source bound for mode r of a uniform grid: 6 / (snr*M*(M_r^2-1))."""
    if m_r < 2:
        raise ValueError("mode needs at least 2 elements")
    if m_total % m_r != 0:
        raise ValueError("total size must be divisible by the mode size")
    return (1.0 / snr) * 6.0 / (m_total * (m_r**2 - 1))


_PREFACTOR = 50400.0


def _coherent_bracket(p: TwoSourceParams) -> float:
    """Denominator term shared by both two-source closed forms."""
    m, dmu, dphi = p.m_sensors, p.delta_mu, p.delta_phi
    return (
        p.rho**2 * dmu**2 * m * (m - 1) * (m - 2) * (m + 2) * (m + 1)
        * (dmu**2 * (m - 3) * (m + 3) * math.cos(dphi) ** 2
           + 140.0 * math.sin(dphi) ** 2)
    )


def two_source_nc_crb(p: TwoSourceParams) -> float:
    """Trace of the two-source strictly non-circular bound (small delta_mu).

    Finite at zero separation whenever rho < 1 and delta_phi > 0; returns
    +inf when the denominator vanishes.
    """
    m, dmu, dphi = p.m_sensors, p.delta_mu, p.delta_phi
    incoherent_part = (
        (1.0 - p.rho**2) * m * (m - 1) * (m + 1)
        * (140.0 * dmu**2 * (m - 2) * (m + 2) * math.cos(dphi) ** 2
           + 8400.0 * math.sin(dphi) ** 2)
    )
    denom = _coherent_bracket(p) + incoherent_part
    if denom == 0.0:
        return math.inf
    return _PREFACTOR / denom * p.snr_factor


def two_source_crb(p: TwoSourceParams) -> float:
    """Trace of the two-source arbitrary-signal bound (small delta_mu).

    Diverges as delta_mu -> 0 for every rho and delta_phi.
    """
    m, dmu = p.m_sensors, p.delta_mu
    incoherent_part = (
        140.0 * (1.0 - p.rho**2) * dmu**2 * m * (m - 1) * (m - 2) * (m + 2) * (m + 1)
    )
    denom = _coherent_bracket(p) + incoherent_part
    if denom == 0.0:
        return math.inf
    return _PREFACTOR / denom * p.snr_factor


def nc_crb_limit_zero_sep(p: TwoSourceParams) -> float:
    """Zero-separation limit of the non-circular bound trace.

    ``6 / ((1-rho^2) * M*(M^2-1) * sin^2(delta_phi)) * (snr1+snr2)/(snr1*snr2)``;
    +inf in the coherent or zero-phase-separation corner.
    """
    m = p.m_sensors
    s2 = math.sin(p.delta_phi) ** 2
    denom = (1.0 - p.rho**2) * m * (m**2 - 1) * s2
    if denom == 0.0:
        return math.inf
    return 6.0 / denom * p.snr_factor


def nc_gain(p: TwoSourceParams) -> float:
    """Asymptotic NC gain: ratio of the arbitrary-signal to the NC bound trace.

    Exactly 1 when rho = 1 or delta_phi = 0; grows without bound as delta_mu
    shrinks otherwise.  Evaluates the explicit ratio form, which agrees with
    ``two_source_crb(p) / two_source_nc_crb(p)`` to round-off.
    """
    m, dmu, dphi = p.m_sensors, p.delta_mu, p.delta_phi
    sin2, cos2 = math.sin(dphi) ** 2, math.cos(dphi) ** 2
    num = (
        140.0 * (1.0 - p.rho**2) * m * (m - 1) * (m + 1) * sin2
        * (60.0 - dmu**2 * (m - 2) * (m + 2))
    )
    den = (
        dmu**2 * m * (m - 1) * (m - 2) * (m + 2) * (m + 1)
        * (dmu**2 * p.rho**2 * (m - 3) * (m + 3) * cos2
           + 140.0 * (1.0 - p.rho**2 * cos2))
    )
    if num == 0.0:
        return 1.0
    if den == 0.0:
        return math.inf
    return 1.0 + num / den


def _centered_index(m_sensors: int) -> np.ndarray:
    return np.arange(m_sensors) - (m_sensors - 1) / 2


def alpha_beta_gamma(m_sensors: int, delta_mu: float, taylor_order: int = 6) -> AlphaBetaGamma:
    """Exact and Taylor-truncated steering cross terms on a centered ULA.

    Exact values are the centered index sums

        alpha = sum exp(j*m*dmu)         (= sin(M*dmu/2)/sin(dmu/2)),
        beta  = -j * sum m * exp(j*m*dmu),
        gamma = sum m^2 * exp(j*m*dmu),

    all real for the symmetric index range.  The Taylor values keep powers of
    delta_mu up to ``taylor_order`` (even powers for alpha/gamma, odd for
    beta), with coefficients from the exact index-moment sums.
    """
    if taylor_order not in (2, 4, 6):
        raise ValueError("taylor_order must be 2, 4 or 6")
    idx = _centered_index(m_sensors)
    phase = np.exp(1j * idx * delta_mu)
    alpha = complex(np.sum(phase))
    beta = complex(-1j * np.sum(idx * phase))
    gamma = complex(np.sum(idx**2 * phase))

    def moment(p):
        return float(np.sum(idx**p))

    a_t = sum(
        (-1) ** (p // 2) * moment(p) * delta_mu**p / math.factorial(p)
        for p in range(0, taylor_order + 1, 2)
    )
    b_t = sum(
        (-1) ** ((p - 1) // 2) * moment(p + 1) * delta_mu**p / math.factorial(p)
        for p in range(1, taylor_order + 1, 2)
    )
    g_t = sum(
        (-1) ** (p // 2) * moment(p + 2) * delta_mu**p / math.factorial(p)
        for p in range(0, taylor_order + 1, 2)
    )
    return AlphaBetaGamma(alpha=alpha, beta=beta, gamma=gamma,
                          alpha_taylor=a_t, beta_taylor=b_t, gamma_taylor=g_t,
                          order=taylor_order)


def dirichlet_alpha(m_sensors: int, delta_mu: float) -> float:
    """Ratio-of-sines form of alpha with a series fallback near zero."""
    if abs(delta_mu) < 1e-8:
        # sin(Mx/2)/sin(x/2) ~ M (1 - (M^2-1) x^2 / 24) near zero
        return m_sensors * (1.0 - (m_sensors**2 - 1) * delta_mu**2 / 24.0)
    return math.sin(m_sensors * delta_mu / 2) / math.sin(delta_mu / 2)


def _phase_groups(phi: np.ndarray, tol: float = 1e-9) -> list[list[int]]:
    """Partition sources whose rotation phases agree modulo pi."""
    reps: list[float] = []
    groups: list[list[int]] = []
    for i, p in enumerate(phi):
        reduced = float(np.mod(p, np.pi))
        for rep, members in zip(reps, groups):
            diff = abs(reduced - rep)
            if min(diff, np.pi - diff) <= tol:
                members.append(i)
                break
        else:
            reps.append(reduced)
            groups.append([i])
    return groups


def two_groups_decoupling_check(grid: SamplingGrid, scenario: SourceScenario,
                                rel_tol: float = 1e-8) -> bool:
    """Whether two equal-phase groups of uncorrelated unit-power sources
    decouple: joint NC bound trace == sum of per-group traces.

    Requires a centered centro-symmetric grid, unit powers, identity target
    correlation and exactly two phase groups modulo pi.  Returns True only
    when the group phase separation makes the cross-group Gram couplings
    vanish (separation pi/2 modulo pi); other separations generically fail.
    """
    dec = center_grid(grid)
    if max(abs(x) for x in dec.deltas) > 1e-9 or not is_centro_symmetric(grid):
        raise ValueError("grid must be centered and centro-symmetric")
    if not np.allclose(scenario.powers, 1.0, atol=1e-12):
        raise ValueError("sources must have unit power")
    if not np.allclose(scenario.corr, np.eye(scenario.n_sources), atol=1e-12):
        raise ValueError("sources must be uncorrelated")
    groups = _phase_groups(np.asarray(scenario.phi))
    if len(groups) != 2:
        raise ValueError(f"expected exactly two phase groups modulo pi, found {len(groups)}")

    eye = np.eye(scenario.n_sources)
    steering = build_steering_set(grid, scenario.mu)
    joint = det_nc_crb(steering, scenario.phi, eye, scenario.sigma2, scenario.n_snapshots)
    if joint.is_singular:
        return False
    total = 0.0
    for members in groups:
        sub = build_steering_set(grid, scenario.mu[:, members])
        part = det_nc_crb(sub, np.asarray(scenario.phi)[members],
                          np.eye(len(members)), scenario.sigma2, scenario.n_snapshots)
        if part.is_singular:
            return False
        total += part.trace
    return abs(joint.trace - total) <= rel_tol * total
