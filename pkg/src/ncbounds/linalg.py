"""Dense linear-algebra helpers: split complex inversion, 3x3 block inversion.

A matrix counts as singular here when its 2-norm condition number exceeds
``SINGULARITY_COND`` (1e12, a double-precision heuristic).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "SINGULARITY_COND",
    "SingularFactorError",
    "cond",
    "check_invertible",
    "complex_inverse_split",
    "block_inverse_3x3",
]

SINGULARITY_COND = 1e12


class SingularFactorError(np.linalg.LinAlgError):
    """A named factor failed the invertibility check."""

    def __init__(self, factor: str, cond_value: float):
        self.factor = factor
        self.cond_value = cond_value
        super().__init__(f"factor {factor!r} is singular (condition number {cond_value:.3e})")


def cond(mat: np.ndarray) -> float:
    """2-norm condition number; inf for non-finite or exactly rank-deficient input."""
    if not np.all(np.isfinite(mat)):
        return np.inf
    try:
        c = np.linalg.cond(mat)
    except np.linalg.LinAlgError:
        return np.inf
    return float(c) if np.isfinite(c) else np.inf


def check_invertible(mat: np.ndarray, name: str, threshold: float = SINGULARITY_COND) -> float:
    c = cond(mat)
    if not (c < threshold):
        raise SingularFactorError(name, c)
    return c


def complex_inverse_split(ar: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of (Ar + j*B)^-1 without complex arithmetic.

    Uses the identity
    ``(Ar + jB)^-1 = (Ar + B Ar^-1 B)^-1 - j Ar^-1 B (Ar + B Ar^-1 B)^-1``,
    valid when Ar and (Ar + B Ar^-1 B) are invertible.
    """
    ar = np.asarray(ar, dtype=float)
    b = np.asarray(b, dtype=float)
    if ar.shape != b.shape or ar.ndim != 2 or ar.shape[0] != ar.shape[1]:
        raise ValueError("Ar and B must be square matrices of the same size")
    check_invertible(ar, "Ar")
    x = np.linalg.solve(ar, b)  # Ar^-1 B
    core = ar + b @ x
    check_invertible(core, "Ar + B Ar^-1 B")
    re = np.linalg.inv(core)
    return re, -x @ re


def block_inverse_3x3(a, b, c, d, e, f, g, h, j) -> np.ndarray:
    """Upper-left block of the inverse of [[A,B,C],[D,E,F],[G,H,J]].

    Closed form via two nested Schur complements, with ``S_E = J - H E^-1 F``:

        (A - B E^-1 D - B E^-1 F S_E^-1 H E^-1 D + B E^-1 F S_E^-1 G
           + C J^-1 H E^-1 D + C J^-1 H E^-1 F S_E^-1 H E^-1 D
           - C S_E^-1 G)^-1
    """
    a, b, c, d, e, f, g, h, j = (np.asarray(x, dtype=float) for x in (a, b, c, d, e, f, g, h, j))
    check_invertible(e, "E")
    check_invertible(j, "J")
    ei_d = np.linalg.solve(e, d)
    ei_f = np.linalg.solve(e, f)
    s_e = j - h @ ei_f
    check_invertible(s_e, "S_E = J - H E^-1 F")
    sei_g = np.linalg.solve(s_e, g)
    sei_h_ei_d = np.linalg.solve(s_e, h @ ei_d)
    ji_h = np.linalg.solve(j, h)
    core = (
        a
        - b @ ei_d
        - b @ ei_f @ sei_h_ei_d
        + b @ ei_f @ sei_g
        + c @ ji_h @ ei_d
        + c @ ji_h @ ei_f @ sei_h_ei_d
        - c @ sei_g
    )
    check_invertible(core, "reduced upper-left block")
    return np.linalg.inv(core)
