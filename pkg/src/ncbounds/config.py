"""Experiment configuration files (TOML) and their validation.

A config has a ``[geometry]`` table (either a ``modes`` literal with per-mode
coordinate arrays, or the ULA shorthand string ``ula(M, reference)`` with
reference ``first`` or ``centroid``), a ``[scenario]`` table (``mu``, ``phi``,
``powers``, ``corr`` as a full matrix or a scalar pairwise coefficient, ``N``,
``snr_db`` or ``sigma2`` but never both, ``seed``), and for sweeps a
``[sweep]`` table with ``axis``, ``range = {start, stop, points, scale}``,
``outputs`` and ``out``.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .geometry import SamplingGrid, ula
from .signals import SourceScenario, sigma2_from_snr_db

__all__ = ["ConfigError", "SweepSpec", "parse_config", "AXES", "OUTPUTS"]

AXES = ("snr_db", "sensors", "delta_mu", "correlation", "delta_phi")
OUTPUTS = ("crb", "nc_crb", "crb_closed", "nc_crb_closed", "nc_gain", "fim_oracle")
CLOSED_FORM_OUTPUTS = ("crb_closed", "nc_crb_closed", "nc_gain")

_ULA_RE = re.compile(r"^\s*ula\(\s*(\d+)\s*,\s*(first|centroid)\s*\)\s*$")


class ConfigError(Exception):
    """Malformed or semantically invalid configuration."""


@dataclass(frozen=True)
class SweepSpec:
    """Fully resolved run description.

    ``axis`` is None for single-point configs (the ``bound`` subcommand);
    sweeps carry the axis, its range and the requested output columns.
    """

    geometry: SamplingGrid
    scenario: SourceScenario
    seed: int
    snr_db: float | None
    axis: str | None = None
    start: float = 0.0
    stop: float = 0.0
    points: int = 0
    scale: str = "linear"
    outputs: tuple[str, ...] = ()
    out_path: str = ""
    ula_shorthand: tuple[int, str] | None = None  # (M, reference) when given

    def axis_values(self) -> np.ndarray:
        if self.axis is None:
            raise ConfigError("config has no [sweep] table")
        if self.axis == "sensors":
            vals = np.unique(np.round(np.linspace(self.start, self.stop, self.points)))
            return vals.astype(int)
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)

    def describe(self) -> str:
        """Resolved values, echoed so defaults are visible."""
        lines = [
            f"geometry: modes={list(map(list, self.geometry.modes))}",
            f"scenario: d={self.scenario.n_sources} R={self.scenario.n_modes} "
            f"N={self.scenario.n_snapshots} sigma2={self.scenario.sigma2:.9g}"
            + (f" (snr_db={self.snr_db:.9g})" if self.snr_db is not None else ""),
            f"  mu={self.scenario.mu.tolist()}",
            f"  phi={self.scenario.phi.tolist()}",
            f"  powers={self.scenario.powers.tolist()}",
            f"  corr={self.scenario.corr.tolist()}",
            f"seed: {self.seed}",
        ]
        if self.axis is not None:
            lines.append(
                f"sweep: axis={self.axis} range=[{self.start:.9g}, {self.stop:.9g}] "
                f"points={self.points} scale={self.scale}"
            )
            lines.append(f"  outputs={list(self.outputs)} out={self.out_path!r}")
        return "\n".join(lines)


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return table[key]


def _reject_unknown(table: dict, allowed: set[str], where: str):
    for key in table:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}: unknown key")


def _parse_geometry(table: dict) -> tuple[SamplingGrid, tuple[int, str] | None]:
    _reject_unknown(table, {"modes", "ula"}, "geometry")
    if "modes" in table and "ula" in table:
        raise ConfigError("geometry: give either 'modes' or 'ula', not both")
    if "ula" in table:
        m = _ULA_RE.match(str(table["ula"]))
        if not m:
            raise ConfigError(
                "geometry.ula: expected the form 'ula(M, reference)' with "
                "reference 'first' or 'centroid'"
            )
        size, reference = int(m.group(1)), m.group(2)
        return ula(size, reference), (size, reference)
    if "modes" in table:
        modes = table["modes"]
        try:
            grid = SamplingGrid(tuple(tuple(float(c) for c in mode) for mode in modes))
        except (TypeError, ValueError) as err:
            raise ConfigError(f"geometry.modes: {err}") from err
        return grid, None
    raise ConfigError("geometry: missing 'modes' or 'ula'")


def _parse_scenario(table: dict, grid: SamplingGrid) -> tuple[SourceScenario, int, float | None]:
    allowed = {"mu", "phi", "powers", "corr", "N", "snr_db", "sigma2", "seed"}
    _reject_unknown(table, allowed, "scenario")
    mu = np.atleast_2d(np.asarray(_require(table, "mu", "scenario"), dtype=float))
    if mu.shape[0] != grid.n_modes:
        raise ConfigError(
            f"scenario.mu: {mu.shape[0]} rows but the geometry has {grid.n_modes} modes"
        )
    d = mu.shape[1]
    phi = np.asarray(table.get("phi", np.zeros(d)), dtype=float)
    powers = np.asarray(table.get("powers", np.ones(d)), dtype=float)
    corr = table.get("corr", 0.0)
    n_snapshots = int(_require(table, "N", "scenario"))
    seed = int(table.get("seed", 0))
    has_snr = "snr_db" in table
    has_sigma2 = "sigma2" in table
    if has_snr == has_sigma2:
        raise ConfigError("scenario: give exactly one of 'snr_db' or 'sigma2'")
    snr_db = float(table["snr_db"]) if has_snr else None
    sigma2 = sigma2_from_snr_db(snr_db, powers) if has_snr else float(table["sigma2"])
    try:
        scenario = SourceScenario(mu=mu, phi=phi, powers=powers, corr=corr,
                                  n_snapshots=n_snapshots, sigma2=sigma2)
    except ValueError as err:
        raise ConfigError(f"scenario: {err}") from err
    return scenario, seed, snr_db


def _parse_sweep(table: dict, scenario: SourceScenario, grid: SamplingGrid,
                 ula_shorthand) -> dict:
    _reject_unknown(table, {"axis", "range", "outputs", "out"}, "sweep")
    axis = _require(table, "axis", "sweep")
    if axis not in AXES:
        raise ConfigError(f"sweep.axis: {axis!r} is not one of {AXES}")
    rng = _require(table, "range", "sweep")
    _reject_unknown(rng, {"start", "stop", "points", "scale"}, "sweep.range")
    start = float(_require(rng, "start", "sweep.range"))
    stop = float(_require(rng, "stop", "sweep.range"))
    points = int(_require(rng, "points", "sweep.range"))
    scale = rng.get("scale", "linear")
    if points < 2:
        raise ConfigError("sweep.range.points: need at least 2 points")
    if scale not in ("linear", "log"):
        raise ConfigError("sweep.range.scale: expected 'linear' or 'log'")
    if scale == "log" and start <= 0:
        raise ConfigError("sweep.range.start: log scale needs a positive start")
    outputs = tuple(_require(table, "outputs", "sweep"))
    for name in outputs:
        if name not in OUTPUTS:
            raise ConfigError(f"sweep.outputs: {name!r} is not one of {OUTPUTS}")
    if not outputs:
        raise ConfigError("sweep.outputs: must not be empty")
    out_path = str(_require(table, "out", "sweep"))

    d = scenario.n_sources
    if axis in ("delta_mu", "delta_phi") and d != 2:
        raise ConfigError(f"sweep.axis: {axis} sweeps require exactly 2 sources")
    if axis == "correlation":
        if d < 2:
            raise ConfigError("sweep.axis: correlation sweeps need at least 2 sources")
        if not (-1.0 <= start <= 1.0 and -1.0 <= stop <= 1.0):
            raise ConfigError("sweep.range: correlation values must lie in [-1, 1]")
    if axis == "sensors" and ula_shorthand is None:
        raise ConfigError("sweep.axis: sensors sweeps require the ula(...) geometry shorthand")
    needs_closed = [n for n in outputs if n in CLOSED_FORM_OUTPUTS]
    if needs_closed and (d != 2 or grid.n_modes != 1):
        raise ConfigError(
            f"sweep.outputs: {needs_closed} need a 1-D geometry with exactly 2 sources"
        )
    return dict(axis=axis, start=start, stop=stop, points=points, scale=scale,
                outputs=outputs, out_path=out_path)


def parse_config(path: str) -> SweepSpec:
    """Load and validate a config file; all defaults are resolved here."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as err:
        raise ConfigError(f"config file not found: {path}") from err
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"{path}: {err}") from err

    _reject_unknown(raw, {"geometry", "scenario", "sweep"}, "config")
    grid, ula_shorthand = _parse_geometry(_require(raw, "geometry", "config"))
    scenario, seed, snr_db = _parse_scenario(_require(raw, "scenario", "config"), grid)
    fields = dict(geometry=grid, scenario=scenario, seed=seed, snr_db=snr_db,
                  ula_shorthand=ula_shorthand)
    if "sweep" in raw:
        fields.update(_parse_sweep(raw["sweep"], scenario, grid, ula_shorthand))
    return SweepSpec(**fields)
