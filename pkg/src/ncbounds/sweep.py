"""Sweep execution: one bound evaluation per axis point, CSV output with a
reproducibility manifest, and generated plot scripts.

Each axis point evaluates the deterministic bounds on symbols whose empirical
covariance equals the scenario target exactly (``exact_covariance_symbols``),
so curves are deterministic functions of (config, seed) and closed-form
columns are directly comparable.  Per-point RNG streams derive from
(seed, point index); running with more worker threads never changes output.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .bounds import BoundResult, det_crb, det_nc_crb, fim_assemble, fim_mu_block_inverse
from .closed_form import TwoSourceParams, two_source_crb, two_source_nc_crb
from .config import SweepSpec
from .geometry import SamplingGrid, build_steering_set, phase_reference, ula
from .signals import (
    POINT_STREAM,
    SourceScenario,
    exact_covariance_symbols,
    rotated_covariance,
    sigma2_from_snr_db,
)

__all__ = ["RunManifest", "SweepResult", "run_sweep", "evaluate_single", "emit_plot_script"]

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "inf" if np.isinf(x) else f"{x:.9g}"


def point_seed(seed: int, index: int) -> int:
    """Deterministic per-point seed derived from (master seed, point index)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(POINT_STREAM, int(index)))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class RunManifest:
    config_sha256: str
    seed: int
    version: str
    generated: str
    elapsed_s: float
    axis: str | None
    points: int

    def header_lines(self) -> list[str]:
        lines = [
            f"# schema={SCHEMA_VERSION}",
            f"# tool=ncbounds {self.version}",
            f"# config_sha256={self.config_sha256}",
            f"# seed={self.seed}",
        ]
        if self.axis is not None:
            lines.append(f"# axis={self.axis} points={self.points}")
        # the one line excluded from byte-identity comparisons
        lines.append(f"# generated={self.generated} elapsed_s={self.elapsed_s:.3f}")
        return lines


@dataclass
class SweepResult:
    columns: list[str]
    rows: list[dict]
    manifest: RunManifest

    def to_csv(self) -> str:
        out = list(self.manifest.header_lines())
        out.append(",".join(self.columns))
        for row in self.rows:
            out.append(",".join(_fmt(row[c]) for c in self.columns))
        return "\n".join(out) + "\n"

    def to_json(self) -> str:
        payload = {
            "manifest": self.manifest.__dict__,
            "columns": self.columns,
            "rows": [
                {c: (None if isinstance(r[c], float) and np.isinf(r[c]) else r[c])
                 for c in self.columns}
                for r in self.rows
            ],
        }
        return json.dumps(payload, indent=2)

    def write(self, path: str, fmt: str = "csv"):
        text = self.to_csv() if fmt == "csv" else self.to_json()
        with open(path, "w") as fh:
            fh.write(text)


def config_sha256(path: str | None) -> str:
    if path is None:
        return "inline"
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _scenario_at(spec: SweepSpec, value) -> tuple[SamplingGrid, SourceScenario]:
    """Apply one axis value to the scenario template / geometry."""
    sc = spec.scenario
    grid = spec.geometry
    if spec.axis == "snr_db":
        sc = replace(sc, sigma2=sigma2_from_snr_db(float(value), sc.powers))
    elif spec.axis == "sensors":
        m, reference = spec.ula_shorthand
        grid = ula(int(value), reference)
    elif spec.axis == "delta_mu":
        mu = sc.mu.copy()
        mu[0, 1] = mu[0, 0] + float(value)
        sc = replace(sc, mu=mu)
    elif spec.axis == "correlation":
        sc = replace(sc, corr=float(value))
    elif spec.axis == "delta_phi":
        phi = sc.phi.copy()
        phi[1] = phi[0] + float(value)
        sc = replace(sc, phi=phi)
    elif spec.axis is not None:
        raise ValueError(f"unhandled axis {spec.axis!r}")
    return grid, sc


def _closed_form_params(grid: SamplingGrid, sc: SourceScenario) -> TwoSourceParams:
    delta = phase_reference(grid.modes[0])
    n = sc.n_snapshots
    return TwoSourceParams.from_rotation(
        m_sensors=grid.size,
        delta_mu=float(sc.mu[0, 1] - sc.mu[0, 0]),
        delta_phi_rot=float(sc.phi[1] - sc.phi[0]),
        reference_delta=delta,
        rho=float(sc.corr[0, 1]),
        snr1=n * float(sc.powers[0]) / sc.sigma2,
        snr2=n * float(sc.powers[1]) / sc.sigma2,
    )


def _evaluate_point(spec: SweepSpec, value, index: int) -> dict:
    grid, sc = _scenario_at(spec, value)
    block = exact_covariance_symbols(sc, point_seed(spec.seed, index))
    steering = build_steering_set(grid, sc.mu)
    row: dict = {spec.axis or "value": value}
    status = []

    needs_crb = any(o in spec.outputs for o in ("crb", "nc_gain"))
    needs_nc = any(o in spec.outputs for o in ("nc_crb", "nc_gain"))
    crb = nc = None
    if needs_crb:
        crb = det_crb(steering, rotated_covariance(block.rhat_s0, sc.phi),
                      sc.sigma2, sc.n_snapshots)
        if crb.is_singular:
            status.append(f"crb singular:{crb.condition_report['singular_factor']}")
    if needs_nc:
        nc = det_nc_crb(steering, sc.phi, block.rhat_s0, sc.sigma2, sc.n_snapshots)
        if nc.is_singular:
            status.append(f"nc_crb singular:{nc.condition_report['singular_factor']}")

    for name in spec.outputs:
        if name == "crb":
            row["crb_rmse"] = crb.rmse
        elif name == "nc_crb":
            row["nc_crb_rmse"] = nc.rmse
        elif name == "fim_oracle":
            oracle = fim_mu_block_inverse(fim_assemble(steering, sc.phi, block.s0, sc.sigma2))
            row["fim_oracle_rmse"] = oracle.rmse
            if oracle.is_singular:
                status.append("fim_oracle singular")
        elif name == "crb_closed":
            row["crb_closed_rmse"] = float(np.sqrt(two_source_crb(_closed_form_params(grid, sc)) / 2))
        elif name == "nc_crb_closed":
            row["nc_crb_closed_rmse"] = float(np.sqrt(two_source_nc_crb(_closed_form_params(grid, sc)) / 2))
        elif name == "nc_gain":
            row["nc_gain"] = (crb.trace / nc.trace
                              if not (crb.is_singular or nc.is_singular) else np.inf)
    row["status"] = ";".join(status) if status else "ok"
    return row


_COLUMN_FOR = {
    "crb": "crb_rmse",
    "nc_crb": "nc_crb_rmse",
    "fim_oracle": "fim_oracle_rmse",
    "crb_closed": "crb_closed_rmse",
    "nc_crb_closed": "nc_crb_closed_rmse",
    "nc_gain": "nc_gain",
}


def run_sweep(spec: SweepSpec, threads: int = 1, config_path: str | None = None) -> SweepResult:
    """Evaluate every axis point; singular points are recorded in their row."""
    values = spec.axis_values()
    t0 = time.time()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda iv: _evaluate_point(spec, iv[1], iv[0]),
                                 enumerate(values)))
    else:
        rows = [_evaluate_point(spec, v, i) for i, v in enumerate(values)]
    elapsed = time.time() - t0
    manifest = RunManifest(
        config_sha256=config_sha256(config_path),
        seed=spec.seed,
        version=__version__,
        generated=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        elapsed_s=elapsed,
        axis=spec.axis,
        points=len(values),
    )
    columns = [spec.axis or "value"] + [_COLUMN_FOR[o] for o in spec.outputs] + ["status"]
    return SweepResult(columns=columns, rows=rows, manifest=manifest)


def evaluate_single(spec: SweepSpec) -> dict[str, BoundResult]:
    """Both bounds plus the Fisher-information oracle for one scenario."""
    sc = spec.scenario
    block = exact_covariance_symbols(sc, point_seed(spec.seed, 0))
    steering = build_steering_set(spec.geometry, sc.mu)
    crb = det_crb(steering, rotated_covariance(block.rhat_s0, sc.phi), sc.sigma2, sc.n_snapshots)
    nc = det_nc_crb(steering, sc.phi, block.rhat_s0, sc.sigma2, sc.n_snapshots)
    oracle = fim_mu_block_inverse(fim_assemble(steering, sc.phi, block.s0, sc.sigma2))
    return {"crb": crb, "nc_crb": nc, "fim_oracle": oracle}


# ---------------------------------------------------------------------------
# plot scripts

_PLOT_KINDS = ("rmse_snr", "rmse_sensors", "gain_sep", "table")

_PLOT_TEMPLATE = """\
#!/usr/bin/env python3
# Auto-generated plotting script ({kind}); reads {csv!r}.
import csv

import matplotlib.pyplot as plt

rows = []
with open({csv!r}) as fh:
    reader = csv.DictReader(r for r in fh if not r.startswith("#"))
    for row in reader:
        rows.append(row)

x = [float(r[{xcol!r}]) for r in rows]
fig, ax = plt.subplots(figsize=(6, 4.2))
for col in {ycols!r}:
    y = [float(r[col]) for r in rows]
    ax.plot(x, y, marker="o", label=col)
ax.set_xlabel({xlabel!r})
ax.set_ylabel({ylabel!r})
{scale}
ax.grid(True, which="both", alpha=0.4)
ax.legend()
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
print("wrote", {png!r})
"""

_TABLE_TEMPLATE = """\
#!/usr/bin/env python3
# Auto-generated table formatter; reads {csv!r}.
import csv

with open({csv!r}) as fh:
    reader = csv.reader(r for r in fh if not r.startswith("#"))
    rows = list(reader)

widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
for row in rows:
    print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
"""


def _csv_columns(csv_path: str) -> list[str]:
    with open(csv_path) as fh:
        for line in fh:
            if not line.startswith("#"):
                return line.strip().split(",")
    raise ValueError(f"{csv_path}: no header line found")


def emit_plot_script(csv_path: str, kind: str, out_path: str) -> None:
    """Write a self-contained matplotlib script for the given CSV.

    Kinds: ``rmse_snr`` (log-y RMSE vs dB), ``rmse_sensors`` (log-y RMSE vs
    M), ``gain_sep`` (log-log gain vs separation), ``table`` (aligned text).
    """
    if kind not in _PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}, expected one of {_PLOT_KINDS}")
    columns = _csv_columns(csv_path)
    if kind == "table":
        script = _TABLE_TEMPLATE.format(csv=csv_path)
    else:
        xcol = {"rmse_snr": "snr_db", "rmse_sensors": "sensors", "gain_sep": "delta_mu"}[kind]
        if xcol not in columns:
            raise ValueError(f"{csv_path}: missing column {xcol!r} needed by {kind}")
        if kind == "gain_sep":
            ycols = [c for c in columns if "gain" in c]
            scale = 'ax.set_xscale("log")\nax.set_yscale("log")'
            ylabel = "NC gain"
        else:
            ycols = [c for c in columns if c.endswith("_rmse")]
            scale = 'ax.set_yscale("log")'
            ylabel = "RMSE (rad)"
        if not ycols:
            raise ValueError(f"{csv_path}: no y columns for plot kind {kind!r}")
        script = _PLOT_TEMPLATE.format(
            kind=kind, csv=csv_path, xcol=xcol, ycols=ycols,
            xlabel={"rmse_snr": "SNR (dB)", "rmse_sensors": "sensors M",
                    "gain_sep": "separation (rad)"}[kind],
            ylabel=ylabel, scale=scale,
            png=csv_path.rsplit(".", 1)[0] + ".png",
        )
    with open(out_path, "w") as fh:
        fh.write(script)
