#!/usr/bin/env python3
"""Run the three shipped sweep configs and emit their plot scripts.

Writes CSVs (and matching *_plot.py files) into results/.  Equivalent CLI:
    ncbounds sweep --config configs/<name>.toml --out results/<name>.csv
"""
from pathlib import Path

from ncbounds.config import parse_config
from ncbounds.sweep import emit_plot_script, run_sweep

ROOT = Path(__file__).resolve().parent.parent
SWEEPS = [
    ("rmse_vs_snr_2d.toml", "rmse_snr"),
    ("rmse_vs_sensors.toml", "rmse_sensors"),
    ("gain_vs_separation.toml", "gain_sep"),
]


def main():
    results = ROOT / "results"
    results.mkdir(exist_ok=True)
    for name, plot_kind in SWEEPS:
        cfg_path = ROOT / "configs" / name
        spec = parse_config(str(cfg_path))
        out_csv = results / (cfg_path.stem + ".csv")
        result = run_sweep(spec, config_path=str(cfg_path))
        result.write(str(out_csv))
        script = results / (cfg_path.stem + "_plot.py")
        emit_plot_script(str(out_csv), plot_kind, str(script))
        print(f"{name}: {len(result.rows)} points -> {out_csv.name}, {script.name}")


if __name__ == "__main__":
    main()
