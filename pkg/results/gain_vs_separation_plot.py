#!/usr/bin/env python3
# Auto-generated plotting script (gain_sep); reads '/root/pkg/results/gain_vs_separation.csv'.
import csv

import matplotlib.pyplot as plt

rows = []
with open('/root/pkg/results/gain_vs_separation.csv') as fh:
    reader = csv.DictReader(r for r in fh if not r.startswith("#"))
    for row in reader:
        rows.append(row)

x = [float(r['delta_mu']) for r in rows]
fig, ax = plt.subplots(figsize=(6, 4.2))
for col in ['nc_gain']:
    y = [float(r[col]) for r in rows]
    ax.plot(x, y, marker="o", label=col)
ax.set_xlabel('separation (rad)')
ax.set_ylabel('NC gain')
ax.set_xscale("log")
ax.set_yscale("log")
ax.grid(True, which="both", alpha=0.4)
ax.legend()
fig.tight_layout()
fig.savefig('/root/pkg/results/gain_vs_separation.png', dpi=150)
print("wrote", '/root/pkg/results/gain_vs_separation.png')
