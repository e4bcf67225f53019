#!/usr/bin/env python3
# Auto-generated plotting script (rmse_sensors); reads '/root/pkg/results/rmse_vs_sensors.csv'.
import csv

import matplotlib.pyplot as plt

rows = []
with open('/root/pkg/results/rmse_vs_sensors.csv') as fh:
    reader = csv.DictReader(r for r in fh if not r.startswith("#"))
    for row in reader:
        rows.append(row)

x = [float(r['sensors']) for r in rows]
fig, ax = plt.subplots(figsize=(6, 4.2))
for col in ['crb_rmse', 'nc_crb_rmse', 'crb_closed_rmse', 'nc_crb_closed_rmse']:
    y = [float(r[col]) for r in rows]
    ax.plot(x, y, marker="o", label=col)
ax.set_xlabel('sensors M')
ax.set_ylabel('RMSE (rad)')
ax.set_yscale("log")
ax.grid(True, which="both", alpha=0.4)
ax.legend()
fig.tight_layout()
fig.savefig('/root/pkg/results/rmse_vs_sensors.png', dpi=150)
print("wrote", '/root/pkg/results/rmse_vs_sensors.png')
