"""How the cone's level ladder responds to its shape.

Opening the cone (larger slope) or stretching it (larger height/radius
ratio) both lower every level and squeeze the ladder together.  This runs
the packaged sweeps and plots the resulting trend curves.

Run:  python demos/03_spectral_trends.py
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from conewave import SweepSpec, run_experiment

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def load(table_path):
    with open(table_path) as fh:
        skip = sum(1 for line in fh if line.startswith("#")) + 1
    return np.loadtxt(table_path, skiprows=skip)


res_a = run_experiment(SweepSpec("fig4a_levels_vs_lambda", output_dir=OUT))
res_b = run_experiment(SweepSpec("fig4b_ground_vs_height", output_dir=OUT))
for check in res_a.checks + res_b.checks:
    print(f"[{'PASS' if check.passed else 'FAIL'}] {check.name}: {check.detail}")

fig, axes = plt.subplots(1, 2, figsize=(10, 4))

data = load([f for f in res_a.files if f.suffix == ".tsv"][0])
for aspect, style in ((2.5, "-"), (4.0, "--")):
    block = data[data[:, 0] == aspect]
    for k in range(3):
        axes[0].plot(block[:, 1], block[:, 2 + k], style,
                     label=f"c{k + 1}, h/rho={aspect:g}" if k == 0 else None)
axes[0].set_xlabel("generatrix slope")
axes[0].set_ylabel("level c")
axes[0].set_title("three lowest levels vs slope")
axes[0].legend()

data = load([f for f in res_b.files if f.suffix == ".tsv"][0])
for slope in (0.3, 0.8, 1.5, 2.0):
    block = data[data[:, 0] == slope]
    axes[1].plot(block[:, 1], block[:, 2], label=f"slope {slope:g}")
axes[1].set_xlabel("z_max / rho")
axes[1].set_ylabel("ground level c1")
axes[1].set_title("ground level vs height")
axes[1].legend()

fig.tight_layout()
fig.savefig(OUT / "03_trends.png", dpi=150)
print(f"wrote {OUT / '03_trends.png'}")
