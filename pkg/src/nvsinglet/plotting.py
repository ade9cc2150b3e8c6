"""Basic line plots rebuilt from the curve CSVs."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

from .sweep import SweepAxis, read_curve_csv

_LOG_AXES = {"population_power", "ionization_power", "singlet_cross_section", "ionization_duration"}


def plot_figures(out_dir, manifest: dict) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    by_figure = defaultdict(lambda: defaultdict(dict))
    for entry in manifest["curves"]:
        by_figure[entry["figure"]][entry["axis"]][entry["curve"]] = entry["file"]

    written = []
    for figure, panels in sorted(by_figure.items()):
        axes_order = [a.value for a in SweepAxis if a.value in panels]
        fig, axs = plt.subplots(1, len(axes_order), figsize=(4 * len(axes_order), 3.2), squeeze=False)
        for ax, axis in zip(axs[0], axes_order):
            unit = ""
            for curve in ("red", "blue"):
                if curve not in panels[axis]:
                    continue
                meta, x, y = read_curve_csv(out_dir / panels[axis][curve])
                unit = meta.get("unit", "")
                ax.plot(x, y, color=curve, label=f"{curve} (λs={float(meta['lambda_s_nm']):g} nm)")
            if axis in _LOG_AXES:
                ax.set_xscale("log")
            ax.set_xlabel(f"{axis.replace('_', ' ')} [{unit}]")
            ax.set_ylabel("NV- population" if figure.startswith("population") else "PC [AU]")
            ax.legend(fontsize=7)
        fig.suptitle(figure.replace("_", " "))
        fig.tight_layout()
        path = out_dir / f"{figure}.png"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)
    return written
