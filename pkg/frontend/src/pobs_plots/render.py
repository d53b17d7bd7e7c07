"""Render one figure per CSV family listed in a plot-data manifest."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KNOWN_FAMILIES = ("growth", "nondegeneracy", "porosity", "boxcount", "sigma_scaling")


class RenderError(Exception):
    """Raised when a manifest or CSV cannot be rendered."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render from files listed in a manifest."""

    manifest_path: Path
    family: str
    image_path: Path
    style: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RenderResult:
    """A rendered figure and the exact CSV columns that were plotted."""

    family: str
    image_path: Path
    columns: dict


def _read_csv_columns(path: Path) -> dict:
    """Parse a CSV into named float columns; name the file and row on failure."""
    if not path.exists():
        raise RenderError(f"CSV file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RenderError(f"{path}: row 1: empty file") from None
        columns: dict = {name: [] for name in header}
        for rownum, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise RenderError(
                    f"{path}: row {rownum}: expected {len(header)} fields, "
                    f"got {len(row)}"
                )
            for name, cell in zip(header, row):
                if cell == "":
                    columns[name].append(np.nan)
                    continue
                try:
                    columns[name].append(float(cell))
                except ValueError:
                    raise RenderError(
                        f"{path}: row {rownum}: cannot parse '{cell}' as a number"
                    ) from None
    return {name: np.array(vals) for name, vals in columns.items()}


def _ref_slope_line(ax, x, y, slope, label):
    """Power-law reference line through the first finite data point."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    live = (x > 0) & (y > 0)
    if not np.any(live):
        return
    x0, y0 = x[live][0], y[live][0]
    xs = np.linspace(x[live].min(), x[live].max(), 50)
    ax.plot(xs, y0 * (xs / x0) ** slope, "k--", alpha=0.6, label=label)


def _plot_growth(ax, cols, config):
    p = float(config.get("p", 2.0)) if config else 2.0
    q = p / (p - 1.0)
    for pid in np.unique(cols["point"]):
        sel = cols["point"] == pid
        ax.loglog(cols["r"][sel], cols["sup_u"][sel], "o-", alpha=0.4, lw=0.8)
    _ref_slope_line(ax, cols["r"], cols["sup_u"], q, f"slope {q:g}")
    ax.set_xlabel("r")
    ax.set_ylabel("sup |u| on sphere")
    ax.set_title("growth at the free boundary")
    ax.legend()


def _plot_nondegeneracy(ax, cols, config):
    ax.plot(cols["r"], cols["margin"], "o", alpha=0.5)
    ax.axhline(0.9, color="k", ls="--", alpha=0.6, label="slack 0.9")
    ax.set_xlabel("r")
    ax.set_ylabel("margin")
    ax.set_title("non-degeneracy margins")
    ax.legend()


def _plot_porosity(ax, cols, config):
    ax.plot(cols["r"], cols["delta_min"], "o-")
    ax.axhline(0.05, color="k", ls="--", alpha=0.6, label="floor 0.05")
    ax.set_xlabel("r")
    ax.set_ylabel("min porosity delta")
    ax.set_title("porosity vs radius")
    ax.legend()


def _plot_boxcount(ax, cols, config):
    dim = len(config.get("cells", [0, 0])) if config else 2
    ax.loglog(cols["scale"], cols["count"], "o-")
    _ref_slope_line(ax, cols["scale"], cols["count"], -(dim - 1),
                    f"slope -{dim - 1}")
    ax.set_xlabel("box scale")
    ax.set_ylabel("box count")
    ax.set_title("free-boundary box counting")
    ax.legend()


def _plot_sigma_scaling(ax, cols, config):
    for r in np.unique(cols["r"]):
        sel = cols["r"] == r
        ax.loglog(cols["sigma"][sel], cols["integral"][sel], "o-",
                  label=f"r = {r:g}")
    _ref_slope_line(ax, cols["sigma"], cols["integral"], 1.0, "slope 1")
    ax.set_xlabel("sigma")
    ax.set_ylabel("integrated small-gradient measure")
    ax.set_title("sigma-linearity")
    ax.legend()


_PLOTTERS = {
    "growth": _plot_growth,
    "nondegeneracy": _plot_nondegeneracy,
    "porosity": _plot_porosity,
    "boxcount": _plot_boxcount,
    "sigma_scaling": _plot_sigma_scaling,
}


def render_report(manifest_path, outdir) -> list[RenderResult]:
    """Render one image per figure family present in the manifest.

    Families in the manifest without a known plotter are skipped with a
    note; a listed-but-missing or malformed CSV is a render error naming
    the file (and row, where applicable).
    """
    manifest_path = Path(manifest_path)
    outdir = Path(outdir)
    try:
        manifest = json.loads(manifest_path.read_text())
    except OSError as exc:
        raise RenderError(f"cannot read manifest {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise RenderError(f"malformed manifest {manifest_path}: {exc}") from exc
    outdir.mkdir(parents=True, exist_ok=True)
    config = manifest.get("config") or {}
    results = []
    for entry in manifest.get("families", []):
        family = entry.get("name")
        if family not in _PLOTTERS:
            print(f"note: no renderer for family '{family}', skipping")
            continue
        cols = _read_csv_columns(manifest_path.parent / entry["csv"])
        fig, ax = plt.subplots(figsize=(5.0, 3.8))
        try:
            _PLOTTERS[family](ax, cols, config)
            image_path = outdir / f"{family}.png"
            fig.tight_layout()
            fig.savefig(image_path, dpi=120)
        finally:
            plt.close(fig)
        results.append(RenderResult(family, image_path, cols))
    return results
