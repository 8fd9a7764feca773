"""Offline regret-curve rendering from summary CSVs.

Input schema (fixed): label, checkpoint_step, mean_regret, std_regret.
Output: one raster figure with a mean line and a +-1 std band per label.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")  # figures are artifacts, never a UI
import matplotlib.pyplot as plt

EXPECTED_COLUMNS = ["label", "checkpoint_step", "mean_regret", "std_regret"]
DPI = 150


class SchemaError(ValueError):
    """Input CSV does not match the summary schema; carries the column diff."""

    def __init__(self, found):
        missing = [c for c in EXPECTED_COLUMNS if c not in found]
        unexpected = [c for c in found if c not in EXPECTED_COLUMNS]
        super().__init__(
            f"summary schema mismatch: missing columns {missing}, "
            f"unexpected columns {unexpected}")
        self.missing = missing
        self.unexpected = unexpected


@dataclass(frozen=True)
class SeriesBundle:
    label: str
    steps: np.ndarray
    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        if not len(self.steps) == len(self.means) == len(self.stds):
            raise ValueError(f"series {self.label!r}: unequal column lengths")
        if np.any(np.diff(self.steps) <= 0):
            raise ValueError(f"series {self.label!r}: steps must strictly increase")


def load_summary(path: str) -> list[SeriesBundle]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError([]) from None
        if header != EXPECTED_COLUMNS:
            raise SchemaError(header)
        rows: dict[str, list[tuple[float, float, float]]] = {}
        for line, row in enumerate(reader, start=2):
            if len(row) != len(EXPECTED_COLUMNS):
                raise ValueError(f"{path}:{line}: expected {len(EXPECTED_COLUMNS)} fields")
            label, step, mean, std = row
            rows.setdefault(label, []).append((float(step), float(mean), float(std)))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    bundles = []
    for label, triples in rows.items():
        triples.sort(key=lambda t: t[0])
        arr = np.asarray(triples)
        bundles.append(SeriesBundle(label, arr[:, 0], arr[:, 1], arr[:, 2]))
    return bundles


def render(summary_csv_path: str, out_image_path: str, *,
           log_axes: bool = False, labels: list[str] | None = None) -> None:
    """Render one figure from a summary CSV; raises on schema or label problems."""
    bundles = load_summary(summary_csv_path)
    if labels is not None:
        known = {b.label for b in bundles}
        unknown = [l for l in labels if l not in known]
        if unknown:
            raise ValueError(f"labels not present in summary: {unknown}")
        bundles = [b for b in bundles if b.label in labels]
    if not bundles:
        raise ValueError("no series selected to plot")

    fig, ax = plt.subplots(figsize=(8, 5), dpi=DPI)
    cmap = plt.get_cmap("tab20")
    for i, bundle in enumerate(bundles):
        color = cmap(i % 20)
        ax.plot(bundle.steps, bundle.means, label=bundle.label, color=color, lw=1.4)
        ax.fill_between(bundle.steps, bundle.means - bundle.stds,
                        bundle.means + bundle.stds, color=color, alpha=0.18, lw=0)
    if log_axes:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("environment steps")
    ax.set_ylabel("cumulative pseudo-regret")
    ax.legend(fontsize=7, ncols=2 if len(bundles) > 10 else 1)
    fig.tight_layout()
    # strip the version stamp so identical inputs give identical bytes
    fig.savefig(out_image_path, metadata={"Software": None})
    plt.close(fig)
