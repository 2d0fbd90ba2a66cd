"""Batch reporting: delimited summary plus rendered figures.

Re-verifies a set of manifests and writes a CSV table alongside PNG
figures (residual magnitudes and worst cone/eigenvalue margins per
instance) into one report directory.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import instance_io
from .certify import Tolerances, verify_lo, verify_sdo, verify_soco

_VERIFIERS = {"lo": verify_lo, "sdo": verify_sdo, "soco": verify_soco}


def reverify_manifest(manifest_path, tol: Tolerances | None = None):
    """Load a manifest, reload its instance and verify from scratch."""
    ref, cert, _ = instance_io.read_manifest(manifest_path)
    instance = instance_io.load_instance(ref)
    report = _VERIFIERS[ref.family](instance, cert, tol)
    return ref, report


def write_report(manifest_paths, out_dir, tol: Tolerances | None = None) -> dict:
    """Write report.csv, residuals.png and margins.png for the manifests.

    Returns {"csv": path, "figures": [paths], "all_passed": bool}.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for mp in manifest_paths:
        ref, rep = reverify_manifest(mp, tol)
        worst_margin = min(rep.cone_margins.values(), default=float("nan"))
        rows.append(
            {
                "manifest": Path(mp).name,
                "family": ref.family,
                "mode": ref.mode or "",
                "m": ref.dimensions["m"],
                "n": ref.dimensions["n"],
                "seed": ref.seed,
                "stream_id": ref.stream_id,
                "passed": rep.passed,
                "primal_residual": rep.primal_residual,
                "dual_residual": rep.dual_residual,
                "complementarity_gap": rep.complementarity_gap,
                "worst_margin": worst_margin,
            }
        )

    csv_path = out_dir / "report.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)

    labels = [r["manifest"].replace(".manifest.json", "") for r in rows]
    idx = np.arange(len(rows))
    floor = 1e-18  # keeps exact zeros visible on the log axis

    fig, ax = plt.subplots(figsize=(max(6.0, 0.5 * len(rows)), 4.0))
    width = 0.27
    for k, key in enumerate(("primal_residual", "dual_residual", "complementarity_gap")):
        vals = np.array([max(abs(r[key]), floor) for r in rows])
        ax.bar(idx + (k - 1) * width, vals, width, label=key.replace("_", " "))
    ax.set_yscale("log")
    ax.set_ylabel("magnitude")
    ax.set_xticks(idx, labels, rotation=45, ha="right", fontsize=7)
    ax.legend(fontsize=8)
    ax.set_title("recomputed residuals and complementarity gaps")
    fig.tight_layout()
    residuals_png = out_dir / "residuals.png"
    fig.savefig(residuals_png, dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(max(6.0, 0.5 * len(rows)), 4.0))
    vals = np.array([r["worst_margin"] for r in rows])
    colors = ["tab:green" if r["passed"] else "tab:red" for r in rows]
    ax.bar(idx, vals, color=colors)
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_ylabel("worst cone / eigenvalue margin")
    ax.set_xticks(idx, labels, rotation=45, ha="right", fontsize=7)
    ax.set_title("worst certified margins (green = verification passed)")
    fig.tight_layout()
    margins_png = out_dir / "margins.png"
    fig.savefig(margins_png, dpi=120)
    plt.close(fig)

    return {
        "csv": csv_path,
        "figures": [residuals_png, margins_png],
        "all_passed": all(r["passed"] for r in rows),
    }
