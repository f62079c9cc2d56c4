"""Optional PNG figures for a list of CheckReports (needs the 'plot' extra, matplotlib).

Only the report data is plotted; nothing here feeds back into a check.
"""

from __future__ import annotations

import math
import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .suites import CheckReport  # noqa: E402

_FLOOR = 1e-18  # exact zeros are drawn at this height on log axes


def _log_ratio(rep: CheckReport) -> float:
    """log10(residual / tolerance); report-only and exact checks use the residual alone."""
    res = max(abs(rep.residual), _FLOOR)
    if math.isfinite(rep.tolerance) and rep.tolerance > 0:
        return math.log10(res / rep.tolerance)
    return math.log10(res)


def residual_chart(reports: Sequence[CheckReport], path: str) -> str:
    fig, ax = plt.subplots(figsize=(8, max(3.0, 0.18 * len(reports) + 1)))
    vals = [_log_ratio(r) for r in reports]
    colors = ["tab:green" if r.passed else "tab:red" for r in reports]
    ax.barh(range(len(reports)), vals, color=colors)
    ax.set_yticks(range(len(reports)))
    ax.set_yticklabels([r.check for r in reports], fontsize=6)
    ax.invert_yaxis()
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_xlabel("log10(residual / tolerance)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def sweep_chart(reports: Sequence[CheckReport], path: str) -> str | None:
    """Residual against window growth for every report carrying a 'sweep'."""
    rows = [r for r in reports if isinstance(r.params.get("sweep"), list) and r.params.get("growths")]
    if not rows:
        return None
    fig, ax = plt.subplots(figsize=(6, 4))
    for r in rows:
        ys = [max(abs(v), _FLOOR) for v in r.params["sweep"]]
        xs = r.params["growths"][: len(ys)]
        ax.semilogy(xs, ys, marker="o", label=r.check)
    ax.set_xlabel("window growth")
    ax.set_ylabel("residual")
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def racah_heatmap(reports: Sequence[CheckReport], path: str) -> str | None:
    rep = next((r for r in reports if "matrix" in r.params), None)
    if rep is None:
        return None
    mat = rep.params["matrix"]
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(mat, cmap="RdBu_r", vmin=-1.0, vmax=1.0)
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("G index")
    ax.set_ylabel("F index")
    ax.set_title(rep.check, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render(reports: Sequence[CheckReport], figdir: str) -> list[str]:
    """Write every applicable figure into figdir and return the paths."""
    os.makedirs(figdir, exist_ok=True)
    out = [residual_chart(reports, os.path.join(figdir, "residuals.png"))]
    for fn, name in ((sweep_chart, "sweeps.png"), (racah_heatmap, "racah.png")):
        p = fn(reports, os.path.join(figdir, name))
        if p:
            out.append(p)
    return out
