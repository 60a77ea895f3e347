"""Render result rows as figures, written next to the delimited output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import fit_loglog_slope
from .harness import ResultRow


def _rate_figure(rows: list[ResultRow], path: Path):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    groups = sorted({(r.scheme, r.n_relays) for r in rows})
    for scheme, n in groups:
        pts = sorted((r.snr_db, r.mean_sum_rate, r.stderr_sum_rate)
                     for r in rows if r.scheme == scheme and r.n_relays == n)
        x, y, err = (np.array(v, dtype=float) for v in zip(*pts))
        ax.errorbar(x, y, yerr=err, marker="o", markersize=4, capsize=2,
                    label=f"{scheme}, N={n}")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("mean sum rate (bits / channel use)")
    ax.set_title(f"Achievable sum rate, K={rows[0].k_pairs}")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _til_figure(rows: list[ResultRow], path: Path):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    pts = sorted({(r.n_relays, r.mean_kth_min_til, r.mean_inv_kth_min_til) for r in rows})
    n = np.array([p[0] for p in pts], dtype=float)
    til = np.array([p[1] for p in pts])
    inv = np.array([p[2] for p in pts])
    ax.loglog(n, til, "o-", label="mean worst selected TIL")
    ax.loglog(n, inv, "s--", label="mean reciprocal TIL")
    if len(pts) >= 3:
        for ys, tag in ((til, "TIL"), (inv, "1/TIL")):
            fit = fit_loglog_slope(list(zip(n, ys)))
            ax.annotate(f"{tag} slope {fit.slope:+.3f}", xy=(n[-2], ys[-2]),
                        fontsize=8, textcoords="offset points", xytext=(5, 5))
    ax.set_xlabel("number of relays N")
    ax.set_ylabel("interference level")
    ax.set_title(f"Selected-relay interference decay, K={rows[0].k_pairs}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _cdf_figure(rows: list[ResultRow], path: Path):
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = [r.metric_kind for r in rows]
    dists = [r.ks_distance for r in rows]
    ax.bar(range(len(rows)), dists, color="steelblue", alpha=0.8)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, fontsize=8)
    ax.axhline(0.01, color="r", linestyle="--", label="0.01 target")
    ax.set_ylabel("Kolmogorov-Smirnov distance")
    ax.set_title(f"Metric distribution validation, K={rows[0].k_pairs}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_figures(rows: list[ResultRow], out_dir, stem: str) -> list[Path]:
    """Write one PNG per result family present in the rows; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    rate_rows = [r for r in rows if r.mean_sum_rate is not None and r.snr_db is not None]
    if rate_rows:
        p = out_dir / f"{stem}_rates.png"
        _rate_figure(rate_rows, p)
        written.append(p)
    til_rows = [r for r in rows if r.mean_kth_min_til is not None]
    if len({r.n_relays for r in til_rows}) >= 2:
        p = out_dir / f"{stem}_til_decay.png"
        _til_figure(til_rows, p)
        written.append(p)
    cdf_rows = [r for r in rows if r.ks_distance is not None]
    if cdf_rows:
        p = out_dir / f"{stem}_cdf_validation.png"
        _cdf_figure(cdf_rows, p)
        written.append(p)
    return written
