"""Figure rendering for the report paths.

Every plotting function takes already-computed series and writes one PNG next
to the CSV it illustrates.  Rendering is headless (Agg) and avoids anything
time-dependent so repeated runs produce identical images.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_RED = "#c44e52"
_BLUE = "#4c72b0"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_ratio_series(series, path, title, analytic=None, hline=None):
    """Ratio vs size with support-scaled markers; optional analytic overlay."""
    fig, ax = plt.subplots(figsize=(6, 4))
    reps = series.rep_k()
    area = 8.0 + 60.0 * series.support / max(series.support.max(), 1)
    ax.scatter(reps, series.ratio, s=area, color=_RED, alpha=0.55,
               edgecolors="none", label="observed")
    if analytic is not None:
        ks, vals = analytic
        ax.plot(ks, vals, color="black", lw=1.2, label="analytic")
    if hline is not None:
        ax.axhline(hline, color="gray", lw=0.8, ls="--")
    ax.set_xscale("log")
    ax.set_xlabel("group size" if "group" in series.kind or "member" in series.kind
                  else "degree")
    ax.set_ylabel("red share")
    ax.set_title(title)
    ax.legend(loc="best", frameon=False)
    _save(fig, path)


def plot_distribution_loglog(ks, red, blue, path, title, xlabel="size"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(ks, red, color=_RED, lw=1.2, label="red")
    ax.loglog(ks, blue, color=_BLUE, lw=1.2, label="blue")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(frameon=False)
    _save(fig, path)


def plot_empirical_vs_analytic_loglog(emp_ks, emp_red, emp_blue, ana_ks,
                                      ana_red, ana_blue, path, title):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(emp_ks, emp_red, ".", color=_RED, ms=4, label="red (observed)")
    ax.loglog(emp_ks, emp_blue, ".", color=_BLUE, ms=4, label="blue (observed)")
    ax.loglog(ana_ks, ana_red, color=_RED, lw=1.0, alpha=0.7)
    ax.loglog(ana_ks, ana_blue, color=_BLUE, lw=1.0, alpha=0.7)
    ax.set_xlabel("size")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(frameon=False)
    _save(fig, path)


def plot_ads_sweep(rows, r_overall, path):
    ks = [k for k, _ in rows]
    vals = [v for _, v in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, vals, color=_RED, lw=1.4, label="red audience share")
    ax.axhline(r_overall, color="gray", lw=0.8, ls="--", label="overall red share")
    ax.set_xscale("log")
    ax.set_xlabel("minimum group size for ad placement")
    ax.set_ylabel("red share of impressions")
    ax.set_title("advertisement reach by size threshold")
    ax.legend(frameon=False)
    _save(fig, path)


def plot_factcheck_sweep(rows, red_group_share, path):
    """Four protection panels against the checked percentage."""
    panels = [("protected_group_red_share", "protected groups: red share"),
              ("checked_count_red_share", "checks on red groups: share"),
              ("protected_members_red_share", "protected people: red share"),
              ("protected_red_members_share", "red members protected: share")]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6))
    ps = [p for p, _ in rows]
    for ax, (fieldname, title) in zip(axes.ravel(), panels):
        vals = [getattr(m, fieldname) for _, m in rows]
        ax.plot(ps, vals, color=_RED, lw=1.3)
        ax.axhline(red_group_share, color="gray", lw=0.8, ls="--")
        ax.set_title(title, fontsize=9)
        ax.set_xlabel("% checked")
    _save(fig, path)


def plot_homophily(result, path):
    fig, ax = plt.subplots(figsize=(4.2, 4))
    ax.bar(["observed", "no-homophily\nexpectation"],
           [result.observed_cross_share, result.expected_cross_share],
           color=[_RED, "gray"], width=0.6)
    ax.set_ylabel("cross-color pair share")
    ax.set_title("homophily pair test")
    _save(fig, path)
