"""Downstream analyses: advertisement reach and fact-check protection.

Ad reach: place ads in all groups of size >= k_A and measure the red share
of the audience.  Impressions counting (edge endpoints) is the default and
matches the analytic formulas; unique-member counting is offered for
empirical realism.

Fact-checking: each group's flagged item draws Poisson(p * size) reports; a
ranker checks the top P% by report count (larger group wins ties, then lower
group id) and we measure who ends up protected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import LimitDistribution, MemberRatioCurve
from .core import BLUE, RED, BipartiteNetwork
from .errors import InsufficientSupportError

APPS_PRNG_ID = "numpy PCG64 (default_rng), seeded per call; rep i uses spawned stream i"


# ---------------------------------------------------------------------------
# Advertisement reach

@dataclass(frozen=True)
class AdAnalysis:
    """One evaluation of the size-thresholded ad placement."""

    k_a: int
    reach_red_share: float
    counting: str

    def as_dict(self):
        return {"k_a": self.k_a, "reach_red_share": self.reach_red_share,
                "counting": self.counting}


def ad_analysis(source, k_a: int, counting: str = "impressions") -> AdAnalysis:
    return AdAnalysis(int(k_a), ad_reach_ratio(source, k_a, counting), counting)


def ad_reach_analytic(dist: LimitDistribution, curve: MemberRatioCurve,
                      k_a: int) -> float:
    """Red share of impressions in groups of size >= k_a, from the limit
    distribution and the per-size red member shares."""
    if k_a < 1:
        raise ValueError("k_a must be >= 1")
    if k_a > dist.k_max:
        raise InsufficientSupportError(f"k_a beyond truncation {dist.k_max}")
    ks = dist.ks.astype(float)
    red_mass = ks * (dist.red * curve.share_in_red + dist.blue * curve.share_in_blue)
    all_mass = ks * (dist.red + dist.blue)
    sel = ks >= k_a
    return float(red_mass[sel].sum() / all_mass[sel].sum())


def ad_reach_empirical(network: BipartiteNetwork, k_a: int,
                       counting: str = "impressions") -> float:
    """Red audience share among groups of size >= k_a on a concrete network."""
    qualifying = network.group_size >= k_a
    if not qualifying.any():
        raise InsufficientSupportError(f"no group of size >= {k_a}")
    in_scope = qualifying[network.edge_group]
    members = network.edge_member[in_scope]
    if counting == "impressions":
        red = (network.member_color[members] == RED).sum()
        return float(red / len(members))
    if counting == "unique_members":
        uniq = np.unique(members)
        red = (network.member_color[uniq] == RED).sum()
        return float(red / len(uniq))
    raise ValueError("counting must be 'impressions' or 'unique_members'")


def ad_reach_ratio(source, k_a: int, counting: str = "impressions") -> float:
    """Dispatch on source: a network, or a (distribution, curve) pair."""
    if isinstance(source, BipartiteNetwork):
        return ad_reach_empirical(source, k_a, counting)
    dist, curve = source
    if counting != "impressions":
        raise ValueError("analytic reach is defined for impressions counting")
    return ad_reach_analytic(dist, curve, k_a)


def ads_sweep(source, k_values, counting: str = "impressions"):
    """(k_a, r_A) rows over a threshold sweep; skips unreachable thresholds."""
    rows = []
    for k in k_values:
        try:
            rows.append((int(k), ad_reach_ratio(source, int(k), counting)))
        except InsufficientSupportError:
            break
    return rows


# ---------------------------------------------------------------------------
# Fact-check simulation

@dataclass(frozen=True)
class FactCheckConfig:
    p: float = 0.5            # report tendency: reports ~ Poisson(p * size)
    percent: float = 10.0     # top P% of ranked items get checked
    reps: int = 100
    seed: int = 0
    items_per_group: int = 1

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("p must be positive")
        if not 0.0 <= self.percent <= 100.0:
            raise ValueError("percent must lie in [0, 100]")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.items_per_group < 1:
            raise ValueError("items_per_group must be >= 1")


@dataclass(frozen=True)
class FactCheckMetrics:
    """The four protection panels, averaged over repetitions."""

    protected_group_red_share: float
    checked_count_red_share: float
    protected_members_red_share: float
    protected_red_members_share: float
    n_checked: int
    reps: int

    def as_dict(self):
        return {
            "protected_group_red_share": self.protected_group_red_share,
            "checked_count_red_share": self.checked_count_red_share,
            "protected_members_red_share": self.protected_members_red_share,
            "protected_red_members_share": self.protected_red_members_share,
            "n_checked": self.n_checked, "reps": self.reps,
        }


def _group_views(network):
    sizes = network.group_size.astype(np.int64)
    red_members = network.group_red_member_mass().astype(np.int64)
    is_red = network.group_color == RED
    return sizes, red_members, is_red


def _ranking(reports, sizes, item_group):
    # report count desc, then larger group, then lower group id
    return np.lexsort((item_group, -sizes[item_group], -reports))


def factcheck_simulate(network: BipartiteNetwork,
                       config: FactCheckConfig) -> FactCheckMetrics:
    """Run the report-and-rank protocol and average the protection shares."""
    sizes, red_members, is_red = _group_views(network)
    n_groups = len(sizes)
    item_group = np.repeat(np.arange(n_groups), config.items_per_group)
    n_items = len(item_group)
    n_checked = int(math.floor(n_items * config.percent / 100.0 + 1e-9))
    rng = np.random.default_rng(config.seed)
    streams = rng.spawn(config.reps)
    total_red_members = red_members.sum()

    group_share = np.empty(config.reps)
    member_share = np.empty(config.reps)
    red_protected = np.empty(config.reps)
    red_checks = 0
    for i, srng in enumerate(streams):
        reports = srng.poisson(config.p * sizes[item_group])
        order = _ranking(reports, sizes, item_group)
        checked_groups = item_group[order[:n_checked]]
        if n_checked == 0:
            group_share[i] = np.nan
            member_share[i] = np.nan
            red_protected[i] = 0.0
            continue
        red_cnt = is_red[checked_groups].sum()
        red_checks += int(red_cnt)
        group_share[i] = red_cnt / n_checked
        uniq = np.unique(checked_groups)
        member_share[i] = red_members[uniq].sum() / max(sizes[uniq].sum(), 1)
        red_protected[i] = red_members[uniq].sum() / max(total_red_members, 1)
    return FactCheckMetrics(
        protected_group_red_share=float(np.nanmean(group_share)),
        checked_count_red_share=float(red_checks / max(n_checked * config.reps, 1)),
        protected_members_red_share=float(np.nanmean(member_share)),
        protected_red_members_share=float(np.mean(red_protected)),
        n_checked=n_checked, reps=config.reps)


def factcheck_sweep(network: BipartiteNetwork, percents, p: float = 0.5,
                    reps: int = 100, seed: int = 0, items_per_group: int = 1):
    """FactCheckMetrics per percentage threshold.

    Equivalent to calling factcheck_simulate per threshold with the same
    seed (reports are redrawn identically), but rankings are computed once
    per repetition and each threshold reads a prefix via cumulative sums.
    """
    percents = [float(pc) for pc in percents]
    sizes, red_members, is_red = _group_views(network)
    n_groups = len(sizes)
    item_group = np.repeat(np.arange(n_groups), items_per_group)
    n_items = len(item_group)
    n_checked = {pc: int(math.floor(n_items * pc / 100.0 + 1e-9))
                 for pc in percents}
    rng = np.random.default_rng(seed)
    streams = rng.spawn(reps)
    total_red_members = red_members.sum()

    acc = {pc: {"group_share": [], "member_share": [], "red_protected": [],
                "red_checks": 0} for pc in percents}
    for srng in streams:
        reports = srng.poisson(p * sizes[item_group])
        order = _ranking(reports, sizes, item_group)
        ranked_groups = item_group[order]
        cum_red = np.cumsum(is_red[ranked_groups])
        # per-threshold member stats must deduplicate repeated items of one
        # group; only the first-ranked item of a group contributes
        first_seen = np.zeros(n_items, bool)
        _, first_idx = np.unique(ranked_groups, return_index=True)
        first_seen[first_idx] = True
        cum_members = np.cumsum(np.where(first_seen, sizes[ranked_groups], 0))
        cum_red_members = np.cumsum(np.where(first_seen,
                                             red_members[ranked_groups], 0))
        for pc in percents:
            n = n_checked[pc]
            a = acc[pc]
            if n == 0:
                a["group_share"].append(np.nan)
                a["member_share"].append(np.nan)
                a["red_protected"].append(0.0)
                continue
            a["red_checks"] += int(cum_red[n - 1])
            a["group_share"].append(cum_red[n - 1] / n)
            a["member_share"].append(cum_red_members[n - 1]
                                     / max(cum_members[n - 1], 1))
            a["red_protected"].append(cum_red_members[n - 1]
                                      / max(total_red_members, 1))
    out = []
    for pc in percents:
        a = acc[pc]
        out.append((pc, FactCheckMetrics(
            protected_group_red_share=float(np.nanmean(a["group_share"])),
            checked_count_red_share=float(a["red_checks"]
                                          / max(n_checked[pc] * reps, 1)),
            protected_members_red_share=float(np.nanmean(a["member_share"])),
            protected_red_members_share=float(np.mean(a["red_protected"])),
            n_checked=n_checked[pc], reps=reps)))
    return out


# ---------------------------------------------------------------------------
# Detection kernels h(k, theta)

@dataclass
class HKernel:
    """Probability that a size-k group's flagged item is checked at detector
    strength theta.  Monotonicity in k and theta is verified numerically on
    the construction grid; the vanishing-ratio limits behind the endpoint
    assumption hold only asymptotically and are reported, not enforced."""

    evaluator: object            # callable (k, theta) -> probability
    provenance: str              # "simulation_induced" | "user_supplied"
    grid_sizes: np.ndarray
    grid_thetas: np.ndarray
    grid_values: np.ndarray      # shape (len(sizes), len(thetas))
    checks: dict

    def __call__(self, k, theta):
        return self.evaluator(k, theta)


def _kernel_checks(sizes, thetas, values, tolerance):
    dk = np.diff(values, axis=0)
    dth = np.diff(values, axis=1)
    return {
        "monotone_in_k": bool((dk >= -tolerance).all()),
        "monotone_in_theta": bool((dth >= -tolerance).all()),
        "worst_k_violation": float(max(0.0, -dk.min()) if dk.size else 0.0),
        "worst_theta_violation": float(max(0.0, -dth.min()) if dth.size else 0.0),
        "endpoints": {"theta0_max": float(np.abs(values[:, 0]).max()) if thetas[0] == 0.0 else None,
                      "theta1_min": float(values[:, -1].min()) if thetas[-1] == 1.0 else None},
        "limit_ratios": "asymptotic-only; not verifiable on a finite grid",
        "tolerance": tolerance,
    }


def _grid_evaluator(sizes, thetas, values):
    def evaluate(k, theta):
        if theta <= 0.0:
            return 0.0
        if theta >= 1.0:
            return 1.0
        col = np.array([np.interp(theta, thetas, row) for row in values])
        return float(np.interp(k, sizes, col))
    return evaluate


def induced_h(network: BipartiteNetwork, config: FactCheckConfig,
              thetas) -> HKernel:
    """Estimate h(k, theta) as the checked frequency of size-k groups when
    the top theta fraction of the ranking is checked, over config.reps
    report draws.  Rankings are drawn once per rep; a larger theta only
    extends the checked prefix, so monotonicity in theta is exact."""
    thetas = np.asarray(sorted(set([0.0, 1.0] + [float(t) for t in thetas])))
    sizes, _, _ = _group_views(network)
    uniq_sizes, size_idx = np.unique(sizes, return_inverse=True)
    n_groups = len(sizes)
    item_group = np.repeat(np.arange(n_groups), config.items_per_group)
    n_items = len(item_group)
    rng = np.random.default_rng(config.seed)
    streams = rng.spawn(config.reps)
    checked_freq = np.zeros((len(uniq_sizes), len(thetas)))
    per_size_items = np.bincount(size_idx[item_group], minlength=len(uniq_sizes))
    for srng in streams:
        reports = srng.poisson(config.p * sizes[item_group])
        order = _ranking(reports, sizes, item_group)
        ranked_size_idx = size_idx[item_group[order]]
        for j, th in enumerate(thetas):
            n_checked = int(math.floor(n_items * th + 1e-9))
            if n_checked == 0:
                continue
            counts = np.bincount(ranked_size_idx[:n_checked],
                                 minlength=len(uniq_sizes))
            checked_freq[:, j] += counts
    values = checked_freq / (per_size_items * config.reps)[:, None]
    values[:, thetas == 0.0] = 0.0
    values[:, thetas == 1.0] = 1.0
    tol = 3.0 / math.sqrt(max(config.reps * per_size_items.min(), 1))
    checks = _kernel_checks(uniq_sizes, thetas, values, tol)
    return HKernel(evaluator=_grid_evaluator(uniq_sizes.astype(float), thetas, values),
                   provenance="simulation_induced", grid_sizes=uniq_sizes,
                   grid_thetas=thetas, grid_values=values, checks=checks)


def user_kernel(fn, sizes, thetas, tolerance: float = 1e-9) -> HKernel:
    """Wrap and numerically validate a user-supplied h(k, theta)."""
    sizes = np.asarray(sizes, dtype=float)
    thetas = np.asarray(sorted(set([0.0, 1.0] + [float(t) for t in thetas])))
    values = np.array([[fn(k, th) for th in thetas] for k in sizes])
    checks = _kernel_checks(sizes, thetas, values, tolerance)
    return HKernel(evaluator=fn, provenance="user_supplied", grid_sizes=sizes,
                   grid_thetas=thetas, grid_values=values, checks=checks)


def kernel_grid_rows(h: HKernel):
    """(k, theta, h) rows of the kernel's construction grid, CSV-ready."""
    for i, k in enumerate(h.grid_sizes):
        for j, th in enumerate(h.grid_thetas):
            yield (float(k), float(th), float(h.grid_values[i, j]))


@dataclass(frozen=True)
class ProtectionRatio:
    value: float
    truncation_tail: float    # limit-density mass beyond the truncation

    def __float__(self):
        return self.value


def protection_ratio(dist: LimitDistribution, h: HKernel,
                     theta: float) -> ProtectionRatio:
    """Red share of total protection scores under the limit distribution."""
    ks = dist.ks.astype(float)
    hv = np.array([h(k, theta) for k in ks])
    denom = ((dist.red + dist.blue) * hv).sum()
    if denom <= 0.0:
        raise InsufficientSupportError("all protection scores are zero "
                                       f"(theta={theta})")
    value = float((dist.red * hv).sum() / denom)
    return ProtectionRatio(value, _tail_mass_estimate(dist))


def _tail_mass_estimate(dist):
    """Mass beyond the truncation, extrapolating the local power-law slope
    from the last decade of the distribution."""
    k = dist.k_max
    if k < 20:
        return math.inf
    lo = max(1, k // 2)
    total = dist.log_red, dist.log_blue
    tail = 0.0
    for logv in total:
        slope = (logv[k - 1] - logv[lo - 1]) / (math.log(k) - math.log(lo))
        beta = -slope
        last = math.exp(logv[k - 1])
        tail += last * k / max(beta - 1.0, 1e-6)
    return float(tail)
