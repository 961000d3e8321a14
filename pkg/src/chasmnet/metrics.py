"""Empirical statistics over observed or simulated networks.

Group sizes and member degrees count edge endpoints (memberships), matching
the growth model's bookkeeping.  Ratio curves use unit bins for small sizes
and logarithmic bins above, weighted by per-bin support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .core import BLUE, RED, BipartiteNetwork
from .errors import InsufficientSupportError


# ---------------------------------------------------------------------------
# Binning and ratio series

@dataclass(frozen=True)
class Binning:
    """Unit bins up to unit_max, then multiplicative bins of ratio log_factor."""

    unit_max: int = 100
    log_factor: float = 1.25

    def edges(self, k_hi):
        """Inclusive (lo, hi) bin bounds covering 1..k_hi."""
        out = [(k, k) for k in range(1, min(self.unit_max, k_hi) + 1)]
        lo = self.unit_max + 1
        while lo <= k_hi:
            hi = max(lo, math.floor(lo * self.log_factor) - 1)
            out.append((lo, min(hi, k_hi)))
            lo = hi + 1
        return out


@dataclass
class RatioSeries:
    """Per-size-bin ratio values with their support counts."""

    bin_lo: np.ndarray
    bin_hi: np.ndarray
    ratio: np.ndarray
    support: np.ndarray
    kind: str = "ratio"

    def __len__(self):
        return len(self.ratio)

    def rep_k(self):
        """Representative size per bin (geometric mean of the bounds)."""
        return np.sqrt(self.bin_lo.astype(float) * self.bin_hi.astype(float))

    def filtered(self, min_support):
        keep = self.support >= min_support
        return RatioSeries(self.bin_lo[keep], self.bin_hi[keep],
                           self.ratio[keep], self.support[keep], self.kind)

    def rows(self):
        for i in range(len(self.ratio)):
            yield (int(self.bin_lo[i]), int(self.bin_hi[i]),
                   float(self.ratio[i]), int(self.support[i]))


def _bin_aggregate(sizes, values, weights, binning):
    """Support-weighted mean of `values` per size bin."""
    k_hi = int(sizes.max()) if len(sizes) else 1
    edges = binning.edges(k_hi)
    lows = np.array([e[0] for e in edges])
    highs = np.array([e[1] for e in edges])
    idx = np.searchsorted(highs, sizes, side="left")
    wsum = np.bincount(idx, weights=weights, minlength=len(edges))
    vsum = np.bincount(idx, weights=weights * values, minlength=len(edges))
    keep = wsum > 0
    ratio = np.zeros(len(edges))
    ratio[keep] = vsum[keep] / wsum[keep]
    return RatioSeries(lows[keep], highs[keep], ratio[keep],
                       wsum[keep].astype(np.int64))


# ---------------------------------------------------------------------------
# Coloring and ratio curves

def color_groups_by_ratio(network: BipartiteNetwork,
                          threshold: float | None = None) -> BipartiteNetwork:
    """Color each group red iff its red-member share strictly exceeds the
    threshold (default: the global red member share), blue otherwise.

    This is the ratio-based coloring used when creator affiliations are
    unknown or unreliable; on grown networks it is interchangeable with
    creator coloring for chasm/ceiling classification.
    """
    if (network.group_size == 0).any():
        raise InsufficientSupportError("network contains an empty group")
    if threshold is None:
        threshold = network.tallies.members[RED] / network.tallies.members.sum()
    share = network.group_red_member_mass() / network.group_size
    colors = np.where(share > threshold, RED, BLUE).astype(np.int8)
    out = network.with_group_colors(colors)
    out.meta["group_coloring"] = {"scheme": "ratio", "threshold": float(threshold)}
    return out


def group_ratio_by_size(network: BipartiteNetwork,
                        binning: Binning = Binning()) -> RatioSeries:
    """Share of red groups per size bin."""
    sizes = network.group_size.astype(np.int64)
    red = (network.group_color == RED).astype(float)
    series = _bin_aggregate(sizes, red, np.ones(len(sizes)), binning)
    series.kind = "group_ratio"
    return series


def member_ratio_by_size(network: BipartiteNetwork,
                         binning: Binning = Binning()) -> RatioSeries:
    """Mean red-member share inside groups, per size bin (unweighted over
    groups, as in the observation plots)."""
    sizes = network.group_size.astype(np.int64)
    share = network.group_red_member_mass() / sizes
    series = _bin_aggregate(sizes, share, np.ones(len(sizes)), binning)
    series.kind = "member_ratio"
    return series


# ---------------------------------------------------------------------------
# Homophily pair test

@dataclass(frozen=True)
class HomophilyResult:
    observed_cross_share: float
    expected_cross_share: float   # 2 r (1-r) under color-blind mixing
    cross_pairs: float
    total_pairs: float
    homophilous: bool

    def as_dict(self):
        return {"observed_cross_share": self.observed_cross_share,
                "expected_cross_share": self.expected_cross_share,
                "cross_pairs": self.cross_pairs,
                "total_pairs": self.total_pairs,
                "homophilous": self.homophilous}


def homophily_pair_test(network: BipartiteNetwork) -> HomophilyResult:
    """Count red-blue member pairs (with multiplicity across shared groups)
    against the color-blind expectation 2r(1-r)."""
    s = network.group_size.astype(np.float64)
    m = network.group_red_member_mass().astype(np.float64)
    total = float((s * (s - 1.0) / 2.0).sum())
    if total == 0:
        raise InsufficientSupportError("no group of size >= 2")
    cross = float((m * (s - m)).sum())
    r = network.tallies.members[RED] / network.tallies.members.sum()
    expected = 2.0 * r * (1.0 - r)
    observed = cross / total
    return HomophilyResult(observed, expected, cross, total,
                           homophilous=observed < expected)


# ---------------------------------------------------------------------------
# Power-law exponent estimation

@dataclass(frozen=True)
class ExponentFit:
    beta: float          # positive exponent: density ~ k^(-beta)
    k_min: int
    stderr: float
    method: str
    n_tail: int

    def as_dict(self):
        return {"beta": self.beta, "power": -self.beta, "k_min": self.k_min,
                "stderr": self.stderr, "method": self.method,
                "n_tail": self.n_tail}


def _discrete_mle(xs, k_min):
    xs = xs[xs >= k_min]
    n = len(xs)
    mean_log = np.log(xs).mean()

    def nll(b):
        return math.log(zeta(b, k_min)) + b * mean_log

    res = minimize_scalar(nll, bounds=(1.05, 20.0), method="bounded",
                          options={"xatol": 1e-8})
    beta = float(res.x)
    h = 1e-4
    d2 = (math.log(zeta(beta + h, k_min)) - 2.0 * math.log(zeta(beta, k_min))
          + math.log(zeta(beta - h, k_min))) / (h * h)
    stderr = 1.0 / math.sqrt(max(n * d2, 1e-12))
    return beta, stderr, n


def _ks_distance(xs, k_min, beta):
    xs = np.sort(xs[xs >= k_min])
    uniq, counts = np.unique(xs, return_counts=True)
    emp_cdf = np.cumsum(counts) / len(xs)
    z = zeta(beta, k_min)
    model_cdf = 1.0 - zeta(beta, uniq + 1.0) / z
    return float(np.abs(emp_cdf - model_cdf).max())


def power_law_exponent(degree_sequence, method: str = "mle",
                       k_min: int | None = None) -> ExponentFit:
    """Fit a discrete power-law exponent to a degree/size sequence.

    "mle": discrete maximum likelihood with a KS-minimizing k_min scan
    (skipped when k_min is given).  "ls": least squares on the log-binned
    tail density.  Internally beta is positive; reports carry the negative
    power alongside.
    """
    xs = np.asarray(degree_sequence, dtype=np.int64)
    xs = xs[xs >= 1]
    if len(xs) < 100:
        raise InsufficientSupportError("need at least 100 observations")
    if xs.min() == xs.max():
        raise InsufficientSupportError("degenerate (constant) sequence")

    if method == "mle":
        if k_min is not None:
            beta, stderr, n = _discrete_mle(xs, k_min)
            return ExponentFit(beta, k_min, stderr, "mle", n)
        candidates = np.unique(xs)
        # keep the scan affordable and the tail populated
        candidates = [int(k) for k in candidates[:-1]
                      if (xs >= k).sum() >= 100][:50]
        best = None
        for k in candidates:
            beta, stderr, n = _discrete_mle(xs, k)
            d = _ks_distance(xs, k, beta)
            if best is None or d < best[0]:
                best = (d, beta, stderr, k, n)
        _, beta, stderr, k, n = best
        return ExponentFit(beta, k, stderr, "mle", n)

    if method == "ls":
        lo = k_min if k_min is not None else 1
        xs = xs[xs >= lo]
        k_hi = int(xs.max())
        edges = [lo]
        while edges[-1] < k_hi:
            edges.append(max(edges[-1] + 1, math.floor(edges[-1] * 1.25)))
        edges = np.array(edges, dtype=float)
        counts, _ = np.histogram(xs, bins=np.append(edges, edges[-1] + 1))
        widths = np.diff(np.append(edges, edges[-1] + 1))
        centers = np.sqrt(edges * np.append(edges[1:], edges[-1] + 1))
        dens = counts / widths
        keep = dens > 0
        if keep.sum() < 3:
            raise InsufficientSupportError("too few populated log bins")
        slope, intercept = np.polyfit(np.log(centers[keep]), np.log(dens[keep]), 1)
        resid = np.log(dens[keep]) - (slope * np.log(centers[keep]) + intercept)
        dof = max(keep.sum() - 2, 1)
        sx = np.log(centers[keep]).std() * math.sqrt(keep.sum())
        stderr = math.sqrt(resid @ resid / dof) / max(sx, 1e-12)
        return ExponentFit(-float(slope), lo, float(stderr), "ls", int(len(xs)))

    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Chasm detection via isotonic / unimodal regression

@dataclass(frozen=True)
class ChasmFinding:
    turning_point: float | None
    direction: str                 # "up_then_down" | "increasing" | "decreasing"
    sse_unimodal: float
    sse_increasing: float
    sse_decreasing: float
    decided: bool

    def as_dict(self):
        return {"turning_point": self.turning_point, "direction": self.direction,
                "sse_unimodal": self.sse_unimodal,
                "sse_increasing": self.sse_increasing,
                "sse_decreasing": self.sse_decreasing, "decided": self.decided}


def _pava(y, w, increasing=True):
    """Weighted least-squares isotonic regression (pool adjacent violators)."""
    if not increasing:
        return _pava(y[::-1], w[::-1], True)[::-1]
    level_y = []
    level_w = []
    level_n = []
    for yi, wi in zip(y, w):
        cy, cw, cn = yi, wi, 1
        while level_y and level_y[-1] > cy:
            py, pw, pn = level_y.pop(), level_w.pop(), level_n.pop()
            cy = (py * pw + cy * cw) / (pw + cw)
            cw += pw
            cn += pn
        level_y.append(cy)
        level_w.append(cw)
        level_n.append(cn)
    out = np.empty(len(y))
    i = 0
    for cy, cn in zip(level_y, level_n):
        out[i:i + cn] = cy
        i += cn
    return out


def _sse(y, fit, w):
    return float((w * (y - fit) ** 2).sum())


def _level_se(fit, w, i):
    """Binomial standard error of the fitted level containing index i (a
    PAVA level is a support-weighted mean over its constant block)."""
    lo = i
    while lo > 0 and fit[lo - 1] == fit[i]:
        lo -= 1
    hi = i
    while hi + 1 < len(fit) and fit[hi + 1] == fit[i]:
        hi += 1
    weight = float(w[lo:hi + 1].sum())
    q = float(np.clip(fit[i], 1e-6, 1 - 1e-6))
    return math.sqrt(q * (1.0 - q) / weight)


def detect_chasm(series: RatioSeries, min_support: int = 50,
                 margin: float = 0.95, amplitude_z: float = 3.0) -> ChasmFinding:
    """Fit monotone-increasing, monotone-decreasing and up-then-down shapes
    to the ratio series (weighted by support) and decide whether the
    rise-then-fall shape wins.

    Deciding takes the SSE margin AND a materiality guard: breakpoint
    selection always shaves some SSE off pure noise, so the fitted rise and
    fall must each exceed amplitude_z binomial standard errors at the
    supporting bins.
    """
    s = series.filtered(min_support)
    if len(s) < 5:
        raise InsufficientSupportError(
            f"need >= 5 bins with support >= {min_support}, have {len(s)}")
    y = s.ratio
    w = s.support.astype(float)
    reps = s.rep_k()
    inc = _pava(y, w, increasing=True)
    dec = _pava(y, w, increasing=False)
    sse_inc = _sse(y, inc, w)
    sse_dec = _sse(y, dec, w)
    best = (math.inf, None)
    for b in range(len(y)):
        fit = np.concatenate([_pava(y[:b + 1], w[:b + 1], True),
                              _pava(y[b + 1:], w[b + 1:], False)])
        e = _sse(y, fit, w)
        if e < best[0]:
            best = (e, fit)
    sse_uni, fit = best
    decided = sse_uni < margin * sse_inc and sse_uni < margin * sse_dec
    peak = int(np.argmax(fit))
    if decided:
        rise = fit[peak] - fit[0]
        fall = fit[peak] - fit[-1]
        se0 = _level_se(fit, w, 0)
        sep = _level_se(fit, w, peak)
        sen = _level_se(fit, w, len(fit) - 1)
        decided = (rise > amplitude_z * math.hypot(se0, sep)
                   and fall > amplitude_z * math.hypot(sen, sep))
    if decided:
        direction = "up_then_down"
        turning = float(reps[peak])
    else:
        direction = "increasing" if sse_inc <= sse_dec else "decreasing"
        turning = None
    return ChasmFinding(turning, direction, sse_uni, sse_inc, sse_dec, decided)


# ---------------------------------------------------------------------------
# Tail (glass-ceiling) trend

@dataclass
class TailRatioSeries:
    k: np.ndarray
    top_red: np.ndarray
    top_blue: np.ndarray

    def ratio(self):
        """red/blue counts; infinite where the blue count is zero."""
        with np.errstate(divide="ignore"):
            return np.where(self.top_blue > 0,
                            self.top_red / np.maximum(self.top_blue, 1),
                            np.inf)

    def rows(self):
        ratio = self.ratio()
        for i in range(len(self.k)):
            yield (float(self.k[i]), int(self.top_red[i]),
                   int(self.top_blue[i]), float(ratio[i]))


def top_k_tail_ratio(network: BipartiteNetwork, k_schedule=None,
                     beta_blue: float | None = None) -> TailRatioSeries:
    """Counts of groups with size >= k per color over a schedule of ks.

    Default schedule: t^(1/beta_blue) when the analytic blue exponent is
    supplied, else powers of two up to the maximum size.
    """
    if k_schedule is None:
        if beta_blue is not None and math.isfinite(beta_blue):
            k_schedule = [network.t ** (1.0 / beta_blue)]
        else:
            k_max = int(network.group_size.max())
            k_schedule = [2 ** i for i in range(0, max(1, k_max.bit_length()))]
    ks = np.asarray(sorted(k_schedule), dtype=float)
    sizes_r = np.sort(network.group_size[network.group_color == RED])
    sizes_b = np.sort(network.group_size[network.group_color == BLUE])
    top_red = len(sizes_r) - np.searchsorted(sizes_r, ks, side="left")
    top_blue = len(sizes_b) - np.searchsorted(sizes_b, ks, side="left")
    return TailRatioSeries(ks, top_red.astype(np.int64), top_blue.astype(np.int64))
