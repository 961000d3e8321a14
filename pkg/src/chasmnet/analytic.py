"""Closed-form limit machinery for the growth model.

Everything here is a pure function of the parameter vector: the limiting red
share of group-size mass (alpha_star), the four recurrence coefficients, the
limit group-size / member-degree distributions and their power-law exponents,
the chasm turning point k_star, per-size member-ratio curves, and the
unipartite analogues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import GrowthParams, Variant
from .errors import ChasmnetError, NonConvergenceError

FIXED_POINT_TOL = 1e-12
_DAMPING = 0.5
_MAX_ITER = 100_000


class GlassCeiling(Enum):
    AGAINST_RED = "against_red"
    AGAINST_BLUE = "against_blue"
    NONE = "none"


class Chasm(Enum):
    AGAINST_RED = "against_red"
    NOT_PRESENT = "not_present"


def _denominators(params, x):
    """Acceptance normalizers for a red and a blue member when the red share
    of group-size mass is x and the red share of group counts is r."""
    p = params
    d_red = (1.0 - (1.0 - p.rho_p_red) * p.xi * (1.0 - x)
             - (1.0 - p.rho_u_red) * (1.0 - p.xi) * (1.0 - p.r))
    d_blue = (1.0 - (1.0 - p.rho_p_blue) * p.xi * x
              - (1.0 - p.rho_u_blue) * (1.0 - p.xi) * p.r)
    return d_red, d_blue


def fixed_point_map(params, x):
    """The map F whose unique fixed point in (0,1) is alpha_star."""
    p = params
    d_red, d_blue = _denominators(p, x)
    return (p.r * p.eta
            + p.r * (1.0 - p.eta) * (p.xi * x + (1.0 - p.xi) * p.r) / d_red
            + (1.0 - p.r) * (1.0 - p.eta)
            * (p.rho_p_blue * p.xi * x + p.rho_u_blue * (1.0 - p.xi) * p.r)
            / d_blue)


def _cubic_k(params, x):
    """(F(x) - x) with the two positive denominators cleared; a cubic in x
    sharing the sign of F(x) - x on (0,1), used by the bisection fallback."""
    d_red, d_blue = _denominators(params, x)
    return (fixed_point_map(params, x) - x) * d_red * d_blue


def solve_alpha_star(params: GrowthParams, tol: float = FIXED_POINT_TOL) -> float:
    """Solve x = F(x) on (0,1).

    Damped fixed-point iteration from x0 = r; if that stalls, unconditionally
    convergent bisection on the cleared cubic.  The result is only covered by
    the limit theory when rho_p_red and rho_p_blue are both positive; callers
    can check `outside_limit_hypothesis(params)`.
    """
    x = params.r
    for _ in range(_MAX_ITER):
        fx = fixed_point_map(params, x)
        if abs(fx - x) < tol:
            return x
        x = (1.0 - _DAMPING) * x + _DAMPING * fx
    lo, hi = 1e-9, 1.0 - 1e-9
    klo = _cubic_k(params, lo)
    if klo < 0 or _cubic_k(params, hi) > 0:
        raise NonConvergenceError("cubic has no sign change on (0,1)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _cubic_k(params, mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    x = 0.5 * (lo + hi)
    if abs(fixed_point_map(params, x) - x) >= tol:
        raise NonConvergenceError(
            f"residual {abs(fixed_point_map(params, x) - x):.3e} after bisection")
    return x


def outside_limit_hypothesis(params) -> bool:
    """True when the limit theory's assumption rho_p > 0 fails for a color."""
    return params.rho_p_red == 0.0 or params.rho_p_blue == 0.0


@dataclass(frozen=True)
class Coefficients:
    c_r1: float
    c_r2: float
    c_b1: float
    c_b2: float


def coefficients(params: GrowthParams, alpha_star: float) -> Coefficients:
    """The four group-size recurrence coefficients at the solved alpha_star."""
    p = params
    d_red, d_blue = _denominators(p, alpha_star)
    if d_red <= 0.0 or d_blue <= 0.0:
        raise ChasmnetError("acceptance normalizer reached zero; parameters "
                            "sit on an excluded boundary")
    one_eta = 1.0 - p.eta
    uni = (1.0 - p.xi) / p.eta
    c_r1 = p.r * one_eta * p.xi / d_red + (1.0 - p.r) * one_eta * p.rho_p_blue * p.xi / d_blue
    c_b1 = (1.0 - p.r) * one_eta * p.xi / d_blue + p.r * one_eta * p.rho_p_red * p.xi / d_red
    c_r2 = p.r * one_eta * uni / d_red + (1.0 - p.r) * one_eta * p.rho_u_blue * uni / d_blue
    c_b2 = (1.0 - p.r) * one_eta * uni / d_blue + p.r * one_eta * p.rho_u_red * uni / d_red
    return Coefficients(c_r1, c_r2, c_b1, c_b2)


def _coeffs_equal(c):
    scale = max(1.0, c.c_r1, c.c_b1)
    return abs(c.c_r1 - c.c_b1) <= 1e-12 * scale


def chasm_threshold(params: GrowthParams, coeffs: Coefficients | None = None):
    """Turning point k_star of the red/blue group-count ratio sequence.

    Returns None when C_R1 = C_B1 (the ratio sequence is asymptotically flat
    and there is no glass ceiling to turn against).  The ratio sequence's
    monotonicity changes at the largest integer strictly below k_star.
    """
    if coeffs is None:
        coeffs = coefficients(params, solve_alpha_star(params))
    c = coeffs
    if _coeffs_equal(c):
        return None
    return (((1.0 + c.c_r1) * (1.0 + c.c_b2) - (1.0 + c.c_r2) * (1.0 + c.c_b1))
            / (c.c_r1 - c.c_b1))


def ratio_flip_index(k_star: float) -> int:
    """Largest integer strictly below k_star: the argmax of the ratio curve."""
    flip = math.ceil(k_star) - 1
    if float(flip) == k_star - 1.0 and k_star == math.floor(k_star):
        return int(k_star) - 1
    return int(flip)


@dataclass
class LimitDistribution:
    """Per-step densities G_k (or M_k, U_k) for k = 1..k_max, one array per
    color.  Values are kept in log space as well so that heavy truncations
    never underflow ratios."""

    red: np.ndarray
    blue: np.ndarray
    log_red: np.ndarray
    log_blue: np.ndarray

    @property
    def k_max(self):
        return len(self.red)

    @property
    def ks(self):
        return np.arange(1, self.k_max + 1)

    def ratio(self):
        """red/blue sequence, computed in log space."""
        return np.exp(self.log_red - self.log_blue)

    def tail_slope(self, color, k_lo, k_hi):
        """Log-log slope of the tail over [k_lo, k_hi] by linear regression."""
        logv = self.log_red if color == "red" else self.log_blue
        ks = self.ks
        sel = (ks >= k_lo) & (ks <= k_hi)
        return np.polyfit(np.log(ks[sel]), logv[sel], 1)[0]


def _recurrence(base, c1, c2, k_max):
    ks = np.arange(2, k_max + 1, dtype=np.float64)
    log_steps = np.log((ks - 1.0) * c1 + c2) - np.log(1.0 + ks * c1 + c2)
    log_v = np.empty(k_max)
    log_v[0] = math.log(base)
    log_v[1:] = log_v[0] + np.cumsum(log_steps)
    with np.errstate(under="ignore"):
        return np.exp(log_v), log_v


def group_size_distribution(params: GrowthParams, k_max: int,
                            published_blue_base: bool = False) -> LimitDistribution:
    """Limit group-size distribution from the coefficient recurrences.

    The blue base case uses (1-r)*eta, mirroring the red one: a blue group is
    created at rate (1-r)*eta with no acceptance step involved.  Setting
    published_blue_base=True multiplies in rho_p_blue instead, reproducing the
    published expression verbatim (which breaks the mass identities).
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    c = coefficients(params, solve_alpha_star(params))
    red_base = params.r * params.eta / (1.0 + c.c_r1 + c.c_r2)
    blue_scale = params.rho_p_blue if published_blue_base else 1.0
    blue_base = (1.0 - params.r) * blue_scale * params.eta / (1.0 + c.c_b1 + c.c_b2)
    red, log_red = _recurrence(red_base, c.c_r1, c.c_r2, k_max)
    blue, log_blue = _recurrence(blue_base, c.c_b1, c.c_b2, k_max)
    return LimitDistribution(red, blue, log_red, log_blue)


def member_degree_distribution(params: GrowthParams, k_max: int) -> LimitDistribution:
    """Limit member-degree distribution; both colors share the tail exponent
    1 + 1/(1-alpha), differing only in the r vs 1-r base."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    a = params.alpha
    one_a = 1.0 - a
    red_base = a * params.r / (2.0 - a)
    blue_base = a * (1.0 - params.r) / (2.0 - a)
    # Same recurrence shape as groups with c1 = 1 - alpha, c2 = 0.
    red, log_red = _recurrence(red_base, one_a, 0.0, k_max)
    blue, log_blue = _recurrence(blue_base, one_a, 0.0, k_max)
    return LimitDistribution(red, blue, log_red, log_blue)


@dataclass(frozen=True)
class AnalyticSolution:
    """Bundle of the closed-form outputs for one parameter vector."""

    alpha_star: float
    c_r1: float
    c_r2: float
    c_b1: float
    c_b2: float
    beta_red: float
    beta_blue: float
    k_star: float | None
    glass_ceiling: GlassCeiling
    chasm: Chasm
    fixed_point_residual: float
    outside_hypothesis: bool

    def as_dict(self):
        return {
            "alpha_star": self.alpha_star,
            "c_r1": self.c_r1, "c_r2": self.c_r2,
            "c_b1": self.c_b1, "c_b2": self.c_b2,
            "beta_red": self.beta_red, "beta_blue": self.beta_blue,
            "k_star": self.k_star,
            "glass_ceiling": self.glass_ceiling.value,
            "chasm": self.chasm.value,
            "fixed_point_residual": self.fixed_point_residual,
            "outside_hypothesis": self.outside_hypothesis,
        }


def classify(params: GrowthParams,
             coeffs: Coefficients | None = None) -> tuple[GlassCeiling, Chasm]:
    """Glass-ceiling direction by exponent comparison plus chasm flag.

    beta(R) > beta(B) (i.e. C_R1 < C_B1) means red groups thin out faster in
    the tail; with xi = 0 there is no rich-get-richer channel and no ceiling.
    """
    if coeffs is None:
        coeffs = coefficients(params, solve_alpha_star(params))
    if params.xi == 0.0 or _coeffs_equal(coeffs):
        return GlassCeiling.NONE, Chasm.NOT_PRESENT
    if coeffs.c_r1 < coeffs.c_b1:
        ceiling = GlassCeiling.AGAINST_RED
        k_star = chasm_threshold(params, coeffs)
        chasm = Chasm.AGAINST_RED if k_star is not None and k_star > 2.0 else Chasm.NOT_PRESENT
        return ceiling, chasm
    return GlassCeiling.AGAINST_BLUE, Chasm.NOT_PRESENT


def solve(params: GrowthParams) -> AnalyticSolution:
    """Solve the fixed point, coefficients, exponents and classification."""
    alpha_star = solve_alpha_star(params)
    c = coefficients(params, alpha_star)
    beta_red = 1.0 + 1.0 / c.c_r1 if c.c_r1 > 0 else math.inf
    beta_blue = 1.0 + 1.0 / c.c_b1 if c.c_b1 > 0 else math.inf
    ceiling, chasm = classify(params, c)
    return AnalyticSolution(
        alpha_star=alpha_star,
        c_r1=c.c_r1, c_r2=c.c_r2, c_b1=c.c_b1, c_b2=c.c_b2,
        beta_red=beta_red, beta_blue=beta_blue,
        k_star=chasm_threshold(params, c),
        glass_ceiling=ceiling, chasm=chasm,
        fixed_point_residual=abs(fixed_point_map(params, alpha_star) - alpha_star),
        outside_hypothesis=outside_limit_hypothesis(params),
    )


# ---------------------------------------------------------------------------
# Member-ratio curve (red share inside groups of each size)

@dataclass
class MemberRatioCurve:
    """Red member share inside size-k groups, with the join-probability
    internals that build it.

    p_red_in_red[j-2] is the probability that the j-th member of a red group
    is red (j >= 2); p_red_in_blue likewise for blue groups.  The creator
    contributes weight 1/0 under creator-colored groups and weight r under
    the independently colored variant.
    """

    values: np.ndarray            # curve, index k-1
    share_in_red: np.ndarray      # r_k(R,R), index k-1
    share_in_blue: np.ndarray     # r_k(R,B), index k-1
    p_red_in_red: np.ndarray      # p_RR_j for j = 2..k_max
    p_red_in_blue: np.ndarray     # p_RB_j for j = 2..k_max
    raw_weights: dict             # the four unnormalized weight arrays
    limit_value: float | None     # k -> infinity limit, when defined

    @property
    def k_max(self):
        return len(self.values)

    @property
    def ks(self):
        return np.arange(1, self.k_max + 1)

    def limit(self):
        if self.limit_value is None:
            raise ChasmnetError(
                "the k->infinity limit needs C_R1 < C_B1 (blue-dominated tail)")
        return self.limit_value


def member_ratio_limit(params: GrowthParams, alpha_star=None) -> float:
    """Red share inside very large (blue-dominated) groups."""
    p = params
    if alpha_star is None:
        alpha_star = solve_alpha_star(p)
    d_red, d_blue = _denominators(p, alpha_star)
    q_rb = p.r * p.rho_p_red * d_blue
    q_bb = (1.0 - p.r) * d_red
    return q_rb / (q_rb + q_bb)


def member_ratio_curve(params: GrowthParams, k_max: int,
                       published_weights: bool = False) -> MemberRatioCurve:
    """Evaluate the per-size red member share for k = 1..k_max.

    The j-th member joins a group of size j-1, so the size-proportional join
    weight is xi*(j-1); published_weights=True keeps the printed xi*j, which
    shifts small-k values by up to ~0.01 and breaks the membership-mass
    identity behind the k_A = 1 reach invariant.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    p = params
    alpha_star = solve_alpha_star(p)
    c = coefficients(p, alpha_star)
    dist = group_size_distribution(p, k_max)
    d_red, d_blue = _denominators(p, alpha_star)

    js = np.arange(2, k_max + 1, dtype=np.float64)
    if not published_weights:
        js = js - 1.0
    uni = (1.0 - p.xi) / p.eta
    w_rr = p.r * (p.xi * js + uni) / d_red
    w_br = (1.0 - p.r) * (p.rho_p_blue * p.xi * js + p.rho_u_blue * uni) / d_blue
    w_rb = p.r * (p.rho_p_red * p.xi * js + p.rho_u_red * uni) / d_red
    w_bb = (1.0 - p.r) * (p.xi * js + uni) / d_blue
    p_rr = w_rr / (w_rr + w_br)
    p_rb = w_rb / (w_rb + w_bb)

    # Creator term: a red group's first member is its red creator (weight 1)
    # and a blue group's is blue (weight 0); under independent group coloring
    # the creator is red with probability r for either group color.
    if p.variant is Variant.ADJUSTED_GSHM:
        first_red, first_blue = p.r, p.r
    else:
        first_red, first_blue = 1.0, 0.0
    ks = np.arange(1, k_max + 1, dtype=np.float64)
    share_in_red = np.empty(k_max)
    share_in_blue = np.empty(k_max)
    share_in_red[0] = first_red
    share_in_blue[0] = first_blue
    if k_max > 1:
        share_in_red[1:] = (first_red + np.cumsum(p_rr)) / ks[1:]
        share_in_blue[1:] = (first_blue + np.cumsum(p_rb)) / ks[1:]

    # Weight the two group colors by their limiting frequencies at size k.
    w_red = np.exp(dist.log_red - np.maximum(dist.log_red, dist.log_blue))
    w_blue = np.exp(dist.log_blue - np.maximum(dist.log_red, dist.log_blue))
    values = (w_red * share_in_red + w_blue * share_in_blue) / (w_red + w_blue)

    limit_value = None
    if c.c_r1 < c.c_b1 and not _coeffs_equal(c):
        limit_value = member_ratio_limit(p, alpha_star)
    return MemberRatioCurve(
        values=values, share_in_red=share_in_red, share_in_blue=share_in_blue,
        p_red_in_red=p_rr, p_red_in_blue=p_rb,
        raw_weights={"red_in_red": w_rr, "blue_in_red": w_br,
                     "red_in_blue": w_rb, "blue_in_blue": w_bb},
        limit_value=limit_value,
    )


# ---------------------------------------------------------------------------
# Unipartite analogues

@dataclass(frozen=True)
class UnipartiteParams:
    """Parameters of the one-mode growth process: every step adds a member,
    so there is no alpha or eta; arrival_rate generalizes the member arrival
    density used by the uniform-pick weights (1 member per step)."""

    r: float
    xi: float
    rho_p_red: float = 1.0
    rho_p_blue: float = 1.0
    rho_u_red: float = 1.0
    rho_u_blue: float = 1.0
    arrival_rate: float = 1.0

    def __post_init__(self):
        from .core import validate_params
        probe = GrowthParams(0.5, 0.5, self.r, self.xi, self.rho_p_red,
                             self.rho_p_blue, self.rho_u_red, self.rho_u_blue)
        validate_params(probe)
        if not 0.0 < self.arrival_rate <= 1.0:
            from .errors import RangeError
            raise RangeError("arrival_rate", self.arrival_rate, "0 < arrival_rate <= 1")

    @classmethod
    def from_growth(cls, params: GrowthParams, arrival_rate: float = 1.0):
        return cls(params.r, params.xi, params.rho_p_red, params.rho_p_blue,
                   params.rho_u_red, params.rho_u_blue, arrival_rate)

    def rho_p(self, color):
        return self.rho_p_red if color == 0 else self.rho_p_blue

    def rho_u(self, color):
        return self.rho_u_red if color == 0 else self.rho_u_blue


def _denominators_u(p: UnipartiteParams, x):
    d_red = (1.0 - (1.0 - p.rho_p_red) * p.xi * (1.0 - x)
             - (1.0 - p.rho_u_red) * (1.0 - p.xi) * (1.0 - p.r))
    d_blue = (1.0 - (1.0 - p.rho_p_blue) * p.xi * x
              - (1.0 - p.rho_u_blue) * (1.0 - p.xi) * p.r)
    return d_red, d_blue


def fixed_point_map_u(p: UnipartiteParams, x):
    """Map whose fixed point is the limiting red share of degree mass.

    Each arrival adds two endpoints: its own (red w.p. r) and its chosen
    neighbor's, picked through the same homophily-gated mixture as groups.
    """
    d_red, d_blue = _denominators_u(p, x)
    a = (p.xi * x + (1.0 - p.xi) * p.r) / d_red
    b = (p.xi * (1.0 - x) + (1.0 - p.xi) * (1.0 - p.r)) / d_blue
    return 0.5 * (1.0 + p.r * a - (1.0 - p.r) * b)


def solve_alpha_star_u(p: UnipartiteParams, tol: float = FIXED_POINT_TOL) -> float:
    x = p.r
    for _ in range(_MAX_ITER):
        fx = fixed_point_map_u(p, x)
        if abs(fx - x) < tol:
            return x
        x = (1.0 - _DAMPING) * x + _DAMPING * fx
    lo, hi = 1e-9, 1.0 - 1e-9
    if fixed_point_map_u(p, lo) - lo < 0 or fixed_point_map_u(p, hi) - hi > 0:
        raise NonConvergenceError("no sign change on (0,1)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if fixed_point_map_u(p, mid) - mid > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    x = 0.5 * (lo + hi)
    if abs(fixed_point_map_u(p, x) - x) >= tol:
        raise NonConvergenceError("unipartite fixed point did not converge")
    return x


@dataclass
class UnipartiteAnalytics:
    alpha_u_star: float
    cu_r1: float
    cu_r2: float
    cu_b1: float
    cu_b2: float
    degrees: LimitDistribution          # U_k per color
    connection_ratio: np.ndarray        # red-neighbor share per degree k
    share_for_red: np.ndarray           # r_k(R,R)
    share_for_blue: np.ndarray          # r_k(R,B)
    p_first: tuple                      # (pu_RR_1, pu_RB_1)
    p_red_for_red: np.ndarray = None    # pu_RR_j for j = 2..k_max
    p_red_for_blue: np.ndarray = None   # pu_RB_j for j = 2..k_max
    raw_weights: dict = None            # the four unnormalized weight arrays

    @property
    def k_max(self):
        return self.degrees.k_max

    @property
    def ks(self):
        return self.degrees.ks


def unipartite_coefficients(p: UnipartiteParams, alpha_u: float):
    d_red, d_blue = _denominators_u(p, alpha_u)
    cu_r1 = 0.5 * (p.r * p.xi / d_red + (1.0 - p.r) * p.xi * p.rho_p_blue / d_blue)
    cu_b1 = 0.5 * ((1.0 - p.r) * p.xi / d_blue + p.r * p.rho_p_red * p.xi / d_red)
    cu_r2 = (p.r * (1.0 - p.xi) / d_red
             + (1.0 - p.r) * p.rho_u_blue * (1.0 - p.xi) / d_blue)
    cu_b2 = ((1.0 - p.r) * (1.0 - p.xi) / d_blue
             + p.r * p.rho_u_red * (1.0 - p.xi) / d_red)
    return cu_r1, cu_r2, cu_b1, cu_b2


def unipartite_analytics(p: UnipartiteParams, k_max: int,
                         first_edge: str = "choice",
                         published_weights: bool = False) -> UnipartiteAnalytics:
    """Degree distribution and red-neighbor share curve for the one-mode model.

    first_edge selects how the j=1 term of the connection-ratio is computed:
    "choice" (default) uses the arriving member's own accept-gated pick, which
    matches simulation; "published" reproduces the literal printed weights,
    which drop the two acceptance normalizers.  As with groups, the j-th edge
    arrives at degree j-1, so the preferential weight is xi*(j-1)/2 unless
    published_weights restores the printed xi*j/2.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    if first_edge not in ("choice", "published"):
        raise ValueError("first_edge must be 'choice' or 'published'")
    au = solve_alpha_star_u(p)
    cu_r1, cu_r2, cu_b1, cu_b2 = unipartite_coefficients(p, au)
    red, log_red = _recurrence(p.r / (1.0 + cu_r1 + cu_r2), cu_r1, cu_r2, k_max)
    blue, log_blue = _recurrence((1.0 - p.r) / (1.0 + cu_b1 + cu_b2),
                                 cu_b1, cu_b2, k_max)
    degrees = LimitDistribution(red, blue, log_red, log_blue)

    d_red, d_blue = _denominators_u(p, au)
    if first_edge == "choice":
        pu_rr1 = (p.xi * au + (1.0 - p.xi) * p.r) / d_red
        pu_rb1 = (p.rho_p_blue * p.xi * au + p.rho_u_blue * (1.0 - p.xi) * p.r) / d_blue
    else:
        x_rr = p.r * (p.xi * au + (1.0 - p.xi) * p.r)
        x_br = (1.0 - p.r) * (p.xi * au * p.rho_p_blue + (1.0 - p.xi) * p.r * p.rho_u_blue)
        pu_rr1 = x_rr / (x_rr + x_br)
        x_rb = p.r * (p.xi * (1.0 - au) * p.rho_p_red
                      + (1.0 - p.xi) * (1.0 - p.r) * p.rho_u_red)
        x_bb = (1.0 - p.r) * (p.xi * (1.0 - au) + (1.0 - p.xi) * (1.0 - p.r))
        pu_rb1 = x_rb / (x_rb + x_bb)

    js = np.arange(2, k_max + 1, dtype=np.float64)
    if not published_weights:
        js = js - 1.0
    uni = (1.0 - p.xi) / p.arrival_rate
    w_rr = p.r * (p.xi * js / 2.0 + uni) / d_red
    w_br = (1.0 - p.r) * (p.rho_p_blue * p.xi * js / 2.0 + p.rho_u_blue * uni) / d_blue
    w_rb = p.r * (p.rho_p_red * p.xi * js / 2.0 + p.rho_u_red * uni) / d_red
    w_bb = (1.0 - p.r) * (p.xi * js / 2.0 + uni) / d_blue
    pu_rr = w_rr / (w_rr + w_br)
    pu_rb = w_rb / (w_rb + w_bb)

    ks = np.arange(1, k_max + 1, dtype=np.float64)
    share_for_red = np.empty(k_max)
    share_for_blue = np.empty(k_max)
    share_for_red[0] = pu_rr1
    share_for_blue[0] = pu_rb1
    if k_max > 1:
        share_for_red[1:] = (pu_rr1 + np.cumsum(pu_rr)) / ks[1:]
        share_for_blue[1:] = (pu_rb1 + np.cumsum(pu_rb)) / ks[1:]

    w_red = np.exp(log_red - np.maximum(log_red, log_blue))
    w_blue = np.exp(log_blue - np.maximum(log_red, log_blue))
    curve = (w_red * share_for_red + w_blue * share_for_blue) / (w_red + w_blue)
    return UnipartiteAnalytics(
        alpha_u_star=au, cu_r1=cu_r1, cu_r2=cu_r2, cu_b1=cu_b1, cu_b2=cu_b2,
        degrees=degrees, connection_ratio=curve,
        share_for_red=share_for_red, share_for_blue=share_for_blue,
        p_first=(pu_rr1, pu_rb1),
        p_red_for_red=pu_rr, p_red_for_blue=pu_rb,
        raw_weights={"red_for_red": w_rr, "blue_for_red": w_br,
                     "red_for_blue": w_rb, "blue_for_blue": w_bb},
    )
