"""Parameter inference from an observed network.

(r, alpha, eta) come from direct counting; the homophily block (xi and the
four rhos, optionally eta) is fitted by multi-start Nelder-Mead against the
gap between empirical and analytic per-size group-count ratios.

Two objectives are offered: the literal scalar difference of summed ratios,
and a per-size L1 gap.  The scalar objective is degenerate (many parameter
sets reach the same summed value), so reports carry both.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .analytic import (UnipartiteParams, group_size_distribution,
                       unipartite_analytics)
from .core import BLUE, RED, BipartiteNetwork, GrowthParams, UnipartiteNetwork, Variant
from .errors import InsufficientSupportError

OBJECTIVES = ("summed_ratio_difference", "per_size_l1")
DEFAULT_FREE = ("xi", "rho_p_red", "rho_p_blue", "rho_u_red", "rho_u_blue")
_BOUNDS = {"xi": (0.0, 1.0), "rho_p_red": (0.0, 1.0), "rho_p_blue": (0.0, 1.0),
           "rho_u_red": (0.0, 1.0), "rho_u_blue": (0.0, 1.0),
           "eta": (1e-3, 1.0 - 1e-3)}


@dataclass(frozen=True)
class FitConfig:
    K: int | None = None                    # max group size entering the objective
    objective: str = "summed_ratio_difference"
    free_params: tuple = DEFAULT_FREE
    restarts: int = 16
    max_evals: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        bad = [f for f in self.free_params if f not in _BOUNDS]
        if bad:
            raise ValueError(f"cannot fit over {bad}; allowed: {sorted(_BOUNDS)}")
        if self.K is not None and self.K < 2:
            raise ValueError("K must be >= 2")


@dataclass(frozen=True)
class DirectEstimates:
    r: float
    alpha: float
    eta: float
    degenerate: bool = False

    def as_dict(self):
        return {"r": self.r, "alpha": self.alpha,
                "eta": self.eta, "degenerate": self.degenerate,
                "eta_note": "groups per edge (the directly counted group-member ratio)"}


@dataclass
class FitResult:
    params_hat: GrowthParams
    objective_value: float
    objective: str
    direct_estimates: DirectEstimates
    trace: list
    empirical_ratio: np.ndarray
    fitted_ratio: np.ndarray
    ks: np.ndarray

    def as_dict(self):
        return {
            "params_hat": self.params_hat.as_dict(),
            "objective_value": self.objective_value,
            "objective": self.objective,
            "direct_estimates": self.direct_estimates.as_dict(),
            "trace": self.trace,
            "comparison": [
                {"k": int(k), "empirical": float(e), "fitted": float(f)}
                for k, e, f in zip(self.ks, self.empirical_ratio, self.fitted_ratio)
            ],
        }


def estimate_direct(network: BipartiteNetwork) -> DirectEstimates:
    """Count-based estimates: members arrive once per edge at rate alpha,
    groups at rate eta, red members at share r."""
    if network.t == 0:
        raise InsufficientSupportError("empty network")
    members = network.tallies.members.sum()
    r_hat = network.tallies.members[RED] / members
    alpha_hat = members / network.t
    eta_hat = network.tallies.groups.sum() / network.t
    return DirectEstimates(float(r_hat), float(alpha_hat), float(eta_hat),
                           degenerate=(network.tallies.members == 0).any())


def _empirical_group_ratio(network, k_cap):
    counts_r = np.bincount(network.group_size[network.group_color == RED],
                           minlength=k_cap + 1)[1:k_cap + 1]
    counts_b = np.bincount(network.group_size[network.group_color == BLUE],
                           minlength=k_cap + 1)[1:k_cap + 1]
    return counts_r.astype(float), counts_b.astype(float)


def _prepare_targets(counts_r, counts_b, config):
    """Resolve K and the usable sizes given zero blue counts."""
    k_cap = len(counts_r)
    K = config.K if config.K is not None else k_cap
    K = min(K, k_cap)
    blue_ok = counts_b[:K] > 0
    if config.objective == "summed_ratio_difference":
        if not blue_ok.all():
            K_new = int(np.argmin(blue_ok))  # first zero-blue size
            warnings.warn(f"no blue groups at size {K_new + 1}; "
                          f"shrinking K from {K} to {K_new}")
            K = K_new
        ks = np.arange(1, K + 1)
    else:
        if not blue_ok.all():
            dropped = np.flatnonzero(~blue_ok) + 1
            warnings.warn(f"dropping sizes with no blue groups: {dropped.tolist()}")
        ks = np.flatnonzero(blue_ok) + 1
    if len(ks) < 2:
        raise InsufficientSupportError("fewer than 2 usable sizes in the objective")
    emp = counts_r[ks - 1] / counts_b[ks - 1]
    return ks, emp


def _objective_value(kind, emp, ana):
    if kind == "summed_ratio_difference":
        return abs(emp.sum() - ana.sum())
    return np.abs(emp - ana).sum()


def _run_simplex(loss, d, config):
    """Multi-start Nelder-Mead on the unit box; returns (x, value, trace).

    Start i comes from its own substream (seed, i), so raising the restart
    count re-runs the same initial starts plus new ones and the reported
    best is non-increasing in the restart count.
    """
    starts = [np.random.default_rng((config.seed, i)).uniform(size=d)
              for i in range(config.restarts)]
    trace = []
    best_x, best_v = None, np.inf
    for i, x0 in enumerate(starts):
        history = []

        def wrapped(x):
            v = loss(x)
            history.append(min(v, history[-1]) if history else v)
            return v

        res = minimize(wrapped, x0, method="Nelder-Mead",
                       bounds=[(0.0, 1.0)] * d,
                       options={"maxfev": config.max_evals, "xatol": 1e-6,
                                "fatol": 1e-12})
        trace.append({"restart": i, "evals": len(history),
                      "best": float(res.fun),
                      "history": [float(v) for v in history[::  max(1, len(history) // 100)]]})
        if res.fun < best_v:
            best_x, best_v = res.x, float(res.fun)
    return best_x, best_v, trace


def _box_to_params(names, x, base):
    """Map unit-box coordinates onto parameter fields (eta gets an open box)."""
    upd = {}
    for name, v in zip(names, x):
        lo, hi = _BOUNDS[name]
        upd[name] = lo + (hi - lo) * float(np.clip(v, 0.0, 1.0))
    return replace(base, **upd)


def fit_homophily(network: BipartiteNetwork, config: FitConfig = FitConfig()) -> FitResult:
    """Fit the free parameters against the empirical group-count ratios."""
    est = estimate_direct(network)
    k_cap = int(network.group_size.max())
    counts_r, counts_b = _empirical_group_ratio(network, k_cap)
    ks, emp = _prepare_targets(counts_r, counts_b, config)
    k_hi = int(ks.max())
    base = GrowthParams(est.alpha, min(max(est.eta, 1e-3), 1 - 1e-3),
                        min(max(est.r, 1e-6), 0.5), 0.5,
                        variant=Variant.GSHM)
    names = list(config.free_params)

    def loss(x):
        try:
            cand = _box_to_params(names, x, base)
            dist = group_size_distribution(cand, k_hi)
            ana = dist.ratio()[ks - 1]
        except Exception:
            return 1e9
        return _objective_value(config.objective, emp, ana)

    best_x, best_v, trace = _run_simplex(loss, len(names), config)
    params_hat = _box_to_params(names, best_x, base)
    fitted = group_size_distribution(params_hat, k_hi).ratio()[ks - 1]
    return FitResult(params_hat=params_hat,
                     objective_value=_objective_value(config.objective, emp, fitted),
                     objective=config.objective, direct_estimates=est,
                     trace=trace, empirical_ratio=emp, fitted_ratio=fitted, ks=ks)


def evaluate_objective(network: BipartiteNetwork, params: GrowthParams,
                       config: FitConfig = FitConfig()) -> float:
    """The configured objective at a given parameter vector (for comparisons)."""
    k_cap = int(network.group_size.max())
    counts_r, counts_b = _empirical_group_ratio(network, k_cap)
    ks, emp = _prepare_targets(counts_r, counts_b, config)
    ana = group_size_distribution(params, int(ks.max())).ratio()[ks - 1]
    return _objective_value(config.objective, emp, ana)


# ---------------------------------------------------------------------------
# Unipartite fitting

def _empirical_degree_ratio(network_u, k_cap):
    counts_r = np.bincount(network_u.member_degree[network_u.member_color == RED],
                           minlength=k_cap + 1)[1:k_cap + 1]
    counts_b = np.bincount(network_u.member_degree[network_u.member_color == BLUE],
                           minlength=k_cap + 1)[1:k_cap + 1]
    return counts_r.astype(float), counts_b.astype(float)


def fit_unipartite(network_u: UnipartiteNetwork,
                   config: FitConfig = FitConfig()) -> FitResult:
    """Same scheme as fit_homophily against the one-mode degree recurrences."""
    members = len(network_u.member_color)
    if members == 0:
        raise InsufficientSupportError("empty network")
    r_hat = float((network_u.member_color == RED).sum() / members)
    est = DirectEstimates(r_hat, 1.0, 0.0,
                          degenerate=r_hat in (0.0, 1.0))
    k_cap = int(network_u.member_degree.max())
    counts_r, counts_b = _empirical_degree_ratio(network_u, k_cap)
    names = [f for f in config.free_params if f != "eta"]
    ks, emp = _prepare_targets(counts_r, counts_b, config)
    k_hi = int(ks.max())
    base_kwargs = {"r": min(max(r_hat, 1e-6), 0.5)}

    def build(x):
        vals = {n: float(np.clip(v, 0.0, 1.0)) for n, v in zip(names, x)}
        return UnipartiteParams(
            r=base_kwargs["r"], xi=vals.get("xi", 0.5),
            rho_p_red=vals.get("rho_p_red", 1.0),
            rho_p_blue=vals.get("rho_p_blue", 1.0),
            rho_u_red=vals.get("rho_u_red", 1.0),
            rho_u_blue=vals.get("rho_u_blue", 1.0))

    def loss(x):
        try:
            ua = unipartite_analytics(build(x), k_hi)
            ana = ua.degrees.ratio()[ks - 1]
        except Exception:
            return 1e9
        return _objective_value(config.objective, emp, ana)

    best_x, best_v, trace = _run_simplex(loss, len(names), config)
    params_u = build(best_x)
    fitted = unipartite_analytics(params_u, k_hi).degrees.ratio()[ks - 1]
    params_hat = GrowthParams(0.5, 0.5, params_u.r, params_u.xi,
                              params_u.rho_p_red, params_u.rho_p_blue,
                              params_u.rho_u_red, params_u.rho_u_blue)
    return FitResult(params_hat=params_hat,
                     objective_value=_objective_value(config.objective, emp, fitted),
                     objective=config.objective, direct_estimates=est,
                     trace=trace, empirical_ratio=emp, fitted_ratio=fitted, ks=ks)


def evaluate_objective_unipartite(network_u, params_u: UnipartiteParams,
                                  config: FitConfig = FitConfig()) -> float:
    k_cap = int(network_u.member_degree.max())
    counts_r, counts_b = _empirical_degree_ratio(network_u, k_cap)
    ks, emp = _prepare_targets(counts_r, counts_b, config)
    ana = unipartite_analytics(params_u, int(ks.max())).degrees.ratio()[ks - 1]
    return _objective_value(config.objective, emp, ana)
