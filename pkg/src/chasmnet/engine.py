"""Stochastic growth engine.

Two sampling modes realize the same per-step group-choice distribution:

* EXACT_MIXTURE (default) draws the accepted group directly from the
  normalized mixture of the size-proportional and uniform channels, each
  acceptance-weighted.  Restarts of the literal process are memoryless, so
  conditioning on eventual acceptance gives exactly this distribution.
* LITERAL_REJECTION runs the restart loop verbatim, with a guard against
  pathological all-rejection parameter corners.

PRNG contract: xoshiro256** seeded through splitmix64 (see _kernels); replica
ensembles take consecutive seeds (stream i = seed + i).  Identical
(params, config) pairs produce bit-identical networks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .analytic import UnipartiteParams
from .core import (BLUE, RED, BipartiteNetwork, GrowthParams, Tallies,
                   UnipartiteNetwork, Variant, validate_params)
from .errors import PathologicalParametersError, RangeError

PRNG_ID = "xoshiro256** / splitmix64; replica stream i uses seed + i"


class SamplingMode(Enum):
    EXACT_MIXTURE = "exact_mixture"
    LITERAL_REJECTION = "literal_rejection"


@dataclass(frozen=True)
class RunConfig:
    t_max: int
    seed: int
    sampling: SamplingMode = SamplingMode.EXACT_MIXTURE
    record_events: bool = False
    rejection_guard: int = 1_000_000

    def __post_init__(self):
        if self.t_max < 2:
            raise RangeError("t_max", self.t_max, "t_max >= 2")


_ACTIONS = ("new_member", "reuse_member")
_MECHS = ("pref", "uniform")


@dataclass
class EventLog:
    """Per-step record of what the growth process did, starting at t=3 (the
    two bootstrap edges are fixed initial state, not events)."""

    action: np.ndarray
    member: np.ndarray
    group: np.ndarray
    created: np.ndarray
    mechanism: np.ndarray
    rejections: np.ndarray

    def __len__(self):
        return len(self.action)

    def records(self):
        """Yield one dict per step, matching the JSONL wire format."""
        for i in range(len(self.action)):
            rec = {"t": i + 3, "action": _ACTIONS[self.action[i]],
                   "member": int(self.member[i])}
            if self.created[i]:
                rec["created_group"] = int(self.group[i])
            else:
                rec["joined_group"] = int(self.group[i])
                rec["mechanism"] = _MECHS[self.mechanism[i]]
            rec["rejections"] = int(self.rejections[i])
            yield rec

    def to_jsonl(self, path):
        with open(path, "w") as fh:
            for rec in self.records():
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


def replica_seeds(seed: int, n: int):
    """Documented stream assignment for replica ensembles."""
    return [seed + i for i in range(n)]


def _meta(params, seed, sampling, extra=None):
    meta = {"params": params.as_dict(), "seed": int(seed),
            "sampling": sampling.value, "prng": PRNG_ID}
    if extra:
        meta.update(extra)
    return meta


def grow(params: GrowthParams, config: RunConfig) -> BipartiteNetwork:
    """Run the bipartite growth process to t_max edges."""
    validate_params(params)
    literal = config.sampling is SamplingMode.LITERAL_REJECTION
    out = _kernels.grow_bipartite(
        int(config.t_max), params.alpha, params.eta, params.r, params.xi,
        params.rho_p_red, params.rho_p_blue, params.rho_u_red,
        params.rho_u_blue, params.variant is Variant.ADJUSTED_GSHM,
        literal, int(config.rejection_guard),
        np.uint64(config.seed & 0xFFFFFFFFFFFFFFFF), config.record_events)
    (member_color, member_degree, group_color, group_size, group_creator,
     group_birth, edge_member, edge_group, n_m, n_g, e_m, e_g, status,
     ev_action, ev_member, ev_group, ev_created, ev_mech, ev_rej) = out
    if status == _kernels.STATUS_GUARD_TRIPPED:
        raise PathologicalParametersError(
            f"connection growth exceeded {config.rejection_guard} restarts; "
            "cross-color acceptance is effectively zero for these parameters")
    tallies = Tallies(members=n_m, groups=n_g, member_degree=e_m,
                      group_size=e_g)
    network = BipartiteNetwork(
        member_color=member_color, member_degree=member_degree,
        group_color=group_color, group_size=group_size,
        group_creator=group_creator, group_birth_step=group_birth,
        edge_member=edge_member, edge_group=edge_group, tallies=tallies,
        meta=_meta(params, config.seed, config.sampling,
                   {"t_max": int(config.t_max)}),
    )
    if config.record_events:
        network.events = EventLog(ev_action, ev_member, ev_group, ev_created,
                                  ev_mech, ev_rej)
    return network


def grow_unipartite(params, n: int, seed: int,
                    sampling: SamplingMode = SamplingMode.EXACT_MIXTURE,
                    rejection_guard: int = 1_000_000) -> UnipartiteNetwork:
    """Run the one-mode growth process to n members (n-1 edges).

    params may be a UnipartiteParams or a GrowthParams (only r, xi and the
    four rho fields are used).
    """
    if isinstance(params, GrowthParams):
        params = UnipartiteParams.from_growth(params)
    if n < 2:
        raise RangeError("n", n, "n >= 2")
    literal = sampling is SamplingMode.LITERAL_REJECTION
    (member_color, member_degree, edge_a, edge_b, n_m, e_m,
     status) = _kernels.grow_unipartite(
        int(n), params.r, params.xi, params.rho_p_red, params.rho_p_blue,
        params.rho_u_red, params.rho_u_blue, literal, int(rejection_guard),
        np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    if status == _kernels.STATUS_GUARD_TRIPPED:
        raise PathologicalParametersError(
            f"connection growth exceeded {rejection_guard} restarts")
    return UnipartiteNetwork(
        member_color=member_color, member_degree=member_degree,
        edge_a=edge_a, edge_b=edge_b,
        meta={"params": {"r": params.r, "xi": params.xi,
                         "rho_p_red": params.rho_p_red,
                         "rho_p_blue": params.rho_p_blue,
                         "rho_u_red": params.rho_u_red,
                         "rho_u_blue": params.rho_u_blue},
              "seed": int(seed), "n": int(n),
              "sampling": sampling.value, "prng": PRNG_ID},
    )


def step_distribution(network: BipartiteNetwork, params: GrowthParams,
                      member_id: int) -> np.ndarray:
    """Exact group-joining distribution for the given member on the current
    state: P(g) proportional to xi*(size_g/t)*a_p(g) + (1-xi)*(1/|G|)*a_u(g),
    where a_p/a_u gate cross-color picks by the matching rho.  This is the
    stationary law of the restart loop because restarts are memoryless."""
    if network.n_groups == 0:
        raise ValueError("no groups to join")
    c = int(network.member_color[member_id])
    same = network.group_color == c
    a_p = np.where(same, 1.0, params.rho_p(c))
    a_u = np.where(same, 1.0, params.rho_u(c))
    sizes = network.group_size.astype(np.float64)
    w = (params.xi * sizes / network.t * a_p
         + (1.0 - params.xi) / network.n_groups * a_u)
    return w / w.sum()


def literal_connection_counts(network: BipartiteNetwork, params: GrowthParams,
                              member_id: int, n_draws: int, seed: int,
                              guard: int = 1_000_000) -> np.ndarray:
    """Empirical counts of the literal restart loop on a frozen network."""
    c = int(network.member_color[member_id])
    counts, status = _kernels.literal_connection_counts(
        network.group_size.astype(np.int64), network.group_color, c,
        params.xi, params.rho_p(c), params.rho_u(c), int(n_draws), int(guard),
        np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    if status == _kernels.STATUS_GUARD_TRIPPED:
        raise PathologicalParametersError("restart guard tripped")
    return counts


def prefix_snapshot(network: BipartiteNetwork, t: int) -> BipartiteNetwork:
    """The network as it stood after its first t edges.

    Valid because growth is append-only and ids are dense in creation order:
    a run stopped at t is identical to the t-prefix of a longer run with the
    same seed.
    """
    if not 2 <= t <= network.t:
        raise ValueError(f"t must be in [2, {network.t}]")
    em = network.edge_member[:t]
    eg = network.edge_group[:t]
    n_members = int(em.max()) + 1
    n_groups = int(eg.max()) + 1
    member_color = network.member_color[:n_members]
    group_color = network.group_color[:n_groups]
    member_degree = np.bincount(em, minlength=n_members).astype(np.int32)
    group_size = np.bincount(eg, minlength=n_groups).astype(np.int32)
    tallies = Tallies()
    for c in (RED, BLUE):
        tallies.members[c] = int((member_color == c).sum())
        tallies.groups[c] = int((group_color == c).sum())
        tallies.member_degree[c] = int(member_degree[member_color == c].sum())
        tallies.group_size[c] = int(group_size[group_color == c].sum())
    return BipartiteNetwork(
        member_color=member_color, member_degree=member_degree,
        group_color=group_color, group_size=group_size,
        group_creator=network.group_creator[:n_groups],
        group_birth_step=network.group_birth_step[:n_groups],
        edge_member=em, edge_group=eg, tallies=tallies,
        meta={**network.meta, "t_max": t, "prefix_of": network.meta.get("t_max")},
    )
