"""One-mode workflow: bipartite projection, connection-ratio curves, and a
thin facade over the unipartite growth, analytics and fitting entry points."""

from __future__ import annotations

import numpy as np

from .analytic import UnipartiteParams, unipartite_analytics
from .core import BLUE, RED, BipartiteNetwork, UnipartiteNetwork
from .engine import grow_unipartite
from .errors import MemoryGuardError
from .fitting import FitConfig, fit_unipartite
from .metrics import Binning, RatioSeries, _bin_aggregate

DEFAULT_EDGE_CAP = 50_000_000


def project(bipartite: BipartiteNetwork, max_edges: int = DEFAULT_EDGE_CAP,
            collapse_multi: bool = False) -> UnipartiteNetwork:
    """Join every pair of members sharing a group, one edge per shared group.

    Members are deduplicated within a group (a repeat join adds size but not
    a new person), while pairs sharing several groups keep one edge per
    group.  collapse_multi=True collapses those parallel edges to one, for
    comparing against projections that inflate degrees.
    """
    order = np.argsort(bipartite.edge_group, kind="stable")
    eg = bipartite.edge_group[order]
    em = bipartite.edge_member[order]
    starts = np.searchsorted(eg, np.arange(bipartite.n_groups))
    ends = np.append(starts[1:], len(eg))

    members_per_group = []
    needed = 0
    for g in range(bipartite.n_groups):
        ms = np.unique(em[starts[g]:ends[g]])
        members_per_group.append(ms)
        s = len(ms)
        needed += s * (s - 1) // 2
    if needed > max_edges:
        raise MemoryGuardError(needed, max_edges)

    edge_a = np.empty(needed, np.int64)
    edge_b = np.empty(needed, np.int64)
    pos = 0
    for ms in members_per_group:
        s = len(ms)
        if s < 2:
            continue
        if s <= 2048:
            ia, ib = np.triu_indices(s, k=1)
            n = len(ia)
            edge_a[pos:pos + n] = ms[ia]
            edge_b[pos:pos + n] = ms[ib]
            pos += n
        else:
            # row-by-row keeps the transient at O(s) for very large groups
            for i in range(s - 1):
                n = s - 1 - i
                edge_a[pos:pos + n] = ms[i]
                edge_b[pos:pos + n] = ms[i + 1:]
                pos += n
    edge_a = edge_a[:pos]
    edge_b = edge_b[:pos]
    if collapse_multi:
        pairs = np.unique(np.stack([edge_a, edge_b], axis=1), axis=0)
        edge_a, edge_b = pairs[:, 0], pairs[:, 1]

    degree = (np.bincount(edge_a, minlength=bipartite.n_members)
              + np.bincount(edge_b, minlength=bipartite.n_members))
    return UnipartiteNetwork(
        member_color=bipartite.member_color.copy(),
        member_degree=degree.astype(np.int64),
        edge_a=edge_a, edge_b=edge_b,
        meta={"projection_of": bipartite.meta.get("seed"),
              "collapse_multi": collapse_multi})


def projected_degree_identity(bipartite: BipartiteNetwork,
                              projected: UnipartiteNetwork) -> bool:
    """Exact check: each member's projected degree equals the sum over their
    (distinct) groups of (distinct co-members)."""
    order = np.argsort(bipartite.edge_group, kind="stable")
    eg = bipartite.edge_group[order]
    em = bipartite.edge_member[order]
    starts = np.searchsorted(eg, np.arange(bipartite.n_groups))
    ends = np.append(starts[1:], len(eg))
    expected = np.zeros(bipartite.n_members, np.int64)
    for g in range(bipartite.n_groups):
        ms = np.unique(em[starts[g]:ends[g]])
        expected[ms] += len(ms) - 1
    return bool(np.array_equal(expected, projected.member_degree))


def connection_ratio_by_degree(network_u: UnipartiteNetwork,
                               binning: Binning = Binning()) -> RatioSeries:
    """Mean red-neighbor share per member-degree bin, with edge multiplicity."""
    n = network_u.n_members
    red_nb = np.zeros(n, np.int64)
    a, b = network_u.edge_a, network_u.edge_b
    col = network_u.member_color
    np.add.at(red_nb, a, (col[b] == RED).astype(np.int64))
    np.add.at(red_nb, b, (col[a] == RED).astype(np.int64))
    deg = network_u.member_degree.astype(np.int64)
    ok = deg > 0
    share = red_nb[ok] / deg[ok]
    series = _bin_aggregate(deg[ok], share, np.ones(ok.sum()), binning)
    series.kind = "connection_ratio"
    return series


__all__ = ["project", "projected_degree_identity", "connection_ratio_by_degree",
           "grow_unipartite", "unipartite_analytics", "UnipartiteParams",
           "fit_unipartite", "FitConfig", "DEFAULT_EDGE_CAP"]
