import numpy as np
import pytest

from chasmnet import GrowthParams, RunConfig, grow
from chasmnet.analytic import UnipartiteParams, unipartite_analytics
from chasmnet.core import BipartiteNetwork, Tallies, recount
from chasmnet.engine import grow_unipartite
from chasmnet.errors import MemoryGuardError
from chasmnet.unipartite import (connection_ratio_by_degree, project,
                                 projected_degree_identity)


def tiny_network(memberships, member_colors):
    """Hand-built bipartite network from a list of (member, group) pairs."""
    em = np.array([m for m, _ in memberships], np.int64)
    eg = np.array([g for _, g in memberships], np.int64)
    n_members = em.max() + 1
    n_groups = eg.max() + 1
    creators = [em[eg == g][0] for g in range(n_groups)]
    net = BipartiteNetwork(
        member_color=np.asarray(member_colors, np.int8),
        member_degree=np.bincount(em, minlength=n_members).astype(np.int64),
        group_color=np.zeros(n_groups, np.int8),
        group_size=np.bincount(eg, minlength=n_groups).astype(np.int64),
        group_creator=np.asarray(creators, np.int64),
        group_birth_step=np.arange(1, n_groups + 1, dtype=np.int64),
        edge_member=em, edge_group=eg, tallies=Tallies())
    net.tallies = recount(net)
    return net


def test_project_triangle():
    net = tiny_network([(0, 0), (1, 0), (2, 0)], [0, 1, 0])
    uni = project(net)
    assert uni.n_edges == 3
    pairs = sorted(zip(uni.edge_a.tolist(), uni.edge_b.tolist()))
    assert pairs == [(0, 1), (0, 2), (1, 2)]


def test_project_shared_pair_gets_double_edge():
    net = tiny_network([(0, 0), (1, 0), (0, 1), (1, 1)], [0, 1])
    uni = project(net)
    assert uni.n_edges == 2
    assert uni.member_degree.tolist() == [2, 2]
    collapsed = project(net, collapse_multi=True)
    assert collapsed.n_edges == 1


def test_project_dedupes_repeat_joins_within_group():
    # a member joining the same group twice is one person in the room
    net = tiny_network([(0, 0), (1, 0), (1, 0)], [0, 1])
    uni = project(net)
    assert uni.n_edges == 1
    assert (uni.edge_a != uni.edge_b).all()


def test_projection_degree_identity(sims):
    net = sims.get("symmetric_steep", 100_000)
    uni = project(net)
    assert projected_degree_identity(net, uni)


def test_projection_memory_guard():
    net = tiny_network([(i, 0) for i in range(60)], [0] * 60)
    with pytest.raises(MemoryGuardError) as exc:
        project(net, max_edges=100)
    assert exc.value.needed == 60 * 59 // 2
    assert "raise max_edges" in str(exc.value)


def test_connection_ratio_symmetric_native():
    up = UnipartiteParams(0.5, 0.7, 0.6, 0.6, 0.8, 0.8)
    net = grow_unipartite(up, 1_000_000, seed=40)
    series = connection_ratio_by_degree(net).filtered(500)
    assert np.abs(series.ratio - 0.5).max() < 0.02


def test_connection_ratio_matches_analytic():
    up = UnipartiteParams(0.3, 0.7, 0.4, 0.8, 0.9, 0.5)
    net = grow_unipartite(up, 2_000_000, seed=41)
    series = connection_ratio_by_degree(net).filtered(500)
    ua = unipartite_analytics(up, int(series.bin_hi.max()) + 1)
    gaps = []
    for lo, hi, ratio, _ in series.rows():
        ana = ua.connection_ratio[lo - 1:hi].mean()
        gaps.append(abs(ratio - ana))
    assert max(gaps) < 0.03


def test_connection_ratio_counts_multiplicity():
    net = tiny_network([(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)], [0, 1, 0])
    uni = project(net)
    series = connection_ratio_by_degree(uni)
    # degree-3 members: 0 (red) sees 1,1,2 -> red share 1/3; 1 (blue) sees
    # 0,0,2 -> red share 1; the bin averages the two
    deg3 = series.ratio[series.bin_lo == 3]
    assert deg3[0] == pytest.approx((1/3 + 1.0) / 2)
