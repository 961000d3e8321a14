import json

import numpy as np
import pytest
from scipy import stats

from chasmnet import (BLUE, RED, GrowthParams, RunConfig, SamplingMode, grow,
                      grow_unipartite)
from chasmnet.analytic import UnipartiteParams, solve_alpha_star, solve_alpha_star_u
from chasmnet.engine import (literal_connection_counts, prefix_snapshot,
                             replica_seeds, step_distribution)
from chasmnet.errors import PathologicalParametersError, RangeError

WORKED = GrowthParams(0.5, 0.2, 0.3, 0.7, 0.6, 0.8, 0.9, 0.7)


def test_t_max_2_is_initial_network():
    net = grow(WORKED, RunConfig(t_max=2, seed=123))
    assert net.t == 2
    assert list(net.member_color) == [RED, BLUE]
    assert list(net.group_color) == [RED, BLUE]
    assert list(net.edge_member) == [0, 1]
    assert list(net.edge_group) == [0, 1]


def test_t_max_below_2_rejected():
    with pytest.raises(RangeError):
        RunConfig(t_max=1, seed=0)


def test_determinism_same_seed():
    a = grow(WORKED, RunConfig(t_max=20_000, seed=77))
    b = grow(WORKED, RunConfig(t_max=20_000, seed=77))
    for x, y in ((a.edge_member, b.edge_member), (a.edge_group, b.edge_group),
                 (a.member_color, b.member_color), (a.group_color, b.group_color)):
        assert np.array_equal(x, y)
    c = grow(WORKED, RunConfig(t_max=20_000, seed=78))
    assert not np.array_equal(a.edge_group, c.edge_group)


def test_prefix_property():
    long = grow(WORKED, RunConfig(t_max=30_000, seed=5))
    short = grow(WORKED, RunConfig(t_max=10_000, seed=5))
    pre = prefix_snapshot(long, 10_000)
    assert np.array_equal(pre.edge_member, short.edge_member)
    assert np.array_equal(pre.edge_group, short.edge_group)
    assert pre.tallies == short.tallies


def test_no_homophily_shares_approach_r():
    p = GrowthParams(0.5, 0.3, 0.3, 0.7)  # all rho = 1
    net = grow(p, RunConfig(t_max=1_000_000, seed=11))
    member_share = net.tallies.member_degree[RED] / net.t
    group_share = net.tallies.group_size[RED] / net.t
    assert abs(member_share - p.r) < 0.01
    assert abs(group_share - p.r) < 0.01  # alpha* = r when all rho = 1


def test_group_degree_share_matches_alpha_star():
    alpha_star = solve_alpha_star(WORKED)
    net = grow(WORKED, RunConfig(t_max=1_000_000, seed=13))
    assert abs(net.tallies.group_size[RED] / net.t - alpha_star) < 0.01


def test_step_distribution_no_rejection_formula(sims):
    p = GrowthParams(0.5, 0.3, 0.3, 0.7)
    net = grow(p, RunConfig(t_max=500, seed=3))
    probs = step_distribution(net, p, member_id=0)
    expected = (p.xi * net.group_size / net.t
                + (1 - p.xi) / net.n_groups)
    np.testing.assert_allclose(probs, expected / expected.sum(), rtol=1e-12)


def test_step_distribution_zero_rho_restricts_support():
    p = GrowthParams(0.5, 0.3, 0.3, 1.0, rho_p_red=0.0)
    net = grow(p, RunConfig(t_max=500, seed=3))
    red_member = int(np.flatnonzero(net.member_color == RED)[0])
    probs = step_distribution(net, p, red_member)
    blue = net.group_color == BLUE
    assert probs[blue].sum() == 0.0
    red_sizes = net.group_size[~blue].astype(float)
    np.testing.assert_allclose(probs[~blue], red_sizes / red_sizes.sum(),
                               rtol=1e-12)


def chi2_pvalue(network, params, member, n_draws, seed):
    probs = step_distribution(network, params, member)
    counts = literal_connection_counts(network, params, member, n_draws, seed)
    exp = probs * n_draws
    keep = exp >= 5
    obs = counts[keep]
    expected = exp[keep]
    if (~keep).any() and exp[~keep].sum() > 0:
        obs = np.append(obs, counts[~keep].sum())
        expected = np.append(expected, exp[~keep].sum())
    expected *= obs.sum() / expected.sum()
    return stats.chisquare(obs, expected).pvalue


def test_mode_equivalence_chi2():
    p = GrowthParams(0.5, 0.35, 0.3, 0.7, 0.3, 0.8, 0.9, 0.4)
    net = grow(p, RunConfig(t_max=60, seed=21))
    pv = chi2_pvalue(net, p, member=0, n_draws=1_000_000, seed=99)
    assert pv > 0.01


def test_literal_mode_grows_same_distributional_shares():
    p = GrowthParams(0.5, 0.3, 0.3, 0.7, 0.5, 0.8, 0.9, 0.6)
    lit = grow(p, RunConfig(t_max=300_000, seed=42,
                            sampling=SamplingMode.LITERAL_REJECTION))
    mix = grow(p, RunConfig(t_max=300_000, seed=43))
    assert abs(lit.tallies.group_size[RED] / lit.t
               - mix.tallies.group_size[RED] / mix.t) < 0.02


def test_literal_guard_trips():
    p = GrowthParams(0.5, 0.05, 0.5, 1.0, rho_p_red=0.0, rho_p_blue=0.0)
    with pytest.raises(PathologicalParametersError):
        grow(p, RunConfig(t_max=5_000, seed=1,
                          sampling=SamplingMode.LITERAL_REJECTION,
                          rejection_guard=1))


def test_event_log_roundtrip(tmp_path):
    net = grow(WORKED, RunConfig(t_max=500, seed=9, record_events=True,
                                 sampling=SamplingMode.LITERAL_REJECTION))
    assert net.events is not None and len(net.events) == 498  # steps 3..500
    path = tmp_path / "events.jsonl"
    net.events.to_jsonl(path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 498
    first, last = json.loads(lines[0]), json.loads(lines[-1])
    assert first["t"] == 3 and last["t"] == 500
    assert last["action"] in ("new_member", "reuse_member")
    assert ("created_group" in last) != ("joined_group" in last)
    if "joined_group" in last:
        assert last["mechanism"] in ("pref", "uniform")
    assert last["rejections"] >= 0
    # events replay the edge list beyond the bootstrap pair
    ev = net.events
    assert np.array_equal(ev.member, net.edge_member[2:])
    assert np.array_equal(ev.group, net.edge_group[2:])


def test_color_exchangeability_at_rho_one():
    # with all rho = 1 and r = 1/2 the two colors are exchangeable: red and
    # blue group sizes are identically distributed (KS over pooled replicas)
    red_sizes, blue_sizes = [], []
    for s in range(5):
        net = grow(GrowthParams(0.5, 0.3, 0.5, 0.7), RunConfig(t_max=40_000, seed=s))
        red_sizes.append(net.group_size[net.group_color == RED])
        blue_sizes.append(net.group_size[net.group_color == BLUE])
    pv = stats.ks_2samp(np.concatenate(red_sizes), np.concatenate(blue_sizes)).pvalue
    assert pv > 0.01
    # at r < 1/2, the mirrored roles show up as the r / (1-r) arrival asymmetry
    net = grow(GrowthParams(0.5, 0.3, 0.3, 0.7), RunConfig(t_max=200_000, seed=0))
    assert abs(net.tallies.groups[RED] / net.tallies.groups[BLUE] - 0.3 / 0.7) < 0.03


def test_replica_seeds_documented_assignment():
    assert replica_seeds(100, 3) == [100, 101, 102]


# --- unipartite growth ---

def test_unipartite_initial():
    net = grow_unipartite(UnipartiteParams(0.5, 0.5), n=2, seed=0)
    assert net.n_members == 2
    assert net.n_edges == 1
    assert list(net.member_color) == [RED, BLUE]


def test_unipartite_edge_count_and_no_self_loops():
    net = grow_unipartite(UnipartiteParams(0.3, 0.7, 0.5, 0.8, 0.9, 0.6),
                          n=50_000, seed=2)
    assert net.n_edges == net.n_members - 1
    assert (net.edge_a != net.edge_b).all()
    deg = np.bincount(net.edge_a, minlength=net.n_members) \
        + np.bincount(net.edge_b, minlength=net.n_members)
    assert np.array_equal(deg, net.member_degree)


def test_unipartite_symmetric_share():
    net = grow_unipartite(UnipartiteParams(0.5, 0.7, 0.6, 0.6, 0.8, 0.8),
                          n=1_000_000, seed=3)
    red_deg = net.member_degree[net.member_color == RED].sum()
    assert abs(red_deg / net.member_degree.sum() - 0.5) < 0.01


def test_unipartite_degree_share_matches_fixed_point():
    up = UnipartiteParams(0.3, 0.7, 0.6, 0.8, 0.9, 0.7)
    au = solve_alpha_star_u(up)
    net = grow_unipartite(up, n=1_000_000, seed=5)
    red_deg = net.member_degree[net.member_color == RED].sum()
    assert abs(red_deg / net.member_degree.sum() - au) < 0.01
