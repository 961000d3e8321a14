import numpy as np
import pytest

from chasmnet import BLUE, RED, GrowthParams, RunConfig, grow
from chasmnet.analytic import member_ratio_curve, solve
from chasmnet.errors import InsufficientSupportError
from chasmnet.metrics import (Binning, RatioSeries, _bin_aggregate, _pava,
                              color_groups_by_ratio, detect_chasm,
                              group_ratio_by_size, homophily_pair_test,
                              member_ratio_by_size, power_law_exponent,
                              top_k_tail_ratio)

SYMMETRIC = GrowthParams(0.5, 0.3, 0.5, 0.7, 0.6, 0.6, 0.8, 0.8)
SHOWCASE = GrowthParams(0.45, 0.12, 0.37, 0.80, 0.40, 0.25, 0.20, 0.80)


def make_series(ratios, support=100):
    n = len(ratios)
    ks = np.arange(1, n + 1)
    return RatioSeries(ks, ks, np.asarray(ratios, float),
                       np.full(n, support, dtype=np.int64))


# --- binning ---

def test_binning_edges_unit_then_log():
    edges = Binning(unit_max=5, log_factor=1.5).edges(20)
    assert edges[:5] == [(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]
    assert all(lo <= hi for lo, hi in edges)
    assert edges[5][0] == 6
    covered = [k for lo, hi in edges for k in range(lo, hi + 1)]
    assert covered == list(range(1, 21))


def test_bin_merge_stays_within_bounds():
    # merging adjacent bins never moves a ratio outside the merged range
    sizes = np.array([1, 1, 2, 2, 3, 3, 4, 4])
    vals = np.array([0.2, 0.4, 0.5, 0.7, 0.1, 0.3, 0.9, 0.5])
    fine = _bin_aggregate(sizes, vals, np.ones(8), Binning(unit_max=100))
    coarse = _bin_aggregate(sizes, vals, np.ones(8), Binning(unit_max=0, log_factor=4.0))
    for lo, hi, ratio, _ in coarse.rows():
        sel = (fine.bin_lo >= lo) & (fine.bin_hi <= hi)
        assert fine.ratio[sel].min() - 1e-12 <= ratio <= fine.ratio[sel].max() + 1e-12


# --- group coloring ---

def test_color_groups_all_red_members():
    net = grow(SYMMETRIC, RunConfig(t_max=2_000, seed=1))
    forced = type(net)(
        member_color=np.zeros_like(net.member_color),
        member_degree=net.member_degree, group_color=net.group_color,
        group_size=net.group_size, group_creator=net.group_creator,
        group_birth_step=net.group_birth_step, edge_member=net.edge_member,
        edge_group=net.edge_group, tallies=net.tallies)
    colored = color_groups_by_ratio(forced, threshold=0.425)
    assert (colored.group_color == RED).all()


def test_color_groups_threshold_strictness():
    net = grow(SYMMETRIC, RunConfig(t_max=5_000, seed=2))
    colored = color_groups_by_ratio(net, threshold=0.425)
    share = colored.group_red_member_mass() / colored.group_size
    assert np.array_equal(colored.group_color == RED, share > 0.425)
    assert colored.meta["group_coloring"]["threshold"] == 0.425


def test_ratio_and_creator_coloring_agree_on_classification(sims):
    # the two coloring schemes must agree on the chasm / ceiling verdicts
    # (the equivalence claim covers classification, not the exact turning k)
    net = sims.get("showcase_chasm", 2_000_000)
    recolored = color_groups_by_ratio(net)
    for network in (net, recolored):
        finding = detect_chasm(group_ratio_by_size(network), min_support=200)
        assert finding.decided and finding.direction == "up_then_down"
        tail = top_k_tail_ratio(network, k_schedule=[net.t ** (1 / 2.35)])
        assert tail.ratio()[0] < 1.0  # ceiling against red either way


# --- ratio curves ---

def test_group_ratio_symmetric(sims):
    net = grow(SYMMETRIC, RunConfig(t_max=500_000, seed=3))
    series = group_ratio_by_size(net).filtered(500)
    assert np.abs(series.ratio - 0.5).max() < 0.05


def test_member_ratio_symmetric():
    net = grow(SYMMETRIC, RunConfig(t_max=500_000, seed=4))
    series = member_ratio_by_size(net).filtered(500)
    assert np.abs(series.ratio - 0.5).max() < 0.05


def test_member_ratio_matches_analytic_curve(sims):
    net = sims.get("showcase_chasm", 10_000_000)
    series = member_ratio_by_size(net).filtered(500)
    curve = member_ratio_curve(SHOWCASE, int(series.bin_hi.max()) + 1)
    gaps = []
    for lo, hi, ratio, _ in series.rows():
        ana = curve.values[lo - 1:hi].mean()
        gaps.append(abs(ratio - ana))
    assert max(gaps) < 0.03


# --- homophily pair test ---

def test_homophily_single_color_zero_cross():
    net = grow(SYMMETRIC, RunConfig(t_max=2_000, seed=5))
    forced = type(net)(
        member_color=np.zeros_like(net.member_color),
        member_degree=net.member_degree, group_color=net.group_color,
        group_size=net.group_size, group_creator=net.group_creator,
        group_birth_step=net.group_birth_step, edge_member=net.edge_member,
        edge_group=net.edge_group, tallies=net.tallies)
    res = homophily_pair_test(forced)
    assert res.observed_cross_share == 0.0


def test_homophily_pair_identity(sims):
    net = sims.get("worked_example", 50_000, seed=9)
    res = homophily_pair_test(net)
    s = net.group_size.astype(float)
    assert res.total_pairs == (s * (s - 1) / 2).sum()
    assert 0.0 <= res.observed_cross_share <= 1.0


def test_homophily_no_rejection_matches_mixing():
    p = GrowthParams(0.5, 0.3, 0.3, 0.7)  # all rho = 1
    net = grow(p, RunConfig(t_max=1_000_000, seed=6))
    res = homophily_pair_test(net)
    assert abs(res.observed_cross_share - res.expected_cross_share) < 0.01
    assert res.expected_cross_share == pytest.approx(
        2 * (net.tallies.members[RED] / net.tallies.members.sum())
        * (net.tallies.members[BLUE] / net.tallies.members.sum()))


def test_homophily_detected_with_rejection():
    p = GrowthParams.shm_selective_on_rich(0.5, 0.3, 0.3, 0.7, 0.3)
    net = grow(p, RunConfig(t_max=1_000_000, seed=7))
    res = homophily_pair_test(net)
    assert res.homophilous
    assert res.observed_cross_share < res.expected_cross_share - 0.01


# --- power-law exponent ---

def test_exponent_on_exact_zipf(rng):
    xs = rng.zipf(2.5, size=100_000)
    fit = power_law_exponent(xs, method="mle")
    assert 2.45 <= fit.beta <= 2.55
    assert fit.stderr < 0.05


def test_exponent_ls_method(rng):
    xs = rng.zipf(2.5, size=100_000)
    fit = power_law_exponent(xs, method="ls", k_min=2)
    assert abs(fit.beta - 2.5) < 0.25


def test_exponent_member_degrees():
    p = GrowthParams(0.5, 0.3, 0.3, 0.7, 0.6, 0.8, 0.9, 0.7)
    net = grow(p, RunConfig(t_max=2_000_000, seed=8))
    fit = power_law_exponent(net.member_degree, method="mle")
    assert abs(fit.beta - 3.0) < 0.15  # 1 + 1/(1-alpha)


def test_exponent_errors():
    with pytest.raises(InsufficientSupportError):
        power_law_exponent([2, 3, 4])
    with pytest.raises(InsufficientSupportError):
        power_law_exponent(np.full(500, 7))


# --- chasm detection ---

def test_pava_reproduces_monotone_input():
    y = np.array([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(_pava(y, np.ones(3)), y)
    merged = _pava(np.array([1.0, 3.0, 2.0]), np.ones(3))
    assert merged[1] == merged[2] == 2.5


def test_detect_chasm_decreasing_series():
    finding = detect_chasm(make_series(np.linspace(0.8, 0.2, 12)))
    assert not finding.decided
    assert finding.direction == "decreasing"
    assert finding.turning_point is None


def test_detect_chasm_on_analytic_ratio_sequence():
    sol = solve(SHOWCASE)
    from chasmnet.analytic import group_size_distribution, ratio_flip_index
    dist = group_size_distribution(SHOWCASE, 40)
    ratio = dist.ratio()
    shares = ratio / (1 + ratio)  # red share per size, a clean unimodal curve
    finding = detect_chasm(make_series(shares, support=10_000_000), min_support=1)
    assert finding.decided
    assert finding.turning_point == ratio_flip_index(sol.k_star)


def test_detect_chasm_flat_noisy_series():
    # symmetric-simulation oracle: the flat-but-noisy ratio curve must not
    # trip the unimodal decision
    net = grow(SYMMETRIC, RunConfig(t_max=500_000, seed=12))
    finding = detect_chasm(group_ratio_by_size(net), min_support=50)
    assert not finding.decided


def test_detect_chasm_insufficient_support():
    with pytest.raises(InsufficientSupportError):
        detect_chasm(make_series([0.1, 0.2, 0.3], support=10))


def test_detect_chasm_empirical_turning_point(sims):
    net = sims.get("showcase_chasm", 10_000_000)
    series = group_ratio_by_size(net)
    finding = detect_chasm(series, min_support=50)
    sol = solve(SHOWCASE)
    assert finding.decided
    assert abs(finding.turning_point - (int(np.ceil(sol.k_star)) - 1)) <= 2


# --- tail ratios ---

def test_tail_ratio_symmetric():
    net = grow(SYMMETRIC, RunConfig(t_max=500_000, seed=9))
    tail = top_k_tail_ratio(net, k_schedule=[1, 2, 4, 8, 16])
    ratio = tail.ratio()
    assert np.abs(ratio[:4] - 1.0).max() < 0.1


def test_tail_ratio_all_red_sentinel():
    net = grow(SYMMETRIC, RunConfig(t_max=2_000, seed=10))
    forced = net.with_group_colors(np.zeros_like(net.group_color))
    tail = top_k_tail_ratio(forced, k_schedule=[1, 2])
    assert (tail.top_blue == 0).all()
    assert (tail.ratio() == np.inf).all()


def test_tail_ratio_default_schedule_uses_beta(sims):
    net = sims.get("showcase_chasm", 1_000_000)
    sol = solve(SHOWCASE)
    tail = top_k_tail_ratio(net, beta_blue=sol.beta_blue)
    assert len(tail.k) == 1
    assert tail.k[0] == pytest.approx(net.t ** (1 / sol.beta_blue))
