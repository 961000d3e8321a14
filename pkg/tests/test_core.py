import numpy as np
import pytest

from chasmnet import (BLUE, RED, GrowthParams, RunConfig, Variant, grow,
                      recount, validate_params)
from chasmnet.errors import RangeError, VariantConstraintError


def test_valid_params_pass():
    p = GrowthParams(0.5, 0.3, 0.4, 0.7)
    assert validate_params(p) is p


def test_r_above_half_rejected():
    with pytest.raises(RangeError) as exc:
        GrowthParams(0.5, 0.3, 0.6, 0.7)
    assert exc.value.field == "r"


@pytest.mark.parametrize("field,value", [
    ("alpha", 0.0), ("alpha", 1.0), ("eta", 0.0), ("eta", 1.0),
    ("r", 0.0), ("xi", -0.1), ("xi", 1.2), ("rho_p_red", 1.5),
])
def test_boundary_values_rejected(field, value):
    kwargs = dict(alpha=0.5, eta=0.3, r=0.4, xi=0.7)
    kwargs[field] = value
    if field.startswith("rho"):
        kwargs = dict(alpha=0.5, eta=0.3, r=0.4, xi=0.7, **{field: value})
    with pytest.raises(RangeError) as exc:
        GrowthParams(**kwargs)
    assert exc.value.field == field


def test_general_variant_requires_shared_rho():
    with pytest.raises(VariantConstraintError):
        GrowthParams(0.5, 0.3, 0.4, 0.7, 0.3, 0.3, 0.7, 0.7,
                     Variant.SHM_GENERAL)


def test_selective_on_rich_constrains_rho_u():
    with pytest.raises(VariantConstraintError):
        GrowthParams(0.5, 0.3, 0.4, 0.7, 0.3, 0.3, 0.9, 0.9,
                     Variant.SHM_SELECTIVE_ON_RICH)
    p = GrowthParams.shm_selective_on_rich(0.5, 0.3, 0.4, 0.7, 0.3)
    assert p.rho_u_red == p.rho_u_blue == 1.0


def test_selective_on_equal_chance_constrains_rho_p():
    with pytest.raises(VariantConstraintError):
        GrowthParams(0.5, 0.3, 0.4, 0.7, 0.9, 0.9, 0.3, 0.4,
                     Variant.SHM_SELECTIVE_ON_EQUAL_CHANCE)


def test_initial_network_tallies():
    net = grow(GrowthParams(0.5, 0.3, 0.4, 0.7), RunConfig(t_max=2, seed=0))
    t = net.tallies
    assert list(t.members) == [1, 1]
    assert list(t.groups) == [1, 1]
    assert list(t.member_degree) == [1, 1]
    assert list(t.group_size) == [1, 1]
    assert recount(net) == t


def test_recount_matches_incremental_on_grown_network(sims):
    net = sims.get("worked_example", 100_000, seed=9)
    assert recount(net) == net.tallies
    assert net.tallies.group_size.sum() == net.t
    assert net.tallies.member_degree.sum() == net.t


def test_group_sizes_at_least_one(sims):
    net = sims.get("worked_example", 50_000, seed=9)
    assert int(net.group_size.min()) >= 1


def test_size_tally_identities(sims):
    net = sims.get("worked_example", 50_000, seed=9)
    for c in (RED, BLUE):
        sizes = net.group_size[net.group_color == c]
        counts = np.bincount(sizes)
        ks = np.arange(len(counts))
        assert (ks * counts).sum() == net.tallies.group_size[c]
        assert counts.sum() == net.tallies.groups[c]


def test_recount_rejects_dangling_ids(sims):
    net = sims.get("worked_example", 1_000, seed=9)
    bad = net.edge_group.copy()
    bad[0] = net.n_groups + 5
    broken = type(net)(
        member_color=net.member_color, member_degree=net.member_degree,
        group_color=net.group_color, group_size=net.group_size,
        group_creator=net.group_creator, group_birth_step=net.group_birth_step,
        edge_member=net.edge_member, edge_group=bad, tallies=net.tallies)
    with pytest.raises(ValueError):
        recount(broken)


def test_gshm_group_color_matches_creator(sims):
    net = sims.get("worked_example", 20_000, seed=9)
    assert np.array_equal(net.group_color,
                          net.member_color[net.group_creator])


def test_adjusted_gshm_group_color_independent_of_creator():
    p = GrowthParams(0.5, 0.3, 0.3, 0.7, variant=Variant.ADJUSTED_GSHM)
    net = grow(p, RunConfig(t_max=400_000, seed=4))
    red_share = (net.group_color == RED).mean()
    assert abs(red_share - p.r) < 0.01
    # creator color carries no information about group color
    for creator_color in (RED, BLUE):
        sel = net.member_color[net.group_creator] == creator_color
        assert abs((net.group_color[sel] == RED).mean() - p.r) < 0.02
