"""Domain types shared across the package.

Colors are stored as small ints (RED=0, BLUE=1) so that networks can live in
flat numpy arrays; red is the minority affiliation by convention.  Growth
parameters carry the full vector (alpha, eta, r, xi, and the four cross-color
acceptance levels) plus a variant selector, validated at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import RangeError, VariantConstraintError

RED = 0
BLUE = 1


class Color(Enum):
    RED = RED
    BLUE = BLUE

    @property
    def other(self):
        return Color.BLUE if self is Color.RED else Color.RED


class Variant(Enum):
    GSHM = "gshm"
    ADJUSTED_GSHM = "adjusted_gshm"
    SHM_SELECTIVE_ON_RICH = "shm_selective_on_rich"
    SHM_SELECTIVE_ON_EQUAL_CHANCE = "shm_selective_on_equal_chance"
    SHM_GENERAL = "shm_general"


def _require(ok, fld, value, requirement):
    if not ok:
        raise RangeError(fld, value, requirement)


@dataclass(frozen=True)
class GrowthParams:
    """Full parameter vector of the growth process.

    alpha   -- new-member arrival rate, open interval (0, 1)
    eta     -- group-creation rate, open interval (0, 1)
    r       -- minority arrival share, (0, 1/2]
    xi      -- rich-get-richer weight for group choice, [0, 1]
    rho_p_* -- cross-color acceptance when a group was picked size-proportionally
    rho_u_* -- cross-color acceptance when a group was picked uniformly
    """

    alpha: float
    eta: float
    r: float
    xi: float
    rho_p_red: float = 1.0
    rho_p_blue: float = 1.0
    rho_u_red: float = 1.0
    rho_u_blue: float = 1.0
    variant: Variant = Variant.GSHM

    def __post_init__(self):
        validate_params(self)

    # Convenience constructors for the single-rho specializations.
    @classmethod
    def shm_selective_on_rich(cls, alpha, eta, r, xi, rho):
        return cls(alpha, eta, r, xi, rho, rho, 1.0, 1.0,
                   Variant.SHM_SELECTIVE_ON_RICH)

    @classmethod
    def shm_selective_on_equal_chance(cls, alpha, eta, r, xi, rho):
        return cls(alpha, eta, r, xi, 1.0, 1.0, rho, rho,
                   Variant.SHM_SELECTIVE_ON_EQUAL_CHANCE)

    @classmethod
    def shm_general(cls, alpha, eta, r, xi, rho):
        return cls(alpha, eta, r, xi, rho, rho, rho, rho, Variant.SHM_GENERAL)

    def rho_p(self, color):
        return self.rho_p_red if color == RED else self.rho_p_blue

    def rho_u(self, color):
        return self.rho_u_red if color == RED else self.rho_u_blue

    def with_variant(self, variant):
        return replace(self, variant=variant)

    def as_dict(self):
        return {
            "alpha": self.alpha, "eta": self.eta, "r": self.r, "xi": self.xi,
            "rho_p_red": self.rho_p_red, "rho_p_blue": self.rho_p_blue,
            "rho_u_red": self.rho_u_red, "rho_u_blue": self.rho_u_blue,
            "variant": self.variant.value,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        variant = d.pop("variant", Variant.GSHM)
        if isinstance(variant, str):
            variant = Variant(variant)
        return cls(variant=variant, **d)


def validate_params(params: GrowthParams) -> GrowthParams:
    """Check range and variant constraints; returns the params unchanged.

    Raises RangeError naming the violated field, or VariantConstraintError
    when a rho field contradicts the declared SHM variant.  Boundary values
    alpha, eta in {0, 1} are rejected: the growth process is only defined on
    the open intervals.
    """
    p = params
    _require(0.0 < p.alpha < 1.0, "alpha", p.alpha, "0 < alpha < 1")
    _require(0.0 < p.eta < 1.0, "eta", p.eta, "0 < eta < 1")
    _require(0.0 < p.r <= 0.5, "r", p.r, "0 < r <= 1/2")
    _require(0.0 <= p.xi <= 1.0, "xi", p.xi, "0 <= xi <= 1")
    for fld in ("rho_p_red", "rho_p_blue", "rho_u_red", "rho_u_blue"):
        v = getattr(p, fld)
        _require(0.0 <= v <= 1.0, fld, v, "0 <= rho <= 1")

    v = p.variant
    if v is Variant.SHM_SELECTIVE_ON_RICH:
        if not (p.rho_u_red == p.rho_u_blue == 1.0):
            raise VariantConstraintError(
                "selective homophily on rich-get-richer requires rho_u_red = rho_u_blue = 1")
        if p.rho_p_red != p.rho_p_blue:
            raise VariantConstraintError(
                "selective homophily on rich-get-richer uses one shared rho_p")
    elif v is Variant.SHM_SELECTIVE_ON_EQUAL_CHANCE:
        if not (p.rho_p_red == p.rho_p_blue == 1.0):
            raise VariantConstraintError(
                "selective homophily on equal-chance requires rho_p_red = rho_p_blue = 1")
        if p.rho_u_red != p.rho_u_blue:
            raise VariantConstraintError(
                "selective homophily on equal-chance uses one shared rho_u")
    elif v is Variant.SHM_GENERAL:
        rhos = {p.rho_p_red, p.rho_p_blue, p.rho_u_red, p.rho_u_blue}
        if len(rhos) != 1:
            raise VariantConstraintError(
                "general homophily requires one shared rho for all four fields")
    return params


@dataclass
class Tallies:
    """Per-color running totals maintained during growth.

    members[c]       -- member count of color c
    groups[c]        -- group count of color c
    member_degree[c] -- sum of member degrees of color c
    group_size[c]    -- sum of group sizes of color c
    """

    members: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))
    groups: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))
    member_degree: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))
    group_size: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))

    def __eq__(self, other):
        if not isinstance(other, Tallies):
            return NotImplemented
        return (np.array_equal(self.members, other.members)
                and np.array_equal(self.groups, other.groups)
                and np.array_equal(self.member_degree, other.member_degree)
                and np.array_equal(self.group_size, other.group_size))


@dataclass
class BipartiteNetwork:
    """Append-only group-member network in flat arrays.

    One edge is added per step, so the event counter t equals the number of
    edges; member degrees and group sizes count edge endpoints (repeat joins
    are kept as a multiset).  Finalized snapshots are immutable by convention
    and safe to share across threads.
    """

    member_color: np.ndarray      # int8, per member
    member_degree: np.ndarray     # int64, per member
    group_color: np.ndarray       # int8, per group
    group_size: np.ndarray        # int64, per group
    group_creator: np.ndarray     # int64, member id of the creator
    group_birth_step: np.ndarray  # int64, t at creation
    edge_member: np.ndarray       # int64, per edge
    edge_group: np.ndarray        # int64, per edge
    tallies: Tallies
    meta: dict = field(default_factory=dict)
    events: object = None         # engine EventLog when recording was on

    @property
    def t(self):
        return len(self.edge_member)

    @property
    def n_members(self):
        return len(self.member_color)

    @property
    def n_groups(self):
        return len(self.group_color)

    def members(self):
        """Iterate (member_id, color, degree)."""
        for i in range(self.n_members):
            yield i, int(self.member_color[i]), int(self.member_degree[i])

    def groups(self):
        """Iterate (group_id, color, size, creator_id, creation_step)."""
        for g in range(self.n_groups):
            yield (g, int(self.group_color[g]), int(self.group_size[g]),
                   int(self.group_creator[g]), int(self.group_birth_step[g]))

    def group_red_member_mass(self):
        """Per-group count of red edge endpoints (memberships, not unique)."""
        red = (self.member_color[self.edge_member] == RED).astype(np.int64)
        return np.bincount(self.edge_group, weights=red,
                           minlength=self.n_groups).astype(np.int64)

    def with_group_colors(self, colors):
        """Copy of the network with replaced group colors and fixed tallies."""
        colors = np.asarray(colors, dtype=np.int8)
        if colors.shape != self.group_color.shape:
            raise ValueError("group color vector has wrong length")
        out = BipartiteNetwork(
            member_color=self.member_color, member_degree=self.member_degree,
            group_color=colors, group_size=self.group_size,
            group_creator=self.group_creator,
            group_birth_step=self.group_birth_step,
            edge_member=self.edge_member, edge_group=self.edge_group,
            tallies=Tallies(), meta=dict(self.meta),
        )
        out.tallies = recount(out)
        return out


@dataclass
class UnipartiteNetwork:
    """Friendship-style network grown one member (and one edge) at a time.

    Multi-edges are permitted; self-loops are not produced by growth and are
    rejected on ingest.
    """

    member_color: np.ndarray
    member_degree: np.ndarray
    edge_a: np.ndarray
    edge_b: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n_members(self):
        return len(self.member_color)

    @property
    def n_edges(self):
        return len(self.edge_a)


def recount(network: BipartiteNetwork) -> Tallies:
    """Recompute all tallies from the edge list.

    The result must equal the incrementally maintained tallies; a mismatch
    indicates a corrupted network.  Raises on dangling ids.
    """
    n = network
    if n.t:
        if n.edge_member.min() < 0 or n.edge_member.max() >= n.n_members:
            raise ValueError("edge references a member id that does not exist")
        if n.edge_group.min() < 0 or n.edge_group.max() >= n.n_groups:
            raise ValueError("edge references a group id that does not exist")
    out = Tallies()
    out.members = np.bincount(n.member_color, minlength=2).astype(np.int64)
    out.groups = np.bincount(n.group_color, minlength=2).astype(np.int64)
    deg = np.bincount(n.edge_member, minlength=n.n_members)
    size = np.bincount(n.edge_group, minlength=n.n_groups)
    for c in (RED, BLUE):
        out.member_degree[c] = int(deg[n.member_color == c].sum())
        out.group_size[c] = int(size[n.group_color == c].sum())
    return out
