"""chasmnet: growth simulator and analytics for minority/majority disparities
in group-member (bipartite) and friendship (unipartite) networks."""

__version__ = "0.1.0"

from .core import (BLUE, RED, BipartiteNetwork, Color, GrowthParams, Tallies,
                   UnipartiteNetwork, Variant, recount, validate_params)
from .engine import RunConfig, SamplingMode, grow, grow_unipartite
from .analytic import (AnalyticSolution, Chasm, GlassCeiling,
                       UnipartiteParams, solve, solve_alpha_star)

__all__ = [
    "BLUE", "RED", "BipartiteNetwork", "Color", "GrowthParams", "Tallies",
    "UnipartiteNetwork", "Variant", "recount", "validate_params",
    "RunConfig", "SamplingMode", "grow", "grow_unipartite",
    "AnalyticSolution", "Chasm", "GlassCeiling", "UnipartiteParams",
    "solve", "solve_alpha_star", "__version__",
]
