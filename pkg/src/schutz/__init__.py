"""Coarse geometry of countable discrete inverse semigroups.

Schutzenberger graph fragments, finite-labeling certificates, Folner sets,
property-A witnesses, and finite matrix truncations of the left regular
representation, all with scope-stamped verdicts and exact arithmetic where
it matters.
"""

from .core import (BudgetExceededError, El, FamilyMismatchError, Oracle,
                   UnsupportedOperationError, natural_leq, sigma_related,
                   with_generators, word_ball)
from .families import (BicyclicOracle, BoxZOracle, FiniteGroup,
                       FiniteGroupOracle, FreeGroupOracle, NatOracle,
                       PBOracle, PolycyclicOracle, ProductOracle,
                       parse_family, product_with_group)
from .finite import (FiniteSemigroup, closure, max_group_image, pb_closure,
                     projection_chain)
from .fl import check_fl, fl_cover_form
from .folner import folner_search, neighborhood_ratio, project_product_folner
from .graph import (Dist, Fragment, build_fragment, involution_graph,
                    l_related, max_ball_size, rho_map)
from .lp import lp_optimal_witness, simplex_min
from .qi import check_qi, compose_qi, estimate_qi_constants, surjective_qi_extension
from .realize import realize_graph
from .witness import (ball_average_witness, check_witness,
                      push_witness_to_group_image, tree_ray_witness,
                      uniform_property_a)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
