"""Constructible sheaves on finite posets, modelled as representations."""

from .rep import (PosetRep, PseudoFreeComplex, RepError, RepMorphism, check_locally_constant, constant,
                  direct_sum_reps, extend_by_zero, homology_dims_by_label, indicator, open_indicator,
                  pullback, realize, restrict, shift, skyscraper, star_sheaf, tensor, twist_by_dualizing,
                  zero_rep)
from .limits import closed_pushforward, evaluate, holim, open_pushforward, unit_to_pushforward
from .recollement import Recollement, Sequence3, homology_rank, recollement_triangle
from .resolve import (Resolution, ResolutionError, bar_resolution, derived_pushforward, pseudo_free_resolve,
                      resolution_length, resolve)

__all__ = [
    "PosetRep", "PseudoFreeComplex", "RepError", "RepMorphism", "Resolution", "ResolutionError",
    "bar_resolution", "check_locally_constant", "closed_pushforward", "constant", "derived_pushforward",
    "direct_sum_reps", "evaluate", "extend_by_zero", "holim", "homology_dims_by_label", "indicator",
    "open_indicator", "open_pushforward", "pseudo_free_resolve", "pullback", "realize", "resolution_length",
    "resolve", "restrict", "shift", "skyscraper", "star_sheaf", "tensor", "twist_by_dualizing",
    "unit_to_pushforward", "zero_rep", "Recollement", "Sequence3", "homology_rank", "recollement_triangle",
]
