"""Classical hidden-variable simulations of EPR-type correlations.

Three local models (Peres' bomb fragments, a generalized urn of two-valued
states, an elastic band with a random breaking point), non-adaptive and
context-communicating protocols over them, CHSH evaluation, exact facet
enumeration of correlation polytopes and squeezed-band deformations.
"""

from contextsim.band import (
    BandShare,
    adaptive_expectation,
    band_outcome,
    pair_expectation,
    prob_minus,
    prob_plus,
    single_expectation,
    uniform_orientation_expectation,
)
from contextsim.peres import peres_correlation_analytic, peres_outcome, peres_pair_outcomes
from contextsim.polytope import Facet, chsh_sum, enumerate_facets, product_vertices, raw_vertices
from contextsim.protocol import (
    CANONICAL_SETTINGS,
    SettingsQuad,
    estimate_chsh,
    estimate_curve,
    reproduce_table1,
    run_adaptive_trial,
    run_nonadaptive_trial,
)

__version__ = "0.1.0"

__all__ = [
    "BandShare",
    "CANONICAL_SETTINGS",
    "Facet",
    "SettingsQuad",
    "adaptive_expectation",
    "band_outcome",
    "chsh_sum",
    "enumerate_facets",
    "estimate_chsh",
    "estimate_curve",
    "pair_expectation",
    "peres_correlation_analytic",
    "peres_outcome",
    "peres_pair_outcomes",
    "prob_minus",
    "prob_plus",
    "product_vertices",
    "raw_vertices",
    "reproduce_table1",
    "run_adaptive_trial",
    "run_nonadaptive_trial",
    "single_expectation",
    "uniform_orientation_expectation",
]
