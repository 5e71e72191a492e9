"""Giant components of random multipartite graphs with given degrees.

Analytic side: the edge-biased mean matrix, its Perron-Frobenius
eigenvalue and the branching-process survival probability.  Empirical
side: configuration-model sampling and component exploration.
"""
from ._kernels import BACKEND
from .branching import (OffspringLaw, SurvivalSolution, build_offspring_law,
                        extinction_fixed_point, simulate_total_size, survival_curve,
                        survival_monte_carlo)
from .configuration import CloneGraph, is_simple, sample_configuration, sample_simple
from .degrees import (DegreeSequence, DegreeSpec, load_sequence, load_spec, realize_sequence,
                      save_sequence, save_spec, sequence_stats, validate_spec)
from .exploration import (ComponentCensus, Event, ExplorationState, explore_components,
                          step_delta, transition_distribution, union_find_components)
from .meanmatrix import (MeanMatrix, SpectralResult, bipartite_criterion, build_mean_matrix,
                         check_irreducible, perron_eigenpair)

__version__ = "0.1.0"
