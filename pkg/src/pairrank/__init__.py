"""Toolkit for top-rank-accurate rankings from adaptive pairwise comparisons.

Four layers: top-weighted rank-correlation metrics, the multi-ballot
comparison protocol with Borda scoring and cross-ballot rescaling, a
stochastic voter model to simulate annotation, and a seeded experiment
harness with a CLI.
"""

from .metrics import (
    WeightScheme,
    additive_weights,
    coefficient_suite,
    first_rank_share,
    hyperbolic_weight,
    kendall,
    ranks_from_scores,
    read_ranking_csv,
    spearman,
    trigamma,
    uniform_weights,
    validate_ranking,
    weighted_kendall,
    weighted_spearman,
    write_ranking_csv,
)
from .protocol import (
    BallotRecord,
    ComparisonPlan,
    Diagnostic,
    ProtocolParams,
    ScoreTable,
    VoteOutcome,
    ballot_sizes,
    borda_scores,
    estimate_cost,
    final_ranking,
    generate_ballot_pairs,
    generate_uniform_plan,
    rescale_scores,
    rescale_slope,
    run_protocol,
    select_survivors,
    top_rank_presentations,
    total_comparisons,
    update_running_average,
    validate_params,
    write_scores_csv,
    write_votes_csv,
)
from .voters import (
    MODES,
    SimilarityDistribution,
    SimulatedElectorate,
    VoterParams,
    builtin_similarity,
    load_similarity_file,
    make_distribution,
    perceive,
    sample_voter_pool,
    theoretical_ranking,
    vote,
)
from .experiment import (
    COEFFICIENTS,
    ExperimentConfig,
    ExperimentSummary,
    ReplicateResult,
    config_from_file,
    export_figure_data,
    parse_config_file,
    replicate_seed,
    run_experiment,
    run_replicate,
    sample_cosine_values,
    write_outputs,
)

__version__ = "0.1.0"
