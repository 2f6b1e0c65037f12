"""Transnational attack-allocation risk engine.

Estimates model parameters from country-level data, builds a layered activity
network over sources and targets, solves a cost-guided absorbing chain for the
expected attack matrix, and evaluates counterfactual defense scenarios.
"""

from .params import (
    BLOCKED,
    DEFAULT_LAMBDA,
    DEFAULT_Q,
    ModelParams,
    SupportWeights,
    WEIGHT_PRESETS,
    is_blocked,
)
from .dataset import (
    CountryRecord,
    DataBundle,
    PairTable,
    ValidationReport,
    bundled_data_dir,
    load_bundle,
    load_country_table,
    load_pair_table,
    load_pre_estimated,
    validate_bundle,
)
from .estimation import (
    estimate_barriers,
    estimate_interception,
    estimate_params,
    estimate_supply,
    estimate_yield,
    impute_survey,
    normalize_min_median,
    raw_barrier,
    supply_sensitivity,
)
from .network import ActivityNetwork, NodeId, build_network, least_cost_to_end, path_cost
from .evader import (
    AttackMatrix,
    EvaderChain,
    attack_matrix,
    enumerate_path_distribution,
    sample_paths,
    target_totals,
    transition_matrix,
)
from .scenario import (
    DeltaMatrix,
    ScenarioSpec,
    apply_scenario,
    deterrence_sweep,
    diff_matrices,
    find_threshold,
    fortress,
    homegrown,
    solve,
)

__version__ = "0.1.0"
