"""twclab: simulation and capacity-region toolkit for discrete
modulo-additive two-way channels and the three-user MA/DBC network."""

from .alphabet import (
    Pmf,
    conditional_mutual_information,
    convolve_pmf,
    entropy,
    mod_add,
    mod_sub,
)
from .channels import MaDbcChannel, Transcript, TwoWayChannel, run_2twc, run_madbc
from .coding import (
    AdaptiveScheme,
    BlockCode,
    DbcCode,
    EnumerationCapError,
    MacCodePair,
    compose_2twc,
    compose_madbc,
    coset_code_from_seed,
    delayed_copy_feedback_scheme,
    lift_nonadaptive,
    mac_joint_ml_code,
    random_coset_code,
    superposition_dbc_code,
)
from .noise import (
    DelayedCopyPair,
    IidNoise,
    InsufficientDataError,
    MarkovNoise,
    NotErgodicError,
    empirical_entropy_rate,
    entropy_rate,
    noise_from_config,
    sample_path,
    stationary_distribution,
)
from .regions import (
    AuxiliaryInput,
    MaDbcRegion,
    Rectangle2TWC,
    dbc_boundary,
    dbc_brute_force_oracle,
    dbc_rate_pair,
    madbc_region,
    region_2twc,
    region_contains,
    sum_rate_mac,
)
from .seeds import derive_rng
from .verify import (
    SearchResult,
    TrialReport,
    coupled_equivalence,
    coupled_equivalence_madbc,
    exhaustive_code_search,
    monte_carlo,
    rate_capacity_sweep,
    wilson_interval,
)

__version__ = "0.1.0"
