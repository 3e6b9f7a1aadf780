"""Edge-weighted graph coloring pattern division for two-layer massive MIMO precoding."""

__version__ = "0.1.0"

from .channel import (
    ClusterGeometry,
    ClusterSpectrum,
    ConfigError,
    SupportSet,
    SystemConfig,
    covariance,
    dft_column,
    dft_matrix,
    eigen_spectrum,
    place_clusters,
    sample_channel,
    support_set,
)
from .asrgraph import (
    EdgeWeightedGraph,
    OverlapClass,
    build_graph,
    classify_overlap,
    degree_order,
    overlap_weight,
)
from .coloring import (
    PatternAssignment,
    SolverTrace,
    esa_oracle,
    ewvc_pd,
    greedy_baseline,
    is_independent,
    objective_f,
    random_assignment,
)
from .precoding import (
    PreBeamformer,
    SecondLayerPrecoder,
    cluster_rate,
    effective_channel,
    feasibility,
    gamma_eta,
    prebeamformer,
    residual_ici,
    zf_precoder,
)
from .simharness import ExperimentConfig, run_experiment, run_trial, write_report
