"""Best-arm identification for bandits with graph side information."""
from .engine import RunConfig, RunTrace, grub_run, zeta_grub_run
from .estimator import ConfidenceParams, DesignState, init_design, mean_estimate, record_pull
from .graph import SimilarityGraph, build_laplacian, connected_components, gamma_closeness, smoothness
from .influence import InfluenceTable, diag_upper_bound, influence_factor, influence_table, k_matrix
from .policy import PolicyKind, next_arm

__version__ = "0.1.0"
