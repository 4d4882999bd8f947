"""Equilibrium-state analysis for finite directed graphs.

Parses multigraphs, computes connected-component spectral data, and builds
the simplex of KMS equilibrium states of the gauge action on the associated
Toeplitz algebra at any inverse temperature.
"""

from .graph import (
    Component,
    DirectedGraph,
    Edge,
    GraphParseError,
    VertexSet,
    hereditary_closure,
    parse_graph,
    path_count,
    quotient_graph,
    saturation,
    seneta_order,
    sources,
    strongly_connected_components,
    talks_to,
)
from .kms import (
    CriticalOf,
    Mixture,
    Numeric,
    PhiBetaV,
    PsiC,
    SimplexDescriptor,
    StateMeasure,
    H_beta,
    K_beta,
    beta_v,
    beta_value,
    critical_temperatures,
    eval_state,
    factors_through_graph_algebra,
    general_state_measure,
    kms_simplex,
    minimal_critical_components,
    perron_check,
    phi_beta_v_measure,
    psi_C_measure,
    state_type,
    z_vector,
)
from .spectral import (
    ConvergenceError,
    ResolventQuery,
    SpectralData,
    period,
    perron_vector,
    resolvent_query,
    resolvent_series,
    resolvent_solve,
    spectral_radius,
    y_vector,
)

__all__ = [
    "Component",
    "ConvergenceError",
    "CriticalOf",
    "DirectedGraph",
    "Edge",
    "GraphParseError",
    "Mixture",
    "Numeric",
    "PhiBetaV",
    "PsiC",
    "ResolventQuery",
    "SimplexDescriptor",
    "SpectralData",
    "StateMeasure",
    "VertexSet",
    "H_beta",
    "K_beta",
    "beta_v",
    "beta_value",
    "critical_temperatures",
    "eval_state",
    "factors_through_graph_algebra",
    "general_state_measure",
    "hereditary_closure",
    "kms_simplex",
    "minimal_critical_components",
    "parse_graph",
    "path_count",
    "period",
    "perron_check",
    "perron_vector",
    "phi_beta_v_measure",
    "psi_C_measure",
    "quotient_graph",
    "resolvent_query",
    "resolvent_series",
    "resolvent_solve",
    "saturation",
    "seneta_order",
    "sources",
    "spectral_radius",
    "state_type",
    "strongly_connected_components",
    "talks_to",
    "z_vector",
    "y_vector",
]

__version__ = "0.1.0"
