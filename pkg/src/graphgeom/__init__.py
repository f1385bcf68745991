"""Graph-geometry toolkit: curvature, spectral encodings, rewiring and their checks."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigurationError,
    DegenerateLabelsError,
    GraphGeomError,
    GraphInputError,
    InsufficientSpectrumError,
    NumericError,
)
from .graph import Graph, LabeledGraph, build_graph, degrees, symmetric_difference_count  # noqa: E402
from .curvature import EdgeScoreMap, forman_curvature, local_curvature_profile  # noqa: E402
from .metrics import (  # noqa: E402
    JointDistribution,
    MetricReport,
    adjusted_homophily,
    conditional_edge_label_information,
    edge_homophily,
    label_informativeness,
)
from .spectral import lappe, normalized_adjacency, projection_residual, propagate, spectral_decomposition  # noqa: E402
