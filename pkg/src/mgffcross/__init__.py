"""Exact crossing and connection probabilities for level lines of the
metric-graph Gaussian free field, with a lattice Monte-Carlo cross-check.

Layers, bottom up:

`combinat`      Dyck paths, planar pair partitions, valence-2 link patterns.
`incidence`     the arrow incidence matrix over pairings and its inverse.
`coulomb`       rational combinations of difference-product monomials and
                their one-point collapse (series extraction at x_v -> x_u).
`partition_fn`  pure partition functions Z_a, their fused descendants, and
                the total mass they must add up to.
`probability`   outcome distributions, rectangle geometry via elliptic
                moduli, and the cluster-pattern dictionary.
`mgff_sim`      square-lattice simulator: DST Poisson solver, per-edge
                percolation, union-find cluster extraction.
`verify`        independent numerical checks (null-field PDEs, Moebius
                covariance, collapse asymptotics, bounds).
`cli`           reproducible command-line runs with manifests.
"""

__version__ = "0.1.0"

from .combinat import (
    DyckPath,
    LinkPattern,
    PairPartition,
    enumerate_dyck_paths,
    enumerate_link_patterns,
    enumerate_pairings,
    make_pairing,
    make_pattern,
    tau,
)
from .errors import (
    CapacityError,
    DivergenceError,
    IncompatiblePartitionsError,
    TruncationLimitError,
)
from .incidence import incidence_matrix, inverse_incidence
from .partition_fn import CONSTANTS, fused_pure_partition, pure_partition, z_mgff_total
from .probability import (
    RectanglePolygon,
    connection_probability,
    crossing_probability,
    outcome_distribution,
    rectangle_distribution,
)

__all__ = [
    "__version__",
    "CapacityError",
    "DivergenceError",
    "IncompatiblePartitionsError",
    "TruncationLimitError",
    "DyckPath",
    "PairPartition",
    "LinkPattern",
    "enumerate_dyck_paths",
    "enumerate_pairings",
    "enumerate_link_patterns",
    "make_pairing",
    "make_pattern",
    "tau",
    "incidence_matrix",
    "inverse_incidence",
    "CONSTANTS",
    "pure_partition",
    "fused_pure_partition",
    "z_mgff_total",
    "connection_probability",
    "crossing_probability",
    "outcome_distribution",
    "rectangle_distribution",
    "RectanglePolygon",
]
