"""bloommap: succinct approximate maps from keys to a small value alphabet.

A generalization of the Bloom filter for key-value data: store n pairs
(key, value) where values follow a known distribution, in close to the
information-theoretic minimum number of bits.  Lookups of stored keys
always answer, never with "absent"; absent keys are reported absent
except with probability epsilon, and any wrong answer overstates the
value index with probability at most epsilon.

Two layouts share the same guarantees: a flat one (a block of hash
functions per value) and a tree one that routes each key along a path
shaped like an optimal alphabetic code for the value distribution, which
makes both space and probe counts track the distribution's entropy.
"""

from .bounds import (
    BoundReport,
    lb_false_positive_only,
    lb_general,
    lb_symmetric,
    space_report,
)
from .codetree import (
    CodeTree,
    Geometry,
    assign_hash_counts,
    assign_offsets,
    build_alphabetic_tree,
    certify_error_bounds,
    compute_geometry,
    tree_property_report,
)
from .core import (
    BitArray,
    BloomMap,
    QueryOutcome,
    build_simple,
    build_tree,
    plan_tree_map,
    zero_fraction,
)
from .distribution import (
    ValueDistribution,
    entropy,
    integer_counts,
    load_distribution,
    new_distribution,
    uniform_distribution,
)
from .errors import (
    BloomMapError,
    DuplicateKey,
    FormatError,
    FrozenError,
    InvalidDistribution,
    InvalidEpsilon,
    InvalidScheme,
    IoError,
    UnknownValue,
)
from .harness import (
    ErrorReport,
    PMapSpec,
    SweepConfig,
    build_with_discard,
    generate_pmap,
    measure,
    sweep,
)
from .hashing import HashFamily
from .mapfile import MapFileHeader, load, read_header, save

__version__ = "0.1.0"

__all__ = [
    "BitArray",
    "BloomMap",
    "BloomMapError",
    "BoundReport",
    "CodeTree",
    "DuplicateKey",
    "ErrorReport",
    "FormatError",
    "FrozenError",
    "Geometry",
    "HashFamily",
    "InvalidDistribution",
    "InvalidEpsilon",
    "InvalidScheme",
    "IoError",
    "MapFileHeader",
    "PMapSpec",
    "QueryOutcome",
    "SweepConfig",
    "UnknownValue",
    "ValueDistribution",
    "assign_hash_counts",
    "assign_offsets",
    "build_alphabetic_tree",
    "build_simple",
    "build_tree",
    "build_with_discard",
    "certify_error_bounds",
    "compute_geometry",
    "entropy",
    "generate_pmap",
    "integer_counts",
    "lb_false_positive_only",
    "lb_general",
    "lb_symmetric",
    "load",
    "load_distribution",
    "measure",
    "new_distribution",
    "plan_tree_map",
    "read_header",
    "save",
    "space_report",
    "sweep",
    "tree_property_report",
    "uniform_distribution",
    "zero_fraction",
]
