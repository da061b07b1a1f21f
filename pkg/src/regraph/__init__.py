"""Switch-chain sampling of regular graphs and canonical-path bad-pair accounting."""

from .chain import nonincident_pair_count, run, run_batch, step, transition_matrix
from .graph import (
    RegularGraph,
    SwitchMove,
    apply_switch,
    build_graph,
    circulant_start,
    color_difference,
    encode,
    parse_graph,
    serialize_graph,
    symmetric_difference,
)
from .mixing import (
    enumerate_state_space,
    exact_mixing_time,
    spectral_gap,
    theorem_bound,
)

__version__ = "0.1.0"
