"""Closed-form evaluation of connected multi-port networks."""

from .cascade import (
    CascadeCache,
    Supersystem,
    cascade_load_s,
    cascade_load_y,
    cascade_load_z,
    connect_supersystem,
    redheffer_star,
    redheffer_star_y,
    redheffer_star_z,
)
from .connection import (
    ConnectionScheme,
    ConnectionSystem,
    delta_system,
    embed_connection,
    global_connection,
    quasi_delta,
)
from .errors import *  # noqa: F401,F403
from .graph import (
    Graph,
    GraphSolution,
    glue_graphs,
    glue_many,
    graph_m_matrix,
    graph_scattering,
    random_graph,
    subgraph_interface,
)
from .linalg import BlockLayout, block_diag, invert_offdiag_identity, solve_linear
from .network import (
    NetworkSystem,
    PortPartition,
    Representation,
    partition_blocks,
    s_from_y,
    s_from_z,
    waves_to_potential_flux,
    y_from_s,
    y_from_z,
    z_from_s,
    z_from_y,
)
from .reduction import (
    ReductionPlan,
    evaluate,
    evaluate_admittance,
    evaluate_impedance,
    iterative_cascade,
    plan_reduction,
)
from .update import SubsystemUpdate, update_subsystem
from .waves import WaveMaps, connected_waves, internal_vj, wave_maps

__version__ = "0.1.0"
