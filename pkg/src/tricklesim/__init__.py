"""Trickle dissemination over duty-cycled CSMA/CA: simulator and closed-form analysis."""
from .analysis import (
    expected_redundant,
    incomplete_beta_half,
    mc_single_hop,
    p_bo_2,
    p_bo_n,
    p_n_b,
)
from .config import ConfigError, ScenarioConfig, parse_config
from .engine import EventQueue, RngStream
from .mac import CsmaMac, Frame, MacParams, Variant
from .radio import RadioMedium, RdcConfig
from .scenarios import (
    Metrics,
    Simulation,
    aggregate,
    make_bottleneck4,
    make_clique,
    make_grid,
    run_many,
    run_replication,
)
from .trickle import Trickle, TrickleParams, TrickleState

__version__ = "0.1.0"
