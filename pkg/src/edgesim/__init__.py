"""Latency simulator for fog, 5G MEC and hybrid edge deployments."""

from edgesim.model import (
    LatencyBreakdown,
    MotionFactor,
    ScenarioParams,
    TierAllocation,
    TierSpec,
    default_scenario,
    ln_hop_factor,
    processing_time,
    total_latency,
    transmission_time,
)
from edgesim.policy import PolicyConfig, default_policy, split
from edgesim.sim import ConsistencyError, PointResult, RngState, build_topology, run_scenario, sample_alpha
from edgesim.sweep import SweepConfig, SweepResult, compare, emit, run_sweep

__version__ = "0.1.0"
