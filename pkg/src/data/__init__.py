"""Data models and structures for the QoS provisioning toolkit."""

from .models import (
    BlockKernel,
    BurstinessParam,
    ChannelSpec,
    ChannelState,
    DelayModel,
    DTMSSource,
    EffectiveCapacityResult,
    MatchMethod,
    MatchResult,
    MFSSource,
    MMPSSource,
    MonteCarloEstimate,
    OnOffChain,
    OptimumRate,
    QosExponent,
    SimConfig,
    SimReport,
    SourceFamily,
    SourceModel,
    theta_value,
)

__all__ = [
    "BlockKernel",
    "BurstinessParam",
    "ChannelSpec",
    "ChannelState",
    "DelayModel",
    "DTMSSource",
    "EffectiveCapacityResult",
    "MatchMethod",
    "MatchResult",
    "MFSSource",
    "MMPSSource",
    "MonteCarloEstimate",
    "OnOffChain",
    "OptimumRate",
    "QosExponent",
    "SimConfig",
    "SimReport",
    "SourceFamily",
    "SourceModel",
    "theta_value",
]
