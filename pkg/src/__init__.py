"""QoS Rate - statistical QoS provisioning for fixed-rate wireless links.

A Python package for dimensioning fixed-rate transmission over Rayleigh
block-fading channels modeled as two-state Markov ON/OFF services.

This package provides:
- Effective capacity of the ON/OFF service in closed form
- Effective bandwidth of Markov ON/OFF arrival sources
- Rate matching, throughput-optimal rate search and delay-bound analysis
- A slotted queue simulator for validating the analysis
"""

__version__ = "1.0.0"
__author__ = "Wireless Systems Research Team"

from .channel.effective_capacity import effective_capacity
from .channel.markov_channel import derive_chain, discretize
from .data.models import ChannelSpec, DTMSSource, MFSSource, MMPSSource

__all__ = [
    "ChannelSpec",
    "DTMSSource",
    "MFSSource",
    "MMPSSource",
    "derive_chain",
    "discretize",
    "effective_capacity",
]
