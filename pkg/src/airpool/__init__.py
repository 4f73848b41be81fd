"""Over-the-air multi-view feature pooling.

A simulation and optimization toolkit for pooling distributed sensor
features directly through a multi-access channel: the protocol itself
(`pooling`), feature-distribution moments (`features`), the fading channel
and latency models (`channel`), error bounds and accuracy translation
(`analysis`), configuration-parameter selection (`optimizer`), a synthetic
end-to-end recognition task (`sensing`), scalar special functions
(`specfun`), and batch experiment drivers (`experiments`, `cli`).
"""

from ._mc import MonteCarloEstimate
from .channel import SystemParams
from .features import FeatureModel, MomentSet
from .pooling import AirPoolConfig, PoolingMode

__all__ = [
    "AirPoolConfig",
    "FeatureModel",
    "MomentSet",
    "MonteCarloEstimate",
    "PoolingMode",
    "SystemParams",
]

__version__ = "0.1.0"
