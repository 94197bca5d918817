"""
数据模型包
"""

from models.environment import (
    AnalyticIsoSpec,
    BottomBC,
    EnvironmentSpec,
    LayerProfiles,
    Lattice,
    Profile,
    ProfileKind,
)
from models.run_config import Command, RunConfig

__all__ = [
    "AnalyticIsoSpec",
    "BottomBC",
    "EnvironmentSpec",
    "LayerProfiles",
    "Lattice",
    "Profile",
    "ProfileKind",
    "Command",
    "RunConfig",
]
