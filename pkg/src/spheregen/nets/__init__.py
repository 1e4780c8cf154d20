from .generator import (
    CoordRegressor,
    FeatureEmbed,
    GeneratorConfig,
    GeneratorNet,
    GraphAttention,
    StyleEmbed,
    adain,
    knn_idx,
)
from .discriminator import DiscriminatorConfig, DiscriminatorNet, DiscriminatorScores

__all__ = [
    "CoordRegressor",
    "DiscriminatorConfig",
    "DiscriminatorNet",
    "DiscriminatorScores",
    "FeatureEmbed",
    "GeneratorConfig",
    "GeneratorNet",
    "GraphAttention",
    "StyleEmbed",
    "adain",
    "knn_idx",
]
