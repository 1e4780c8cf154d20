"""Sphere-guided generative modeling of 3D point clouds.

A fixed, evenly distributed set of prior points is packed with per-point
latent codes and fed to a graph-attention generator with per-point style
injection; the fixed prior induces an index-level correspondence across all
generated shapes, which powers part editing, part-wise interpolation,
multi-shape composition, and label transfer.
"""
__version__ = "0.1.0"

from .sphere import (
    LatentCode,
    PriorLatentMatrix,
    SpherePoints,
    pack_perpoint,
    pack_uniform,
    sample_code,
    sample_cube,
    sample_prior,
    sample_sphere,
)
from .geometry import (
    BACKEND as GEOMETRY_BACKEND,
    NeighborGraph,
    PointCloud,
    TriangleMesh,
    chamfer,
    knn,
    load_obj,
    normalize_unit_ball,
    pairwise_chamfer,
    sample_mesh,
)
from .checkpoint import (
    Checkpoint,
    CheckpointFormatError,
    CheckpointMismatchError,
    generate,
    load_checkpoint,
    save_checkpoint,
)
from .training import TrainingConfig, loss_discriminator, loss_generator, train
from .manipulation import (
    SelectionMask,
    compose_parts,
    correspondence_colors,
    edit_part,
    interp_part,
    interp_shape,
    transfer_labels,
)
from .evaluation import (
    FeatureExtractor,
    MetricsReport,
    cov,
    evaluate_sets,
    fpd,
    frechet_from_features,
    mmd,
    retrieve_nearest,
    train_feature_extractor,
)
from .dataset import (
    CloudFormatError,
    ShapeRepository,
    ingest,
    load_cloud,
    load_repository,
    make_toy_repository,
    save_cloud,
    save_repository,
)

__all__ = [name for name in dir() if not name.startswith("_")]
