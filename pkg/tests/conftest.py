import numpy as np
import pytest
import torch

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

from spheregen.checkpoint import Checkpoint
from spheregen.dataset import make_toy_repository
from spheregen.nets import DiscriminatorNet, GeneratorNet
from spheregen.training import TrainingConfig


def small_config(**overrides) -> TrainingConfig:
    base = dict(
        n_points=64, latent_dim=8, k=6,
        embed_width=16, gam1_width=8, gam2_width=12,
        lift_width=16, head_widths=(16, 8),
        disc_backbone_widths=(8, 16), disc_shape_head_widths=(8,),
        disc_point_head_widths=(8,),
        epochs=1, batch_size=4,
    )
    base.update(overrides)
    return TrainingConfig(**base)


@pytest.fixture(scope="session")
def tiny_checkpoint() -> Checkpoint:
    cfg = small_config()
    torch.manual_seed(7)
    return Checkpoint.from_nets(
        cfg, GeneratorNet(cfg.generator_config()),
        DiscriminatorNet(cfg.discriminator_config()), 0,
    )


@pytest.fixture(scope="session")
def toy_repo():
    return make_toy_repository(count=6, n=64, seed=3)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
