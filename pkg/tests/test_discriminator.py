import numpy as np
import pytest
import torch

from spheregen.nets import DiscriminatorConfig, DiscriminatorNet
from oracles import discriminator_loop, max_rel_error_fd


def tiny_disc(n_points=8):
    torch.manual_seed(20)
    cfg = DiscriminatorConfig(n_points=n_points, backbone_widths=(6, 8),
                              shape_head_widths=(6,), point_head_widths=(6,))
    return DiscriminatorNet(cfg).double()


class TestDiscriminator:
    def test_dual_outputs_at_default_scale(self, rng):
        torch.manual_seed(21)
        net = DiscriminatorNet(DiscriminatorConfig())
        cloud = torch.as_tensor(rng.uniform(-1, 1, (2, 2048, 3)),
                                dtype=torch.float32)
        scores = net(cloud)
        assert scores.shape_score.shape == (2,)
        assert scores.point_scores.shape == (2, 2048)

    def test_wrong_point_count_rejected(self, rng):
        net = tiny_disc(8)
        with pytest.raises(ValueError):
            net(torch.as_tensor(rng.standard_normal((1, 9, 3))))

    def test_permutation_behavior(self, rng):
        net = tiny_disc(16)
        cloud = torch.as_tensor(rng.uniform(-1, 1, (1, 16, 3)))
        perm = rng.permutation(16)
        with torch.no_grad():
            base = net(cloud)
            permuted = net(cloud[:, perm])
        assert abs(float(permuted.shape_score - base.shape_score)) < 1e-5
        assert (permuted.point_scores[0] - base.point_scores[0][perm]) \
            .abs().max() < 1e-5

    def test_matches_loop_oracle(self, rng):
        net = tiny_disc(8)
        cloud = rng.uniform(-1, 1, (8, 3))
        scores = net(torch.as_tensor(cloud).unsqueeze(0))
        shape_o, points_o = discriminator_loop(net, cloud)
        assert abs(float(scores.shape_score[0]) - shape_o) < 1e-6
        assert np.abs(scores.point_scores[0].detach().numpy() - points_o).max() < 1e-6

    def test_raw_scores_not_squashed(self, rng):
        # least-squares objectives need unbounded confidences
        net = tiny_disc(8)
        cloud = torch.as_tensor(rng.standard_normal((1, 8, 3)) * 50)
        scores = net(cloud)
        all_scores = torch.cat([scores.shape_score, scores.point_scores[0]])
        assert all_scores.abs().max() > 1.0

    def test_param_grads_match_fd(self, rng):
        net = tiny_disc(6)
        cloud = torch.as_tensor(rng.uniform(-1, 1, (1, 6, 3)))
        w = torch.as_tensor(rng.standard_normal(6))

        def loss():
            s = net(cloud)
            return s.shape_score.sum() + (s.point_scores[0] * w).sum()

        assert max_rel_error_fd(list(net.parameters()), loss) < 1e-4
