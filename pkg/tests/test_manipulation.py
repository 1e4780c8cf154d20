import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheregen.checkpoint import generate
from spheregen.geometry import PointCloud
from spheregen.manipulation import (
    SelectionMask,
    compose_parts,
    correspondence_colors,
    edit_part,
    interp_part,
    interp_shape,
    transfer_labels,
)
from spheregen.sphere import LatentCode, pack_perpoint, pack_uniform, sample_code, sample_sphere


def mask(indices, n):
    return SelectionMask(indices=np.asarray(indices, dtype=np.int64), n_total=n)


class TestSelectionMask:
    def test_sorted_deduplicated(self):
        m = mask([5, 1, 5, 3], 8)
        assert m.indices.tolist() == [1, 3, 5]
        assert m.complement().tolist() == [0, 2, 4, 6, 7]

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            mask([8], 8)
        with pytest.raises(ValueError):
            mask([-1], 8)


class TestEditPart:
    def test_empty_mask_is_noop(self, rng):
        codes = rng.standard_normal((8, 4))
        out = edit_part(codes, mask([], 8), LatentCode(np.ones(4)))
        assert np.array_equal(out, codes)

    def test_full_mask_equals_pack_uniform(self, rng):
        sphere = sample_sphere(8, 0)
        codes = rng.standard_normal((8, 4))
        z = LatentCode(rng.standard_normal(4))
        out = edit_part(codes, mask(range(8), 8), z)
        assert np.array_equal(out, pack_uniform(sphere, z).codes)

    def test_exactly_masked_rows_differ(self, rng):
        codes = rng.standard_normal((8, 4))
        out = edit_part(codes, mask([0, 5], 8), LatentCode(rng.standard_normal(4)))
        changed = [i for i in range(8) if not np.array_equal(out[i], codes[i])]
        assert changed == [0, 5]
        for i in (1, 2, 3, 4, 6, 7):
            assert out[i].tobytes() == codes[i].tobytes()

    def test_per_point_mode(self, rng):
        codes = rng.standard_normal((6, 3))
        fresh = rng.standard_normal((2, 3))
        out = edit_part(codes, mask([1, 4], 6), LatentCode(np.zeros(3)),
                        per_point=fresh)
        assert np.array_equal(out[[1, 4]], fresh)
        assert np.array_equal(out[[0, 2, 3, 5]], codes[[0, 2, 3, 5]])

    def test_dim_mismatch_rejected(self, rng):
        with pytest.raises(ValueError):
            edit_part(rng.standard_normal((4, 3)), mask([0], 4),
                      LatentCode(np.ones(2)))


class TestInterpShape:
    def test_endpoints_exact(self, rng):
        a = LatentCode(rng.standard_normal(6))
        b = LatentCode(rng.standard_normal(6))
        assert np.array_equal(interp_shape(a, b, 0.0).values, a.values)
        assert np.array_equal(interp_shape(a, b, 1.0).values, b.values)

    def test_hand_value(self):
        a = LatentCode(np.array([0.0, 0.0]))
        b = LatentCode(np.array([2.0, 4.0]))
        assert interp_shape(a, b, 0.5).values.tolist() == [1.0, 2.0]

    @given(st.floats(min_value=-5, max_value=5))
    @settings(max_examples=40, deadline=None)
    def test_alpha_domain(self, alpha):
        a = LatentCode(np.zeros(2))
        b = LatentCode(np.ones(2))
        if 0.0 <= alpha <= 1.0:
            out = interp_shape(a, b, alpha).values
            assert np.allclose(out, alpha)
        else:
            with pytest.raises(ValueError):
                interp_shape(a, b, alpha)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            interp_shape(LatentCode(np.zeros(2)), LatentCode(np.zeros(3)), 0.5)


class TestInterpPart:
    def test_alpha_zero_bitwise_identity(self, rng):
        a = rng.standard_normal((6, 4))
        b = rng.standard_normal((6, 4))
        out = interp_part(a, b, mask([2, 3], 6), 0.0)
        assert out.tobytes() == a.tobytes()

    def test_full_mask_alpha_one_is_b(self, rng):
        a = rng.standard_normal((6, 4))
        b = rng.standard_normal((6, 4))
        out = interp_part(a, b, mask(range(6), 6), 1.0)
        assert out.tobytes() == b.tobytes()

    def test_single_row_blend(self, rng):
        a = rng.standard_normal((4, 3))
        b = rng.standard_normal((4, 3))
        out = interp_part(a, b, mask([2], 4), 0.25)
        assert np.allclose(out[2], 0.75 * a[2] + 0.25 * b[2])
        for i in (0, 1, 3):
            assert out[i].tobytes() == a[i].tobytes()

    def test_endpoint_exact_through_generator(self, tiny_checkpoint, rng):
        sphere = tiny_checkpoint.sphere()
        a = pack_uniform(sphere, sample_code(8, rng)).codes
        b = pack_uniform(sphere, sample_code(8, rng)).codes
        m = mask(range(10, 40), 64)
        blended = interp_part(a, b, m, 0.0)
        out_a = generate(tiny_checkpoint, pack_perpoint(sphere, a))
        out_blend = generate(tiny_checkpoint, pack_perpoint(sphere, blended))
        assert np.array_equal(out_a.points, out_blend.points)


class TestComposeParts:
    def test_single_full_source(self, rng):
        codes = rng.standard_normal((6, 3))
        out = compose_parts([(codes, mask(range(6), 6))])
        assert out.tobytes() == codes.tobytes()

    def test_complementary_union(self, rng):
        a = rng.standard_normal((6, 3))
        b = rng.standard_normal((6, 3))
        out = compose_parts([(a, mask([0, 1, 2], 6)), (b, mask([3, 4, 5], 6))])
        assert np.array_equal(out[:3], a[:3])
        assert np.array_equal(out[3:], b[3:])

    def test_uncovered_defaults_to_first(self, rng):
        a = rng.standard_normal((6, 3))
        b = rng.standard_normal((6, 3))
        out = compose_parts([(a, mask([0], 6)), (b, mask([5], 6))])
        assert np.array_equal(out[1:5], a[1:5])

    def test_overlap_names_first_conflicting_index(self, rng):
        a = rng.standard_normal((6, 3))
        b = rng.standard_normal((6, 3))
        with pytest.raises(ValueError, match="index 3"):
            compose_parts([(a, mask([1, 3], 6)), (b, mask([3, 4], 6))])

    def test_order_independent_with_full_cover(self, rng):
        a = rng.standard_normal((6, 3))
        b = rng.standard_normal((6, 3))
        m1, m2 = mask([0, 2, 4], 6), mask([1, 3, 5], 6)
        out1 = compose_parts([(a, m1), (b, m2)])
        out2 = compose_parts([(b, m2), (a, m1)])
        assert np.array_equal(out1, out2)


class TestTransferLabels:
    def test_identity_on_source(self, rng):
        labels = rng.integers(0, 4, 12).astype(np.uint16)
        src = PointCloud(points=rng.standard_normal((12, 3)), labels=labels)
        (out,) = transfer_labels(src, [src])
        assert np.array_equal(out.labels, labels)

    def test_label_multiset_preserved(self, rng):
        labels = rng.integers(0, 3, 20).astype(np.uint16)
        src = PointCloud(points=rng.standard_normal((20, 3)), labels=labels)
        tgt = PointCloud(points=rng.standard_normal((20, 3)))
        (out,) = transfer_labels(src, [tgt])
        assert sorted(out.labels) == sorted(labels)
        assert np.array_equal(out.points, tgt.points)

    def test_round_trip_is_identity(self, rng):
        labels = rng.integers(0, 3, 10).astype(np.uint16)
        src = PointCloud(points=rng.standard_normal((10, 3)), labels=labels)
        tgt = PointCloud(points=rng.standard_normal((10, 3)))
        (forward,) = transfer_labels(src, [tgt])
        (back,) = transfer_labels(forward, [src])
        assert np.array_equal(back.labels, labels)

    def test_size_mismatch_rejected(self, rng):
        src = PointCloud(points=rng.standard_normal((10, 3)),
                         labels=np.zeros(10, dtype=np.uint16))
        tgt = PointCloud(points=rng.standard_normal((11, 3)))
        with pytest.raises(ValueError):
            transfer_labels(src, [tgt])

    def test_unlabeled_source_rejected(self, rng):
        src = PointCloud(points=rng.standard_normal((4, 3)))
        with pytest.raises(ValueError):
            transfer_labels(src, [src])


class TestCorrespondenceColors:
    def test_affine_map(self):
        sphere = sample_sphere(64, 0)
        colors = correspondence_colors(sphere)
        assert np.array_equal(colors, sphere.coords * 0.5 + 0.5)
        assert colors.min() >= 0.0 and colors.max() <= 1.0

    def test_pole_color(self):
        sphere = sample_sphere(1, 0)
        # force the known pole direction
        import numpy as np

        from spheregen.sphere import SpherePoints

        s = SpherePoints(coords=np.array([[0.0, 0.0, 1.0]]), seed=0)
        assert correspondence_colors(s)[0].tolist() == [0.5, 0.5, 1.0]

    def test_deterministic(self):
        sphere = sample_sphere(32, 1)
        assert np.array_equal(correspondence_colors(sphere),
                              correspondence_colors(sphere))

    def test_antipodal_reflection(self):
        sphere = sample_sphere(128, 0)
        colors = correspondence_colors(sphere)
        from spheregen.sphere import SpherePoints

        anti = SpherePoints(coords=-sphere.coords, seed=0)
        colors_anti = correspondence_colors(anti)
        assert np.allclose(colors + colors_anti, 1.0)
