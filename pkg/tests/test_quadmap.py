"""Tests for the quadrangulation encoding of well-labelled trees."""

from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from treesnake.exact_enum import count_well_labelled
from treesnake.gw_sampler import (
    OffspringDistribution,
    StepDistribution,
    sample_conditioned_batch,
)
from treesnake.plane_tree import build_tree
from treesnake.quadmap import (
    DistanceProfile,
    NotAQuadrangulation,
    NotWellLabelled,
    PlanarQuadrangulation,
    canonical_code,
    cvs_build,
    cvs_inverse,
    distances,
    enumerate_well_labelled,
    profile_csv,
    quad_from_json,
    quad_to_json,
    sample_radius_and_distance,
    sample_uniform_quad,
)
from treesnake.spatial_tree import SpatialTree

GEO = OffspringDistribution.geometric_half()
U3 = StepDistribution.uniform3()


def one_edge_tree(child_label):
    return SpatialTree(build_tree((1, 0)), (1, child_label))


class TestWellLabelledValidation:
    def test_root_label_must_be_one(self):
        with pytest.raises(NotWellLabelled):
            cvs_build(SpatialTree(build_tree((1, 0)), (2, 1)))

    def test_labels_must_be_positive(self):
        with pytest.raises(NotWellLabelled):
            cvs_build(SpatialTree(build_tree((1, 0)), (1, 0)))

    def test_labels_must_not_jump(self):
        with pytest.raises(NotWellLabelled):
            cvs_build(SpatialTree(build_tree((1, 0)), (1, 3)))

    def test_labels_must_be_integers(self):
        with pytest.raises(NotWellLabelled):
            cvs_build(SpatialTree(build_tree((1, 0)), (1, 1.5)))

    def test_singleton_has_no_encoding(self):
        with pytest.raises(NotWellLabelled):
            cvs_build(SpatialTree(build_tree((0,)), (1,)))

    def test_edge_count_mismatch_rejected(self):
        with pytest.raises(ValueError, match="edges"):
            cvs_build(one_edge_tree(1), 5)


class TestOneFaceMaps:
    """Both one-face quadrangulations, worked out by hand."""

    def test_flat_labels_give_radius_one(self):
        q = cvs_build(one_edge_tree(1), 1)
        q.validate()
        profile = distances(q)
        assert profile.radius == 1
        assert profile.counts == {0: 1, 1: 2}

    def test_rising_labels_give_radius_two(self):
        q = cvs_build(one_edge_tree(2), 1)
        q.validate()
        profile = distances(q)
        assert profile.radius == 2
        assert profile.counts == {0: 1, 1: 1, 2: 1}

    def test_the_two_maps_are_distinct(self):
        codes = {
            canonical_code(cvs_build(one_edge_tree(c), 1)) for c in (1, 2)
        }
        assert len(codes) == 2


class TestEncodingBattery:
    """Exhaustive checks over every well-labelled tree with up to 5 edges."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_build_validate_distance_roundtrip(self, n):
        seen = 0
        for wt in enumerate_well_labelled(n):
            seen += 1
            q = cvs_build(wt, n)
            q.validate()
            assert q.n_vertices == n + 2
            assert len(q.faces) == n

            profile = distances(q)
            want = Counter(wt.labels)
            want[0] += 1
            assert profile.counts == dict(want)
            assert profile.radius == max(wt.labels)

            back = cvs_inverse(q)
            assert back.tree.counts == wt.tree.counts
            assert back.labels == wt.labels
        total, positive, _ = count_well_labelled(n)
        assert seen == positive

    @pytest.mark.parametrize("n,count", [(1, 2), (2, 9), (3, 54), (4, 378)])
    def test_codes_are_injective(self, n, count):
        codes = {canonical_code(cvs_build(wt, n)) for wt in enumerate_well_labelled(n)}
        assert len(codes) == count


class TestCanonicalCode:
    def test_invariant_under_dart_relabelling(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            q = sample_uniform_quad(8, rng)
            perm = rng.permutation(4 * q.n)
            inv = np.argsort(perm)
            sigma = tuple(int(perm[q.sigma[inv[d]]]) for d in range(4 * q.n))
            alpha = tuple(int(perm[q.alpha[inv[d]]]) for d in range(4 * q.n))
            relabelled = PlanarQuadrangulation(
                q.n, sigma, alpha, int(perm[q.root_dart])
            )
            relabelled.validate()
            assert canonical_code(relabelled) == canonical_code(q)

    def test_moving_the_root_changes_the_code(self):
        # the two one-face maps differ only in where the root dart points
        q = cvs_build(one_edge_tree(2), 1)
        moved = PlanarQuadrangulation(q.n, q.sigma, q.alpha, q.alpha[q.root_dart])
        moved.validate()
        assert canonical_code(moved) != canonical_code(q)


class TestStructuralValidation:
    def test_torus_square_fails_euler(self):
        # one vertex, two edges, one degree-4 face: V - E + F = 0
        q = PlanarQuadrangulation(1, (1, 2, 3, 0), (2, 3, 0, 1), 0)
        with pytest.raises(NotAQuadrangulation, match="Euler"):
            q.validate()

    def test_fixed_point_alpha_rejected(self):
        q = cvs_build(one_edge_tree(1), 1)
        bad = PlanarQuadrangulation(1, q.sigma, (0, 1, 3, 2), q.root_dart)
        with pytest.raises(NotAQuadrangulation, match="involution"):
            bad.validate()

    def test_wrong_face_degree_rejected(self):
        # two vertices joined by two parallel edges: both faces have degree 2
        q = PlanarQuadrangulation(1, (2, 3, 0, 1), (1, 0, 3, 2), 0)
        with pytest.raises(NotAQuadrangulation, match="degree"):
            q.validate()

    def test_inverse_validates_its_input(self):
        with pytest.raises(NotAQuadrangulation):
            cvs_inverse(PlanarQuadrangulation(1, (1, 2, 3, 0), (2, 3, 0, 1), 0))


class TestSerialization:
    def test_json_round_trip(self):
        rng = np.random.default_rng(3)
        q = sample_uniform_quad(12, rng)
        q2 = quad_from_json(quad_to_json(q))
        assert q2.sigma == q.sigma
        assert q2.alpha == q.alpha
        assert q2.root_dart == q.root_dart

    def test_json_rejects_overlapping_cycles(self):
        q = cvs_build(one_edge_tree(1), 1)
        text = quad_to_json(q).replace('"sigma": [[', '"sigma": [[0, 0, ')
        with pytest.raises(NotAQuadrangulation):
            quad_from_json(text)

    def test_profile_csv_layout(self):
        profile = DistanceProfile(2, 2, {0: 1, 1: 2, 2: 1})
        assert profile_csv(profile) == "distance,count\n0,1\n1,2\n2,1\n"


class TestRescaledProfile:
    def test_masses_sum_to_one_without_the_root(self):
        q = cvs_build(one_edge_tree(2), 1)
        support, mass = distances(q).rescaled()
        assert mass.sum() == pytest.approx(1.0)
        assert 0.0 not in support
        np.testing.assert_allclose(support, np.array([1.0, 2.0]))

    def test_support_scales_like_the_fourth_root(self):
        profile = DistanceProfile(16, 4, {0: 1, 2: 10, 4: 7})
        support, mass = profile.rescaled()
        np.testing.assert_allclose(support, np.array([1.0, 2.0]))
        np.testing.assert_allclose(mass, np.array([10 / 17, 7 / 17]))


class TestUniformSampling:
    def test_two_face_frequencies_are_uniform(self):
        rng = np.random.default_rng(2026)
        draws = 100_000
        trees, _ = sample_conditioned_batch(GEO, U3, 2, 1, draws, rng, strict=True)
        freq = Counter(canonical_code(cvs_build(wt, 2)) for wt in trees)
        assert len(freq) == 9
        se = (draws * (1 / 9) * (8 / 9)) ** 0.5
        for count in freq.values():
            assert abs(count - draws / 9) < 4 * se

    def test_sample_uniform_quad_is_valid_and_reproducible(self):
        q1 = sample_uniform_quad(25, np.random.default_rng(99))
        q2 = sample_uniform_quad(25, np.random.default_rng(99))
        q1.validate()
        assert q1.sigma == q2.sigma
        assert q1.root_dart == q2.root_dart

    def test_radius_and_distance_pipeline(self):
        rng = np.random.default_rng(5)
        radii, dists, attempts = sample_radius_and_distance(40, 50, rng)
        assert radii.shape == dists.shape == (50,)
        assert attempts >= 50
        assert (radii >= 1).all()
        assert (dists >= 0).all()
        assert (dists <= radii).all()
