import numpy as np
import pytest

import geometry
from gmsr import Mesh, base_scale, bbox_diagonal, build_scale_stack, gaussian_smooth
from gmsr.scale_space import validate_multipliers


class TestBaseScale:
    def test_unit_cube(self, cube8):
        assert base_scale(cube8) == pytest.approx(0.003 * np.sqrt(3.0))

    def test_linear_in_mesh_scale(self, icosa):
        bigger = Mesh(icosa.vertices * 10.0, icosa.faces)
        assert base_scale(bigger) == pytest.approx(10.0 * base_scale(icosa))

    def test_degenerate_mesh_rejected(self):
        point = Mesh(np.zeros((3, 3)), np.array([[0, 1, 2]]))
        with pytest.raises(ValueError):
            base_scale(point)


class TestGaussianSmooth:
    def test_isolated_vertices_unchanged(self, octa):
        # 3*width far below the minimum pairwise distance: identity
        smoothed = gaussian_smooth(octa, 0.01)
        assert np.array_equal(smoothed.vertices, octa.vertices)

    def test_connectivity_unchanged(self, cube16):
        smoothed = gaussian_smooth(cube16, 5 * base_scale(cube16))
        assert np.array_equal(smoothed.faces, cube16.faces)
        assert smoothed.vertex_count == cube16.vertex_count

    def test_two_point_symmetry(self):
        # vertices 0 and 1 one unit apart; the helper vertex is far away
        verts = np.array(
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 100.0, 0.0]]
        )
        mesh = Mesh(verts, np.array([[0, 1, 2]]))
        width = 1.0
        smoothed = gaussian_smooth(mesh, width)
        w = np.exp(-0.5)
        expected_x0 = w / (1.0 + w)  # hand evaluation of the weighted average
        assert smoothed.vertices[0, 0] == pytest.approx(expected_x0, rel=1e-12)
        assert smoothed.vertices[1, 0] == pytest.approx(1.0 - expected_x0, rel=1e-12)
        # symmetric about the original midpoint
        mid = 0.5 * (smoothed.vertices[0] + smoothed.vertices[1])
        assert mid[0] == pytest.approx(0.5, abs=1e-12)

    def test_triangle_hand_weights(self, triangle):
        width = 1.0
        smoothed = gaussian_smooth(triangle, width)
        w_unit = np.exp(-0.5)  # legs of length 1
        w_hyp = np.exp(-1.0)  # hypotenuse sqrt(2)
        p0 = (
            np.array([0.0, 0.0, 0.0])
            + w_unit * np.array([1.0, 0.0, 0.0])
            + w_unit * np.array([0.0, 1.0, 0.0])
        ) / (1.0 + 2.0 * w_unit)
        assert np.allclose(smoothed.vertices[0], p0, atol=1e-12)
        p1 = (
            np.array([1.0, 0.0, 0.0])
            + w_unit * np.array([0.0, 0.0, 0.0])
            + w_hyp * np.array([0.0, 1.0, 0.0])
        ) / (1.0 + w_unit + w_hyp)
        assert np.allclose(smoothed.vertices[1], p1, atol=1e-12)

    def test_translation_equivariance(self):
        mesh = geometry.grid_patch(12, noise=0.05, seed=3)
        width = 0.15
        shift = np.array([2.0, -3.0, 1.25])
        a = gaussian_smooth(Mesh(mesh.vertices + shift, mesh.faces), width)
        b = gaussian_smooth(mesh, width)
        assert np.allclose(a.vertices, b.vertices + shift, atol=1e-12)

    def test_convex_hull_bounds(self):
        mesh = geometry.grid_patch(10, noise=0.1, seed=9)
        smoothed = gaussian_smooth(mesh, 0.2)
        for axis in range(3):
            assert smoothed.vertices[:, axis].max() <= mesh.vertices[:, axis].max() + 1e-12
            assert smoothed.vertices[:, axis].min() >= mesh.vertices[:, axis].min() - 1e-12

    def test_noisy_sphere_variance_shrinks(self):
        sphere = geometry.uv_sphere(100, 150)
        rng = np.random.default_rng(42)
        bump = 0.02 * rng.uniform(-1.0, 1.0, sphere.vertex_count)
        radial = sphere.vertices / np.linalg.norm(
            sphere.vertices, axis=1, keepdims=True
        )
        noisy = Mesh(sphere.vertices + bump[:, None] * radial, sphere.faces)
        smoothed = gaussian_smooth(noisy, base_scale(noisy))

        def radial_variance(m):
            return np.var(np.linalg.norm(m.vertices, axis=1) - 1.0)

        assert radial_variance(smoothed) < radial_variance(noisy)

    def test_nonpositive_width_rejected(self, triangle):
        with pytest.raises(ValueError):
            gaussian_smooth(triangle, 0.0)


class TestScaleStack:
    def test_default_levels(self, cube16):
        stack = build_scale_stack(cube16, (1, 3, 5))
        assert stack.multipliers == (1, 3, 5)
        eps = base_scale(cube16)
        assert [lvl.width for lvl in stack.levels] == [eps, 3 * eps, 5 * eps]
        for lvl in stack.levels:
            assert lvl.mesh.vertex_count == cube16.vertex_count
            assert np.array_equal(lvl.mesh.faces, cube16.faces)

    def test_single_multiplier(self, cube16):
        stack = build_scale_stack(cube16, (1,))
        assert len(stack.levels) == 1

    def test_normals_recomputed_per_level(self, cube16):
        stack = build_scale_stack(cube16, (1, 5))
        a = stack.levels[0].normals.vectors
        b = stack.levels[1].normals.vectors
        assert not np.allclose(a, b, atol=1e-12)  # heavier smoothing bends corners

    def test_multiplier_validation(self):
        with pytest.raises(ValueError):
            validate_multipliers(())
        with pytest.raises(ValueError):
            validate_multipliers((0, 1))
        with pytest.raises(ValueError):
            validate_multipliers((1, 1))
        with pytest.raises(ValueError):
            validate_multipliers((3, 1))
        assert validate_multipliers([1, 3, 5]) == (1, 3, 5)
