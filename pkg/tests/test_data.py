"""Phaseless dataset synthesis, noise model, determinism, serialization."""

import math
import os

import numpy as np
import pytest

from elscat.core import (
    POLARIZATION_ANGLES,
    WaveParameters,
    direction,
    direction_grid,
    perp,
)
from elscat.data import (
    NoiseSpec,
    apply_noise,
    noise_draws,
    synthesize_obstacle_dataset,
    synthesize_source_dataset,
)
from elscat.io import write_phaseless_dataset
from elscat.obstacle import ObstacleScene, build_solver
from elscat.source import FrequencyGrid, rectangle_source

Z = np.array([4.0, 4.0])
TAUS = (0.0, 1.0)


@pytest.fixture(scope="module")
def empty_dataset(wave_2pi):
    scene = ObstacleScene.empty(wave_2pi)
    return synthesize_obstacle_dataset(scene, Z, POLARIZATION_ANGLES, (1.0,), 32)


@pytest.fixture(scope="module")
def source_dataset(wave_2pi):
    return synthesize_source_dataset(
        rectangle_source(), [0.0, math.pi / 2.0], FrequencyGrid(count=5, k_max=5.0),
        Z, POLARIZATION_ANGLES, TAUS, wave_2pi)


class TestObstacleSynthesis:
    def test_empty_scene_is_point_source_modulus(self, empty_dataset, wave_2pi):
        dirs = direction_grid(32)
        for iq, qa in enumerate(POLARIZATION_ANGLES):
            q = direction(qa)
            expected = np.abs(1.0 * (perp(dirs) @ q))
            got = empty_dataset.values[:, :, 0, iq]
            np.testing.assert_allclose(got, np.broadcast_to(expected[:, None], got.shape),
                                       atol=1e-14)

    def test_tau_zero_slice_is_plain_modulus(self, disk_solver):
        from elscat.obstacle import plane_far_fields

        ds = synthesize_obstacle_dataset(
            disk_solver.scene, Z, POLARIZATION_ANGLES, (0.0, 1.0), 16,
            solver=disk_solver)
        u_ss = plane_far_fields(disk_solver, 16).data["ss"]
        for iq in range(3):
            np.testing.assert_allclose(ds.values[:, :, 0, iq], np.abs(u_ss), atol=1e-14)

    def test_source_point_inside_rejected(self, disk_solver):
        with pytest.raises(ValueError):
            synthesize_obstacle_dataset(disk_solver.scene, np.array([0.0, 0.0]),
                                        POLARIZATION_ANGLES, TAUS, 8,
                                        solver=disk_solver)

    def test_regeneration_is_bit_identical(self, disk_solver):
        a = synthesize_obstacle_dataset(disk_solver.scene, Z, POLARIZATION_ANGLES,
                                        TAUS, 8, solver=disk_solver)
        b = synthesize_obstacle_dataset(disk_solver.scene, Z, POLARIZATION_ANGLES,
                                        TAUS, 8, solver=disk_solver)
        assert np.array_equal(a.values, b.values)


class TestSourceSynthesis:
    def test_tau_zero_slice(self, source_dataset, wave_2pi):
        from elscat.source import source_far_field_table

        xhats = np.stack([direction(0.0), direction(math.pi / 2.0)])
        u = source_far_field_table(rectangle_source(), "s", xhats,
                                   FrequencyGrid(count=5, k_max=5.0), wave_2pi)
        for iq in range(3):
            np.testing.assert_allclose(source_dataset.values[:, :, 0, iq], np.abs(u),
                                       rtol=1e-12)

    def test_shapes_and_invariants(self, source_dataset):
        assert source_dataset.values.shape == (2, 5, 2, 3)
        assert np.all(source_dataset.values >= 0)

    def test_regeneration_is_bit_identical(self, wave_2pi):
        mk = lambda: synthesize_source_dataset(
            rectangle_source(), [0.3], FrequencyGrid(count=3, k_max=3.0),
            Z, POLARIZATION_ANGLES, TAUS, wave_2pi)
        assert np.array_equal(mk().values, mk().values)


class TestNoise:
    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            NoiseSpec(kind="gaussian", delta=0.1)
        with pytest.raises(ValueError):
            NoiseSpec(kind="relative", delta=-0.1)

    def test_zero_delta_identity(self, empty_dataset):
        out = apply_noise(empty_dataset, NoiseSpec("relative", 0.0, seed=3))
        assert np.array_equal(out.values, empty_dataset.values)
        assert out.noise.kind == "relative"

    def test_relative_bounds_and_zero_preservation(self, empty_dataset):
        spec = NoiseSpec("relative", 0.1, seed=11)
        out = apply_noise(empty_dataset, spec)
        clean = empty_dataset.values
        mask = clean > 0
        ratio = out.values[mask] / clean[mask]
        assert np.all(ratio >= 0.9) and np.all(ratio <= 1.1)
        assert np.all(out.values[~mask] == 0.0)

    def test_absolute_clamps_at_zero(self, empty_dataset):
        out = apply_noise(empty_dataset, NoiseSpec("absolute", 0.3, seed=5))
        assert np.all(out.values >= 0.0)
        # entries that vanish in the clean data get clamped for negative draws
        clean_zero = empty_dataset.values == 0.0
        assert np.any(out.values[clean_zero] == 0.0)

    def test_reproducible_and_seed_sensitive(self, empty_dataset):
        s = NoiseSpec("relative", 0.1, seed=42)
        a = apply_noise(empty_dataset, s)
        b = apply_noise(empty_dataset, s)
        c = apply_noise(empty_dataset, NoiseSpec("relative", 0.1, seed=43))
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_draw_mean_near_zero(self):
        n = 200_000
        e = noise_draws((n,), seed=1)
        # Var(U(-1,1)) = 1/3; 3 sigma of the mean
        assert abs(e.mean()) <= 3.0 / math.sqrt(3.0 * n)

    def test_draws_indexed_by_entry_position(self):
        a = noise_draws((6, 4), seed=9)
        b = noise_draws((24,), seed=9)
        assert np.array_equal(a.ravel(), b)


class TestSerialization:
    def test_slice_files_and_metadata(self, source_dataset, tmp_path):
        noisy = apply_noise(source_dataset, NoiseSpec("relative", 0.1, seed=7))
        written = write_phaseless_dataset(str(tmp_path), noisy, "demo")
        assert len(written) == 2 * 3 + 1
        meta = (tmp_path / "demo_meta.txt").read_text()
        for key in ("z =", "taus =", "q_angles =", "noise_seed = 7",
                    "frequency_nodes =", "noise_generator ="):
            assert key in meta
        body = (tmp_path / "demo_tau1_q2.csv").read_text().splitlines()
        assert body[0] == "obs_index,second_index,value"
        i, j, v = body[1].split(",")
        assert (int(i), int(j)) == (0, 0)
        assert float(v) == noisy.values[0, 0, 1, 2]

    def test_byte_identical_across_runs(self, source_dataset, tmp_path):
        spec = NoiseSpec("relative", 0.1, seed=21)
        d1, d2 = tmp_path / "a", tmp_path / "b"
        for d in (d1, d2):
            write_phaseless_dataset(str(d), apply_noise(source_dataset, spec), "x")
        for name in os.listdir(d1):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
