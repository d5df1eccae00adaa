"""Session-scoped solver fixtures shared by module tests and the acceptance
suite (solver builds dominate runtime; everything downstream reuses them)."""

import math
import warnings

import numpy as np
import pytest

from elscat.core import WaveParameters
from elscat.obstacle import Boundary, ObstacleScene, build_solver, plane_far_fields


@pytest.fixture(scope="session")
def wave_2pi():
    return WaveParameters(omega=2.0 * math.pi, lam=1.0, mu=1.0)


@pytest.fixture(scope="session")
def disk_solver(wave_2pi):
    scene = ObstacleScene((Boundary.circle((0.0, 0.0), 0.1),), wave_2pi)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return build_solver(scene)


@pytest.fixture(scope="session")
def kite_solver(wave_2pi):
    scene = ObstacleScene((Boundary.kite((0.0, 0.0)),), wave_2pi)
    return build_solver(scene)


@pytest.fixture(scope="session")
def kite_shifted_solver(wave_2pi):
    h = np.array([0.3, -0.2])
    scene = ObstacleScene((Boundary.kite((0.0, 0.0)).translated(h),), wave_2pi)
    return build_solver(scene)


@pytest.fixture(scope="session")
def twodisk_solver(wave_2pi):
    scene = ObstacleScene(
        (Boundary.circle((3.0, 3.0), 0.1), Boundary.circle((1.0, 1.0), 0.1)), wave_2pi
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return build_solver(scene)


@pytest.fixture(scope="session")
def kite_ffm(kite_solver):
    return plane_far_fields(kite_solver, 128)


@pytest.fixture(scope="session")
def kite_shifted_ffm(kite_shifted_solver):
    return plane_far_fields(kite_shifted_solver, 128)
