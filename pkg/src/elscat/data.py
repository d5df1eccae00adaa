"""Synthesis and perturbation of phaseless (modulus-only) far-field datasets.

A dataset holds |w| samples on a 4-axis array

    obstacle kind: (observation j, incidence l, strength index, polarization index)
    source kind:   (observation direction, frequency node, strength, polarization)

together with everything needed to regenerate it deterministically: source
point z, strength list, polarization angles, grid/frequency description and
the noise record.  Noise draws come from the counter-based Philox generator
in one row-major pass, so the draw hitting an entry depends only on the
entry's flat index and the seed, never on evaluation schedule or worker
count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from elscat.core import (
    MODE_S,
    PolarizationSet,
    WaveParameters,
    direction,
    direction_grid,
    perp,
)
from elscat.obstacle import (
    ObstacleScene,
    ObstacleSolver,
    SolverOptions,
    DEFAULT_SOLVER_OPTIONS,
    build_solver,
    plane_far_fields,
    point_source_far_field,
)
from elscat.source import (
    DEFAULT_QUADRATURE,
    FrequencyGrid,
    QuadratureOptions,
    SourceField,
    source_far_field_table,
)

#: Name recorded in metadata for the noise generator contract.
NOISE_GENERATOR = "philox4x64/uniform(-1,1)/row-major"


@dataclass(frozen=True)
class NoiseSpec:
    """Relative or absolute uniform noise of level delta, seeded."""

    kind: str
    delta: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("relative", "absolute"):
            raise ValueError("noise kind must be 'relative' or 'absolute'")
        if self.delta < 0:
            raise ValueError("noise level must be >= 0")


@dataclass(frozen=True)
class PhaselessDataset:
    """Modulus-only far-field samples plus regeneration metadata.

    ``wave`` is the scene's parameters for obstacle data; for source data it
    carries the Lame constants while the frequencies run over ``freq_grid``.
    """

    kind: str
    values: np.ndarray
    z: np.ndarray
    taus: tuple[complex, ...]
    q_angles: tuple[float, ...]
    wave: WaveParameters
    n_directions: int | None = None
    theta_angles: tuple[float, ...] | None = None
    freq_grid: FrequencyGrid | None = None
    noise: NoiseSpec | None = None
    provenance: str = ""

    def __post_init__(self):
        if self.kind not in ("obstacle", "source"):
            raise ValueError("kind must be 'obstacle' or 'source'")
        v = self.values
        if v.ndim != 4 or v.shape[2] != len(self.taus) or v.shape[3] != len(self.q_angles):
            raise ValueError("values must have shape (obs, second, n_tau, n_q)")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("moduli must be finite and >= 0")

    @property
    def q_vectors(self) -> np.ndarray:
        return np.stack([direction(a) for a in self.q_angles])

    def tau_index(self, tau: complex) -> int:
        for i, t in enumerate(self.taus):
            if abs(complex(t) - complex(tau)) <= 1e-14:
                return i
        raise KeyError(f"strength {tau} not present in dataset")


def synthesize_obstacle_dataset(scene: ObstacleScene, z, q_angles, taus, n: int,
                                solver: ObstacleSolver | None = None,
                                options: SolverOptions = DEFAULT_SOLVER_OPTIONS,
                                ) -> PhaselessDataset:
    """|w_ss| data for plane shear incidence on the N-direction grid.

    For each polarization q the unit-strength point-source scattering is
    solved once; strengths enter linearly.
    """
    z = np.asarray(z, dtype=float)
    if scene.contains(z):
        raise ValueError("auxiliary source point lies inside an obstacle")
    if solver is None:
        solver = build_solver(scene, options)
    u_ss = plane_far_fields(solver, n).data["ss"]
    dirs = direction_grid(n)
    wave = scene.wave
    taus = tuple(complex(t) for t in taus)
    q_angles = tuple(float(a) for a in q_angles)

    values = np.empty((n, n, len(taus), len(q_angles)))
    for iq, qa in enumerate(q_angles):
        q = direction(qa)
        _, v_s = point_source_far_field(solver, z, q, 1.0, n)
        phi_s = np.exp(-1j * wave.ks * (dirs @ z)) * (perp(dirs) @ q)
        unit_term = (v_s + phi_s)[:, None]
        for it, tau in enumerate(taus):
            values[:, :, it, iq] = np.abs(u_ss + tau * unit_term)
    return PhaselessDataset(
        kind="obstacle", values=values, z=z, taus=taus, q_angles=q_angles,
        wave=wave, n_directions=n,
        provenance="obstacle:" + ",".join(b.tag for b in scene.boundaries),
    )


def synthesize_source_dataset(f: SourceField, theta_angles, grid: FrequencyGrid,
                              z, q_angles, taus, params_template: WaveParameters,
                              quad: QuadratureOptions = DEFAULT_QUADRATURE,
                              ) -> PhaselessDataset:
    """|u_s| data for the combined source over (Theta, frequency nodes)."""
    z = np.asarray(z, dtype=float)
    theta_angles = tuple(float(a) for a in theta_angles)
    taus = tuple(complex(t) for t in taus)
    q_angles = tuple(float(a) for a in q_angles)
    xhats = np.stack([direction(a) for a in theta_angles])
    u = source_far_field_table(f, MODE_S, xhats, grid, params_template, quad)

    ks_nodes = grid.nodes / math.sqrt(params_template.mu)
    values = np.empty((len(theta_angles), grid.count, len(taus), len(q_angles)))
    for iq, qa in enumerate(q_angles):
        q = direction(qa)
        qperp = perp(xhats) @ q                       # (n_theta,)
        phase = np.exp(-1j * np.outer(xhats @ z, ks_nodes))  # (n_theta, n_freq)
        unit_term = phase * qperp[:, None]
        for it, tau in enumerate(taus):
            values[:, :, it, iq] = np.abs(u + tau * unit_term)
    return PhaselessDataset(
        kind="source", values=values, z=z, taus=taus, q_angles=q_angles,
        wave=params_template, theta_angles=theta_angles, freq_grid=grid,
        provenance=f"source:{f.name}",
    )


def noise_draws(shape, seed: int) -> np.ndarray:
    """Uniform(-1, 1) draws addressed by flat entry index (Philox, one pass)."""
    gen = np.random.Generator(np.random.Philox(key=seed))
    return gen.uniform(-1.0, 1.0, size=int(np.prod(shape))).reshape(shape)


def apply_noise(ds: PhaselessDataset, spec: NoiseSpec) -> PhaselessDataset:
    """Perturbed copy: relative ``m (1 + delta e)``, absolute ``max(0, m + delta e)``."""
    if spec.delta == 0.0:
        return replace(ds, noise=spec)
    e = noise_draws(ds.values.shape, spec.seed)
    if spec.kind == "relative":
        noisy = ds.values * (1.0 + spec.delta * e)
    else:
        noisy = np.maximum(0.0, ds.values + spec.delta * e)
    return replace(ds, values=noisy, noise=spec)
