"""Phase retrieval: trilateration of a plane point from three distances,
and the far-field pipelines built on it.

A complex number w with known distances ``r_j = |w - z_j|`` to three
non-collinear anchors ``z_j`` is recovered geometrically:

1. if some ``r_j = 0`` the point is ``z_j``;
2. ``M`` is the point at distance ``r_2`` from ``z_2`` along the ray
   ``z_2 -> z_1``;
3. the law of cosines gives the angle ``alpha`` between that ray and the
   ray ``z_2 -> w`` (cosine clamped to [-1, 1] so noisy, slightly
   inconsistent distances still yield a point); the two rotations of ``M``
   around ``z_2`` by ``-alpha`` and ``+alpha`` are the candidates;
4. the candidate whose distance to ``z_3`` best matches ``r_3`` wins.  On
   exact data the match is exact; under noise the argmin degrades
   gracefully and a mismatch report (never an exception) flags entries
   whose best candidate still misses ``r_3`` by more than the slack.

For far-field data the anchors are the negated point-source strengths: on
the shear arcs ``q . perp(xhat) >= 1/2`` the scaled moduli
``|w_inf| / (q . perp(xhat))`` are distances from
``u_inf e^{i ks xhat.z} / (q . perp(xhat))`` to ``-tau_j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from elscat.core import (
    MODE_S,
    PolarizationSet,
    StrengthSet,
    WaveParameters,
    _collinear,
    arc_select_index,
    direction,
    direction_grid,
    perp,
)
from elscat.data import PhaselessDataset


@dataclass(frozen=True)
class AnchorTriple:
    """Three pairwise distinct, non-collinear complex anchors."""

    z1: complex
    z2: complex
    z3: complex

    def __post_init__(self):
        zs = (self.z1, self.z2, self.z3)
        if len({self.z1, self.z2, self.z3}) != 3:
            raise ValueError("anchors must be pairwise distinct")
        if _collinear(*zs):
            raise ValueError("anchors must not be collinear")

    @staticmethod
    def from_strengths(strengths: StrengthSet) -> "AnchorTriple":
        return AnchorTriple(*strengths.anchors)


@dataclass(frozen=True)
class TrilaterationResult:
    points: np.ndarray        # complex, shape of the input radii
    mismatch: np.ndarray      # | |best - z3| - r3 |
    inconsistent: np.ndarray  # mismatch beyond slack (report, not error)
    clamp_count: int          # entries whose cos(alpha) needed clamping


def trilaterate_many(anchors: AnchorTriple, r1, r2, r3,
                     slack: float = 1e-6) -> TrilaterationResult:
    """Vectorized trilateration; radii arrays share one broadcast shape."""
    r1, r2, r3 = np.broadcast_arrays(
        np.asarray(r1, dtype=float), np.asarray(r2, dtype=float),
        np.asarray(r3, dtype=float))
    if np.any(r1 < 0) or np.any(r2 < 0) or np.any(r3 < 0):
        raise ValueError("distances must be >= 0")
    z1, z2, z3 = complex(anchors.z1), complex(anchors.z2), complex(anchors.z3)
    d12 = abs(z1 - z2)

    m = (r2 / d12) * z1 + ((d12 - r2) / d12) * z2
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_a = (r2**2 + d12**2 - r1**2) / (2.0 * r2 * d12)
    cos_a = np.where(r2 == 0.0, 1.0, cos_a)  # placeholder; overwritten below
    clamped = int(np.sum((cos_a < -1.0) | (cos_a > 1.0)))
    cos_a = np.clip(cos_a, -1.0, 1.0)
    sin_a = np.sqrt(1.0 - cos_a**2)
    rot = cos_a - 1j * sin_a  # e^{-i alpha}
    za = z2 + (m - z2) * rot
    zb = z2 + (m - z2) * np.conj(rot)

    mis_a = np.abs(np.abs(za - z3) - r3)
    mis_b = np.abs(np.abs(zb - z3) - r3)
    points = np.where(mis_a <= mis_b, za, zb)
    mismatch = np.minimum(mis_a, mis_b)

    # exact-zero distances short-circuit to the matching anchor (first j wins)
    decided = np.zeros(r1.shape, dtype=bool)
    for r, z in ((r1, z1), (r2, z2), (r3, z3)):
        hit = (r == 0.0) & ~decided
        points = np.where(hit, z, points)
        mismatch = np.where(hit, np.abs(abs(z - z3) - r3), mismatch)
        decided |= hit
    inconsistent = mismatch > slack * np.maximum(1.0, r3)
    return TrilaterationResult(points=points, mismatch=mismatch,
                               inconsistent=inconsistent, clamp_count=clamped)


def trilaterate(anchors: AnchorTriple, r1: float, r2: float, r3: float,
                slack: float = 1e-6) -> complex:
    """Scalar trilateration per the scheme above."""
    for r, z in ((r1, anchors.z1), (r2, anchors.z2), (r3, anchors.z3)):
        if r == 0.0:
            return complex(z)
    res = trilaterate_many(anchors, r1, r2, r3, slack=slack)
    return complex(res.points)


@dataclass(frozen=True)
class RetrievedFarField:
    """Phase-retrieved far field with bookkeeping for uncovered directions."""

    values: np.ndarray
    missing: tuple[int, ...]       # observation indices with no covering arc
    inconsistent_count: int
    clamp_count: int


def _shear_arc_index(xhat: np.ndarray, q_angles) -> int | None:
    pol = PolarizationSet(tuple(q_angles))
    try:
        return arc_select_index(xhat, MODE_S, pol)
    except RuntimeError:
        return None


def _require_retrieval_dataset(ds: PhaselessDataset) -> AnchorTriple:
    if len(ds.taus) != 3:
        raise ValueError("phase retrieval needs exactly three strengths")
    return AnchorTriple.from_strengths(StrengthSet(tuple(ds.taus)))


def retrieve_source_far_field(ds: PhaselessDataset,
                              slack: float = 1e-6) -> RetrievedFarField:
    """Retrieve u_s^inf(xhat, omega_j) from |u_{F u {z}},s| moduli.

    Exact on clean data: the combined-source model has no multiple
    scattering.  Directions outside every shear arc of the dataset's
    polarization list are reported missing (zero rows), never extrapolated.
    """
    if ds.kind != "source":
        raise ValueError("expected a source dataset")
    anchors = _require_retrieval_dataset(ds)
    ks_nodes = ds.freq_grid.nodes / np.sqrt(ds.wave.mu)
    n_theta = len(ds.theta_angles)
    out = np.zeros((n_theta, ds.freq_grid.count), dtype=complex)
    missing: list[int] = []
    n_bad = 0
    n_clamp = 0
    for i, angle in enumerate(ds.theta_angles):
        xhat = direction(angle)
        iq = _shear_arc_index(xhat, ds.q_angles)
        if iq is None:
            missing.append(i)
            continue
        qperp = float(perp(xhat) @ direction(ds.q_angles[iq]))
        radii = [ds.values[i, :, j, iq] / qperp for j in range(3)]
        res = trilaterate_many(anchors, *radii, slack=slack)
        out[i] = res.points * qperp * np.exp(-1j * ks_nodes * (xhat @ ds.z))
        n_bad += int(res.inconsistent.sum())
        n_clamp += res.clamp_count
    return RetrievedFarField(values=out, missing=tuple(missing),
                             inconsistent_count=n_bad, clamp_count=n_clamp)


def retrieve_obstacle_far_field(ds: PhaselessDataset,
                                slack: float = 1e-6) -> RetrievedFarField:
    """Retrieve u_ss^inf(xhat_j, d_l) from |w_ss| moduli.

    Carries the irreducible multiple-scattering bias of order
    ``1/sqrt(dist(z, Omega))`` on top of the trilateration error.
    """
    if ds.kind != "obstacle":
        raise ValueError("expected an obstacle dataset")
    anchors = _require_retrieval_dataset(ds)
    wave: WaveParameters = ds.wave
    n = ds.n_directions
    dirs = direction_grid(n)
    out = np.zeros((n, n), dtype=complex)
    missing: list[int] = []
    n_bad = 0
    n_clamp = 0
    for j in range(n):
        xhat = dirs[j]
        iq = _shear_arc_index(xhat, ds.q_angles)
        if iq is None:
            missing.append(j)
            continue
        qperp = float(perp(xhat) @ direction(ds.q_angles[iq]))
        radii = [ds.values[j, :, it, iq] / qperp for it in range(3)]
        res = trilaterate_many(anchors, *radii, slack=slack)
        out[j] = res.points * qperp * np.exp(-1j * wave.ks * (xhat @ ds.z))
        n_bad += int(res.inconsistent.sum())
        n_clamp += res.clamp_count
    return RetrievedFarField(values=out, missing=tuple(missing),
                             inconsistent_count=n_bad, clamp_count=n_clamp)
