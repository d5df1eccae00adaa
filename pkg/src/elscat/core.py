"""Wave parameters, plane waves, the Navier Green's tensor and its far fields.

Conventions
-----------
Directions are unit 2-vectors; ``perp(d)`` rotates anticlockwise by pi/2,
``perp((1,0)) = (0,1)``.  For Lame constants ``(lam, mu)`` and circular
frequency ``omega`` the compressional and shear wavenumbers are

    kp = omega / sqrt(lam + 2 mu),    ks = omega / sqrt(mu).

The Green's tensor of ``mu Lap u + (lam+mu) grad div u + omega^2 u = 0`` is

    Phi(x, y) = (i / 4 mu) H0(ks r) I
              + (i / 4 omega^2) HessX [H0(ks r) - H0(kp r)],   r = |x - y|,

with ``H0 = H^(1)_0``.  For ``psi(r) = H0(k r)`` the Hessian in closed form
(using ``H0' = -H1`` and ``H1'(z) = H0(z) - H1(z)/z``) reads

    Hess psi = -k^2 (H0(kr) - H1(kr)/(kr)) rhat rhat^T
               - (k H1(kr) / r) (I - rhat rhat^T).

Far fields of the point source ``Phi(., y) q`` are normalized as

    Phi_p^inf(xhat) = exp(-i kp xhat.y) (q . xhat),
    Phi_s^inf(xhat) = exp(-i ks xhat.y) (q . perp(xhat)),

and this normalization is used for every far field in the package.  In it,
a radiating field behaves like

    u(x) ~ sum_a (k_a/omega)^(3/2) e^{i pi/4} / sqrt(8 pi omega)
               * e^{i k_a |x|} / sqrt(|x|) * u_a^inf(xhat) e_a(xhat)

with ``e_p = xhat`` and ``e_s = perp(xhat)`` (the exponent 3/2 is forced by
the Hankel asymptotics; see the asymptotic-match test).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from elscat.specfun import hankel1

MODE_P = "p"
MODE_S = "s"
MODES = (MODE_P, MODE_S)

#: Minimal source/evaluation separation below which the Green's tensor is
#: treated as singular (raises instead of silently regularizing).
COINCIDENCE_TOL = 1e-12


# ---------------------------------------------------------------------------
# Wave parameters and directions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveParameters:
    """Circular frequency and Lame constants with derived wavenumbers."""

    omega: float
    lam: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if not (self.omega > 0):
            raise ValueError("omega must be > 0")
        if not (self.mu > 0):
            raise ValueError("mu must be > 0")
        if not (2.0 * self.mu + self.lam > 0):
            raise ValueError("2 mu + lam must be > 0")

    @property
    def kp(self) -> float:
        return self.omega / math.sqrt(self.lam + 2.0 * self.mu)

    @property
    def ks(self) -> float:
        return self.omega / math.sqrt(self.mu)

    def wavenumber(self, mode: str) -> float:
        if mode == MODE_P:
            return self.kp
        if mode == MODE_S:
            return self.ks
        raise ValueError(f"unknown mode {mode!r}")

    @property
    def shear_wavelength(self) -> float:
        return 2.0 * math.pi / self.ks


def direction(theta: float) -> np.ndarray:
    """Unit vector ``(cos theta, sin theta)``."""
    return np.array([math.cos(theta), math.sin(theta)])


def direction_grid(n: int) -> np.ndarray:
    """The ``n`` equispaced directions ``theta_l = 2 pi l / n``, shape (n, 2)."""
    theta = 2.0 * math.pi * np.arange(n) / n
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def perp(d: np.ndarray) -> np.ndarray:
    """Anticlockwise rotation by pi/2: ``perp((d1, d2)) = (-d2, d1)``."""
    d = np.asarray(d, dtype=float)
    return np.stack([-d[..., 1], d[..., 0]], axis=-1)


# ---------------------------------------------------------------------------
# Plane waves
# ---------------------------------------------------------------------------

def plane_wave(mode: str, d: np.ndarray, params: WaveParameters, x: np.ndarray) -> np.ndarray:
    """Incident plane wave, evaluated at points ``x`` of shape (..., 2).

    Compressional: ``d exp(i kp x.d)``; shear: ``perp(d) exp(i ks x.d)``.
    Both have unit pointwise magnitude.
    """
    d = np.asarray(d, dtype=float)
    x = np.asarray(x, dtype=float)
    k = params.wavenumber(mode)
    amp = d if mode == MODE_P else perp(d)
    phase = np.exp(1j * k * (x @ d))
    return phase[..., None] * amp


# ---------------------------------------------------------------------------
# Green's tensor
# ---------------------------------------------------------------------------

def _hessian_coefficients(k: float, r: np.ndarray):
    """Coefficients (a, b) with Hess[H0(kr)] = a rhat rhat^T + b (I - rhat rhat^T)."""
    kr = k * r
    h0 = hankel1(0, kr)
    h1 = hankel1(1, kr)
    a = -k * k * (h0 - h1 / kr)
    b = -k * h1 / r
    return a, b


def green_tensor_blocks(params: WaveParameters, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Green's tensor for all pairs: ``x`` (m, 2), ``y`` (s, 2) -> (m, s, 2, 2)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    diff = x[:, None, :] - y[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    if np.any(r < COINCIDENCE_TOL):
        raise ValueError("source/evaluation points coincide (r < 1e-12)")
    rhat = diff / r[..., None]
    proj = rhat[..., :, None] * rhat[..., None, :]
    eye = np.eye(2)

    a_s, b_s = _hessian_coefficients(params.ks, r)
    a_p, b_p = _hessian_coefficients(params.kp, r)
    h0s = hankel1(0, params.ks * r)

    c_proj = (1j / (4.0 * params.omega**2)) * (a_s - a_p)
    c_orth = (1j / (4.0 * params.omega**2)) * (b_s - b_p)
    c_id = (1j / (4.0 * params.mu)) * h0s

    return (
        c_id[..., None, None] * eye
        + c_proj[..., None, None] * proj
        + c_orth[..., None, None] * (eye - proj)
    )


def green_tensor(params: WaveParameters, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Green's tensor ``Phi(x, y)`` for a single pair of points, shape (2, 2)."""
    return green_tensor_blocks(params, np.asarray(x)[None, :], np.asarray(y)[None, :])[0, 0]


def green_far_field(mode: str, xhat: np.ndarray, y: np.ndarray, q: np.ndarray,
                    params: WaveParameters):
    """Far field pattern of the point source ``Phi(., y) q``.

    Mode p: ``exp(-i kp xhat.y) (q . xhat)``; mode s with ``ks`` and
    ``perp(xhat)``.  ``xhat`` may be a single direction or a stack (..., 2).
    """
    xhat = np.asarray(xhat, dtype=float)
    y = np.asarray(y, dtype=float)
    q = np.asarray(q, dtype=float)
    k = params.wavenumber(mode)
    e = xhat if mode == MODE_P else perp(xhat)
    out = np.exp(-1j * k * (xhat @ y)) * (e @ q)
    return complex(out) if out.ndim == 0 else out


def radiation_prefactor(mode: str, params: WaveParameters, radius: float) -> complex:
    """Amplitude multiplying ``u^inf`` in the large-|x| expansion at ``|x| = radius``.

    ``(k/omega)^(3/2) e^{i pi/4} / sqrt(8 pi omega) * e^{i k radius} / sqrt(radius)``.
    """
    k = params.wavenumber(mode)
    return ((k / params.omega) ** 1.5 * np.exp(1j * math.pi / 4.0)
            / math.sqrt(8.0 * math.pi * params.omega)
            * np.exp(1j * k * radius) / math.sqrt(radius))


# ---------------------------------------------------------------------------
# Polarizations, strengths, arcs
# ---------------------------------------------------------------------------

POLARIZATION_ANGLES = (math.pi / 4.0, 11.0 * math.pi / 12.0, 19.0 * math.pi / 12.0)

#: Slack on the closed-arc test q.xhat >= 1/2 (floating point at arc endpoints).
_ARC_TOL = 1e-12


@dataclass(frozen=True)
class PolarizationSet:
    """Polarization directions whose arcs ``{q.xhat >= 1/2}`` cover the circle."""

    angles: tuple[float, ...] = POLARIZATION_ANGLES

    @property
    def vectors(self) -> np.ndarray:
        return np.stack([direction(a) for a in self.angles])

    def __len__(self) -> int:
        return len(self.angles)


def arc_select_index(xhat: np.ndarray, mode: str, polarizations: PolarizationSet) -> int:
    """Index of the first polarization whose arc contains ``xhat``.

    Mode p tests ``q . xhat >= 1/2``; mode s tests ``q . perp(xhat) >= 1/2``.
    Ties break to the smallest index.  Raises if no arc qualifies, which for
    the default set would violate the circle-cover invariant.
    """
    ref = np.asarray(xhat, dtype=float) if mode == MODE_P else perp(np.asarray(xhat, dtype=float))
    dots = polarizations.vectors @ ref
    ok = np.nonzero(dots >= 0.5 - _ARC_TOL)[0]
    if ok.size == 0:
        raise RuntimeError(f"no polarization arc covers direction {xhat} in mode {mode!r}")
    return int(ok[0])


def arc_select(xhat: np.ndarray, mode: str, polarizations: PolarizationSet) -> np.ndarray:
    """The polarization vector selected by :func:`arc_select_index`."""
    return polarizations.vectors[arc_select_index(xhat, mode, polarizations)]


def _collinear(z1: complex, z2: complex, z3: complex, rel_eps: float = 1e-10) -> bool:
    """True when the triangle (z1, z2, z3) is degenerate in the complex plane."""
    d = max(abs(z1 - z2), abs(z2 - z3), abs(z1 - z3))
    if d == 0.0:
        return True
    area2 = abs(((z2 - z1).conjugate() * (z3 - z1)).imag)
    return area2 <= rel_eps * d * d


#: Paper-scale point-source strengths; anchors -tau are not collinear.
DEFAULT_STRENGTHS = (0.5 + 0.0j, -0.5 + 0.0j, 0.5j)


@dataclass(frozen=True)
class StrengthSet:
    """Three point-source strengths whose negatives form a valid anchor triangle."""

    taus: tuple[complex, ...] = DEFAULT_STRENGTHS

    def __post_init__(self):
        if len(self.taus) != 3:
            raise ValueError("exactly three strengths required")
        z = self.anchors
        if len({z[0], z[1], z[2]}) != 3 or _collinear(*z):
            raise ValueError("anchors -tau_j must be pairwise distinct and not collinear")

    @property
    def anchors(self) -> tuple[complex, complex, complex]:
        return tuple(-complex(t) for t in self.taus)


# ---------------------------------------------------------------------------
# Strip hulls
# ---------------------------------------------------------------------------

def strip_hull(shape, xhat: np.ndarray) -> tuple[float, float]:
    """Smallest interval [a, b] with ``a <= z . xhat <= b`` over the shape.

    ``shape`` is either an (n, 2) point array or any object exposing
    ``hull_points()`` (obstacle boundaries, source supports).
    """
    if hasattr(shape, "hull_points"):
        pts = np.asarray(shape.hull_points(), dtype=float)
    else:
        pts = np.asarray(shape, dtype=float)
    if pts.size == 0:
        raise ValueError("empty shape")
    proj = pts @ np.asarray(xhat, dtype=float)
    return float(proj.min()), float(proj.max())
