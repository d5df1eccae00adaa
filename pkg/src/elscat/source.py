"""Far fields radiated by compactly supported vector sources.

A source is a piecewise-polynomial vector density on a union of convex
polygonal pieces (axis-aligned rectangles and triangles).  Its far fields at
frequency ``omega`` are the oscillatory integrals

    u_p^inf(xhat, omega) = int exp(-i kp xhat.y) (xhat . F(y)) dy,
    u_s^inf(xhat, omega) = int exp(-i ks xhat.y) (perp(xhat) . F(y)) dy,

evaluated piece by piece with tensor Gauss rules whose node density scales
with the wavenumber (pieces are subdivided so no rule is asked to resolve
more oscillation than it can).  Adding a point source of strength ``tau`` at
``z`` with polarization ``q`` shifts the shear far field by
``tau exp(-i ks xhat.z) (q . perp(xhat))`` (p analogously); there is no
multiple scattering in the source model, so these formulas are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.polynomial.polynomial import polyval2d

from elscat.core import MODE_P, WaveParameters, perp


# ---------------------------------------------------------------------------
# Quadrature configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureOptions:
    """Node-density policy for the oscillatory support integrals."""

    nodes_per_wavelength: float = 10.0
    min_nodes: int = 8
    max_nodes_per_piece: int = 72  # per dimension; larger pieces are subdivided

    def nodes_for(self, k: float, extent: float) -> int:
        if self.nodes_per_wavelength < 6.0:
            raise ValueError(
                "quadrature density below 6 nodes per wavelength cannot resolve "
                "the oscillatory integrand"
            )
        wavelengths = k * extent / (2.0 * math.pi)
        return max(self.min_nodes, math.ceil(self.nodes_per_wavelength * wavelengths))


DEFAULT_QUADRATURE = QuadratureOptions()

_gauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _gauss_cache:
        _gauss_cache[n] = leggauss(n)
    return _gauss_cache[n]


def _gauss_on(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = _gauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * t, half * w


# ---------------------------------------------------------------------------
# Densities and support pieces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolynomialDensity:
    """Vector density (F1, F2) with bivariate polynomial components.

    ``cx[i, j]`` multiplies ``y1^i y2^j`` in the first component, ``cy``
    likewise in the second.
    """

    cx: tuple[tuple[float, ...], ...]
    cy: tuple[tuple[float, ...], ...]

    @staticmethod
    def constant(fx: float, fy: float) -> "PolynomialDensity":
        return PolynomialDensity(((fx,),), ((fy,),))

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        y1, y2 = pts[..., 0], pts[..., 1]
        f1 = polyval2d(y1, y2, np.asarray(self.cx, dtype=float))
        f2 = polyval2d(y1, y2, np.asarray(self.cy, dtype=float))
        return np.stack([f1, f2], axis=-1)


@dataclass(frozen=True)
class Piece:
    """Convex polygonal support piece (ccw vertices) carrying a density."""

    vertices: tuple[tuple[float, float], ...]
    density: PolynomialDensity

    @property
    def vertex_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def quad_points(self, k: float, quad: QuadratureOptions):
        raise NotImplementedError

    def line_interval(self, point: np.ndarray, tangent: np.ndarray):
        """Clip the line point + t*tangent against the piece; (t0, t1) or None."""
        v = self.vertex_array
        t_lo, t_hi = -np.inf, np.inf
        n = len(v)
        for i in range(n):
            a, b = v[i], v[(i + 1) % n]
            edge = b - a
            # inside (ccw polygon): cross(edge, y - a) >= 0
            c0 = edge[0] * (point[1] - a[1]) - edge[1] * (point[0] - a[0])
            c1 = edge[0] * tangent[1] - edge[1] * tangent[0]
            if abs(c1) < 1e-15:
                if c0 < 0:
                    return None
                continue
            t_cross = -c0 / c1
            if c1 > 0:
                t_lo = max(t_lo, t_cross)
            else:
                t_hi = min(t_hi, t_cross)
        if t_lo >= t_hi:
            return None
        return t_lo, t_hi


@dataclass(frozen=True)
class RectPiece(Piece):
    @staticmethod
    def make(x0, x1, y0, y1, density) -> "RectPiece":
        return RectPiece(((x0, y0), (x1, y0), (x1, y1), (x0, y1)), density)

    def quad_points(self, k: float, quad: QuadratureOptions):
        (x0, y0), _, (x1, y1), _ = self.vertices
        out_pts, out_w = [], []
        for ax0, ax1 in _split_axis(x0, x1, k, quad):
            for ay0, ay1 in _split_axis(y0, y1, k, quad):
                nx = quad.nodes_for(k, ax1 - ax0)
                ny = quad.nodes_for(k, ay1 - ay0)
                gx, wx = _gauss_on(ax0, ax1, nx)
                gy, wy = _gauss_on(ay0, ay1, ny)
                pts = np.stack(np.meshgrid(gx, gy, indexing="ij"), axis=-1).reshape(-1, 2)
                w = np.outer(wx, wy).reshape(-1)
                out_pts.append(pts)
                out_w.append(w)
        return np.concatenate(out_pts), np.concatenate(out_w)


def _split_axis(a: float, b: float, k: float, quad: QuadratureOptions):
    n = quad.nodes_for(k, b - a)
    parts = max(1, math.ceil(n / quad.max_nodes_per_piece))
    edges = np.linspace(a, b, parts + 1)
    return list(zip(edges[:-1], edges[1:]))


@dataclass(frozen=True)
class TrianglePiece(Piece):
    @staticmethod
    def make(v1, v2, v3, density) -> "TrianglePiece":
        return TrianglePiece((tuple(v1), tuple(v2), tuple(v3)), density)

    def quad_points(self, k: float, quad: QuadratureOptions):
        extent = _max_extent(self.vertex_array)
        if quad.nodes_for(k, extent) > quad.max_nodes_per_piece:
            pts_w = [t.quad_points(k, quad) for t in self._subdivide()]
            return (np.concatenate([p for p, _ in pts_w]),
                    np.concatenate([w for _, w in pts_w]))
        return _duffy_triangle(self.vertex_array, quad.nodes_for(k, extent))

    def _subdivide(self):
        v = self.vertex_array
        m01, m12, m20 = 0.5 * (v[0] + v[1]), 0.5 * (v[1] + v[2]), 0.5 * (v[2] + v[0])
        mk = TrianglePiece.make
        return (
            mk(v[0], m01, m20, self.density),
            mk(m01, v[1], m12, self.density),
            mk(m20, m12, v[2], self.density),
            mk(m01, m12, m20, self.density),
        )


def _max_extent(v: np.ndarray) -> float:
    return float(max(np.ptp(v[:, 0]), np.ptp(v[:, 1])))


def _duffy_triangle(v: np.ndarray, n: int):
    """Tensor Gauss rule on the unit square collapsed onto a triangle."""
    gu, wu = _gauss_on(0.0, 1.0, n)
    gv, wv = _gauss_on(0.0, 1.0, n)
    u = gu[:, None]
    vv = gv[None, :]
    pts = (v[0][None, None, :]
           + u[..., None] * ((v[1] - v[0])[None, None, :]
                             + vv[..., None] * (v[2] - v[1])[None, None, :]))
    det = abs((v[1][0] - v[0][0]) * (v[2][1] - v[1][1])
              - (v[1][1] - v[0][1]) * (v[2][0] - v[1][0]))
    w = np.outer(wu * gu, wv) * det
    return pts.reshape(-1, 2), w.reshape(-1)


# ---------------------------------------------------------------------------
# Source fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SourceField:
    """Compactly supported vector source: polygonal pieces with densities."""

    pieces: tuple[Piece, ...]
    name: str = "source"

    def hull_points(self) -> np.ndarray:
        return np.concatenate([p.vertex_array for p in self.pieces])


#: Smooth benchmark density F(y) = (y1^2 + y2^2 + 5, y1^2 - y2^2 + 5).
BENCHMARK_DENSITY = PolynomialDensity(
    cx=((5.0, 0.0, 1.0), (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
    cy=((5.0, 0.0, -1.0), (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
)


def rectangle_source() -> SourceField:
    return SourceField((RectPiece.make(1.0, 2.0, 1.0, 1.6, BENCHMARK_DENSITY),),
                       name="rectangle")


def lshape_source() -> SourceField:
    # (0,2)x(0,2) minus (1/16,2)x(1/16,2): thin L along the left/bottom edges.
    w = 1.0 / 16.0
    return SourceField(
        (RectPiece.make(0.0, w, 0.0, 2.0, BENCHMARK_DENSITY),
         RectPiece.make(w, 2.0, 0.0, w, BENCHMARK_DENSITY)),
        name="lshape",
    )


def triangle_source() -> SourceField:
    return SourceField(
        (TrianglePiece.make((-2.0, 0.0), (1.0, 0.0),
                            (-0.5, 1.5 * math.sqrt(3.0)), BENCHMARK_DENSITY),),
        name="triangle",
    )


def counterexample_pair() -> tuple[SourceField, SourceField]:
    """Two distinct sources with (1,0)-type densities used to probe strip
    non-uniqueness; both have identically zero second component."""
    one = PolynomialDensity.constant(1.0, 0.0)
    linear = PolynomialDensity(((0.0,), (1.0,)), ((0.0,),))  # (y1, 0)
    f1 = SourceField(
        (RectPiece.make(-1.0, 1.0, 1.0, 2.0, one),
         RectPiece.make(-1.0, 1.0, -1.0, 1.0, linear),
         RectPiece.make(-1.0, 1.0, -2.0, -1.0, one)),
        name="counterexample-1",
    )
    f2 = SourceField(
        (RectPiece.make(-1.0, 1.0, 1.0, 2.0, one),
         RectPiece.make(-1.0, 1.0, -2.0, -1.0, one)),
        name="counterexample-2",
    )
    return f1, f2


SOURCE_PRESETS = {
    "rectangle": rectangle_source,
    "lshape": lshape_source,
    "triangle": triangle_source,
}


@dataclass(frozen=True)
class FrequencyGrid:
    """Midpoint frequency nodes k_j = (j - 1/2) dk with dk = k_max / count."""

    count: int = 20
    k_max: float = 20.0

    def __post_init__(self):
        if self.count < 1 or self.k_max <= 0:
            raise ValueError("frequency grid needs count >= 1 and k_max > 0")

    @property
    def dk(self) -> float:
        return self.k_max / self.count

    @property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.count) + 0.5) * self.dk


# ---------------------------------------------------------------------------
# Far-field integrals
# ---------------------------------------------------------------------------

def translated_source(f: SourceField, h: np.ndarray) -> SourceField:
    """The shifted source F_h(y) = F(y + h): supports move by -h.

    Implemented by shifting piece vertices and re-centering densities so
    that the shifted field evaluates F at the original argument.
    """
    h = np.asarray(h, dtype=float)

    def shift_piece(p: Piece) -> Piece:
        moved = tuple((v[0] - h[0], v[1] - h[1]) for v in p.vertices)
        return replace(p, vertices=moved, density=_shift_density(p.density, h))

    return SourceField(tuple(shift_piece(p) for p in f.pieces), name=f.name + "-shifted")


def _shift_density(d: PolynomialDensity, h: np.ndarray) -> PolynomialDensity:
    """Polynomial p(y + h) re-expanded around y."""

    def shift(coeffs):
        c = np.asarray(coeffs, dtype=float)
        out = np.zeros_like(c)
        ni, nj = c.shape
        for i in range(ni):
            for j in range(nj):
                if c[i, j] == 0.0:
                    continue
                for a in range(i + 1):
                    for b in range(j + 1):
                        out[a, b] += (c[i, j] * math.comb(i, a) * math.comb(j, b)
                                      * h[0] ** (i - a) * h[1] ** (j - b))
        return tuple(tuple(row) for row in out)

    return PolynomialDensity(shift(d.cx), shift(d.cy))


def source_far_field(f: SourceField, mode: str, xhat: np.ndarray, omega: float,
                     params_template: WaveParameters,
                     quad: QuadratureOptions = DEFAULT_QUADRATURE) -> complex:
    """Far field of the source at one observation direction and frequency."""
    if not omega > 0:
        raise ValueError("omega must be > 0")
    params = WaveParameters(omega=omega, lam=params_template.lam, mu=params_template.mu)
    k = params.wavenumber(mode)
    xhat = np.asarray(xhat, dtype=float)
    e = xhat if mode == MODE_P else perp(xhat)
    total = 0.0 + 0.0j
    for piece in f.pieces:
        pts, w = piece.quad_points(k, quad)
        fvals = piece.density(pts)
        total += np.sum(w * np.exp(-1j * k * (pts @ xhat)) * (fvals @ e))
    return complex(total)


def source_far_field_table(f: SourceField, mode: str, xhats: np.ndarray,
                           grid: FrequencyGrid, params_template: WaveParameters,
                           quad: QuadratureOptions = DEFAULT_QUADRATURE) -> np.ndarray:
    """Far fields over (direction, frequency-node), shape (n_dir, grid.count)."""
    xhats = np.atleast_2d(np.asarray(xhats, dtype=float))
    out = np.empty((len(xhats), grid.count), dtype=complex)
    for j, omega in enumerate(grid.nodes):
        for i, xhat in enumerate(xhats):
            out[i, j] = source_far_field(f, mode, xhat, float(omega),
                                         params_template, quad)
    return out


def combined_source_far_field(f: SourceField, mode: str, xhat: np.ndarray,
                              omega: float, z: np.ndarray, q: np.ndarray,
                              tau: complex, params_template: WaveParameters,
                              quad: QuadratureOptions = DEFAULT_QUADRATURE) -> complex:
    """Far field of source plus point source: exact superposition."""
    params = WaveParameters(omega=omega, lam=params_template.lam, mu=params_template.mu)
    k = params.wavenumber(mode)
    xhat = np.asarray(xhat, dtype=float)
    e = xhat if mode == MODE_P else perp(xhat)
    point_term = tau * np.exp(-1j * k * (xhat @ np.asarray(z, dtype=float))) * (e @ np.asarray(q, dtype=float))
    return source_far_field(f, mode, xhat, omega, params_template, quad) + point_term


def line_integral_profile(f: SourceField, xhat: np.ndarray, alpha: float,
                          n_nodes: int = 16) -> float:
    """Line integral of ``xhat . F`` over the line ``y . xhat + alpha = 0``.

    Returns 0 when the line misses the support.  ``n_nodes`` Gauss nodes per
    piece chord are exact for the polynomial densities used here.
    """
    xhat = np.asarray(xhat, dtype=float)
    base = -alpha * xhat
    tangent = perp(xhat)
    total = 0.0
    for piece in f.pieces:
        interval = piece.line_interval(base, tangent)
        if interval is None:
            continue
        t, w = _gauss_on(interval[0], interval[1], n_nodes)
        pts = base[None, :] + t[:, None] * tangent[None, :]
        total += float(np.sum(w * (piece.density(pts) @ xhat)))
    return total
