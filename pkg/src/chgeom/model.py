"""Solvable-group model of the complex hyperbolic space CH^n(c).

The ambient space is realized as a simply connected solvable Lie group
(the AN factor of an Iwasawa decomposition of the isometry group) with a
left-invariant metric and complex structure.  All tensor algebra happens
in a fixed orthonormal left-invariant frame; points live in global
exponential coordinates, so one chart covers everything.

Frame/coordinate order (dimension 2n):

    index 0        B   -- unit generator of the abelian factor
    index 1        Z   -- J B, spans the center of the nilpotent factor
    index 2i, 2i+1 e_i, J e_i  (i = 1..n-1) -- J-paired root directions

A point has coordinates (t, z, v) with t the abelian parameter, z the
center parameter and v in R^{2n-2}; the group element is
exp(t B) exp(v + z Z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

B_INDEX = 0
Z_INDEX = 1
GALPHA_START = 2

DEFAULT_ODE_STEP = 1e-4
DEFAULT_SAMPLES = 200
DEFAULT_SEED = 20260814
CURVATURE_TOLERANCE = 1e-10


class MismatchedBasePoints(ValueError):
    """Tangent vectors fed to a pointwise operation sit at different points."""


def standard_complex_structure(n: int) -> np.ndarray:
    """Matrix of J in the left-invariant frame: JB=Z, JZ=-B, Je_i pairs."""
    d = 2 * n
    j = np.zeros((d, d))
    for i in range(0, d, 2):
        j[i + 1, i] = 1.0
        j[i, i + 1] = -1.0
    return j


@dataclass(frozen=True)
class ModelParams:
    """Ambient dimension parameter n >= 2 and holomorphic curvature c != 0.

    The solvable group model needs c < 0; c > 0 is accepted only so the
    closed-form curvature tensor (and the algebraic scans built on it)
    can be evaluated there.
    """

    n: int
    c: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if self.c == 0 or not math.isfinite(self.c):
            raise ValueError(f"c must be a nonzero finite real, got {self.c!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return 2 * self.n


@dataclass(frozen=True)
class Point:
    """A point of the group in global coordinates (t, z, v...)."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))
        if self.coords.ndim != 1:
            raise ValueError("point coordinates must be a flat vector")


@dataclass(frozen=True)
class TangentVector:
    """Frame components of a tangent vector at ``base``.

    Components are taken with respect to the orthonormal left-invariant
    frame, so the metric on components is the Euclidean dot product.
    """

    base: Point
    vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vec", np.asarray(self.vec, dtype=float))
        if self.vec.ndim != 1 or self.vec.shape != self.base.coords.shape:
            raise ValueError("tangent components must match the point dimension")


def _as_components(x) -> np.ndarray:
    if isinstance(x, TangentVector):
        return x.vec
    return np.asarray(x, dtype=float)


def _common_base(*vectors):
    bases = [v.base for v in vectors if isinstance(v, TangentVector)]
    for b in bases[1:]:
        if not np.allclose(b.coords, bases[0].coords, atol=1e-12):
            raise MismatchedBasePoints(
                "tangent vectors live at different base points"
            )
    return bases[0] if bases else None


def ambient_curvature(x, y, z, c: float, jmat: np.ndarray) -> np.ndarray:
    """Closed-form curvature R(x,y)z of a complex space form, any c != 0.

    R(X,Y)Z = (c/4)(<Y,Z>X - <X,Z>Y + <JY,Z>JX - <JX,Z>JY - 2<JX,Y>JZ).
    Inputs are frame components; valid for either curvature sign.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    jx, jy, jz = jmat @ x, jmat @ y, jmat @ z
    return (c / 4.0) * (
        np.dot(y, z) * x
        - np.dot(x, z) * y
        + np.dot(jy, z) * jx
        - np.dot(jx, z) * jy
        - 2.0 * np.dot(jx, y) * jz
    )


@dataclass
class CurvatureReport:
    """Summary of the structural-vs-closed-form curvature comparison."""

    max_residual: float
    holomorphic_error: float
    totally_real_error: float
    pinching_violation: float
    samples: int
    worst_triple: tuple | None = None

    def passed(self, tol: float = CURVATURE_TOLERANCE) -> bool:
        return (
            self.max_residual < tol
            and self.holomorphic_error < tol
            and self.totally_real_error < tol
            and self.pinching_violation < tol
        )


class SolvableModel:
    """CH^n(c) as a solvable Lie group with left-invariant geometry.

    Exposes exact Lie brackets, the Koszul connection table, curvature
    both structurally and in closed form, the group law, and fixed-step
    RK4 integrators for geodesics and parallel transport.
    """

    def __init__(self, params: ModelParams):
        if params.c >= 0:
            raise ValueError(
                "the solvable group model exists only for c < 0; "
                "use ambient_curvature for c > 0"
            )
        self.params = params
        self.n = params.n
        self.c = params.c
        self.dim = params.dim
        # a is the root-space weight: ad(B) = a*id on the paired block,
        # 2a*id on the center.
        self.a = math.sqrt(-params.c) / 2.0
        self.jmat = standard_complex_structure(self.n)
        self.structure = self._structure_tensor()
        # koszul[i, j, k] = <nabla_{E_i} E_j, E_k> for the orthonormal
        # left-invariant frame.
        cs = self.structure
        # K[i,j,k] = (cs[i,j,k] - cs[j,k,i] + cs[k,i,j]) / 2
        self.koszul = 0.5 * (
            cs - np.transpose(cs, (2, 0, 1)) + np.transpose(cs, (1, 2, 0))
        )

    # -- algebra ---------------------------------------------------------

    def _structure_tensor(self) -> np.ndarray:
        d, a = self.dim, self.a
        cs = np.zeros((d, d, d))
        cs[B_INDEX, Z_INDEX, Z_INDEX] = 2.0 * a
        cs[Z_INDEX, B_INDEX, Z_INDEX] = -2.0 * a
        for u in range(GALPHA_START, d):
            cs[B_INDEX, u, u] = a
            cs[u, B_INDEX, u] = -a
        jg = self.jmat[GALPHA_START:, GALPHA_START:]
        # [U, V] = 2a <JU, V> Z on the paired block
        cs[GALPHA_START:, GALPHA_START:, Z_INDEX] = 2.0 * a * jg.T
        return cs

    def bracket(self, x, y) -> np.ndarray:
        """Lie bracket of left-invariant fields, frame components."""
        x, y = _as_components(x), _as_components(y)
        return np.einsum("i,j,ijk->k", x, y, self.structure)

    def j_action(self, x):
        """Apply the complex structure; preserves TangentVector bases."""
        if isinstance(x, TangentVector):
            return TangentVector(x.base, self.jmat @ x.vec)
        return self.jmat @ np.asarray(x, dtype=float)

    def inner(self, x, y) -> float:
        """Left-invariant metric on frame components (Euclidean dot)."""
        return float(np.dot(_as_components(x), _as_components(y)))

    def koszul_connection(self, x, y) -> np.ndarray:
        """nabla_x y for left-invariant fields, frame components."""
        x, y = _as_components(x), _as_components(y)
        return np.einsum("i,j,ijk->k", x, y, self.koszul)

    # -- curvature -------------------------------------------------------

    def curvature_from_koszul(self, x, y, z) -> np.ndarray:
        """R(x,y)z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_[x,y] z."""
        x, y, z = (_as_components(v) for v in (x, y, z))
        nc = self.koszul_connection
        return (
            nc(x, nc(y, z)) - nc(y, nc(x, z)) - nc(self.bracket(x, y), z)
        )

    def curvature_closed_form(self, x, y, z) -> np.ndarray:
        """Closed-form complex-space-form curvature at a common point."""
        _common_base(*(v for v in (x, y, z) if isinstance(v, TangentVector)))
        x, y, z = (_as_components(v) for v in (x, y, z))
        return ambient_curvature(x, y, z, self.c, self.jmat)

    def sectional_curvature(self, x, y) -> float:
        """K(span(x,y)) via the structural curvature tensor."""
        x, y = _as_components(x), _as_components(y)
        r = self.curvature_from_koszul(x, y, y)
        area = np.dot(x, x) * np.dot(y, y) - np.dot(x, y) ** 2
        if area < 1e-300:
            raise ValueError("degenerate 2-plane")
        return float(np.dot(r, x) / area)

    def verify_curvature(
        self,
        samples: int = DEFAULT_SAMPLES,
        seed: int = DEFAULT_SEED,
    ) -> CurvatureReport:
        """Compare structural and closed-form curvature on random triples.

        Also checks holomorphic planes (K = c), totally real planes
        (K = c/4) and the pinching c <= K <= c/4.
        """
        rng = np.random.default_rng(seed)
        d = self.dim
        max_residual = 0.0
        worst = None
        for _ in range(samples):
            x, y, z = rng.standard_normal((3, d))
            r1 = self.curvature_from_koszul(x, y, z)
            r2 = self.curvature_closed_form(x, y, z)
            res = float(np.max(np.abs(r1 - r2)))
            if res > max_residual:
                max_residual, worst = res, (x.copy(), y.copy(), z.copy())

        holo_err = 0.0
        real_err = 0.0
        pinch = 0.0
        for _ in range(samples):
            x = rng.standard_normal(d)
            x /= np.linalg.norm(x)
            holo_err = max(
                holo_err, abs(self.sectional_curvature(x, self.jmat @ x) - self.c)
            )
            # totally real plane: orthonormalize y against x and Jx
            y = rng.standard_normal(d)
            jx = self.jmat @ x
            y -= np.dot(y, x) * x + np.dot(y, jx) * jx
            y /= np.linalg.norm(y)
            real_err = max(
                real_err, abs(self.sectional_curvature(x, y) - self.c / 4.0)
            )
            w = rng.standard_normal(d)
            w -= np.dot(w, x) * x
            w /= np.linalg.norm(w)
            k = self.sectional_curvature(x, w)
            pinch = max(pinch, self.c - k, k - self.c / 4.0, 0.0)
        return CurvatureReport(
            max_residual=max_residual,
            holomorphic_error=float(holo_err),
            totally_real_error=float(real_err),
            pinching_violation=float(pinch),
            samples=samples,
            worst_triple=worst,
        )

    # -- group structure -------------------------------------------------

    def identity(self) -> Point:
        return Point(np.zeros(self.dim))

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def _split(self, coords: np.ndarray):
        return coords[..., 0], coords[..., 1], coords[..., GALPHA_START:]

    def group_multiply(self, p: Point, q: Point) -> Point:
        """Group product in global coordinates."""
        t1, z1, v1 = self._split(p.coords)
        t2, z2, v2 = self._split(q.coords)
        a = self.a
        s = math.exp(-a * t2)
        jg = self.jmat[GALPHA_START:, GALPHA_START:]
        out = np.empty(self.dim)
        out[0] = t1 + t2
        out[1] = s * s * z1 + z2 + a * s * np.dot(jg @ v1, v2)
        out[GALPHA_START:] = s * v1 + v2
        return Point(out)

    def group_inverse(self, p: Point) -> Point:
        t, z, v = self._split(p.coords)
        a = self.a
        e = math.exp(a * t)
        out = np.empty(self.dim)
        out[0] = -t
        out[1] = -e * e * z
        out[GALPHA_START:] = -e * v
        return Point(out)

    def frame_matrix(self, coords: np.ndarray) -> np.ndarray:
        """Columns = coordinate components of the left-invariant frame.

        Supports batched coords of shape (..., 2n); returns (..., 2n, 2n).
        """
        coords = np.asarray(coords, dtype=float)
        t, z, v = self._split(coords)
        a = self.a
        d = self.dim
        shape = coords.shape[:-1]
        mat = np.zeros(shape + (d, d))
        jg = self.jmat[GALPHA_START:, GALPHA_START:]
        jv = np.einsum("ab,...b->...a", jg, v)
        # column 0: frame B = (1, -2a z, -a v)
        mat[..., 0, 0] = 1.0
        mat[..., 1, 0] = -2.0 * a * z
        mat[..., GALPHA_START:, 0] = -a * v
        # column 1: frame Z = (0, 1, 0)
        mat[..., 1, 1] = 1.0
        # column u: frame E_u = (0, a <Jv, E_u>, E_u)
        for u in range(GALPHA_START, d):
            mat[..., 1, u] = a * jv[..., u - GALPHA_START]
            mat[..., u, u] = 1.0
        return mat

    def frame_to_coordinate_velocity(self, coords, vel) -> np.ndarray:
        """Coordinate velocity of a curve with frame velocity ``vel``."""
        coords = np.asarray(coords, dtype=float)
        vel = np.asarray(vel, dtype=float)
        t, z, v = self._split(coords)
        beta, zeta, u = self._split(vel)
        a = self.a
        jg = self.jmat[GALPHA_START:, GALPHA_START:]
        jv = np.einsum("ab,...b->...a", jg, v)
        out = np.empty(np.broadcast(coords, vel).shape)
        out[..., 0] = beta
        out[..., 1] = zeta - 2.0 * a * beta * z + a * np.sum(jv * u, axis=-1)
        out[..., GALPHA_START:] = u - a * beta[..., None] * v
        return out

    def coordinate_to_frame_velocity(self, coords, cdot) -> np.ndarray:
        """Frame components of a coordinate velocity (exact inverse)."""
        coords = np.asarray(coords, dtype=float)
        cdot = np.asarray(cdot, dtype=float)
        t, z, v = self._split(coords)
        td, zd, vd = self._split(cdot)
        a = self.a
        jg = self.jmat[GALPHA_START:, GALPHA_START:]
        out = np.empty(np.broadcast(coords, cdot).shape)
        out[..., 0] = td
        u = vd + a * td[..., None] * v
        out[..., GALPHA_START:] = u
        jv = np.einsum("ab,...b->...a", jg, v)
        out[..., 1] = zd + 2.0 * a * td * z - a * np.sum(jv * u, axis=-1)
        return out

    def left_translate_differential(self, p: Point, v) -> TangentVector:
        """Push an algebra element to the frame at p (components unchanged)."""
        return TangentVector(p, _as_components(v).copy())

    def metric_matrix(self, coords) -> np.ndarray:
        """Coordinate components of the metric at a point."""
        f = self.frame_matrix(np.asarray(coords, dtype=float))
        return np.linalg.inv(f @ np.swapaxes(f, -1, -2))

    # -- integrators -----------------------------------------------------

    def _geodesic_rhs(self, coords, vel):
        cdot = self.frame_to_coordinate_velocity(coords, vel)
        vdot = -np.einsum("...i,...j,ijk->...k", vel, vel, self.koszul)
        return cdot, vdot

    def _transport_rhs(self, coords, vel, mat):
        cdot, vdot = self._geodesic_rhs(coords, vel)
        mdot = -np.einsum("...i,...rj,ijk->...rk", vel, mat, self.koszul)
        return cdot, vdot, mdot

    @staticmethod
    def _steps(t: float, step: float):
        if step <= 0 or not math.isfinite(step):
            raise ValueError(f"step must be positive, got {step!r}")
        if not math.isfinite(t):
            raise ValueError(f"time must be finite, got {t!r}")
        nsteps = max(1, int(round(abs(t) / step)))
        return nsteps, t / nsteps

    def integrate_geodesic(self, coords0, vel0, t: float, step: float = DEFAULT_ODE_STEP):
        """Batched RK4 geodesic flow; returns (coords(t), frame vel(t))."""
        coords = np.array(coords0, dtype=float)
        vel = np.array(vel0, dtype=float)
        if t == 0.0:
            return coords, vel
        nsteps, h = self._steps(t, step)
        for _ in range(nsteps):
            k1c, k1v = self._geodesic_rhs(coords, vel)
            k2c, k2v = self._geodesic_rhs(coords + 0.5 * h * k1c, vel + 0.5 * h * k1v)
            k3c, k3v = self._geodesic_rhs(coords + 0.5 * h * k2c, vel + 0.5 * h * k2v)
            k4c, k4v = self._geodesic_rhs(coords + h * k3c, vel + h * k3v)
            coords = coords + (h / 6.0) * (k1c + 2 * k2c + 2 * k3c + k4c)
            vel = vel + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        return coords, vel

    def geodesic(self, p: Point, v, t: float, step: float = DEFAULT_ODE_STEP):
        """Geodesic from p with initial frame velocity v, evaluated at t."""
        v = _as_components(v)
        coords, vel = self.integrate_geodesic(p.coords, v, t, step)
        endpoint = Point(coords)
        return endpoint, TangentVector(endpoint, vel)

    def integrate_transport(self, coords0, vel0, mat0, t: float, step: float = DEFAULT_ODE_STEP):
        """RK4 transport of row-stacked vectors mat0 along a geodesic."""
        coords = np.array(coords0, dtype=float)
        vel = np.array(vel0, dtype=float)
        mat = np.array(mat0, dtype=float)
        if t == 0.0:
            return coords, vel, mat
        nsteps, h = self._steps(t, step)
        for _ in range(nsteps):
            k1 = self._transport_rhs(coords, vel, mat)
            k2 = self._transport_rhs(
                coords + 0.5 * h * k1[0], vel + 0.5 * h * k1[1], mat + 0.5 * h * k1[2]
            )
            k3 = self._transport_rhs(
                coords + 0.5 * h * k2[0], vel + 0.5 * h * k2[1], mat + 0.5 * h * k2[2]
            )
            k4 = self._transport_rhs(
                coords + h * k3[0], vel + h * k3[1], mat + h * k3[2]
            )
            coords = coords + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            vel = vel + (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            mat = mat + (h / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        return coords, vel, mat

    def parallel_transport(self, p: Point, v, w, t: float, step: float = DEFAULT_ODE_STEP):
        """Transport w (a vector or row-stack of vectors) along the geodesic
        from p with initial velocity v; returns (endpoint, velocity, moved w)."""
        v = _as_components(v)
        w = np.asarray(w, dtype=float)
        single = w.ndim == 1
        rows = w[None, :] if single else w
        coords, vel, moved = self.integrate_transport(p.coords, v, rows, t, step)
        endpoint = Point(coords)
        out = moved[0] if single else moved
        return endpoint, TangentVector(endpoint, vel), out
