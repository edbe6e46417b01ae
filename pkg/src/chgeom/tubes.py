"""Tube and equidistant hypersurface germs around the ruled minimal
submanifolds, obtained by propagating shape data along normal geodesics.

For a base point o of the orbit W and a unit normal eta, the tube of
radius r is the image of the unit normal bundle under the normal
exponential map.  Its shape operator at exp_o(r eta) is recovered from
matrix Jacobi data: modes start at (v, -S^W_eta v) for tangent v and at
(0, w) for normals w orthogonal to eta, and

    S = zeta'(r) zeta(r)^{-1}

with respect to the inward normal -gamma'(r) (pointing back toward W),
expressed in a parallel orthonormal frame.  The catalog eigenvalues
emerge with multiplicities (1, 1, 2n-2-k, k-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jacobi
from .construction import SubmanifoldSpec, orbit_second_fundamental_form
from .model import Point, SolvableModel
from .spectral import EigenStructure, HypersurfaceGerm, eigen_structure_from_lambda3

DEFAULT_ODE_STEP = 1e-4
FOCAL_ZERO_TOLERANCE = 1e-9
MAX_RADIUS = 10.0


def submanifold_shape_operator(spec: SubmanifoldSpec, eta: np.ndarray) -> np.ndarray:
    """Ambient matrix of the orbit's shape operator S^W_eta (zero off the
    tangent space), assembled from the second fundamental form."""
    iiform = orbit_second_fundamental_form(spec)
    coeffs = spec.normal_basis @ np.asarray(eta, dtype=float)
    mat = np.einsum("m,mij->ij", coeffs, iiform.matrices)
    t = spec.tangent_basis
    return t.T @ mat @ t


def normal_direction(spec: SubmanifoldSpec, coeffs=None) -> np.ndarray:
    """Unit normal at the base point; coeffs (len k) select a direction
    inside the normal space, defaulting to the first basis normal."""
    if coeffs is None:
        return spec.normal_basis[0].copy()
    coeffs = np.asarray(coeffs, dtype=float)
    eta = coeffs @ spec.normal_basis
    norm = np.linalg.norm(eta)
    if norm < 1e-12:
        raise ValueError("normal direction must be nonzero")
    return eta / norm


@dataclass
class TubeResult:
    """Tube germ plus the propagation data that produced it."""

    germ: HypersurfaceGerm
    base_point: Point
    endpoint: Point
    eta: np.ndarray
    r: float
    transport: np.ndarray  # columns = transported frame vectors o -> endpoint
    zeta: np.ndarray  # (2n-1, 2n-1) mode matrix at r, columns = modes
    zeta_prime: np.ndarray
    asymmetry: float  # symmetry defect of zeta' zeta^{-1}
    velocity_drift: float  # |transported eta - gamma'(r)|


def tube_shape_operator(
    spec: SubmanifoldSpec,
    eta: np.ndarray,
    r: float,
    step: float = DEFAULT_ODE_STEP,
) -> TubeResult:
    """Germ of the tube of radius r around the orbit, at exp_o(r eta).

    Uses the Jacobi-mode ODE (oracle form) for the shape operator and
    parallel transport for the frame; the germ's normal is the inward
    one, so the catalog eigenvalues come out positive.  r = 0 is allowed
    only for k = 1 (the hypersurface itself); r must stay below
    MAX_RADIUS to keep the exponential growth in double range.
    """
    model = SolvableModel(spec.params)
    d = spec.params.dim
    eta = np.asarray(eta, dtype=float)
    if abs(np.linalg.norm(eta) - 1.0) > 1e-10:
        raise ValueError("eta must be a unit vector")
    coeffs = spec.normal_basis @ eta
    if np.linalg.norm(eta - coeffs @ spec.normal_basis) > 1e-10:
        raise ValueError("eta must lie in the normal space of the orbit")
    if not (0.0 <= r <= MAX_RADIUS):
        raise ValueError(f"radius must lie in [0, {MAX_RADIUS}], got {r!r}")
    if r == 0.0 and spec.k != 1:
        raise ValueError("r = 0 is a focal singularity unless k = 1")

    # orthonormal basis of eta-perp: orbit tangent rows, then the normal
    # complement of eta
    if spec.k > 1:
        _, sv, vt = np.linalg.svd(coeffs[None, :])
        comp = vt[1:] @ spec.normal_basis
    else:
        comp = np.empty((0, d))
    m0 = np.vstack([spec.tangent_basis, comp])  # (2n-1, d)

    s_w = submanifold_shape_operator(spec, eta)
    n_tan = spec.tangent_basis.shape[0]
    zeta0 = np.vstack([spec.tangent_basis, np.zeros_like(comp)])
    zprime0 = np.vstack([-(s_w @ spec.tangent_basis.T).T, comp])

    zeta_r, zprime_r = jacobi.jacobi_ode_oracle(
        zeta0, zprime0, eta, spec.params.c, model.jmat, r, step
    )

    o = model.identity()
    stack = np.vstack([m0, np.eye(d)])
    coords_r, vel_r, moved = model.integrate_transport(
        o.coords, eta, stack, r, step
    )
    moved_m0 = moved[: m0.shape[0]]
    transport = moved[m0.shape[0] :].T  # columns = transported basis vectors
    endpoint = Point(coords_r)

    cm = m0 @ zeta_r.T  # (basis, modes) in the parallel frame
    cpm = m0 @ zprime_r.T
    s_par = cpm @ np.linalg.inv(cm)
    asym = float(np.max(np.abs(s_par - s_par.T)))
    shape = 0.5 * (s_par + s_par.T)

    vel = vel_r.vec if hasattr(vel_r, "vec") else vel_r
    drift = float(np.linalg.norm(transport @ eta - vel))
    germ = HypersurfaceGerm(
        params=spec.params,
        normal=-vel,
        tangent_basis=moved_m0,
        shape=shape,
        jmat=model.jmat,
    ).validate(tol=1e-6)
    return TubeResult(
        germ=germ,
        base_point=o,
        endpoint=endpoint,
        eta=eta,
        r=float(r),
        transport=transport,
        zeta=cm,
        zeta_prime=cpm,
        asymmetry=asym,
        velocity_drift=drift,
    )


def tube_spectrum_closed(r: float, c: float, n: int, k: int) -> np.ndarray:
    """Catalog spectrum of the radius-r tube (ascending, with multiplicity):
    lambda_1, lambda_2 once, lambda_3 = (sqrt(-c)/2) tanh(r sqrt(-c)/2)
    with multiplicity 2n-2-k, lambda_4 = -c/(4 lambda_3) with k-1."""
    s = math.sqrt(-c) / 2.0
    lam3 = s * math.tanh(s * r)
    hint = "G3_K1" if k == 1 else None
    es = eigen_structure_from_lambda3(lam3, c, branch_hint=hint, n=n, k=k)
    values = [es.lambda1, es.lambda2] + [es.lambda3] * (2 * n - 2 - k)
    if k > 1:
        lam4 = es.lambda4 if es.lambda4 is not None else es.lambda2
        values += [lam4] * (k - 1)
    return np.sort(np.asarray(values))


def focal_rank(es: EigenStructure, r: float, zero_tol: float = FOCAL_ZERO_TOLERANCE):
    """Rank of the focal map at radius r for a catalog germ.

    The Hopf-projected 2x2 block never degenerates (its determinant is
    f_3(r)^3 > 0); the remaining modes collapse exactly where their
    profile f vanishes, which happens at the focal radius of lambda_3
    and gives rank 2n - k there (2n - 1 elsewhere)."""
    if es.n is None or es.k is None:
        raise ValueError("focal_rank needs an EigenStructure built with n and k")
    n, k, c = es.n, es.k, es.c
    blocks = [(es.lambda3, 2 * n - 2 - k)]
    if es.branch == "G4":
        blocks.append((es.lambda4, k - 1))
    elif es.branch == "G3_KBIG":
        blocks.append((es.lambda2, k - 1))
    rank = 2  # the Hopf 2x2 block
    kernel = []
    for lam, mult in blocks:
        if mult == 0:
            continue
        fval = float(jacobi.f_function(lam, c, r))
        if abs(fval) <= zero_tol:
            kernel.append((lam, mult))
        else:
            rank += mult
    return rank, kernel


@dataclass
class FocalShapeReport:
    """Residuals of the focal shape-operator identities at the base point."""

    eta_return_residual: float
    ju_pair_residual: float
    bja_pair_residual: float
    complement_residual: float
    distance_residual: float


def focal_shape_check(
    spec: SubmanifoldSpec,
    eta: np.ndarray,
    r: float,
    step: float = DEFAULT_ODE_STEP,
) -> FocalShapeReport:
    """Propagate the tube germ back to the orbit and verify the collapsed
    shape-operator identities:

        S^r J eta^r = -(sqrt(-c)/2) B_JA,
        S^r B_JA    = -(sqrt(-c)/2) J eta^r,

    and zero on the orthogonal complement, where eta^r is the arrival
    velocity at the orbit, B_JA the parallel transport of J A (A from
    the tube germ's Hopf frame), and S^r the orbit's shape operator in
    the eta^r direction.  Only totally real normal spaces qualify."""
    if abs(spec.phi - math.pi / 2.0) > 1e-12:
        raise ValueError("focal identities need a totally real normal space")
    if r <= 0.0:
        raise ValueError("the focal check needs r > 0")
    from .spectral import hopf_frame_extract  # local: avoid cycles at import

    model = SolvableModel(spec.params)
    a = model.a
    tube = tube_shape_operator(spec, eta, r, step)
    germ = tube.germ
    frame = hopf_frame_extract(germ)
    p_mat = tube.transport  # columns: transported frame vectors o -> q

    # transport back q -> o is the transpose (transport is orthogonal)
    eta_r = p_mat.T @ germ.normal  # arrival velocity of the return geodesic
    b_ja = p_mat.T @ (germ.jmat @ frame.a_vec)
    j_eta_r = model.jmat @ eta_r

    s_r = submanifold_shape_operator(spec, eta_r)
    res1 = float(np.linalg.norm(s_r @ j_eta_r + a * b_ja))
    res2 = float(np.linalg.norm(s_r @ b_ja + a * j_eta_r))

    # complement inside the orbit tangent space
    t = spec.tangent_basis
    pair = np.vstack([j_eta_r, b_ja])
    pair_coeff = t @ pair.T  # tangent-space coefficients of the pair
    q, _ = np.linalg.qr(pair_coeff)
    proj = np.eye(t.shape[0]) - q @ q.T
    s_tan = t @ s_r @ t.T
    res3 = float(np.max(np.abs(s_tan @ proj)))

    # the return geodesic from the tube point must land on the base point
    coords_back, _ = model.integrate_geodesic(
        tube.endpoint.coords, germ.normal, r, step
    )
    res4 = float(np.linalg.norm(coords_back - tube.base_point.coords))

    res0 = float(np.linalg.norm(eta_r + eta))
    return FocalShapeReport(
        eta_return_residual=res0,
        ju_pair_residual=res1,
        bja_pair_residual=res2,
        complement_residual=res3,
        distance_residual=res4,
    )
