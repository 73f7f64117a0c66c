"""Linear-algebraic kernel for the model geometries.

Coordinates
-----------
* ``X0`` / ``H2``: Minkowski space R^{2,1} with form -x0 y0 + x1 y1 + x2 y2.
  H2 is the future sheet of the unit hyperboloid.
* ``H3`` / ``X1``: R^{3,1} with form -x0 y0 + x1 y1 + x2 y2 + x3 y3.
  H3 is the future unit hyperboloid, X1 (de Sitter) the quadric q = +1.
  H2 sits in H3 as the slice x3 = 0 with positive normal (0, 0, 0, 1).
* ``Xm1``: 2x2 real matrices with q(A) = -det A; the model is q = -1, i.e.
  SL(2,R) up to sign.  The polarised form is eta(A, B) = -tr(adj(A) B) / 2.
* ``sl2``: traceless 2x2 matrices with eta(X, Y) = tr(XY) / 2.

The linear isometry sl(2,R) -> R^{2,1} is

    [[x2, x1 - x0], [x1 + x0, -x2]]  <->  (x0, x1, x2),

so E = [[0, -1], [1, 0]] <-> (1, 0, 0) and diag(1, -1) <-> (0, 0, 1).
Under it PSL(2,R) acts on R^{2,1} by conjugation, the upper half-plane point
z corresponds to the elliptic element of order two fixing z, and the ideal
point xi in R u {inf} corresponds to the angle 2 * arctan(xi) on the circle
{(1, cos t, sin t)}.  This identification preserves orientation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS_CLASS = 1e-9

J3 = np.diag([-1.0, 1.0, 1.0])
J4 = np.diag([-1.0, 1.0, 1.0, 1.0])
ID2 = np.eye(2)
E_ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
N0_H3 = np.array([0.0, 0.0, 0.0, 1.0])

RENORM_EVERY = 16

MODEL_TAGS = ("H2", "H3", "X0", "X1", "Xm1", "S2inf", "AdSBoundary")
_DIM = {"X0": 3, "H2": 3, "H3": 4, "X1": 4, "R31": 4, "S2inf": 4}


class InvalidInput(ValueError):
    """Input violates a documented precondition."""


class DisjointPlanes(InvalidInput):
    """Two planes of the anti-de Sitter model that do not meet."""


# -- forms --------------------------------------------------------------------


def minkowski(u, v):
    """Lorentzian product along the last axis (dimension 3 or 4)."""
    u = np.asarray(u)
    v = np.asarray(v)
    return -u[..., 0] * v[..., 0] + np.sum(u[..., 1:] * v[..., 1:], axis=-1)


def eta_sl2(X, Y):
    return 0.5 * np.trace(np.asarray(X) @ np.asarray(Y))


def eta_ads(A, B):
    """Polarisation of q(A) = -det A on 2x2 matrices."""
    A = np.asarray(A)
    B = np.asarray(B)
    adj = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]])
    return -0.5 * np.trace(adj @ B)


def inner(model, u, v):
    """Defining symmetric form of ``model`` evaluated on ambient vectors."""
    u = np.asarray(u)
    v = np.asarray(v)
    if model in ("sl2", "Xm1"):
        if u.shape != (2, 2) or v.shape != (2, 2):
            raise InvalidInput(f"{model} expects 2x2 matrices")
        return float(eta_sl2(u, v) if model == "sl2" else eta_ads(u, v))
    if model not in _DIM:
        raise InvalidInput(f"unknown model tag {model!r}")
    n = _DIM[model]
    if u.shape != (n,) or v.shape != (n,):
        raise InvalidInput(f"{model} expects vectors of length {n}")
    return float(minkowski(u, v))


def classify(v, eps=EPS_CLASS, model="X0"):
    q = inner(model, v, v)
    if q > eps:
        return "spacelike"
    if q < -eps:
        return "timelike"
    return "null"


def lorentz_cross(u, v):
    """Vector w with <w, z> = det(u, v, z) for all z in R^{2,1}."""
    return J3 @ np.cross(u, v)


def normalize_h2(v):
    v = np.asarray(v, dtype=float)
    q = minkowski(v, v)
    if q >= 0:
        raise InvalidInput("vector is not timelike")
    v = v / np.sqrt(-q)
    return v if v[0] > 0 else -v


def hpoint(v):
    """Validated unit future timelike vector of R^{2,1}."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise InvalidInput("H2 points have three coordinates")
    return normalize_h2(v)


def h2_distance(x, y):
    return float(np.arccosh(max(1.0, -minkowski(x, y))))


def h3_distance(x, y):
    return float(np.arccosh(max(1.0, -minkowski(x, y))))


def embed_h3(x):
    """H2 -> H3 as the slice x3 = 0; also applies to tangent vectors."""
    x = np.asarray(x, dtype=float)
    return np.concatenate([x, np.zeros(x.shape[:-1] + (1,))], axis=-1)


# -- sl(2,R) <-> R^{2,1} ---------------------------------------------------------


def vec_to_sl2(v):
    x0, x1, x2 = v
    return np.array([[x2, x1 - x0], [x1 + x0, -x2]])


def sl2_to_vec(X):
    X = np.asarray(X)
    return np.array(
        [
            0.5 * (X[1, 0] - X[0, 1]),
            0.5 * (X[1, 0] + X[0, 1]),
            0.5 * (X[0, 0] - X[1, 1]),
        ]
    ).real


def so21(A):
    """Matrix of A acting by conjugation on R^{2,1}."""
    A = np.asarray(A, dtype=float)
    Ainv = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]]) / det2(A)
    cols = [sl2_to_vec(A @ vec_to_sl2(e) @ Ainv) for e in np.eye(3)]
    return np.column_stack(cols)


def hermitian(x):
    x0, x1, x2, x3 = x
    return np.array([[x0 - x1, x2 - 1j * x3], [x2 + 1j * x3, x0 + x1]])


def from_hermitian(H):
    return np.array(
        [
            0.5 * (H[0, 0] + H[1, 1]).real,
            0.5 * (H[1, 1] - H[0, 0]).real,
            H[1, 0].real,
            H[1, 0].imag,
        ]
    )


def so31(A):
    """Matrix of A in SL(2,C) acting on R^{3,1} by H -> A H A*."""
    A = np.asarray(A, dtype=complex)
    Ah = A.conj().T
    cols = [from_hermitian(A @ hermitian(e) @ Ah) for e in np.eye(4)]
    return np.column_stack(cols)


# -- upper half-plane and the circle at infinity ------------------------------


def uhp_to_h2(z):
    x, y = z.real, z.imag
    if y <= 0:
        raise InvalidInput("point is not in the upper half-plane")
    return np.array([(1 + x * x + y * y) / (2 * y), (1 - x * x - y * y) / (2 * y), x / y])


def h2_to_uhp(v):
    c = v[0] + v[1]
    return complex(v[2] / c, 1.0 / c)


def mobius(A, z):
    a, b, c, d = np.asarray(A).ravel()
    if np.isinf(z):
        return np.inf if c == 0 else a / c
    den = c * z + d
    if den == 0:
        return np.inf
    return (a * z + b) / den


def wrap_angle(t):
    return float(np.mod(t, 2 * np.pi))


def uhp_boundary_to_angle(xi):
    if np.isinf(xi):
        return np.pi
    return wrap_angle(2 * np.arctan(xi))


def angle_to_uhp_boundary(t):
    t = wrap_angle(t)
    if abs(t - np.pi) < 1e-15:
        return np.inf
    return float(np.tan(t / 2))


def angle_to_null(t):
    return np.array([1.0, np.cos(t), np.sin(t)])


def null_to_angle(u):
    return wrap_angle(np.arctan2(u[2], u[1]))


def angle_to_rp1(t):
    """Unit vector of R^2 spanning the line of the ideal point ``t``."""
    return np.array([np.sin(t / 2), np.cos(t / 2)])


def rp1_to_angle(w):
    return wrap_angle(2 * np.arctan2(w[0], w[1]))


def act_on_angle(A, t):
    """Action of A in SL(2,R) on the circle at infinity."""
    return rp1_to_angle(np.asarray(A, dtype=float) @ angle_to_rp1(t))


def ideal_direction(x, t):
    """Unit tangent at x in H2 pointing to the ideal point ``t``."""
    u = angle_to_null(t)
    k = -minkowski(u, x)
    return u / k - x


# -- geodesics -------------------------------------------------------------------


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic of H2 from ideal point ``start`` to ``end`` (angles).

    ``normal`` is the unit spacelike vector u with the geodesic equal to
    u-perp and u pointing to the right of the direction of travel.
    """

    start: float
    end: float

    def __post_init__(self):
        s, e = wrap_angle(self.start), wrap_angle(self.end)
        if min(abs(s - e), 2 * np.pi - abs(s - e)) < 1e-12:
            raise InvalidInput("degenerate geodesic: coincident endpoints")
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)

    @property
    def normal(self):
        n = -J3 @ np.cross(angle_to_null(self.start), angle_to_null(self.end))
        return n / np.sqrt(minkowski(n, n))

    @classmethod
    def from_normal(cls, n):
        n = np.asarray(n, dtype=float)
        q = minkowski(n, n)
        if q <= EPS_CLASS:
            raise InvalidInput("geodesic normal must be spacelike")
        n = n / np.sqrt(q)
        phi = np.arctan2(n[2], n[1])
        rho = np.hypot(n[1], n[2])
        half = np.arccos(np.clip(n[0] / rho, -1.0, 1.0))
        return cls(phi - half, phi + half)

    @classmethod
    def through(cls, x, y):
        """Geodesic through two points of H2, oriented from x to y."""
        n = lorentz_cross(x, y)
        return cls.from_normal(-n)

    def reversed(self):
        return Geodesic(self.end, self.start)

    @property
    def key(self):
        return tuple(sorted((round(self.start, 12), round(self.end, 12))))

    def signed_distance(self, x):
        """sinh of the signed distance from x (positive on the right)."""
        return float(minkowski(x, self.normal))

    def closest_point(self, x):
        n = self.normal
        c = minkowski(x, n)
        return (np.asarray(x) - c * n) / np.sqrt(1.0 + c * c)

    def point(self, s=0.0):
        """Arc-length parametrisation through the point closest to (1,0,0)."""
        p = self.closest_point(np.array([1.0, 0.0, 0.0]))
        return np.cosh(s) * p + np.sinh(s) * self.tangent(p)

    def tangent(self, x):
        """Unit tangent at a point x of the geodesic, in the travel direction."""
        t = lorentz_cross(x, self.normal)
        return t / np.sqrt(minkowski(t, t))


def is_positive_basis(a, b, c):
    """Orientation test used for (start, end, normal) triples.

    The triple (start, end, normal) of a Geodesic has det(J a, J b, J c) > 0,
    where J lowers the index with the Minkowski form.
    """
    return bool(np.linalg.det(np.column_stack([J3 @ a, J3 @ b, J3 @ c])) > 0)


def generators(l):
    """Translation and rotation generators of an oriented geodesic."""
    X = vec_to_sl2(l.normal)
    return X, 0.5j * X


# -- SL(2) helpers ----------------------------------------------------------------


def det2(A):
    return A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]


def inv2(A):
    return np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]]) / det2(A)


def renormalize(A):
    return A / np.sqrt(det2(A) + 0j) if np.iscomplexobj(A) else A / np.sqrt(det2(A))


def sl2_exp(X):
    """exp of a traceless 2x2 matrix via cosh/sinh of sqrt(-det X)."""
    X = np.asarray(X)
    delta = -det2(X)
    if np.iscomplexobj(X):
        r = np.sqrt(complex(delta))
        if abs(r) < 1e-4:
            c = 1 + delta / 2 + delta**2 / 24
            s = 1 + delta / 6 + delta**2 / 120
        else:
            c = np.cosh(r)
            s = np.sinh(r) / r
        return c * ID2 + s * X
    delta = float(delta)
    if delta > 1e-12:
        r = np.sqrt(delta)
        return np.cosh(r) * ID2 + (np.sinh(r) / r) * X
    if delta < -1e-12:
        r = np.sqrt(-delta)
        return np.cos(r) * ID2 + (np.sin(r) / r) * X
    return (1 + delta / 2) * ID2 + (1 + delta / 6) * X


def ordered_product(mats, dtype=float):
    """Left-to-right product of 2x2 unimodular matrices with renormalisation."""
    out = np.eye(2, dtype=dtype)
    for k, M in enumerate(mats, 1):
        out = out @ M
        if k % RENORM_EVERY == 0:
            out = renormalize(out)
    return out


def psl_distance(A, B):
    A = np.asarray(A)
    B = np.asarray(B)
    return float(min(np.linalg.norm(A - B), np.linalg.norm(A + B)))


def psl_equal(A, B, tol=1e-9):
    return psl_distance(A, B) <= tol


def translation_length(A):
    """Translation length in H2 of a hyperbolic element of SL(2,R)."""
    t = abs(np.trace(A).real)
    if t <= 2:
        raise InvalidInput("element is not hyperbolic")
    return float(2 * np.arccosh(t / 2))


def axis_generator(A):
    """Unit positive generator Y with A = +-exp(l Y / 2), l the translation length."""
    A = np.asarray(A, dtype=float)
    if np.trace(A) < 0:
        A = -A
    ell = translation_length(A)
    return (A - 0.5 * np.trace(A) * ID2) / np.sinh(ell / 2)


# -- exponential maps ----------------------------------------------------------------


@dataclass(frozen=True)
class ModelPoint:
    model: str
    coords: np.ndarray

    def __post_init__(self):
        if self.model not in MODEL_TAGS:
            raise InvalidInput(f"unknown model tag {self.model!r}")
        c = np.array(self.coords)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)


def _form(model):
    return {"H2": "X0", "X0": "X0", "H3": "R31", "X1": "R31", "Xm1": "Xm1"}[model]


def exp_map(model, base, tangent, t):
    """Geodesic through ``base`` with initial velocity ``tangent``, at time t."""
    form = _form(model)
    x = np.asarray(base.coords if isinstance(base, ModelPoint) else base, dtype=float)
    v = np.asarray(tangent, dtype=float)
    if abs(inner(form, x, v)) > 1e-9:
        raise InvalidInput("tangent is not orthogonal to the base point")
    q = inner(form, v, v)
    # which sign of q gives closed (trigonometric) geodesics in each model
    closed_sign = {"H2": 0, "X0": 0, "H3": 0, "X1": 1, "Xm1": -1}[model]
    if model == "X0":
        y = x + t * v
    elif abs(q) <= EPS_CLASS:
        y = x + t * v
    else:
        s = np.sqrt(abs(q))
        u = v / s
        if closed_sign != 0 and np.sign(q) == closed_sign:
            y = np.cos(t * s) * x + np.sin(t * s) * u
        else:
            y = np.cosh(t * s) * x + np.sinh(t * s) * u
    return ModelPoint(model, y)


# -- planes and duality ------------------------------------------------------------


@dataclass(frozen=True)
class Plane:
    """Totally geodesic plane, stored through its dual point.

    In X1 the dual point v (q(v) = 1) encodes the oriented H3 plane v-perp.
    In Xm1 the dual point x encodes P(x) = {y : eta(x, y) = 0}.
    """

    model: str
    dual: np.ndarray


@dataclass(frozen=True)
class AdsGeodesic:
    """Spacelike geodesic of Xm1 through ``point`` with unit tangent ``tangent``."""

    point: np.ndarray
    tangent: np.ndarray

    def projector(self):
        basis = np.column_stack([self.point.ravel(), self.tangent.ravel()])
        Q, _ = np.linalg.qr(basis)
        return Q @ Q.T

    def endpoints(self):
        """Two boundary points as rank-one matrices (Segre parametrisation)."""
        return self.point + self.tangent, self.point - self.tangent


def _ads_gram():
    basis = [np.eye(2)[:, [i]] @ np.eye(2)[[j], :] for i in range(2) for j in range(2)]
    return np.array([[eta_ads(a, b) for b in basis] for a in basis])


ADS_GRAM = _ads_gram()


def _dual_ads_geodesic(g):
    rows = np.array([g.point.ravel(), g.tangent.ravel()]) @ ADS_GRAM
    _, _, vt = np.linalg.svd(rows)
    K = vt[2:].T
    G = K.T @ ADS_GRAM @ K
    w, U = np.linalg.eigh(G)
    B = K @ U
    p = B[:, 0] / np.sqrt(-w[0])
    s = B[:, 1] / np.sqrt(w[1])
    if w[0] >= 0 or w[1] <= 0:
        raise InvalidInput("geodesic is not spacelike")
    p = p.reshape(2, 2)
    if np.trace(p) < 0 or (abs(np.trace(p)) < 1e-12 and p[1, 0] < 0):
        p = -p
    return AdsGeodesic(p, s.reshape(2, 2))


def duality(model, obj):
    """Point/plane duality of X1 and Xm1, and the dual of an Xm1 geodesic."""
    if isinstance(obj, AdsGeodesic):
        if model != "Xm1":
            raise InvalidInput("geodesic duality is implemented for Xm1")
        return _dual_ads_geodesic(obj)
    if isinstance(obj, Plane):
        if obj.model != model:
            raise InvalidInput("model tag mismatch")
        return ModelPoint(model, obj.dual)
    x = np.asarray(obj.coords if isinstance(obj, ModelPoint) else obj)
    if model == "X1":
        q = inner("R31", x, x)
        if q <= EPS_CLASS:
            raise InvalidInput("dual of a null or timelike vector is not a Riemannian plane")
        return Plane("X1", x / np.sqrt(q))
    if model == "Xm1":
        q = inner("Xm1", x, x)
        if q >= -EPS_CLASS:
            raise InvalidInput("dual plane of a non-timelike matrix is not spacelike")
        return Plane("Xm1", x / np.sqrt(-q))
    raise InvalidInput(f"no duality for model {model!r}")


# -- anti-de Sitter helpers -------------------------------------------------------------


def ads_action(pair, M):
    """Isometry (A, B) acting on 2x2 matrices as A M B^-1."""
    A, B = pair
    return A @ M @ inv2(B)


def ads_rotation(l, t):
    """Rotation of Xm1 around the geodesic of P(Id) corresponding to ``l``."""
    X, _ = generators(l)
    return sl2_exp(-t * X), sl2_exp(t * X)


def ads_point_to_h2(X):
    """The map I: order-two elliptic elements of P(Id) -> H2 (fixed point)."""
    v = sl2_to_vec(X)
    return v if v[0] > 0 else -v


def h2_to_ads_point(x):
    """Inverse of ``ads_point_to_h2``."""
    return vec_to_sl2(x)


def ads_plane_angle(P1, P2, tol=1e-12):
    """Angle between two meeting spacelike planes of Xm1 (dual-point distance)."""
    x1 = P1.dual if isinstance(P1, Plane) else np.asarray(P1)
    x2 = P2.dual if isinstance(P2, Plane) else np.asarray(P2)
    c = abs(eta_ads(x1, x2))
    if c < 1 - tol:
        raise DisjointPlanes("planes do not intersect; their dual points are timelike related")
    return float(np.arccosh(max(c, 1.0)))


def segre_boundary(xi_left, xi_right):
    """Boundary point of Xm1 with left coordinate xi_left, right coordinate xi_right."""
    v = angle_to_rp1(xi_left)
    w = angle_to_rp1(xi_right)
    return ModelPoint("AdSBoundary", np.outer(v, E_ROT @ w))


def segre_inverse(M):
    """Left and right angles of a rank-one matrix."""
    u, _, vt = np.linalg.svd(np.asarray(M, dtype=float))
    w = -E_ROT @ vt[0]
    return rp1_to_angle(u[:, 0]), rp1_to_angle(w)


def projective_distance(A, B):
    """Distance between the lines spanned by two arrays (unit normalised)."""
    a = np.ravel(A) / np.linalg.norm(A)
    b = np.ravel(B) / np.linalg.norm(B)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))
