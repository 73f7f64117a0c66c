"""Flat regular domain of a finite lamination and its cosmological time.

For a finite lamination with basepoint x0 the domain is described by its
complementary regions.  A region C has a constant boundary value rho_C, the
weighted sum of far normals of the leaves separating C from x0, and the
points of the domain over C are a * x + rho_C with x in C and a > 0.  Each
leaf contributes a band a * x + rho_minus + s * n_far with x on the leaf and
0 <= s <= weight.
"""

from __future__ import annotations

import csv
import weakref
from dataclasses import dataclass

import numpy as np

from .laminations import EPS_ON_LEAF, TransverseArc, leaves_crossing
from .models import InvalidInput, h2_distance, hpoint, minkowski

TOL_MEMBER = 1e-11


class OutsideDomain(InvalidInput):
    """Point is not in the future of every support plane."""


class WindowTooSmall(InvalidInput):
    """Decomposition would depend on leaves outside the materialised window."""


@dataclass(frozen=True)
class CtPoint:
    """Cosmological-time decomposition p = r + T * N.

    ``stratum`` is ``("open", region)`` or ``("band", leaf, t)`` with t in [0, 1].
    """

    p: np.ndarray
    T: float
    N: np.ndarray
    r: np.ndarray
    stratum: tuple

    @property
    def is_band(self):
        return self.stratum[0] == "band"


@dataclass(frozen=True)
class SingularityGraph:
    vertices: np.ndarray
    edges: tuple
    lengths: np.ndarray

    def degrees(self):
        deg = np.zeros(len(self.vertices), dtype=int)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_tree(self):
        n = len(self.vertices)
        if len(self.edges) != n - 1:
            return False
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True


class FlatDomain:
    """Precomputed strata of the flat domain of one lamination."""

    def __init__(self, lam):
        self.lam = lam
        self.x0 = lam.basepoint
        n = len(lam)
        self.M = lam.normals
        self.a = lam.weights
        s0 = np.sign(lam.sides(self.x0))
        if n and np.any(s0 == 0):
            raise InvalidInput("basepoint lies on a leaf")
        self.s0 = s0
        # far normal of each leaf: points away from the basepoint side
        self.far = -s0[:, None] * self.M if n else np.zeros((0, 3))
        self.closest = np.array([lam.leaves[i].geodesic.closest_point(self.x0) for i in range(n)]).reshape(-1, 3)
        crossed = [np.zeros(n, dtype=bool)]
        self.near_region = np.zeros(n, dtype=int)
        self.far_region = np.zeros(n, dtype=int)
        index = {crossed[0].tobytes(): 0}
        for i in range(n):
            c = self._crossed_at(self.closest[i])
            c[i] = False
            for side, c_side in (("near", c.copy()), ("far", c.copy())):
                if side == "far":
                    c_side[i] = True
                key = c_side.tobytes()
                if key not in index:
                    index[key] = len(crossed)
                    crossed.append(c_side)
                (self.near_region if side == "near" else self.far_region)[i] = index[key]
        self.crossed = np.array(crossed)
        self.rho_regions = (self.crossed * self.a[None, :]) @ self.far if n else np.zeros((1, 3))
        self.rho_minus = self.rho_regions[self.near_region] if n else np.zeros((0, 3))
        self.rho_plus = self.rho_minus + self.a[:, None] * self.far

    def _crossed_at(self, x):
        if not len(self.lam):
            return np.zeros(0, dtype=bool)
        return np.sign(self.lam.sides(x)) != self.s0

    def rho(self, x):
        x = hpoint(x)
        if not len(self.lam):
            return np.zeros(3)
        c = self.lam.sides(x)
        on = np.flatnonzero(np.abs(c) < EPS_ON_LEAF)
        if on.size:
            raise InvalidInput(f"point lies on leaf {int(on[0])}; use rho_sides")
        return ((np.sign(c) != self.s0) * self.a) @ self.far

    def _check_window(self, N):
        R = getattr(self.lam, "window_radius", None)
        if R is not None and h2_distance(self.x0, N) > R:
            raise WindowTooSmall(
                f"Gauss image at distance {h2_distance(self.x0, N):.3f} exceeds window radius {R}"
            )

    def decompose(self, p):
        p = np.asarray(p, dtype=float)
        W = p[None, :] - self.rho_regions
        q = minkowski(W, W)
        ok = (q < 0) & (W[:, 0] > 0)
        if len(self.lam):
            T = np.sqrt(np.where(ok, -q, 1.0))
            Y = W / T[:, None]
            S = minkowski(Y[:, None, :], self.M[None, :, :]) * self.s0[None, :]
            member = np.where(self.crossed, S <= TOL_MEMBER, S >= -TOL_MEMBER).all(axis=1)
            ok &= member
        hits = np.flatnonzero(ok)
        if hits.size:
            k = int(hits[0])
            T = float(np.sqrt(-q[k]))
            N = W[k] / T
            self._check_window(N)
            return CtPoint(p, T, N, self.rho_regions[k].copy(), ("open", k))
        for i in range(len(self.lam)):
            d = p - self.rho_minus[i]
            s = minkowski(d, self.far[i])
            if -TOL_MEMBER <= s <= self.a[i] + TOL_MEMBER:
                s = min(max(s, 0.0), self.a[i])
                w = d - s * self.far[i]
                qw = minkowski(w, w)
                if qw < 0 and w[0] > 0:
                    T = float(np.sqrt(-qw))
                    N = w / T
                    self._check_window(N)
                    r = self.rho_minus[i] + s * self.far[i]
                    return CtPoint(p, T, N, r, ("band", i, float(s / self.a[i])))
        worst = int(np.argmax(q)) if q.size else 0
        raise OutsideDomain(f"point {p.tolist()} is not in the future of the support plane of region {worst}")


_CACHE = weakref.WeakKeyDictionary()


def domain(lam):
    d = _CACHE.get(lam)
    if d is None:
        d = FlatDomain(lam)
        _CACHE[lam] = d
    return d


def rho(lam, x):
    """Boundary value at x: weighted far normals of leaves separating x from x0."""
    return domain(lam).rho(x)


def rho_sides(lam, leaf):
    """One-sided values (near, far) of rho along leaf index ``leaf``."""
    d = domain(lam)
    return d.rho_minus[leaf].copy(), d.rho_plus[leaf].copy()


def forward_point(lam, x, a, leaf=None, t=None):
    """Point at cosmological time a over x, or over (leaf, t) in the leaf's band."""
    if a <= 0:
        raise InvalidInput("cosmological time must be positive")
    d = domain(lam)
    x = hpoint(x)
    if leaf is None:
        r = d.rho(x)
        crossed = d._crossed_at(x).tobytes()
        k = next(i for i, c in enumerate(d.crossed) if c.tobytes() == crossed)
        return CtPoint(a * x + r, float(a), x, r, ("open", k))
    if not 0 <= t <= 1:
        raise InvalidInput("band parameter must lie in [0, 1]")
    if abs(minkowski(x, d.M[leaf])) > 1e-9:
        raise InvalidInput("point is not on the requested leaf")
    r = (1 - t) * d.rho_minus[leaf] + t * d.rho_plus[leaf]
    return CtPoint(a * x + r, float(a), x, r, ("band", int(leaf), float(t)))


def ct_decompose(lam, p):
    return domain(lam).decompose(p)


def gradient_T(lam, p):
    c = ct_decompose(lam, p)
    return (c.r - c.p) / c.T


def singularity_graph(lam, window=None):
    """Dual tree of the lamination: region values joined by leaf segments."""
    d = domain(lam)
    n = len(lam)
    keep = np.ones(n, dtype=bool)
    if window is not None and n:
        keep = np.abs(lam.sides(d.x0)) <= np.sinh(window)
    used = sorted({0} | set(d.near_region[keep]) | set(d.far_region[keep]))
    relabel = {k: j for j, k in enumerate(used)}
    edges = tuple((relabel[d.near_region[i]], relabel[d.far_region[i]]) for i in np.flatnonzero(keep))
    vertices = d.rho_regions[used]
    lengths = np.array([np.sqrt(max(0.0, minkowski(d.rho_plus[i] - d.rho_minus[i], d.rho_plus[i] - d.rho_minus[i]))) for i in np.flatnonzero(keep)])
    return SingularityGraph(vertices, edges, lengths)


def singularity_sample(lam, n_points):
    """Points of the initial singularity, stratified by edge length."""
    d = domain(lam)
    pts = [d.rho_regions]
    if len(lam):
        total = d.a.sum()
        for i in range(len(lam)):
            k = max(2, int(round(n_points * d.a[i] / total)))
            t = np.linspace(0.0, 1.0, k)[:, None]
            pts.append(d.rho_minus[i] + t * (d.rho_plus[i] - d.rho_minus[i]))
    return np.vstack(pts)


# -- level surfaces ---------------------------------------------------------------


def _lorentz_norm(v):
    return float(np.sqrt(max(0.0, minkowski(v, v))))


def lift_path(lam, a, xs, band_steps=20):
    """Points of the level surface T = a over an H2 polyline, with band traversals."""
    xs = [hpoint(x) for x in xs]
    d = domain(lam)
    out = [forward_point(lam, xs[0], a)]
    for x, y in zip(xs[:-1], xs[1:]):
        for c in leaves_crossing(lam, TransverseArc(x, y)):
            i = c.index
            forward = np.allclose(c.far_normal, d.far[i])
            for t in np.linspace(0.0, 1.0, band_steps + 1):
                out.append(forward_point(lam, c.point, a, leaf=i, t=t if forward else 1 - t))
        out.append(forward_point(lam, y, a))
    return out


def surface_mass(lam, a, path, tol=1e-6):
    """Total variation of the retraction along a path sampled on the level surface."""
    pts = [c if isinstance(c, CtPoint) else ct_decompose(lam, c) for c in path]
    if len(pts) < 2:
        raise InvalidInput("path needs at least two points")
    for c in pts:
        if abs(c.T - a) > tol:
            raise InvalidInput(f"path point has T = {c.T}, not on the level surface T = {a}")
    return float(sum(_lorentz_norm(q.r - p.r) for p, q in zip(pts[:-1], pts[1:])))


def path_length(path):
    pts = [c.p if isinstance(c, CtPoint) else np.asarray(c) for c in path]
    return float(sum(_lorentz_norm(q - p) for p, q in zip(pts[:-1], pts[1:])))


@dataclass(frozen=True)
class ScaleMap:
    t: float
    source: object
    target: object

    def __call__(self, p):
        return self.t * np.asarray(p)


def scale(lam, t):
    """x -> t x, mapping the domain of lam onto the domain of t * lam."""
    if t <= 0:
        raise InvalidInput("scale factor must be positive")
    return ScaleMap(float(t), lam, lam.scaled(t))


def _time_or_zero(d, p):
    try:
        return d.decompose(p).T
    except OutsideDomain:
        return 0.0


def level_height(lam, a, x1, x2, iters=80):
    """x0 coordinate of the level surface T = a over (x1, x2)."""
    d = domain(lam)
    hi = np.hypot(x1, x2) + a + 1.0
    while _time_or_zero(d, np.array([hi, x1, x2])) < a:
        hi = 2 * hi + 1
    lo = hi - 1.0
    while _time_or_zero(d, np.array([lo, x1, x2])) >= a:
        lo -= 2 * (hi - lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _time_or_zero(d, np.array([mid, x1, x2])) < a:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def level_surface_mesh(lam, a, extent, n):
    """Triangulated graph of the level surface over [-extent, extent]^2."""
    grid = np.linspace(-extent, extent, n)
    verts = []
    for x2 in grid:
        for x1 in grid:
            verts.append(ct_decompose(lam, np.array([level_height(lam, a, x1, x2), x1, x2])))
    faces = []
    for j in range(n - 1):
        for i in range(n - 1):
            v = j * n + i
            faces.append((v, v + 1, v + n + 1))
            faces.append((v, v + n + 1, v + n))
    return verts, faces


def write_obj(path, verts, faces):
    with open(path, "w") as fh:
        for c in verts:
            fh.write("v {:.12g} {:.12g} {:.12g}\n".format(*c.p))
        for f in faces:
            fh.write("f {} {} {}\n".format(*(k + 1 for k in f)))


def write_csv(path, verts):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p0", "p1", "p2", "T", "N0", "N1", "N2", "r0", "r1", "r2", "stratum"])
        for c in verts:
            w.writerow([*(f"{v:.12g}" for v in (*c.p, c.T, *c.N, *c.r)), ":".join(map(str, c.stratum))])


# -- sampling ---------------------------------------------------------------------


def _tangent_frame(x0):
    e1 = np.array([0.0, 1.0, 0.0])
    e1 = e1 + minkowski(e1, x0) * x0
    e1 /= np.sqrt(minkowski(e1, e1))
    e2 = np.array([0.0, 0.0, 1.0])
    e2 = e2 + minkowski(e2, x0) * x0 - minkowski(e2, e1) * e1
    e2 /= np.sqrt(minkowski(e2, e2))
    return e1, e2


def random_point_near(x0, radius, rng):
    """Random point of H2 within ``radius`` of x0 (uniform in angle, sqrt in radius)."""
    e1, e2 = _tangent_frame(x0)
    phi = rng.uniform(0, 2 * np.pi)
    dist = radius * np.sqrt(rng.uniform())
    u = np.cos(phi) * e1 + np.sin(phi) * e2
    return np.cosh(dist) * x0 + np.sinh(dist) * u


def sample_points(lam, n, rng, t_range, radius=1.5, band_prob=0.3, margin=1e-2, band_margin=0.02):
    """Random domain points with T in t_range, kept away from stratum boundaries."""
    d = domain(lam)
    lo, hi = t_range
    R = getattr(lam, "window_radius", None)
    radius = min(radius, 0.95 * R) if R is not None else radius
    sm = np.sinh(margin)
    near = np.flatnonzero(np.abs(lam.sides(d.x0)) < np.sinh(radius)) if len(lam) else np.zeros(0, int)
    out = []
    guard = 0
    while len(out) < n:
        guard += 1
        if guard > 1000 * n:
            raise InvalidInput("could not draw interior sample points")
        T = rng.uniform(lo, hi)
        if near.size and rng.uniform() < band_prob:
            i = int(rng.choice(near))
            g = lam.leaves[i].geodesic
            y = d.closest[i]
            span = np.arccosh(max(1.0, np.cosh(radius) / np.sqrt(1 + lam.sides(d.x0)[i] ** 2)))
            s = rng.uniform(-span, span)
            x = np.cosh(s) * y + np.sinh(s) * g.tangent(y)
            others = np.delete(np.abs(lam.sides(x)), i)
            if others.size and others.min() < sm:
                continue
            t = rng.uniform(band_margin, 1 - band_margin)
            out.append(forward_point(lam, x, T, leaf=i, t=t))
        else:
            x = random_point_near(d.x0, radius, rng)
            if len(lam) and np.abs(lam.sides(x)).min() < sm:
                continue
            out.append(forward_point(lam, x, T))
    return out
