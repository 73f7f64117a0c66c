"""Finite and group-orbit measured laminations of H2 and their transverse masses."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .models import (
    Geodesic,
    InvalidInput,
    hpoint,
    minkowski,
    renormalize,
    so21,
    wrap_angle,
)

EPS_DISJOINT = 1e-8
EPS_ON_LEAF = 1e-10


@dataclass(frozen=True)
class WeightedGeodesic:
    geodesic: Geodesic
    weight: float

    def __post_init__(self):
        if not self.weight > 0:
            raise InvalidInput(f"leaf weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class TransverseArc:
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class Crossing:
    """A leaf met by an arc.

    ``far_normal`` is the unit normal of the leaf pointing away from the
    half-plane containing the arc's initial point, so that it is also the
    tangent direction of the arc's terminal side.  ``factor`` is 1 for an
    interior crossing and 1/2 when an arc endpoint lies on the leaf.
    """

    index: int
    leaf: WeightedGeodesic
    point: np.ndarray
    param: float
    far_normal: np.ndarray
    factor: float

    @property
    def mass(self):
        return self.factor * self.leaf.weight


def _arc_dist(a, b):
    d = abs(wrap_angle(a - b))
    return min(d, 2 * np.pi - d)


def _strictly_between(t, a, b):
    """t in the open counterclockwise arc from a to b."""
    return 0 < wrap_angle(t - a) < wrap_angle(b - a)


def linked(g, h, eps=EPS_DISJOINT):
    """Whether two geodesics cross in H2 (endpoints strictly interleaved).

    Shared endpoints (asymptotic leaves) are not linked; identical endpoint
    pairs count as an overlap and are reported as linked.
    """
    a, b = g.start, g.end
    c, d = h.start, h.end
    shared_c = min(_arc_dist(c, a), _arc_dist(c, b)) < eps
    shared_d = min(_arc_dist(d, a), _arc_dist(d, b)) < eps
    if shared_c and shared_d:
        return True
    if shared_c or shared_d:
        return False
    return _strictly_between(c, a, b) != _strictly_between(d, a, b)


def _canonical(g):
    """Orientation-free representative with start < end in [0, 2 pi)."""
    return g if g.start < g.end else g.reversed()


class FiniteLamination:
    """Pairwise disjoint weighted geodesics of H2 together with a basepoint.

    Leaves are stored with canonical orientation (start angle < end angle)
    and sorted by endpoint angles.
    """

    def __init__(
        self,
        leaves,
        basepoint=(1.0, 0.0, 0.0),
        validate=True,
        allow_basepoint_on_leaf=False,
        window_radius=None,
    ):
        items = []
        for leaf in leaves:
            if isinstance(leaf, WeightedGeodesic):
                items.append(WeightedGeodesic(_canonical(leaf.geodesic), float(leaf.weight)))
            else:
                g, w = leaf
                items.append(WeightedGeodesic(_canonical(g), float(w)))
        items.sort(key=lambda wg: (wg.geodesic.start, wg.geodesic.end))
        self.leaves = tuple(items)
        self.basepoint = hpoint(basepoint)
        self.normals = np.array([wg.geodesic.normal for wg in items]).reshape(-1, 3)
        self.weights = np.array([wg.weight for wg in items], dtype=float)
        self.window_radius = window_radius
        if validate:
            self.validate(allow_basepoint_on_leaf)

    def __len__(self):
        return len(self.leaves)

    def validate(self, allow_basepoint_on_leaf=False):
        geos = [wg.geodesic for wg in self.leaves]
        for i in range(len(geos)):
            for j in range(i + 1, len(geos)):
                if linked(geos[i], geos[j]):
                    raise InvalidInput(
                        f"leaves {i} {geos[i].start, geos[i].end} and {j} "
                        f"{geos[j].start, geos[j].end} intersect or coincide"
                    )
        if not allow_basepoint_on_leaf and len(geos):
            on = np.flatnonzero(np.abs(self.sides(self.basepoint)) < EPS_ON_LEAF)
            if on.size:
                raise InvalidInput(f"basepoint lies on leaf {int(on[0])}")

    def sides(self, x):
        """<x, n_i> for every leaf normal (sinh of signed distance)."""
        if not len(self.leaves):
            return np.zeros(0)
        return minkowski(self.normals, np.asarray(x)[None, :])

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def scaled(self, t):
        if t <= 0:
            raise InvalidInput("scale factor must be positive")
        return FiniteLamination(
            [(wg.geodesic, wg.weight * t) for wg in self.leaves],
            self.basepoint,
            validate=False,
            window_radius=self.window_radius,
        )

    def with_basepoint(self, x):
        return FiniteLamination(self.leaves, x, validate=False, window_radius=self.window_radius)

    def transformed(self, A):
        """Image of the lamination (and basepoint) under A in SL(2,R)."""
        R = so21(A)
        leaves = [(Geodesic.from_normal(R @ n), w) for n, w in zip(self.normals, self.weights)]
        return FiniteLamination(leaves, R @ self.basepoint, validate=False)

    def to_dict(self):
        return {
            "basepoint": [float(c) for c in self.basepoint],
            "leaves": [
                {"endpoints": [wg.geodesic.start, wg.geodesic.end], "weight": wg.weight}
                for wg in self.leaves
            ],
        }

    @classmethod
    def from_dict(cls, data, validate=True):
        leaves = [(Geodesic(*leaf["endpoints"]), float(leaf["weight"])) for leaf in data.get("leaves", [])]
        return cls(leaves, data.get("basepoint", (1.0, 0.0, 0.0)), validate=validate)


# -- crossings ----------------------------------------------------------------------


def _crossing_param(x, y, m, cx, cy):
    """Fraction of the hyperbolic length of [x, y] at which it meets m-perp."""
    d = np.arccosh(max(1.0, -minkowski(x, y)))
    if d == 0:
        return 0.0, x
    u = (y - np.cosh(d) * x) / np.sinh(d)
    s = np.arctanh(np.clip(-cx / minkowski(u, m), -1 + 1e-16, 1 - 1e-16))
    point = np.cosh(s) * x + np.sinh(s) * u
    return s / d, point


def leaves_crossing(lam, arc, eps=EPS_ON_LEAF):
    """Leaves met by the segment [x, y], ordered from x."""
    x = hpoint(arc.x)
    y = hpoint(arc.y)
    if not len(lam):
        return []
    cx = lam.sides(x)
    cy = lam.sides(y)
    on_x = np.abs(cx) < eps
    on_y = np.abs(cy) < eps
    bad = np.flatnonzero(on_x & on_y)
    if bad.size:
        raise InvalidInput(f"arc lies inside leaf {int(bad[0])}: not transverse")
    out = []
    for i in np.flatnonzero(on_x | on_y | (np.sign(cx) != np.sign(cy))):
        m = lam.normals[i]
        if on_x[i]:
            far = np.sign(cy[i]) * m
            out.append(Crossing(int(i), lam.leaves[i], x, 0.0, far, 0.5))
        elif on_y[i]:
            far = -np.sign(cx[i]) * m
            out.append(Crossing(int(i), lam.leaves[i], y, 1.0, far, 0.5))
        else:
            frac, point = _crossing_param(x, y, m, cx[i], cy[i])
            out.append(Crossing(int(i), lam.leaves[i], point, frac, -np.sign(cx[i]) * m, 1.0))
    out.sort(key=lambda c: c.param)
    return out


def transverse_mass(lam, arc):
    return float(sum(c.mass for c in leaves_crossing(lam, arc)))


def orthogonal_field(lam, crossing):
    """Unit tangent at the crossing point, orthogonal to the leaf, toward the arc's end."""
    return np.array(crossing.far_normal)


# -- standard approximation ---------------------------------------------------------


@dataclass(frozen=True)
class ArcMeasure:
    """Atomic transverse measure sampled along a segment of length ``length``.

    ``params`` are arc-length positions of the leaves ``leaves`` along the
    segment from ``x`` and ``weights`` their masses.  A diffuse measure is
    represented by a dense family of small atoms.
    """

    x: np.ndarray
    y: np.ndarray
    leaves: tuple
    params: np.ndarray
    weights: np.ndarray
    eps: float = 1e-3

    @classmethod
    def from_lamination(cls, lam, x, y, eps=1e-3):
        crossings = [c for c in leaves_crossing(lam, TransverseArc(x, y)) if c.factor == 1.0]
        d = np.arccosh(max(1.0, -minkowski(x, y)))
        return cls(
            np.asarray(x),
            np.asarray(y),
            tuple(c.leaf.geodesic for c in crossings),
            np.array([c.param * d for c in crossings]),
            np.array([c.leaf.weight for c in crossings]),
            eps,
        )

    @property
    def length(self):
        return float(np.arccosh(max(1.0, -minkowski(self.x, self.y))))

    def mass_between(self, s0, s1):
        sel = (self.params > s0) & (self.params < s1)
        return float(self.weights[sel].sum())


def _cell_boundaries(measure, n):
    L = measure.length
    m = int(np.floor(L * n)) + 1
    b = np.linspace(0.0, L, m + 1)
    shift = measure.eps / 10
    for k in range(1, m):
        while np.any(np.abs(measure.params - b[k]) < 1e-12):
            b[k] += shift
    return b


def standard_approximation(measure, n, basepoint=None):
    """Concentrate the mass of each cell of length < 1/n on one of its leaves."""
    if n < 1:
        raise InvalidInput("refinement index must be a positive integer")
    b = _cell_boundaries(measure, n)
    chosen = []
    for k in range(len(b) - 1):
        sel = np.flatnonzero((measure.params > b[k]) & (measure.params < b[k + 1]))
        if sel.size == 0:
            continue
        j = sel[np.argmax(measure.weights[sel])]
        chosen.append((measure.leaves[j], float(measure.weights[sel].sum())))
    base = measure.x if basepoint is None else basepoint
    return FiniteLamination(chosen, base, validate=False, allow_basepoint_on_leaf=True)


# -- group orbits -------------------------------------------------------------------


def parse_word(word, n_generators):
    """Tokens ``g1``, ``G1`` or ``g1^-1`` separated by spaces into (index, sign)."""
    out = []
    for tok in word.replace(",", " ").split():
        inverse = tok.startswith("G") or tok.endswith("^-1")
        core = tok.lower().replace("^-1", "")
        if not core.startswith("g") or not core[1:].isdigit():
            raise InvalidInput(f"bad word token {tok!r}")
        k = int(core[1:]) - 1
        if not 0 <= k < n_generators:
            raise InvalidInput(f"generator {tok!r} out of range")
        out.append((k, -1 if inverse else 1))
    return out


def _letter_matrix(gens, k, sign):
    A = gens[k]
    return A if sign > 0 else np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]])


def word_matrix(gens, word):
    A = np.eye(2)
    for k, sign in parse_word(word, len(gens)) if isinstance(word, str) else word:
        A = A @ _letter_matrix(gens, k, sign)
    return A


def _psl_key(A, digits=8):
    A = np.asarray(A)
    flat = A.ravel()
    lead = flat[np.flatnonzero(np.abs(flat) > 1e-9)[0]]
    return tuple(np.round(flat * np.sign(lead), digits) + 0.0)


@dataclass(frozen=True)
class OrbitLamination:
    generators: tuple
    base: FiniteLamination
    window_radius: float
    word_length: int
    names: tuple = field(default=())

    def __post_init__(self):
        gens = tuple(renormalize(np.asarray(g, dtype=float)) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not self.names:
            object.__setattr__(self, "names", tuple(f"g{i + 1}" for i in range(len(gens))))

    @property
    def basepoint(self):
        return self.base.basepoint

    def letters(self):
        for k in range(len(self.generators)):
            for sign in (1, -1):
                yield k, sign

    def to_dict(self):
        return {
            "basepoint": [float(c) for c in self.basepoint],
            "leaves": [],
            "group": {
                "generators": [g.tolist() for g in self.generators],
                "base_leaves": self.base.to_dict()["leaves"],
                "word_length": self.word_length,
                "window_radius": self.window_radius,
            },
        }


def reduced_words(n_generators, max_length):
    """All freely reduced words up to ``max_length`` as tuples of (index, sign)."""
    words = [()]
    frontier = [()]
    for _ in range(max_length):
        nxt = []
        for w in frontier:
            for k in range(n_generators):
                for sign in (1, -1):
                    if w and w[-1] == (k, -sign):
                        continue
                    nxt.append(w + ((k, sign),))
        words.extend(nxt)
        frontier = nxt
    return words


def _image_leaves(A, base):
    R = so21(A)
    return [(R @ n, w) for n, w in zip(base.normals, base.weights)]


def _collect(pairs, basepoint, window_radius=None):
    seen = {}
    for n, w in pairs:
        g = Geodesic.from_normal(n)
        key = g.key
        if key not in seen:
            seen[key] = (g, w)
    return FiniteLamination(list(seen.values()), basepoint, validate=False, window_radius=window_radius)


def materialize(orbit):
    """Translates of the base leaves meeting the window disk, as a FiniteLamination."""
    x0 = orbit.basepoint
    bound = np.sinh(orbit.window_radius)
    pairs = []
    for w in reduced_words(len(orbit.generators), orbit.word_length):
        A = word_matrix(orbit.generators, w)
        for n, wt in _image_leaves(A, orbit.base):
            if abs(minkowski(x0, n)) <= bound:
                pairs.append((n, wt))
    lam = _collect(pairs, x0, orbit.window_radius)
    lam.validate()
    return lam


def _meets(n, seg):
    cx = minkowski(seg[0], n)
    cy = minkowski(seg[1], n)
    return cx * cy <= 0 or min(abs(cx), abs(cy)) < EPS_ON_LEAF


def orbit_leaves_meeting(orbit, segments, max_steps=5000):
    """Orbit leaves meeting any of the given segments.

    Breadth-first search over group elements; an element is kept while one
    of the leaves of its translate of the base family, or of a translate one
    generator further, meets a segment.  This is exact when the base leaves
    and their one-step translates bound a fundamental domain, as for ideal
    triangulations and cyclic groups crossed by a base leaf.
    """
    gens = orbit.generators
    letters = list(orbit.letters())
    star = [np.eye(2)] + [_letter_matrix(gens, k, s) for k, s in letters]
    segments = [(np.asarray(a), np.asarray(b)) for a, b in segments]

    def relevant(A):
        for S in star:
            for n, _ in _image_leaves(A @ S, orbit.base):
                if any(_meets(n, seg) for seg in segments):
                    return True
        return False

    found = []
    start = np.eye(2)
    queue = deque([start])
    visited = {_psl_key(start)}
    steps = 0
    while queue:
        A = queue.popleft()
        steps += 1
        if steps > max_steps:
            raise InvalidInput("orbit search did not terminate; segments too long for the window")
        if not relevant(A):
            continue
        for n, w in _image_leaves(A, orbit.base):
            if any(_meets(n, seg) for seg in segments):
                found.append((n, w))
        for k, s in letters:
            B = A @ _letter_matrix(gens, k, s)
            key = _psl_key(B)
            if key not in visited:
                visited.add(key)
                queue.append(B)
    return _collect(found, orbit.basepoint)


# -- JSON ---------------------------------------------------------------------------


def load_lamination(path_or_dict):
    """Read the lamination JSON format; returns FiniteLamination or OrbitLamination."""
    if isinstance(path_or_dict, dict):
        data = path_or_dict
    else:
        with open(path_or_dict) as fh:
            data = json.load(fh)
    try:
        basepoint = data.get("basepoint", (1.0, 0.0, 0.0))
        if "group" in data:
            grp = data["group"]
            gens = []
            for g in grp["generators"]:
                A = np.array(g, dtype=float)
                d = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
                if abs(d - 1) > 1e-9:
                    raise InvalidInput(f"generator determinant {d} differs from 1")
                gens.append(A)
            base = FiniteLamination.from_dict({"basepoint": basepoint, "leaves": grp["base_leaves"]})
            return OrbitLamination(tuple(gens), base, float(grp["window_radius"]), int(grp["word_length"]))
        return FiniteLamination.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed lamination data: {exc}") from exc
