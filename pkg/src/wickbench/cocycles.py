"""Bending, quake-bend and anti-de Sitter cocycles of a finite lamination.

Every cocycle is an ordered product over the leaves met by a segment
[x, y], starting from the leaf closest to x.  A leaf is oriented so that its
unit translation generator corresponds to the normal pointing away from x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flat_domain import domain
from .laminations import EPS_ON_LEAF, FiniteLamination, TransverseArc, leaves_crossing
from .models import (
    Geodesic,
    InvalidInput,
    ModelPoint,
    act_on_angle,
    angle_to_null,
    axis_generator,
    embed_h3,
    ideal_direction,
    inv2,
    minkowski,
    ordered_product,
    segre_boundary,
    sl2_exp,
    sl2_to_vec,
    so21,
    so31,
    translation_length,
    vec_to_sl2,
)

TARGETS = ("PSL2C", "PSL2R_pair")


@dataclass(frozen=True)
class CocycleValue:
    target: str
    payload: object

    def matrices(self):
        return self.payload if self.target == "PSL2R_pair" else (self.payload,)


def segment_factors(lam, x, y, scale=1.0):
    """(generator, effective weight) pairs ordered from x along [x, y]."""
    return [
        (vec_to_sl2(c.far_normal), scale * c.mass)
        for c in leaves_crossing(lam, TransverseArc(x, y))
    ]


def lifted_factors(lam, p, scale=1.0):
    """Factors from the basepoint stratum to the stratum of a CtPoint.

    Inside the band of leaf i at band parameter t the leaf carries the
    fraction t of its weight.
    """
    d = domain(lam)
    x0 = lam.basepoint
    if not p.is_band:
        return segment_factors(lam, x0, p.N, scale)
    _, i, t = p.stratum
    out = [
        (vec_to_sl2(c.far_normal), scale * c.mass)
        for c in leaves_crossing(lam, TransverseArc(x0, p.N))
        if c.index != i
    ]
    out.append((vec_to_sl2(d.far[i]), scale * t * d.a[i]))
    return out


def _prod(factors, coeff):
    return ordered_product([sl2_exp(coeff * w * X) for X, w in factors], dtype=complex if np.iscomplexobj(coeff) else float)


def _bend(factors):
    return _prod(factors, 0.5j)


def _ads(factors):
    return _prod(factors, -0.5), _prod(factors, 0.5)


def bending_cocycle(lam, x, y, scale=1.0):
    """Product of rotations exp(a_i (i/2) X_i) over leaves met by [x, y]."""
    return _bend(segment_factors(lam, x, y, scale))


def quake_bend(lam, z, x, y, scale=1.0):
    """Product of exp(z a_i X_i / 2); z = i is bending, z real is shearing."""
    return _prod(segment_factors(lam, x, y, scale), 0.5 * complex(z))


def ads_cocycle(lam, x, y, scale=1.0):
    """Pair (prod exp(-a_i X_i / 2), prod exp(+a_i X_i / 2))."""
    return _ads(segment_factors(lam, x, y, scale))


def lifted_cocycle(lam, p, q, target="PSL2C"):
    """Cocycle between two points of the flat domain."""
    if target not in TARGETS:
        raise InvalidInput(f"unknown cocycle target {target!r}")
    fp = lifted_factors(lam, p)
    fq = lifted_factors(lam, q)
    if target == "PSL2C":
        return CocycleValue(target, inv2(_bend(fp)) @ _bend(fq))
    mp, pp = _ads(fp)
    mq, pq = _ads(fq)
    return CocycleValue(target, (inv2(mp) @ mq, inv2(pp) @ pq))


def basepoint_cocycle(lam, p, target="PSL2C"):
    """Lifted cocycle from the basepoint stratum to p."""
    f = lifted_factors(lam, p)
    return _bend(f) if target == "PSL2C" else _ads(f)


# -- bending maps -----------------------------------------------------------------


def bending_map(lam, x):
    """Pleated image of x in H3: B(x0, x) applied to the inclusion of x."""
    B = bending_cocycle(lam, lam.basepoint, x)
    return ModelPoint("H3", so31(B) @ embed_h3(x))


def ads_bending(lam, x):
    """Bent image of x in the anti-de Sitter model."""
    bm, bp = ads_cocycle(lam, lam.basepoint, x)
    return ModelPoint("Xm1", bm @ vec_to_sl2(x) @ inv2(bp))


# -- earthquakes ---------------------------------------------------------------------


def _side_index(side):
    if side not in ("left", "right"):
        raise InvalidInput("side must be 'left' or 'right'")
    return 1 if side == "left" else 0


def earthquake(lam, side, x, leaf_side=None):
    """Left (using beta_plus) or right (beta_minus) earthquake of x.

    For x on a leaf ``leaf_side`` selects the value of the near ('-') or far
    ('+') adjacent stratum.
    """
    k = _side_index(side)
    x = np.asarray(x, dtype=float)
    on = np.flatnonzero(np.abs(lam.sides(x)) < EPS_ON_LEAF) if len(lam) else []
    if len(on):
        if leaf_side not in ("-", "+"):
            raise InvalidInput(f"point lies on leaf {int(on[0])}; pass leaf_side '-' or '+'")
        d = domain(lam)
        x0 = lam.basepoint
        factors = [
            (vec_to_sl2(c.far_normal), c.mass) for c in leaves_crossing(lam, TransverseArc(x0, x)) if c.index not in on
        ]
        if leaf_side == "+":
            factors += [(vec_to_sl2(d.far[i]), d.a[i]) for i in on]
        pair = _ads(factors)
    else:
        pair = ads_cocycle(lam, lam.basepoint, x)
    return so21(pair[k]) @ x


def ideal_factors(lam, theta):
    """Factors along the ray from x0 to the ideal point theta.

    Returns (factors, atoms): crossed leaves ordered along the ray, and the
    factors of leaves having theta as an endpoint.
    """
    if not len(lam):
        return [], []
    d = domain(lam)
    x0 = lam.basepoint
    u = ideal_direction(x0, theta)
    xi = angle_to_null(theta)
    c_xi = lam.sides(xi)
    c_x0 = lam.sides(x0)
    crossed, atoms = [], []
    for i in range(len(lam)):
        if abs(c_xi[i]) < 1e-12:
            atoms.append((abs(c_x0[i]), i))
        elif np.sign(c_xi[i]) != d.s0[i]:
            crossed.append((-c_x0[i] / minkowski(u, d.M[i]), i))
    crossed.sort()
    atoms.sort()
    mk = lambda i: (vec_to_sl2(d.far[i]), d.a[i])
    return [mk(i) for _, i in crossed], [mk(i) for _, i in atoms]


def earthquake_boundary(lam, side, theta):
    """Boundary values of an earthquake at theta: a tuple of one or two angles."""
    k = _side_index(side)
    factors, atoms = ideal_factors(lam, theta)
    values = [act_on_angle(_ads(factors)[k], theta)]
    if atoms:
        values.append(act_on_angle(_ads(factors + atoms)[k], theta))
    return tuple(values)


def boundary_curve(lam, theta):
    """Point (right quake, left quake) of the boundary torus, or the two one-sided points."""
    right = earthquake_boundary(lam, "right", theta)
    left = earthquake_boundary(lam, "left", theta)
    # the bent surface limits to (beta_minus xi, beta_plus xi) in Segre coordinates
    pts = tuple(segre_boundary(r, l) for r, l in zip(right, left))
    return pts[0] if len(pts) == 1 else pts


# -- accumulating leaves ----------------------------------------------------------------


def earthquake_failure_case(n):
    """Leaves accumulating on a geodesic, whose composed translations escape."""
    if n < 2:
        raise InvalidInput("need n >= 2")
    normals = [np.array([np.sinh(1 / k), np.cosh(1 / k), 0.0]) for k in range(1, n + 1)]
    gens = [vec_to_sl2(-m) for m in normals]
    limit_normal = np.array([0.0, 1.0, 0.0])
    g = np.eye(2)
    rows = []
    for k in range(1, n + 1):
        g = g @ sl2_exp(gens[k - 1])
        ell = translation_length(g)
        axis = sl2_to_vec(axis_generator(g))
        axis_geo = Geodesic.from_normal(axis)
        ends = [angle_to_null(axis_geo.start), angle_to_null(axis_geo.end)]
        in_p = all(minkowski(e, limit_normal) >= -1e-12 for e in ends)
        out_p1 = all(minkowski(e, normals[0]) <= 1e-12 for e in ends)
        cosh_d = abs(minkowski(axis, limit_normal))
        dist = float(np.arccosh(cosh_d)) if cosh_d > 1 else 0.0
        rows.append(
            {
                "k": k,
                "translation_length": ell,
                "trace": float(np.trace(g)),
                "length_exceeds_k": bool(ell > k),
                "axis_in_strip": bool(in_p and out_p1),
                "axis_distance": dist,
                # g_1 = exp X_1 has axis l_1 itself, at distance exactly 1
                "axis_distance_exceeds_1_over_k": bool(dist > 1 / k) if k > 1 else None,
            }
        )
    verdict = all(
        r["length_exceeds_k"] and r["axis_in_strip"] and r["axis_distance_exceeds_1_over_k"] is not False
        for r in rows
    )
    return {"n": n, "rows": rows, "verdict": "pass" if verdict else "fail"}


def lamination_of_failure_case(n):
    """The n accumulating leaves as a FiniteLamination (unit weights)."""
    leaves = [(Geodesic.from_normal(np.array([np.sinh(1 / k), np.cosh(1 / k), 0.0])), 1.0) for k in range(1, n + 1)]
    return FiniteLamination(leaves, np.array([np.cosh(2.0), np.sinh(2.0), 0.0]))
