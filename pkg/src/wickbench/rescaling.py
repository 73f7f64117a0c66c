"""Developing maps of the flat domain and the pullback-metric verifier.

Each developing map sends a point p = r + T N of the flat domain to a
target model:

* hyperbolic (T > 1): cosh(d) x + sinh(d) w with d = arctanh(1 / T),
* de Sitter (T < 1): cosh(s) w + sinh(s) x with s = arctanh(T),
* anti-de Sitter: beta_minus (cos(s) Id - sin(s) X(N)) beta_plus^-1 with s = arctan(T),

where x is the bent image of N, w the bent image of the positive normal of
H2 in H3, and the beta are the lifted cocycles from the basepoint stratum.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .cocycles import basepoint_cocycle
from .flat_domain import CtPoint, ct_decompose, domain, sample_points
from .models import (
    N0_H3,
    InvalidInput,
    ModelPoint,
    embed_h3,
    eta_ads,
    inv2,
    minkowski,
    so31,
    vec_to_sl2,
)


class OutOfRange(InvalidInput):
    """Cosmological time outside the range of the developing map."""


@dataclass(frozen=True)
class RescalingLaw:
    """Horizontal and vertical rescaling functions of one target.

    ``vertical_sign`` is the sign of g(JX, JX) for the unit gradient X.
    """

    target: str
    horizontal: Callable[[float], float]
    vertical: Callable[[float], float]
    ct_transform: Callable[[float], float]
    t_min: float
    t_max: float
    vertical_sign: int
    sample_range: tuple

    def in_range(self, T):
        return self.t_min < T < self.t_max


LAWS = {
    "hyp": RescalingLaw(
        "hyp",
        lambda T: 1.0 / (T * T - 1.0),
        lambda T: 1.0 / (T * T - 1.0) ** 2,
        lambda T: float(np.arctanh(1.0 / T)),
        1.0,
        np.inf,
        1,
        (1.2, 4.0),
    ),
    "ds": RescalingLaw(
        "ds",
        lambda T: 1.0 / (1.0 - T * T),
        lambda T: 1.0 / (1.0 - T * T) ** 2,
        lambda T: float(np.arctanh(T)),
        0.0,
        1.0,
        -1,
        (0.1, 0.9),
    ),
    "ads": RescalingLaw(
        "ads",
        lambda T: 1.0 / (1.0 + T * T),
        lambda T: 1.0 / (1.0 + T * T) ** 2,
        lambda T: float(np.arctan(T)),
        0.0,
        np.inf,
        -1,
        (0.1, 4.0),
    ),
}


def law(target):
    try:
        return LAWS[target.lower()]
    except KeyError:
        raise InvalidInput(f"unknown target {target!r}; expected hyp, ds or ads") from None


# -- developing maps --------------------------------------------------------------


def _as_ct(lam, p):
    return p if isinstance(p, CtPoint) else ct_decompose(lam, p)


def _frame_h3(lam, c):
    """Bent images (x, w) of N and of the positive normal, in R^{3,1}."""
    L = so31(basepoint_cocycle(lam, c, "PSL2C"))
    return L @ embed_h3(c.N), L @ N0_H3


def hyp_boundary_distance(p):
    """Distance from the developed point to the bent surface."""
    T = p.T if isinstance(p, CtPoint) else float(p)
    if T <= 1:
        raise OutOfRange("hyperbolic developing map needs T > 1")
    return float(np.arctanh(1.0 / T))


def wick_develop(lam, p):
    c = _as_ct(lam, p)
    d = hyp_boundary_distance(c)
    x, w = _frame_h3(lam, c)
    return ModelPoint("H3", np.cosh(d) * x + np.sinh(d) * w)


def proj_develop(lam, p, tol=1e-9):
    """Ideal point of H3 on the level surface T = 1 (normalised x0 = 1)."""
    c = _as_ct(lam, p)
    if abs(c.T - 1.0) > tol:
        raise InvalidInput(f"projective developing map is defined on T = 1, got T = {c.T}")
    x, w = _frame_h3(lam, c)
    v = x + w
    return ModelPoint("S2inf", v / v[0])


def ds_develop(lam, p):
    c = _as_ct(lam, p)
    if not 0 < c.T < 1:
        raise OutOfRange("de Sitter developing map needs 0 < T < 1")
    s = np.arctanh(c.T)
    x, w = _frame_h3(lam, c)
    return ModelPoint("X1", np.cosh(s) * w + np.sinh(s) * x)


def ads_frame(lam, c):
    """(x_minus, x_plus) for the anti-de Sitter developing map."""
    bm, bp = basepoint_cocycle(lam, c, "PSL2R_pair")
    bpi = inv2(bp)
    return bm @ bpi, -(bm @ vec_to_sl2(c.N) @ bpi)


def ads_develop(lam, p):
    c = _as_ct(lam, p)
    if c.T <= 0:
        raise OutOfRange("anti-de Sitter developing map needs T > 0")
    s = np.arctan(c.T)
    xm, xp = ads_frame(lam, c)
    return ModelPoint("Xm1", np.cos(s) * xm + np.sin(s) * xp)


_DEVELOP = {"hyp": wick_develop, "ds": ds_develop, "ads": ads_develop}


def develop(lam, target, p):
    """Developing map of ``target`` as a flat ambient array."""
    return np.ravel(_DEVELOP[law(target).target](lam, p).coords)


def target_metric(target, u, v):
    if law(target).target == "ads":
        return float(eta_ads(np.reshape(u, (2, 2)), np.reshape(v, (2, 2))))
    return float(minkowski(u, v))


def round_ball_factor(alpha, d):
    """Length stretch at distance d of the round metric rotated by alpha."""
    den = np.cos(alpha) - np.sinh(d) * np.sin(alpha)
    if den <= 0:
        raise InvalidInput("point leaves the rotated half-space: non-positive denominator")
    return float(1.0 / den)


# -- verification ------------------------------------------------------------------


@dataclass(frozen=True)
class SampleResult:
    p: list
    T: float
    stratum: str
    gram: list
    alpha_residual: float
    beta_residual: float
    cross_residual: float
    jacobian_det: float
    passed: bool


@dataclass
class VerificationReport:
    target: str
    tolerance: float
    step: float
    samples: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def verdict(self):
        return "pass" if self.samples and all(s.passed for s in self.samples) else "fail"

    def max_residual(self):
        if not self.samples:
            return float("nan")
        return max(max(s.alpha_residual, s.beta_residual, s.cross_residual) for s in self.samples)

    def to_dict(self):
        return {
            "target": self.target,
            "tolerance": self.tolerance,
            "step": self.step,
            "config": self.config,
            "samples": [
                {
                    "p": s.p,
                    "T": s.T,
                    "stratum": s.stratum,
                    "alpha_residual": s.alpha_residual,
                    "beta_residual": s.beta_residual,
                    "cross_residual": s.cross_residual,
                    "jacobian_det": s.jacobian_det,
                }
                for s in self.samples
            ],
            "max_residual": self.max_residual(),
            "verdict": self.verdict,
        }


def flat_frame(N):
    """Orthonormal frame (X, e2, e3) of R^{2,1} with X = N."""
    e = []
    for v in (np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])):
        v = v + minkowski(v, N) * N
        for u in e:
            v = v - minkowski(v, u) * u
        e.append(v / np.sqrt(minkowski(v, v)))
    return np.array(N), e[0], e[1]


def _check_interior(lam, c, step):
    d = domain(lam)
    if c.is_band:
        _, i, t = c.stratum
        if min(t, 1 - t) * d.a[i] <= 10 * step:
            raise InvalidInput("sample too close to a band edge")
        others = np.delete(np.abs(lam.sides(c.N)), i)
    else:
        others = np.abs(lam.sides(c.N)) if len(lam) else np.zeros(0)
    if others.size and others.min() <= np.sinh(10 * step / c.T):
        raise InvalidInput("sample too close to a leaf")


def verify_rescaling(lam, target, p, step=1e-4, tol=1e-4, alpha_scale=1.0):
    """Finite-difference pullback of the target metric in the frame (-grad T, e2, e3)."""
    L = law(target)
    c = _as_ct(lam, p)
    if not L.in_range(c.T):
        raise OutOfRange(f"T = {c.T} outside the range of target {L.target}")
    _check_interior(lam, c, step)
    frame = flat_frame(c.N)
    cols = [(develop(lam, L.target, c.p + step * v) - develop(lam, L.target, c.p - step * v)) / (2 * step) for v in frame]
    G = np.array([[target_metric(L.target, a, b) for b in cols] for a in cols])
    alpha = alpha_scale * L.horizontal(c.T)
    beta = L.vertical(c.T)
    a_res = float(np.max(np.abs(G[1:, 1:] - alpha * np.eye(2))) / alpha)
    b_res = float(abs(G[0, 0] - L.vertical_sign * beta) / beta)
    x_res = float(np.max(np.abs(G[0, 1:])) / np.sqrt(alpha * beta))
    jdet = float(np.sqrt(abs(np.linalg.det(G))))
    passed = max(a_res, b_res, x_res) <= tol and jdet > 1e-6
    stratum = ":".join(map(str, c.stratum))
    return SampleResult([float(v) for v in c.p], float(c.T), stratum, G.tolist(), a_res, b_res, x_res, jdet, bool(passed))


def worker_count():
    try:
        return max(1, int(os.environ.get("WICKBENCH_THREADS", "1")))
    except ValueError:
        return 1


def verification_report(lam, target, samples=200, seed=0, step=1e-4, tol=1e-4, alpha_scale=1.0, radius=1.5, rng=None):
    """Verify the rescaling law at ``samples`` random stratum-interior points."""
    L = law(target)
    rng = np.random.default_rng(seed) if rng is None else rng
    pts = sample_points(lam, samples, rng, L.sample_range, radius=radius)
    run = lambda c: verify_rescaling(lam, L.target, c, step, tol, alpha_scale)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(run, pts))
    config = {"samples": samples, "seed": seed, "step": step, "tol": tol, "alpha_scale": alpha_scale}
    return VerificationReport(L.target, tol, step, results, config)


# -- cosmological time of the image -------------------------------------------------------


def _speed(lam, target, c, s, h):
    a = develop(lam, target, c.r + (s + h) * c.N)
    b = develop(lam, target, c.r + (s - h) * c.N)
    v = (a - b) / (2 * h)
    return np.sqrt(abs(target_metric(target, v, v)))


def proper_time(lam, target, p, rel_step=1e-5):
    """Proper time of the developed gradient line, by quadrature of FD speeds.

    de Sitter and anti-de Sitter: from the initial singularity up to p.
    Hyperbolic: from p out to infinity, substituting s = T / u.
    """
    L = law(target)
    c = _as_ct(lam, p)
    if L.target == "hyp":
        f = lambda u: _speed(lam, "hyp", c, c.T / u, rel_step * c.T / u) * c.T / (u * u)
        val, _ = quad(f, 0.0, 1.0, epsabs=1e-12, epsrel=1e-11, limit=200)
    else:
        f = lambda s: _speed(lam, L.target, c, s, rel_step * max(s, 1e-3))
        val, _ = quad(f, 0.0, c.T, epsabs=1e-12, epsrel=1e-11, limit=200)
    return float(val), L.ct_transform(c.T)
