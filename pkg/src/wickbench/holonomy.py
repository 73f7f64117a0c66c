"""Holonomy representations of a lamination-invariant group and their spectra."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cocycles import ads_cocycle, bending_cocycle, quake_bend, segment_factors
from .laminations import (
    FiniteLamination,
    OrbitLamination,
    TransverseArc,
    leaves_crossing,
    orbit_leaves_meeting,
    parse_word,
    word_matrix,
)
from .models import (
    Geodesic,
    InvalidInput,
    axis_generator,
    minkowski,
    mobius,
    sl2_to_vec,
    so21,
    translation_length,
    uhp_boundary_to_angle,
    uhp_to_h2,
)

TARGETS = ("flat", "hyp", "ads")


class SpectralTypeError(InvalidInput):
    """Word image is not hyperbolic."""


@dataclass(frozen=True)
class SpectrumEntry:
    word: str
    kappa: int
    ell: float
    M: float
    trace: complex

    def csv_row(self):
        return [self.word, self.kappa, repr(self.ell), repr(self.M), repr(self.trace.real), repr(self.trace.imag)]


def _segment_lamination(orbit, A):
    x0 = orbit.basepoint
    return orbit_leaves_meeting(orbit, [(x0, so21(A) @ x0)])


def _flat_translation(lam, y, scale):
    return sum((scale * c.mass * c.far_normal for c in leaves_crossing(lam, TransverseArc(lam.basepoint, y))), np.zeros(3))


@dataclass
class HolonomyTable:
    """Images of the generators under the three holonomy representations.

    ``scale`` multiplies every transverse weight; any real value is allowed,
    which is what the ray derivatives at t = 0 need.
    """

    orbit: OrbitLamination
    scale: float = 1.0
    segment_laminations: list = field(default_factory=list)
    flat: list = field(default_factory=list)
    hyp: list = field(default_factory=list)
    ads: list = field(default_factory=list)
    _direct_cache: dict = field(default_factory=dict, repr=False)

    @property
    def generators(self):
        return self.orbit.generators

    @property
    def names(self):
        return self.orbit.names

    @property
    def basepoint(self):
        return self.orbit.basepoint

    def _images(self, A, lam):
        x0 = self.basepoint
        y = so21(A) @ x0
        t = self.scale
        tau = _flat_translation(lam, y, t)
        h = bending_cocycle(lam, x0, y, t) @ A
        bm, bp = ads_cocycle(lam, x0, y, t)
        return (so21(A), tau), h, (bm @ A, bp @ A)

    def rescaled(self, t):
        table = HolonomyTable(self.orbit, float(t), self.segment_laminations)
        table._fill()
        return table

    def _fill(self):
        self.flat, self.hyp, self.ads = [], [], []
        for A, lam in zip(self.generators, self.segment_laminations):
            f, h, a = self._images(A, lam)
            self.flat.append(f)
            self.hyp.append(h)
            self.ads.append(a)

    def word(self, word):
        return parse_word(word, len(self.generators)) if isinstance(word, str) else list(word)

    def base_matrix(self, word):
        return word_matrix(self.generators, self.word(word))

    def image(self, word, target, method="product"):
        if target not in TARGETS:
            raise InvalidInput(f"unknown holonomy target {target!r}")
        letters = self.word(word)
        if method == "direct":
            return self._direct(letters, target)
        if target == "flat":
            A, tau = np.eye(3), np.zeros(3)
            for k, s in letters:
                B, sigma = self.flat[k]
                if s < 0:
                    Bi = np.linalg.inv(B)
                    B, sigma = Bi, -Bi @ sigma
                A, tau = A @ B, tau + A @ sigma
            return A, tau
        if target == "hyp":
            out = np.eye(2, dtype=complex)
            for k, s in letters:
                out = out @ (self.hyp[k] if s > 0 else np.linalg.inv(self.hyp[k]))
            return out
        L, R = np.eye(2), np.eye(2)
        for k, s in letters:
            a, b = self.ads[k]
            L = L @ (a if s > 0 else np.linalg.inv(a))
            R = R @ (b if s > 0 else np.linalg.inv(b))
        return L, R

    def _direct(self, letters, target):
        key = tuple(letters)
        if key not in self._direct_cache:
            A = word_matrix(self.generators, letters)
            lam = _segment_lamination(self.orbit, A)
            self._direct_cache[key] = (A, lam)
        A, lam = self._direct_cache[key]
        f, h, a = self._images(A, lam)
        return {"flat": f, "hyp": h, "ads": a}[target]


def build_holonomy(orbit, scale=1.0):
    """Flat, hyperbolic and anti-de Sitter holonomy of an orbit lamination."""
    x0 = orbit.basepoint
    lams = []
    for A in orbit.generators:
        lam = _segment_lamination(orbit, A)
        y = so21(A) @ x0
        if len(lam) and np.min(np.abs(lam.sides(y))) < 1e-10:
            raise InvalidInput("translated basepoint lies on a leaf; choose another basepoint")
        lams.append(lam)
    table = HolonomyTable(orbit, float(scale), lams)
    table._fill()
    return table


# -- spectra -------------------------------------------------------------------------


def _word_label(table, word):
    if isinstance(word, str):
        return " ".join(word.split())
    return " ".join(("g" if s > 0 else "G") + str(k + 1) for k, s in word)


def spectrum(table, word, kappa):
    """Length and Margulis-type spectrum of a word in curvature kappa."""
    A = table.base_matrix(word)
    if abs(np.trace(A)) <= 2 + 1e-12:
        raise SpectralTypeError(f"word {word!r} is not hyperbolic (trace {np.trace(A):.6g})")
    label = _word_label(table, word)
    if kappa == 0:
        ell = translation_length(A)
        v = sl2_to_vec(axis_generator(A))
        _, tau = table.image(word, "flat")
        return SpectrumEntry(label, 0, ell, float(minkowski(v, tau)), complex(np.trace(A)))
    if kappa == 1:
        H = table.image(word, "hyp")
        tr = complex(np.trace(H))
        sign = 1.0 if tr.real >= 0 else -1.0
        w = np.arccosh(sign * tr / 2)
        return SpectrumEntry(label, 1, float(2 * w.real), float(2 * w.imag), tr)
    if kappa == -1:
        L, R = table.image(word, "ads")
        try:
            m = translation_length(L)
            n = translation_length(R)
        except InvalidInput as exc:
            raise SpectralTypeError(str(exc)) from None
        return SpectrumEntry(label, -1, 0.5 * (m + n), 0.5 * (n - m), complex(np.trace(R)))
    raise InvalidInput("kappa must be 0, 1 or -1")


def ray_derivative(table, word, kappa, step=1e-3):
    """Central differences in t of the spectrum of t * lambda at t = 0."""
    plus = spectrum(table.rescaled(step), word, kappa)
    minus = spectrum(table.rescaled(-step), word, kappa)
    return (plus.ell - minus.ell) / (2 * step), (plus.M - minus.M) / (2 * step)


def margulis(table, word):
    return spectrum(table.rescaled(1.0) if table.scale != 1.0 else table, word, 0).M


@dataclass(frozen=True)
class EmCheck:
    residual: float
    holomorphy_residual: float


def em_derivative_check(lam, x, y, step=1e-4):
    """Compare the z-derivative at 0 of the quake-bend cocycle with half the weighted generators."""
    target = 0.5 * sum((w * X for X, w in segment_factors(lam, x, y)), np.zeros((2, 2)))
    d_real = (quake_bend(lam, step, x, y) - quake_bend(lam, -step, x, y)) / (2 * step)
    d_imag = (quake_bend(lam, 1j * step, x, y) - quake_bend(lam, -1j * step, x, y)) / (2 * step)
    return EmCheck(float(np.linalg.norm(d_real - target)), float(np.linalg.norm(d_imag - 1j * d_real)))


def coboundary_solve(table):
    """Least-squares b with tau(gamma_k) = b - gamma_k b for every generator."""
    rows, rhs = [], []
    for A, tau in table.flat:
        rows.append(np.eye(3) - A)
        rhs.append(tau)
    M = np.vstack(rows)
    v = np.concatenate(rhs)
    b, *_ = np.linalg.lstsq(M, v, rcond=None)
    return b, float(np.linalg.norm(M @ b - v))


# -- scenarios ------------------------------------------------------------------------------


G1_UHP = np.array([[1.0, 2.0], [0.0, 1.0]])
G2_UHP = np.array([[1.0, 0.0], [2.0, 1.0]])


@dataclass(frozen=True)
class ThreeCusp:
    orbit: OrbitLamination
    cusp_words: dict
    expected_masses: dict
    midpoint_residuals: tuple


def _uhp_geodesic(p, q):
    return Geodesic(uhp_boundary_to_angle(p), uhp_boundary_to_angle(q))


def three_cusp_build(a1, a2, a3, window_radius=2.0, word_length=6):
    """Two ideal triangles glued along (0, inf), (1, inf), (0, 1) with the given weights."""
    if min(a1, a2, a3) <= 0:
        raise InvalidInput("weights must be positive")
    leaves = [
        (_uhp_geodesic(0.0, np.inf), a1),
        (_uhp_geodesic(1.0, np.inf), a2),
        (_uhp_geodesic(0.0, 1.0), a3),
    ]
    x0 = uhp_to_h2(complex(0.5, np.sqrt(3) / 2))
    base = FiniteLamination(leaves, x0)
    orbit = OrbitLamination((G1_UHP, G2_UHP), base, window_radius, word_length)
    residuals = (
        abs(mobius(G1_UHP, complex(-1, 1)) - complex(1, 1)),
        abs(mobius(G2_UHP, complex(-0.5, 0.5)) - complex(0.5, 0.5)),
    )
    words = {"gamma_inf": "g1", "gamma_0": "g2", "gamma_1": "g1 G2"}
    masses = {"gamma_inf": a1 + a2, "gamma_0": a1 + a3, "gamma_1": a2 + a3}
    return ThreeCusp(orbit, words, masses, residuals)


@dataclass(frozen=True)
class CyclicTestBed:
    orbit: OrbitLamination
    word: str
    weight: float
    angle: float


def cyclic_test_bed(weight=0.5, length=2.0, angle=np.pi / 3):
    """Translation along the imaginary axis with one leaf through i at the given angle."""
    g = np.diag([np.exp(length / 2), np.exp(-length / 2)])
    leaf = Geodesic.from_normal(np.array([0.0, np.sin(angle), np.cos(angle)]))
    x0 = uhp_to_h2(1j * np.exp(length / 2))
    base = FiniteLamination([(leaf, weight)], x0)
    return CyclicTestBed(OrbitLamination((g,), base, 3 * length, 4), "g1", weight, angle)
