"""Independent reference computations used by the tests.

None of these call into the code paths they check; they use quadrature,
brute force or a different model of the same object.
"""

import numpy as np
from scipy.integrate import quad

# frozen high-precision constants (30-digit evaluation, rounded to double)
ATANH_HALF = 0.5493061443340548
TWO_OVER_SQRT3 = 1.1547005383792515
ONE_OVER_SQRT3 = 0.5773502691896258
TWO_COSH = {0.4: 2.1621447436769096, 0.5: 2.2552519304127616, 0.6: 2.3709304364845354}
ROUND_BALL_05_03 = 1.3668900163253285


def arc_length_h2(x, y):
    """Length of the hyperbolic geodesic from x to y in the upper half-plane.

    The geodesic is parametrised as the image of the imaginary axis under a
    Moebius map, and the metric |dz| / Im z is integrated numerically.
    """
    zx = complex(x[2], 1.0) / (x[0] + x[1])
    zy = complex(y[2], 1.0) / (y[0] + y[1])
    # vertical line, or the circle centred on the real axis through zx and zy
    if abs(zx.real - zy.real) < 1e-14:
        f = lambda t: zx + t * (zy - zx)
        rate = abs(zy - zx)
    else:
        c = (abs(zy) ** 2 - abs(zx) ** 2) / (2 * (zy.real - zx.real))
        r = abs(zx - c)
        ax = np.angle(zx - c)
        ay = np.angle(zy - c)
        f = lambda t: c + r * np.exp(1j * (ax + t * (ay - ax)))
        rate = r * abs(ay - ax)

    def speed(t):
        return rate / f(t).imag

    val, _ = quad(speed, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def chords_cross(a, b, c, d):
    """Brute-force test on the unit circle: do chords (a,b) and (c,d) cross?"""
    P = lambda t: np.array([np.cos(t), np.sin(t)])
    p1, p2, p3, p4 = P(a), P(b), P(c), P(d)

    def orient(p, q, r):
        return np.sign((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))

    return orient(p1, p2, p3) * orient(p1, p2, p4) < 0 and orient(p3, p4, p1) * orient(p3, p4, p2) < 0


def segment_meets_chord(x, y, a, b, n=4000):
    """Parameter in [0, 1] where the Klein-model segment [x, y] meets chord (a, b), or None."""
    kx = np.array(x[1:]) / x[0]
    ky = np.array(y[1:]) / y[0]
    pa = np.array([np.cos(a), np.sin(a)])
    pb = np.array([np.cos(b), np.sin(b)])
    M = np.column_stack([ky - kx, pa - pb])
    try:
        s, u = np.linalg.solve(M, pa - kx)
    except np.linalg.LinAlgError:
        return None
    if 0 <= s <= 1 and 0 <= u <= 1:
        return s
    return None


def round_ball_stretch(alpha, d):
    """Stretch of z -> exp(-i alpha) z on the upper half-plane at distance d from the imaginary axis."""
    z = complex(np.sinh(d), 1.0)
    return z.imag / (np.exp(-1j * alpha) * z).imag


def ct_from_singularity(points, p):
    """Largest timelike separation of p from a sample of the initial singularity."""
    w = p[None, :] - points
    q = -w[:, 0] ** 2 + w[:, 1] ** 2 + w[:, 2] ** 2
    ok = (q < 0) & (w[:, 0] > 0)
    if not ok.any():
        return 0.0
    return float(np.sqrt(-q[ok]).max())


def fd_gradient(f, p, h=1e-6):
    """Lorentzian gradient of a scalar function by central differences."""
    g = np.zeros(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        g[k] = (f(p + e) - f(p - e)) / (2 * h)
    return np.array([-g[0], g[1], g[2]])


def rotation_about_axis_h3(alpha):
    """Lorentz matrix rotating the (x2, x3) plane by alpha (rotation about the x2 = 0 geodesic)."""
    R = np.eye(4)
    c, s = np.cos(alpha), np.sin(alpha)
    R[2, 2], R[2, 3], R[3, 2], R[3, 3] = c, -s, s, c
    return R
