import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wickbench.models import (
    E_ROT,
    AdsGeodesic,
    DisjointPlanes,
    Geodesic,
    InvalidInput,
    Plane,
    ads_action,
    ads_plane_angle,
    ads_point_to_h2,
    ads_rotation,
    angle_to_null,
    classify,
    duality,
    eta_ads,
    eta_sl2,
    exp_map,
    generators,
    h2_distance,
    h2_to_ads_point,
    hpoint,
    inner,
    is_positive_basis,
    minkowski,
    mobius,
    psl_distance,
    psl_equal,
    segre_boundary,
    segre_inverse,
    sl2_exp,
    sl2_to_vec,
    so21,
    so31,
    uhp_to_h2,
    vec_to_sl2,
    projective_distance,
)

import oracles
from strategies import random_h2, random_sl2, seeds, three_planes


# -- forms ------------------------------------------------------------------


def test_inner_timelike_unit():
    assert inner("X0", (1, 0, 0), (1, 0, 0)) == -1


def test_inner_null():
    assert inner("X0", (1, 1, 0), (1, 1, 0)) == 0


def test_inner_sl2_diagonal():
    assert inner("sl2", np.diag([1.0, -1.0]), np.diag([1.0, -1.0])) == pytest.approx(1.0)


def test_inner_rejects_mismatched_tag():
    with pytest.raises(InvalidInput):
        inner("X0", np.zeros(4), np.zeros(4))
    with pytest.raises(InvalidInput):
        inner("sl2", np.zeros(3), np.zeros(3))


def test_classify():
    assert classify(np.array([1.0, 0, 0])) == "timelike"
    assert classify(np.array([0.0, 1, 0])) == "spacelike"
    assert classify(np.array([1.0, 1, 0])) == "null"


@given(seeds)
@settings(max_examples=50)
def test_sl2_identification_is_isometry(seed):
    rng = np.random.default_rng(seed)
    u, v = rng.normal(size=(2, 3))
    assert eta_sl2(vec_to_sl2(u), vec_to_sl2(v)) == pytest.approx(minkowski(u, v), abs=1e-10)
    assert np.allclose(sl2_to_vec(vec_to_sl2(u)), u)


def test_identification_worked_matrices():
    assert np.allclose(vec_to_sl2([1, 0, 0]), E_ROT)
    assert np.allclose(vec_to_sl2([0, 0, 1]), np.diag([1, -1]))
    # the point i of the upper half-plane is E, the order-two rotation fixing it
    assert np.allclose(uhp_to_h2(1j), [1, 0, 0])


@given(seeds)
@settings(max_examples=30)
def test_so21_matches_mobius_action(seed):
    rng = np.random.default_rng(seed)
    A = random_sl2(rng)
    z = complex(rng.normal(), rng.uniform(0.2, 3))
    assert np.allclose(so21(A) @ uhp_to_h2(z), uhp_to_h2(mobius(A, z)), atol=1e-9)


@given(seeds)
@settings(max_examples=30)
def test_so31_restricts_to_so21(seed):
    rng = np.random.default_rng(seed)
    A = random_sl2(rng)
    R4 = so31(A)
    assert np.allclose(R4[:3, :3], so21(A), atol=1e-9)
    assert np.allclose(R4[3], [0, 0, 0, 1], atol=1e-12)


# -- distance ---------------------------------------------------------------


def test_h2_distance_parametrized_geodesic():
    assert h2_distance(np.array([1.0, 0, 0]), np.array([np.cosh(1), np.sinh(1), 0])) == pytest.approx(1.0)


def test_h2_distance_zero():
    x = hpoint([2.0, 1.0, 1.0])
    assert h2_distance(x, x) == 0.0


@given(seeds)
@settings(max_examples=25, deadline=None)
def test_h2_distance_against_arc_length_quadrature(seed):
    rng = np.random.default_rng(seed)
    x, y = random_h2(rng), random_h2(rng)
    assert h2_distance(x, y) == pytest.approx(oracles.arc_length_h2(x, y), abs=1e-8)


# -- geodesics and generators -------------------------------------------------------


def test_geodesic_round_trip_many():
    rng = np.random.default_rng(0)
    worst = 0.0
    for a, b in rng.uniform(0, 2 * np.pi, size=(10_000, 2)):
        if min(abs(a - b), 2 * np.pi - abs(a - b)) < 1e-3:
            continue
        g = Geodesic(a, b)
        h = Geodesic.from_normal(g.normal)
        err = max(min(abs(h.start - g.start), 2 * np.pi - abs(h.start - g.start)),
                  min(abs(h.end - g.end), 2 * np.pi - abs(h.end - g.end)))
        worst = max(worst, err)
    assert worst < 1e-9


def test_geodesic_degenerate():
    with pytest.raises(InvalidInput):
        Geodesic(1.0, 1.0 + 2 * np.pi)


def test_imaginary_axis_generator():
    g = Geodesic(0.0, np.pi)  # from 0 to infinity in the upper half-plane
    X, Xrot = generators(g)
    assert np.allclose(X, np.diag([1.0, -1.0]), atol=1e-15)
    # exp(t X) is z -> exp(2t) z: translation by 2t toward infinity
    z = mobius(sl2_exp(0.3 * X), 1j)
    assert z == pytest.approx(np.exp(0.6) * 1j)


def test_rotation_generator_period():
    g = Geodesic(0.4, 2.5)
    _, Xrot = generators(g)
    assert psl_equal(sl2_exp(2 * np.pi * Xrot), np.eye(2), tol=1e-12)


def test_reverse_negates_generators():
    g = Geodesic(0.4, 2.5)
    X, R = generators(g)
    Xr, Rr = generators(g.reversed())
    assert np.allclose(X, -Xr) and np.allclose(R, -Rr)


@given(st.floats(0, 2 * np.pi), st.floats(0.01, 2 * np.pi - 0.01))
def test_positive_basis_convention(a, gap):
    g = Geodesic(a, a + gap)
    v = sl2_to_vec(generators(g)[0])
    assert is_positive_basis(angle_to_null(g.start), angle_to_null(g.end), v)


def test_normal_points_right():
    g = Geodesic(0.0, np.pi)
    assert minkowski(uhp_to_h2(1 + 1j), g.normal) > 0


# -- exponentials --------------------------------------------------------------


def test_exp_map_h3_example():
    y = exp_map("H3", np.array([1.0, 0, 0, 0]), np.array([0, 0, 0, 1.0]), np.arctanh(0.5)).coords
    assert np.allclose(y, [oracles.TWO_OVER_SQRT3, 0, 0, oracles.ONE_OVER_SQRT3], atol=1e-15)


def test_exp_map_ds_closed_geodesic():
    x = np.array([0.0, 0, 0, 1])
    y = exp_map("X1", x, np.array([0.0, 1, 0, 0]), np.pi).coords
    assert np.allclose(y, -x, atol=1e-12)
    assert minkowski(y, y) == pytest.approx(1.0)


def test_exp_map_ads_rotation():
    t = 0.7
    y = exp_map("Xm1", np.eye(2), E_ROT, t).coords
    assert np.allclose(y, [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    assert np.linalg.det(y) == pytest.approx(1.0)


def test_exp_map_rejects_non_tangent():
    with pytest.raises(InvalidInput):
        exp_map("H3", np.array([1.0, 0, 0, 0]), np.array([1.0, 0, 0, 1.0]), 1.0)


@given(seeds, st.sampled_from(["H2", "H3", "X1", "Xm1"]), st.floats(-3, 3))
@settings(max_examples=80)
def test_exp_map_normalization(seed, model, t):
    rng = np.random.default_rng(seed)
    if model == "Xm1":
        base = random_sl2(rng)
        v = base @ vec_to_sl2(rng.normal(size=3))  # tangent at base: base times traceless
        q_target = -1.0
        q = lambda m: eta_ads(m, m)
    else:
        n = 3 if model == "H2" else 4
        if model == "X1":
            s = rng.normal()
            u = rng.normal(size=n - 1)
            base = np.concatenate([[np.sinh(s)], np.cosh(s) * u / np.linalg.norm(u)])
            q_target = 1.0
        else:
            base = np.concatenate([[0.0], rng.normal(size=n - 1)])
            base[0] = np.sqrt(1 + np.sum(base[1:] ** 2))
            q_target = -1.0
        v = rng.normal(size=n)
        v = v - minkowski(v, base) / minkowski(base, base) * base
        q = lambda m: minkowski(m, m)
    y = exp_map(model, base, v, t).coords
    assert q(y) == pytest.approx(q_target, abs=1e-9 * max(1, np.abs(y).max() ** 2))


def test_sl2_exp_trichotomy_against_series():
    from scipy.linalg import expm

    for X in (np.diag([0.7, -0.7]), 0.9 * E_ROT, np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[1e-7, 2e-7], [3e-7, -1e-7]])):
        assert np.allclose(sl2_exp(X), expm(X), atol=1e-13)
    Z = np.array([[0.3 + 0.2j, 1.0], [0.5j, -0.3 - 0.2j]])
    assert np.allclose(sl2_exp(Z), expm(Z), atol=1e-13)


def test_psl_equality_sign_insensitive():
    A = random_sl2(np.random.default_rng(1))
    assert psl_distance(A, -A) == 0.0


# -- anti-de Sitter -----------------------------------------------------------------


def test_ads_rotation_identity():
    a, b = ads_rotation(Geodesic(0.3, 2.0), 0.0)
    assert np.allclose(a, np.eye(2)) and np.allclose(b, np.eye(2))


@given(seeds, st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=40)
def test_ads_rotation_group_law(seed, t, s):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0, 2 * np.pi, 2)
    if min(abs(a - b), 2 * np.pi - abs(a - b)) < 0.1:
        return
    g = Geodesic(a, b)
    r1, r2, r12 = ads_rotation(g, t), ads_rotation(g, s), ads_rotation(g, t + s)
    assert psl_equal(r1[0] @ r2[0], r12[0]) and psl_equal(r1[1] @ r2[1], r12[1])


def test_ads_rotation_fixes_its_axis():
    g = Geodesic(0.0, np.pi)
    X, _ = generators(g)
    x = sl2_exp(-0.3 * X)
    pair = ads_rotation(g, 0.3)
    for s in np.linspace(-2, 2, 7):
        y = h2_to_ads_point(g.point(s))
        assert np.allclose(x @ y @ x, y, atol=1e-12)
        assert np.allclose(ads_action(pair, y), y, atol=1e-12)


def test_ads_rotation_angle_is_twice_parameter():
    g = Geodesic(0.2, 3.0)
    pair = ads_rotation(g, 0.4)
    rotated_dual = ads_action(pair, np.eye(2))
    assert ads_plane_angle(Plane("Xm1", np.eye(2)), Plane("Xm1", rotated_dual)) == pytest.approx(0.8)


def test_plane_angle_identical_planes():
    assert ads_plane_angle(np.eye(2), np.eye(2)) == 0.0


def test_plane_angle_disjoint_planes_raise():
    with pytest.raises(DisjointPlanes):
        ads_plane_angle(np.eye(2), sl2_exp(0.5 * E_ROT))


def test_three_planes_inequality():
    rng = np.random.default_rng(7)
    worst = np.inf
    for _ in range(1000):
        x1, x2, x3 = three_planes(rng)
        margin = ads_plane_angle(x2, x3) - ads_plane_angle(x1, x2) - ads_plane_angle(x1, x3)
        worst = min(worst, margin)
    assert worst > 1e-8


def test_duality_point_plane_x1():
    v = np.array([0.5, 1.0, 0.3, 0.2])
    v = v / np.sqrt(minkowski(v, v))
    P = duality("X1", v)
    assert np.allclose(duality("X1", P).coords, v)
    with pytest.raises(InvalidInput):
        duality("X1", np.array([1.0, 0, 0, 0]))


def test_dual_of_identity_is_elliptic_plane():
    P = duality("Xm1", np.eye(2))
    rng = np.random.default_rng(2)
    for _ in range(20):
        x, y = random_h2(rng), random_h2(rng)
        X, Y = h2_to_ads_point(x), h2_to_ads_point(y)
        assert eta_ads(P.dual, X) == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(X @ X, -np.eye(2), atol=1e-9)
        # cosh of the AdS distance inside P(Id) equals the hyperbolic one
        assert -eta_ads(X, Y) == pytest.approx(np.cosh(h2_distance(x, y)), rel=1e-10)
        assert np.allclose(ads_point_to_h2(X), x)


def _random_ads_geodesic(rng):
    A = random_sl2(rng)
    W = A @ vec_to_sl2(np.concatenate([[0.0], rng.normal(size=2)]))
    W = W / np.sqrt(eta_ads(W, W))
    return AdsGeodesic(A, W)


def test_double_dual_is_identity():
    rng = np.random.default_rng(3)
    for _ in range(100):
        g = _random_ads_geodesic(rng)
        gg = duality("Xm1", duality("Xm1", g))
        assert np.allclose(gg.projector(), g.projector(), atol=1e-9)


def test_dual_geodesic_endpoints_swap_leaves():
    rng = np.random.default_rng(4)
    for _ in range(20):
        g = _random_ads_geodesic(rng)
        (aL, aR), (bL, bR) = (segre_inverse(p) for p in g.endpoints())
        dual_ends = {tuple(np.round(segre_inverse(p), 8)) for p in duality("Xm1", g).endpoints()}
        expected = {tuple(np.round((aL, bR), 8)), tuple(np.round((bL, aR), 8))}
        assert dual_ends == expected


def test_dual_of_hyperbolic_subgroup_is_axis():
    g = Geodesic(0.5, 2.8)
    X, _ = generators(g)
    hyp_line = AdsGeodesic(np.eye(2), X)
    dual = duality("Xm1", hyp_line)
    for s in (-1.0, 0.0, 1.3):
        M = np.cosh(s) * dual.point + np.sinh(s) * dual.tangent
        assert np.trace(M) == pytest.approx(0.0, abs=1e-12)
        assert minkowski(ads_point_to_h2(M), g.normal) == pytest.approx(0.0, abs=1e-10)


# -- Segre boundary ----------------------------------------------------------------


def test_segre_diagonal_in_boundary_of_elliptic_plane():
    for t in np.linspace(0, 6, 7):
        M = segre_boundary(t, t).coords
        assert np.trace(M) == pytest.approx(0.0, abs=1e-12)
        assert np.linalg.det(M) == pytest.approx(0.0, abs=1e-12)


def test_segre_equivariance():
    rng = np.random.default_rng(5)
    for _ in range(100):
        A, B = random_sl2(rng), random_sl2(rng)
        l, r = rng.uniform(0, 2 * np.pi, 2)
        from wickbench.models import act_on_angle

        lhs = ads_action((A, B), segre_boundary(l, r).coords)
        rhs = segre_boundary(act_on_angle(A, l), act_on_angle(B, r)).coords
        assert projective_distance(lhs, rhs) < 1e-9


def test_segre_left_leaf_is_projective_line():
    r = 1.1
    pts = np.array([segre_boundary(l, r).coords.ravel() for l in np.linspace(0.1, 6.0, 12)])
    assert np.linalg.matrix_rank(pts, tol=1e-10) == 2
