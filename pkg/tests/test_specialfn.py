import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enclosure.geometry import Disc
from enclosure.specialfn import (
    MLParams,
    NeedleFrame,
    PrecisionLossError,
    beta0_root,
    mittag_leffler,
    mittag_leffler_log,
    ml_truncated,
    modified_spherical_bessel,
    regularization_constants,
    vekua_transform,
    yarmukhamedov_axis_value,
    yarmukhamedov_needle,
    yarmukhamedov_needle_many,
    yarmukhamedov_tip_gradient,
)


def ml_reference(alpha: float, z: complex) -> complex:
    """Extended-precision series oracle, independent of the runtime paths."""
    w = abs(z) ** (1.0 / alpha)
    dps = int(0.5 * w) + 60
    with mp.workdps(dps):
        zz = mp.mpc(z)
        total = mp.mpc(0)
        m = 0
        while True:
            t = zz**m / mp.gamma(alpha * m + 1)
            total += t
            if m > 5 and abs(t) < mp.mpf(10) ** (-dps + 8):
                break
            m += 1
            assert m < 500_000
        return complex(total)


# ---------------------------------------------------------------------------
# Mittag-Leffler
# ---------------------------------------------------------------------------
def test_ml_alpha_one_is_exp(rng):
    for _ in range(40):
        z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        assert mittag_leffler(1.0, z) == pytest.approx(np.exp(z), rel=1e-12)


def test_ml_at_zero_is_one():
    for alpha in (0.25, 0.5, 0.77, 1.0):
        assert mittag_leffler(alpha, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_ml_half_real_axis_vs_extended_precision_series():
    for x in np.linspace(-5.0, 5.0, 41):
        ref = ml_reference(0.5, complex(x))
        val = mittag_leffler(0.5, complex(x))
        assert abs(val - ref) <= 1e-10 * max(1.0, abs(ref))


def test_ml_half_complex_plane_vs_oracle(rng):
    for _ in range(60):
        z = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        ref = ml_reference(0.5, z)
        val = mittag_leffler(0.5, z)
        assert abs(val - ref) <= 1e-10 * max(1e-12, abs(ref))


@pytest.mark.parametrize("alpha", [0.25, 1.0 / 3.0, 2.0 / 3.0, 0.75, 0.9])
def test_ml_general_alpha_all_branches_vs_oracle(alpha, rng):
    # radii chosen to land in the series, contour and asymptotic branches
    w_targets = [0.5, 3.0, 8.0, 18.0, 30.0, 55.0]
    for w in w_targets:
        r = w**alpha
        for theta in np.linspace(-np.pi, np.pi, 9, endpoint=True):
            z = r * np.exp(1j * theta)
            ref = ml_reference(alpha, z)
            val = mittag_leffler(alpha, z)
            assert abs(val - ref) <= 2e-10 * max(1e-14, abs(ref)), (alpha, w, theta)


def test_ml_near_stokes_line(rng):
    # arguments hugging |arg z| = alpha*pi, the delicate region
    for alpha in (1.0 / 3.0, 2.0 / 3.0):
        for w in (5.0, 15.0):
            r = w**alpha
            for eps in (1e-2, 1e-4, 0.0, -1e-4, -1e-2):
                z = r * np.exp(1j * (alpha * np.pi + eps))
                ref = ml_reference(alpha, z)
                val = mittag_leffler(alpha, z)
                assert abs(val - ref) <= 1e-9 * max(1e-14, abs(ref))


@settings(max_examples=30, deadline=None)
@given(
    alpha=st.sampled_from([0.3, 0.5, 0.8]),
    re=st.floats(-4, 4),
    im=st.floats(0.01, 4),
)
def test_ml_conjugate_symmetry(alpha, re, im):
    z = complex(re, im)
    a = mittag_leffler(alpha, z)
    b = mittag_leffler(alpha, z.conjugate())
    assert abs(a - b.conjugate()) <= 1e-9 * max(1.0, abs(a))


def test_ml_log_matches_direct_and_extends(rng):
    # where the direct value is representable the logs agree
    for alpha in (0.5, 2.0 / 3.0):
        for z in (3.0 + 1.0j, 6.0, -4.0 + 2.0j):
            direct = mittag_leffler(alpha, z)
            lg = mittag_leffler_log(alpha, z)
            assert np.exp(lg) == pytest.approx(direct, rel=1e-8)
    # deep growth region: finite log even though exp overflows
    lg = mittag_leffler_log(0.5, 40.0)
    assert lg.real == pytest.approx(1600.0 + math.log(2.0), rel=1e-9)


def test_ml_array_input():
    z = np.array([0.0 + 0j, 1.0, -2.0 + 0.5j])
    out = mittag_leffler(0.5, z)
    assert out.shape == z.shape
    assert out[0] == pytest.approx(1.0)


def test_ml_rejects_bad_alpha():
    with pytest.raises(ValueError):
        mittag_leffler(0.0, 1.0)
    with pytest.raises(ValueError):
        mittag_leffler(1.5, 1.0)


# ---------------------------------------------------------------------------
# Truncated Mittag-Leffler
# ---------------------------------------------------------------------------
def test_ml_truncated_at_zero():
    assert ml_truncated(2, 3, 0.0) == pytest.approx(1.0)


def test_ml_truncated_converges_to_full():
    for z in (0.8 + 0.3j, -1.2, 2.0j):
        full = mittag_leffler(0.5, z)
        assert ml_truncated(2, 40, z) == pytest.approx(full, abs=1e-9)


def test_ml_truncated_small_case_gamma_oracle():
    # n=2, N=1, z=1: sum_{m<=2} 1/Gamma(m/2+1)
    expected = 1.0 + 1.0 / math.gamma(1.5) + 1.0 / math.gamma(2.0)
    assert ml_truncated(2, 1, 1.0) == pytest.approx(expected, rel=1e-14)


def test_ml_truncated_monotone_in_N_on_positive_axis():
    for z in (0.5, 1.5, 3.0):
        full = mittag_leffler(0.5, complex(z)).real
        prev_err = np.inf
        for N in range(1, 12):
            err = abs(ml_truncated(2, N, z).real - full)
            assert err <= prev_err + 1e-12
            prev_err = err


def test_ml_params_validation():
    with pytest.raises(ValueError):
        MLParams(alpha=0.4, n=2, N=1)
    with pytest.raises(ValueError):
        MLParams(alpha=0.5, n=2, N=0)
    MLParams(alpha=0.5, n=2, N=3)


# ---------------------------------------------------------------------------
# Regularization schedule
# ---------------------------------------------------------------------------
def test_beta0_bracket_tight():
    b0 = beta0_root()
    assert 1.0 / math.sqrt(math.e) < b0 < 1.0
    assert (2.0 / math.e) * b0 + math.log(b0) == pytest.approx(0.0, abs=1e-12)


def test_regularization_monotone_in_cy():
    d_small = Disc(np.zeros(2), 1.0)
    rc_center = regularization_constants(2, np.zeros(2), d_small, delta=1e-4)
    rc_edge = regularization_constants(2, np.array([0.9, 0.0]), d_small, delta=1e-4)
    assert rc_edge.c_y > rc_center.c_y
    assert rc_edge.C_y < rc_center.C_y


def test_regularization_plugin_gives_N_two():
    rc0 = regularization_constants(2, np.zeros(2), Disc(np.zeros(2), 1.0), delta=0.5e-1)
    delta = math.exp(-2.0 * rc0.C_y)
    rc = regularization_constants(2, np.zeros(2), Disc(np.zeros(2), 1.0), delta=delta)
    assert rc.N == 2


def test_regularization_delta_bound_is_reported():
    with pytest.raises(ValueError, match="e\\^-C"):
        regularization_constants(2, np.zeros(2), Disc(np.zeros(2), 1.0), delta=0.9)


def test_regularization_N_at_least_one():
    dom = Disc(np.zeros(2), 1.0)
    rc0 = regularization_constants(2, np.zeros(2), dom, delta=1e-3)
    delta = math.exp(-rc0.C_y)  # largest admissible noise
    rc = regularization_constants(2, np.zeros(2), dom, delta=delta)
    assert rc.N >= 1
    assert rc.tau > 0


# ---------------------------------------------------------------------------
# Modified spherical Bessel
# ---------------------------------------------------------------------------
def mp_sph_i(l, x):
    return mp.sqrt(mp.pi / (2 * x)) * mp.besseli(l + mp.mpf(1) / 2, x)


def mp_sph_k(l, x):
    return mp.sqrt(mp.pi / (2 * x)) * mp.besselk(l + mp.mpf(1) / 2, x)


def test_bessel_l0_closed_forms():
    x = 1.7
    t = modified_spherical_bessel(0, x)
    assert t.i[0] == pytest.approx(math.sinh(x) / x, rel=1e-14)
    assert t.k[0] == pytest.approx((math.pi / 2) * math.exp(-x) / x, rel=1e-14)
    assert t.ip[0] == pytest.approx(math.cosh(x) / x - math.sinh(x) / x**2, rel=1e-13)
    assert t.kp[0] == pytest.approx(
        -(math.pi / 2) * math.exp(-x) * (1 / x + 1 / x**2), rel=1e-13
    )


def test_bessel_wronskian_uniform_in_l():
    for x in (0.3, 2.0, 17.0, 90.0):
        t = modified_spherical_bessel(25, x, scaled=True)
        # scaling factors cancel in the cross product
        w = t.i * t.kp - t.ip * t.k
        np.testing.assert_allclose(w, -np.pi / (2 * x**2), rtol=1e-11)


def test_bessel_l5_x3_vs_mpmath():
    with mp.workdps(40):
        t = modified_spherical_bessel(5, 3.0)
        assert t.i[5] == pytest.approx(float(mp_sph_i(5, 3.0)), rel=1e-10)
        assert t.k[5] == pytest.approx(float(mp_sph_k(5, 3.0)), rel=1e-10)


def test_bessel_accuracy_sweep_scaled():
    with mp.workdps(60):
        for x in (0.05, 0.7, 6.0, 45.0, 200.0):
            t = modified_spherical_bessel(60, x, scaled=True)
            for l in (0, 7, 31, 60):
                ref_i = float(mp.exp(-x) * mp_sph_i(l, x))
                ref_k = float(mp.exp(x) * mp_sph_k(l, x))
                assert t.i[l] == pytest.approx(ref_i, rel=1e-10), (l, x)
                assert t.k[l] == pytest.approx(ref_k, rel=1e-10), (l, x)


def test_bessel_overflow_region_returns_scaled_flagged():
    t = modified_spherical_bessel(4, 800.0)
    assert t.scaled is True
    assert np.all(np.isfinite(t.i)) and np.all(np.isfinite(t.k))


# ---------------------------------------------------------------------------
# Needle potential
# ---------------------------------------------------------------------------
FRAME = NeedleFrame(
    theta1=np.array([1.0, 0.0, 0.0]),
    theta2=np.array([0.0, 1.0, 0.0]),
    tau=3.0,
    alpha=0.5,
)  # axis = +z


def test_needle_on_axis_identity():
    for s in (-0.7, -0.15, 0.3, 1.1):
        y = np.array([0.0, 0.0, s])
        val = yarmukhamedov_needle(y, FRAME)
        exact = (mittag_leffler(0.5, FRAME.tau * s).real - 1.0) / (4 * np.pi * s)
        assert val == pytest.approx(exact, abs=1e-10)


def test_needle_tip_value():
    tip = yarmukhamedov_needle(np.zeros(3), FRAME)
    assert tip == pytest.approx(FRAME.tau / (4 * np.pi * math.gamma(1.5)), abs=1e-12)


def test_needle_integral_continuous_with_axis_formula():
    # integral path at tiny transverse offset approaches the closed form
    s = -0.5
    val_axis = yarmukhamedov_axis_value(FRAME, s)
    y = np.array([1e-5, 0.0, s])
    val_near = yarmukhamedov_needle(y, FRAME, abs_tol=1e-11)
    assert val_near == pytest.approx(val_axis, abs=1e-6)


def test_needle_harmonic_fd_laplacian():
    y0 = np.array([0.35, -0.2, -0.45])  # away from the axis
    lap = []
    for h in (4e-3, 2e-3):
        pts = [y0]
        for i in range(3):
            for sgn in (+1, -1):
                e = np.zeros(3)
                e[i] = sgn * h
                pts.append(y0 + e)
        vals = yarmukhamedov_needle_many(np.array(pts), FRAME, abs_tol=1e-12)
        lap.append((np.sum(vals[1:]) - 6 * vals[0]) / h**2)
    # second-order stencil: residual small and shrinking ~4x
    assert abs(lap[1]) < 1e-3
    assert abs(lap[1]) < 0.5 * abs(lap[0]) + 1e-9


def test_needle_decays_off_cone_as_tau_grows():
    # fixed point well outside the cone around +z: value decreasing in tau
    y = np.array([0.4, 0.0, -0.6])
    vals = []
    for tau in (2.0, 4.0, 8.0, 16.0):
        fr = NeedleFrame(FRAME.theta1, FRAME.theta2, tau=tau, alpha=0.5)
        vals.append(abs(yarmukhamedov_needle(y, fr)))
    assert all(b < a for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# Vekua transform
# ---------------------------------------------------------------------------
def test_vekua_k_zero_is_identity():
    def v(y):
        return float(y[0] ** 2 - y[1] ** 2 + 0.3 * y[2])

    y = np.array([0.3, 0.2, -0.5])
    assert vekua_transform(v, 0.0, y) == pytest.approx(v(y), abs=1e-15)


def test_vekua_maps_harmonic_to_helmholtz():
    # v harmonic -> (lap + k^2) v^k = 0, checked on an FD stencil
    k = 2.0

    def v(y):
        return float(y[0] ** 2 - y[2] ** 2 + y[0] * y[1])  # harmonic polynomial

    y0 = np.array([0.4, -0.3, 0.25])
    h = 1e-3
    pts = [y0]
    for i in range(3):
        for sgn in (+1, -1):
            e = np.zeros(3)
            e[i] = sgn * h
            pts.append(y0 + e)
    vals = np.array([vekua_transform(v, k, p, abs_tol=1e-12) for p in pts])
    residual = (np.sum(vals[1:]) - 6 * vals[0]) / h**2 + k**2 * vals[0]
    assert abs(residual) < 5e-5  # stencil truncation dominates


def test_vekua_needle_helmholtz_residual():
    k = 1.5
    fr = NeedleFrame(FRAME.theta1, FRAME.theta2, tau=2.0, alpha=0.5)

    def v(y):
        return yarmukhamedov_needle(y, fr, abs_tol=1e-12)

    y0 = np.array([0.3, -0.25, -0.4])
    h = 2e-3
    pts = [y0]
    for i in range(3):
        for sgn in (+1, -1):
            e = np.zeros(3)
            e[i] = sgn * h
            pts.append(y0 + e)
    vals = np.array([vekua_transform(v, k, p, abs_tol=1e-11) for p in pts])
    residual = (np.sum(vals[1:]) - 6 * vals[0]) / h**2 + k**2 * vals[0]
    scale = max(abs(vals[0]), 1.0)
    assert abs(residual) < 2e-3 * scale


def test_vekua_needle_tip_values():
    k = 2.5
    fr = NeedleFrame(FRAME.theta1, FRAME.theta2, tau=3.0, alpha=0.5)

    def v(y):
        return yarmukhamedov_needle(y, fr, abs_tol=1e-12)

    tip = vekua_transform(v, k, np.zeros(3))
    assert tip == pytest.approx(fr.tau / (4 * np.pi * math.gamma(1.5)), abs=1e-8)
    # gradient at the tip equals the harmonic needle's axis gradient
    grad = yarmukhamedov_tip_gradient(fr)
    expected = fr.tau**2 / (4 * np.pi * math.gamma(2.0)) * fr.axis
    np.testing.assert_allclose(grad, expected, atol=1e-12)
    # cross-check the axial derivative of v^k at the tip by central FD
    h = 1e-3
    up = vekua_transform(v, k, h * fr.axis, abs_tol=1e-12)
    dn = vekua_transform(v, k, -h * fr.axis, abs_tol=1e-12)
    assert (up - dn) / (2 * h) == pytest.approx(float(grad @ fr.axis), rel=2e-4)
