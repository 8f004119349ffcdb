import numpy as np
import pytest

from nilmin._kernels import frame_rk4
from nilmin.bscroll import (
    DEFAULT_INIT_FRAME,
    CurvatureProfile,
    FrameState,
    ScrollChartField,
    classify_scroll,
    frame_invariant_drift,
    integrate_frame,
    lorentz_cross,
    reconstruct_nil,
    scroll_eval,
    singular_parameter,
)
from nilmin.errors import BadInitialFrame, PoleInCurve
from nilmin.harmonic import dirac_residuals, harmonic_residual, pc_mag
from nilmin.surface import mean_curvature_parametric, minkowski_dot

RNG = np.random.default_rng(31)

S_SW = 0.25 * np.log(5.0 + 2.0 * np.sqrt(6.0))


@pytest.fixture(scope="module")
def example_result():
    profile = CurvatureProfile(2.0, 1.0)
    return integrate_frame(profile, (-2.0, 2.0), h=1e-3)


def _exact_frames(s):
    A = np.stack([np.cosh(2 * s), np.ones_like(s), -np.sinh(2 * s)], axis=-1)
    B = 0.5 * np.stack([np.cosh(2 * s), -np.ones_like(s), -np.sinh(2 * s)], axis=-1)
    C = np.stack([np.sinh(2 * s), np.zeros_like(s), -np.cosh(2 * s)], axis=-1)
    return A, B, C


def test_lorentz_cross_example_frame():
    w = lorentz_cross((1.0, 1.0, 0.0), (0.5, -0.5, 0.0))
    assert np.allclose(w, [0.0, 0.0, -1.0])


def test_lorentz_cross_self_is_zero():
    x = RNG.uniform(-1, 1, size=3)
    assert np.allclose(lorentz_cross(x, x), 0.0)


def test_lorentz_cross_orthogonality():
    for _ in range(1000):
        x, y = RNG.uniform(-2, 2, size=(2, 3))
        w = lorentz_cross(x, y)
        assert abs(minkowski_dot(w, x)) < 1e-10
        assert abs(minkowski_dot(w, y)) < 1e-10


def test_frame_closed_form_match(example_result):
    A, B, C = _exact_frames(example_result.s_vals)
    assert np.max(np.abs(example_result.A - A)) < 1e-6
    assert np.max(np.abs(example_result.B - B)) < 1e-6
    assert np.max(np.abs(example_result.C - C)) < 1e-6


def test_frame_invariant_drift(example_result):
    assert frame_invariant_drift(example_result) < 1e-9


def test_drift_without_renormalization_is_larger():
    profile = CurvatureProfile(2.0, 1.0)
    free = integrate_frame(profile, (-2.0, 2.0), h=1e-2, renormalize=False)
    held = integrate_frame(profile, (-2.0, 2.0), h=1e-2, renormalize=True)
    assert frame_invariant_drift(held) < frame_invariant_drift(free)


def test_step_halving_reduces_error():
    profile = CurvatureProfile(2.0, 1.0)

    def err(h):
        res = integrate_frame(profile, (0.0, 1.0), h=h)
        A, _, _ = _exact_frames(res.s_vals)
        return np.max(np.abs(res.A - A))

    assert err(0.02) / err(0.01) >= 8.0


def test_bad_initial_frame_rejected():
    bad = FrameState(0.0, (1.0, 0.9, 0.0), (0.5, -0.5, 0.0), (0.0, 0.0, -1.0))
    with pytest.raises(BadInitialFrame):
        integrate_frame(CurvatureProfile(2.0, 1.0), (0.0, 1.0), init=bad)


def test_constant_frame_with_zero_coefficients():
    # kernel-level check: kappa = 0, tau = 0 freezes the frame
    y0 = np.concatenate([DEFAULT_INIT_FRAME.A, DEFAULT_INIT_FRAME.B,
                         DEFAULT_INIT_FRAME.C, np.zeros(3)])
    out = frame_rk4(np.zeros(21), 0.0, 0.1, y0, False)
    assert np.allclose(out[-1][:9], y0[:9])


def test_ode_satisfied_by_finite_differences(example_result):
    s = example_result.s_vals
    h = s[1] - s[0]
    k = len(s) // 3
    dA = (example_result.A[k + 1] - example_result.A[k - 1]) / (2 * h)
    assert np.allclose(dA, 2.0 * example_result.C[k], atol=1e-4)


def test_singular_parameter_closed_form(example_result):
    t_s, poles = singular_parameter(example_result)
    s = example_result.s_vals
    ref = -2.0 / np.tanh(2.0 * s[~poles])
    assert np.max(np.abs(t_s[~poles] - ref)) < 1e-6
    # N3 vanishes along the curve
    N3 = example_result.C[~poles, 2] + t_s[~poles] * example_result.B[~poles, 2]
    assert np.max(np.abs(N3)) < 1e-10


def test_singular_parameter_strict_pole(example_result):
    with pytest.raises(PoleInCurve):
        singular_parameter(example_result, strict=True)


def test_scroll_surface_and_normal(example_result):
    t_vals = np.linspace(-3.0, -1.0, 9)
    grid = scroll_eval(example_result, t_vals, s_stride=200)
    s = grid.s_vals
    t = t_vals[None, :, None]
    A, B, C = _exact_frames(s)
    f_exact = (
        0.5 * np.stack([np.sinh(2 * s), 2 * s, -np.cosh(2 * s)], axis=-1)[:, None, :]
        + t * B[:, None, :]
    )
    shift = grid.f_L[len(s) // 2, 0] - f_exact[len(s) // 2, 0]
    assert np.max(np.abs(grid.f_L - f_exact - shift)) < 1e-6
    # normal orthogonality and unit length
    for i in range(0, len(s), 4):
        for j in range(len(t_vals)):
            N = grid.N[i, j]
            f_s = A[i] + t_vals[j] * C[i]  # B' = tau C with tau = 1
            f_t = B[i]
            assert abs(minkowski_dot(N, f_s)) < 1e-8
            assert abs(minkowski_dot(N, f_t)) < 1e-8
            assert abs(minkowski_dot(N, N) - 1.0) < 1e-8


def test_scroll_is_timelike_off_singular_curve(example_result):
    grid = scroll_eval(example_result, np.linspace(-1.0, 1.0, 7), s_stride=400)
    for i in range(len(grid.s_vals)):
        for j, t in enumerate(grid.t_vals):
            E = t * t  # <f_s, f_s> = t^2 tau^2
            F = -1.0
            assert E * 0.0 - F * F < 0.0
    # and the scroll has constant mean curvature tau
    res = example_result

    def fn(s, t):
        A, B, C, P = res.at(s)
        return P + t * B

    H = mean_curvature_parametric(fn, 0.4, -1.5)
    assert abs(abs(H) - 1.0) < 1e-5


def test_classify_scroll_swallowtails(example_result):
    cls = classify_scroll(example_result)
    sw = [p for p in cls.specials if p["kind"] == "Swallowtail"]
    assert len(sw) == 2
    assert abs(sw[0]["s"] + S_SW) < 1e-6
    assert abs(sw[1]["s"] - S_SW) < 1e-6
    assert abs(sw[0]["t"] - np.sqrt(6.0)) < 1e-6
    assert abs(sw[1]["t"] + np.sqrt(6.0)) < 1e-6
    # gamma'(s+-) = (0, 0, +-sqrt(2))
    for p, sign in zip(sw, (-1.0, 1.0)):
        d1 = p["gamma_d1"]
        assert np.hypot(d1[0], d1[1]) < 1e-6
        assert abs(d1[2] - sign * np.sqrt(2.0)) < 1e-6


@pytest.fixture(scope="module")
def example_reconstruction():
    # positive-s branch only, staying clear of the t(s) pole at s = 0
    result = integrate_frame(CurvatureProfile(2.0, 1.0), (0.2, 1.0), h=1e-3)
    grid = scroll_eval(result, np.linspace(-3.5, -1.5, 33), s_stride=10)
    field = reconstruct_nil(grid)
    return grid, field


def test_reconstruct_loop_closure(example_reconstruction):
    grid, _ = example_reconstruction
    assert grid.loop_residual < 1e-7


def test_recovered_gauss_map_on_singular_curve(example_reconstruction):
    grid, _ = example_reconstruction
    res = grid.result
    t_s, poles = singular_parameter(res)
    from nilmin.bscroll import _pi_north
    for k in range(0, len(res.s_vals), 97):
        if poles[k]:
            continue
        N = grid.n_sign * (res.C[k] + res.tau * t_s[k] * res.B[k])
        g = _pi_north(N[0], N[1], N[2])
        assert abs(g.modulus_sq() - 1.0) < 1e-8


def test_chart_field_is_harmonic(example_reconstruction):
    _, field = example_reconstruction
    x, y = field.scroll_to_chart(0.5, -2.0)
    s = field.sample_xy(x, y)
    assert pc_mag(harmonic_residual(s)) < 1e-10
    r1, r2 = dirac_residuals(s)
    assert pc_mag(r1) < 1e-10 and pc_mag(r2) < 1e-10


def test_chart_round_trip(example_reconstruction):
    _, field = example_reconstruction
    x, y = field.scroll_to_chart(0.6, -2.2)
    s, t = field.chart_to_scroll(x, y)
    assert abs(s - 0.6) < 1e-12 and abs(t + 2.2) < 1e-12


def test_curvature_profile_expression():
    prof = CurvatureProfile("-(6 - 36*s^2)/(1 + 3*s^2)^2", 1.0)
    assert abs(prof(0.0) + 6.0) < 1e-14
    assert abs(prof(1.0 / np.sqrt(6.0))) < 1e-13
    assert abs(prof.derivative(0.0)) < 1e-9


def test_curvature_profile_validation():
    with pytest.raises(ValueError):
        CurvatureProfile(1.0, 0.0)
    with pytest.raises(TypeError):
        CurvatureProfile(None, 1.0)
