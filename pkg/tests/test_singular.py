import numpy as np
import pytest

from nilmin.errors import TooCoarse, WrongStratum
from nilmin.grids import GridSpec
from nilmin.harmonic import ClosedFormField
from nilmin.paracomplex import J, Paracomplex
from nilmin.singular import (
    area_density,
    classify_ratio,
    classify_sigma_g,
    classify_sigma_omega,
    classify_via_dual_curve,
    criteria_crosscheck,
    criteria_ratio,
    curves_to_csv,
    detect,
    nondegenerate_g,
    nondegenerate_omega,
    report_to_json,
    trace_curve,
)

RNG = np.random.default_rng(23)


@pytest.fixture(scope="module")
def hyperbola_field():
    # g = conj(z): singular where |z|^2 = 1 (the g stratum)
    return ClosedFormField("conj(z)", 1.0)


@pytest.fixture(scope="module")
def omega_field():
    # Sigma^omega is the null line x - y = -1/2
    return ClosedFormField("zbar + (1+j)*zbar^2/2", 1.0)


def test_detect_hyperbola(hyperbola_field):
    spec = GridSpec(0.5, 2.0, -1.0, 1.0, 21, 21)
    points = detect(hyperbola_field, spec)
    assert points
    for p in points:
        assert p.stratum == "sigma_g"
        assert abs(p.z.re**2 - p.z.im**2 - 1.0) < 1e-10


def test_detect_omega_line(omega_field):
    spec = GridSpec(-1.0, 1.0, -1.0, 1.0, 21, 21)
    points = [p for p in detect(omega_field, spec) if p.stratum == "sigma_omega"]
    assert points
    for p in points:
        assert abs(p.z.re - p.z.im + 0.5) < 1e-10


def test_area_density_vanishes_on_stratum(hyperbola_field):
    s = hyperbola_field.sample_xy(1.0, 0.0)
    assert abs(area_density(s, 1.0)) < 1e-12
    s2 = hyperbola_field.sample_xy(0.5, 0.0)
    assert area_density(s2, 1.0) != 0.0


def test_trace_curve_tangent(hyperbola_field):
    curve = trace_curve(hyperbola_field, (1.0, 0.0), stratum="sigma_g",
                        step=0.05, bounds=(0.4, 2.1, -1.1, 1.1))
    assert len(curve) > 10
    idx = min(range(len(curve)),
              key=lambda k: abs(curve.points[k].z.re - 1.0) + abs(curve.points[k].z.im))
    t = curve.tangents[idx]
    # tangent at (1, 0) points along (0, 1)
    assert abs(t.re) < 1e-9 and abs(t.im) > 0.5


def test_trace_rejects_unknown_stratum(hyperbola_field):
    with pytest.raises(WrongStratum):
        trace_curve(hyperbola_field, (1.0, 0.0), stratum="both")


def test_ratio_vanishes_for_antiholomorphic(hyperbola_field):
    # g_z = 0 so r = 0 identically
    s = hyperbola_field.sample_xy(np.cosh(0.3), np.sinh(0.3))
    ratio = criteria_ratio(s)
    assert abs(ratio.r.re) < 1e-13 and abs(ratio.r.im) < 1e-13
    assert nondegenerate_g(ratio)


def test_classify_hyperbola_not_a_front(hyperbola_field):
    curve = trace_curve(hyperbola_field, (1.0, 0.0), stratum="sigma_g",
                        step=0.05, bounds=(0.4, 2.1, -1.1, 1.1))
    points = classify_sigma_g(curve, hyperbola_field)
    assert points
    assert all(p.kind == "NonFront" for p in points)


def test_classify_omega_line_cuspidal_edge(omega_field):
    spec = GridSpec(-1.0, 1.0, -1.0, 1.0, 21, 21)
    seed = [p for p in detect(omega_field, spec) if p.stratum == "sigma_omega"][0]
    curve = trace_curve(omega_field, seed, step=0.05, bounds=(-1.1, 1.1, -1.1, 1.1))
    points = classify_sigma_omega(curve, omega_field)
    assert points
    for p in points:
        assert p.kind == "CuspidalEdge"
        assert abs(p.diagnostics["det_direct"] - p.diagnostics["det_formula"]) < 1e-10


def test_nondegenerate_omega_needs_the_stratum(omega_field):
    s_on = omega_field.sample_xy(-0.25, 0.25)
    assert nondegenerate_omega(s_on)
    s_off = omega_field.sample_xy(0.5, 0.1)
    with pytest.raises(WrongStratum):
        nondegenerate_omega(s_off)


def test_classify_ratio_gates():
    tol = 1e-7
    assert classify_ratio(1.0, 0.0, 0.0, 0.0, tol) == "CuspidalEdge"
    assert classify_ratio(1.0, 4.0, 1.0, 0.0, tol) == "Swallowtail"
    assert classify_ratio(0.0, 0.0, 0.0, 1.0, tol) == "CuspidalCrossCap"
    assert classify_ratio(0.0, 0.0, 0.0, 0.0, tol) == "NonFront"
    assert classify_ratio(0.0, 4.0, 0.0, 0.0, tol) == "Degenerate"
    assert classify_ratio(1.0, 4.0, 0.0, 0.0, tol) == "Unresolved"


def test_criteria_crosscheck_random():
    class _R:
        def __init__(self, r):
            self.r = r

    for _ in range(100):
        r = Paracomplex(*RNG.uniform(-8, 8, size=2))
        tau = RNG.uniform(0.5, 2.0)
        assert criteria_crosscheck(_R(r), tau)
    assert criteria_crosscheck(_R(Paracomplex(0.0, 4.0)), 1.0)


def _example_gamma(s):
    t = -2.0 / np.tanh(2.0 * s)
    return 0.5 * np.array([
        np.sinh(2 * s) + t * np.cosh(2 * s),
        2 * s - t,
        -1.0 - np.cosh(2 * s) - t * np.sinh(2 * s),
    ])


def test_dual_curve_swallowtail_location():
    s_vals = np.linspace(0.2, 1.0, 801)
    gamma = np.array([_example_gamma(s) for s in s_vals])
    kinds, special = classify_via_dual_curve(s_vals, gamma, tau=1.0)
    assert set(kinds) == {"CuspidalEdge"}
    assert len(special) == 1
    s_root, kind = special[0]
    assert kind == "Swallowtail"
    assert abs(s_root - 0.25 * np.log(5 + 2 * np.sqrt(6))) < 1e-9


def test_dual_curve_too_coarse():
    s_vals = np.linspace(0.2, 1.0, 15)
    gamma = np.array([_example_gamma(s) for s in s_vals])
    with pytest.raises(TooCoarse):
        classify_via_dual_curve(s_vals, gamma, tau=1.0, stencil_check_tol=1e-9)


def test_serialization(tmp_path, hyperbola_field):
    curve = trace_curve(hyperbola_field, (1.0, 0.0), stratum="sigma_g",
                        step=0.1, bounds=(0.4, 2.1, -1.1, 1.1))
    points = classify_sigma_g(curve, hyperbola_field)
    records = report_to_json(points, tmp_path / "report.json")
    assert records[0]["stratum"] == "sigma_g"
    csv_path = tmp_path / "curves.csv"
    curves_to_csv(points, csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,x,y,kind"
    assert len(lines) == len(points) + 1
