import io

import numpy as np
import pytest

from nilmin.errors import NonHarmonicInput
from nilmin.grids import GridSpec
from nilmin.harmonic import ClosedFormField, pc_mag
from nilmin.paracomplex import J, Paracomplex, close
from nilmin.surface import (
    ConnectionTable,
    differentials,
    duality_check,
    export_mesh,
    fundamental_forms,
    integrate_minkowski,
    integrate_nil,
    loop_residual,
    mean_curvature_mink,
    mean_curvature_nil,
    minkowski_dot,
    normal_minkowski,
    normal_nil,
    normal_riemannian,
    phi_from_data,
)

RNG = np.random.default_rng(11)


@pytest.fixture(scope="module")
def field():
    return ClosedFormField("conj(z)", 1.0)


@pytest.fixture(scope="module")
def spec():
    return GridSpec(-0.4, 0.4, -0.4, 0.4, 9, 9)


def test_normal_oracles():
    # vertical-normal chart values at real g
    n = normal_nil(Paracomplex(2.0, 0.0))
    assert np.allclose(n, np.array([4.0, 0.0, 5.0]) / (-3.0))
    nl = normal_minkowski(Paracomplex(1.0, 0.0))
    assert np.allclose(nl, [0.0, -1.0, 0.0])
    nr = normal_riemannian(J)
    assert np.allclose(nr, [0.0, 1.0, 0.0])


def test_normal_minkowski_is_unit_spacelike():
    for _ in range(50):
        g = Paracomplex(*RNG.uniform(-2, 2, size=2))
        if abs(g.modulus_sq() + 1.0) < 1e-3:
            continue
        nl = normal_minkowski(g)
        assert abs(minkowski_dot(nl, nl) - 1.0) < 1e-10


def test_connection_table_skew_symmetry():
    table = ConnectionTable(1.0)
    # nabla_{E1} E2 = tau E3 and nabla_{E2} E1 = -tau E3
    assert np.allclose(table.nabla(1, 2), [0.0, 0.0, 1.0])
    assert np.allclose(table.nabla(2, 1), [0.0, 0.0, -1.0])
    assert np.allclose(table.nabla(3, 1), [0.0, -1.0, 0.0])
    for i in (1, 2, 3):
        assert np.allclose(table.nabla(i, i), 0.0)


def test_tangent_coeffs_null_identity(field):
    s = field.sample_xy(0.3, 0.1)
    phi = phi_from_data(s, field.tau)
    assert pc_mag(phi.nullity()) < 1e-12


def test_hopf_differential_ratio(field):
    for x, y in RNG.uniform(-1, 1, size=(50, 2)):
        s = field.sample_xy(x, y)
        q_ar, q_l = differentials(s, field.tau)
        assert close(q_ar, 0.5 * field.tau * q_l, tol=1e-13)


def test_duality_identity(field):
    for x, y in RNG.uniform(-1, 1, size=(20, 2)):
        f1, f2 = RNG.uniform(-1, 1, size=2)
        s = field.sample_xy(x, y)
        assert duality_check(s, field.tau, f1, f2) < 1e-12


def test_conformal_factor_ratio(field):
    s = field.sample_xy(0.2, 0.1)
    m = s.modulus_sq
    forms = fundamental_forms(s, field.tau)
    assert forms.conf_factor_nil != 0.0
    ratio = forms.conf_factor_nil / forms.conf_factor_mink
    assert abs(ratio - ((1.0 - m) / (1.0 + m)) ** 2) < 1e-12


def test_f1_f2_shared_between_surfaces(field, spec):
    grid = integrate_nil(field, spec)
    integrate_minkowski(field, spec, grid=grid)
    diff = np.max(np.abs(grid.positions_nil[..., :2] - grid.positions_mink[..., :2]))
    assert diff < 1e-12


def test_path_order_independence(field, spec):
    a = integrate_nil(field, spec, order="xy").positions_nil
    b = integrate_nil(field, spec, order="yx").positions_nil
    assert np.max(np.abs(a - b)) < 1e-6
    am = integrate_minkowski(field, spec, order="xy").positions_mink
    bm = integrate_minkowski(field, spec, order="yx").positions_mink
    assert np.max(np.abs(am - bm)) < 1e-6


def test_loop_residuals(field, spec):
    assert loop_residual(field, spec, "nil") < 1e-6
    assert loop_residual(field, spec, "mink") < 1e-6


def test_mean_curvatures(field):
    for x, y in [(0.1, 0.05), (0.3, -0.2), (-0.25, 0.15)]:
        assert abs(mean_curvature_nil(field, x, y)) < 1e-6
        assert abs(mean_curvature_mink(field, x, y) - field.tau) < 1e-6


def test_mean_curvature_other_tau():
    field = ClosedFormField("conj(z)", 2.0)
    assert abs(mean_curvature_mink(field, 0.2, 0.1) - 2.0) < 1e-5
    assert abs(mean_curvature_nil(field, 0.2, 0.1)) < 1e-5


def test_nonharmonic_input_rejected(spec):
    bad = ClosedFormField("z*conj(z)", 1.0)
    with pytest.raises(NonHarmonicInput):
        integrate_nil(bad, spec)


def test_export_mesh_format():
    pos = np.zeros((2, 3, 3))
    pos[1, :, 2] = 1.0
    sink = io.StringIO()
    export_mesh(pos, sink)
    lines = sink.getvalue().splitlines()
    assert sum(1 for ln in lines if ln.startswith("v ")) == 6
    assert sum(1 for ln in lines if ln.startswith("f ")) == 4
    assert lines[0] == "v 0 0 0"


def test_export_mesh_deterministic(tmp_path):
    field = ClosedFormField("conj(z)", 1.0)
    spec = GridSpec(-0.3, 0.3, -0.3, 0.3, 5, 5)
    grid = integrate_nil(field, spec)
    p1, p2 = tmp_path / "a.obj", tmp_path / "b.obj"
    export_mesh(grid.positions_nil, str(p1))
    export_mesh(grid.positions_nil, str(p2))
    assert p1.read_bytes() == p2.read_bytes()
