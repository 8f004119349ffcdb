"""Gauss-map sampling, harmonic/structure-equation residuals, de-Sitter maps.

A Gauss map g : D -> C' with |g|^2 != -1 is packaged per point as a
GaussSample: the second-order jet of g plus the density

    omega_hat = -j * conj(g)_z / (1 + |g|^2)^2

and its first derivatives.  The harmonic equation

    g_zzbar - 2 conj(g) g_z g_zbar / (1 + |g|^2) = 0

characterizes the maps this package can integrate into surfaces.
"""
from __future__ import annotations

import csv

import numpy as np

from .errors import EvalError, ProjectionPole, VerticalPoint
from .expr import eval_jet, parse_text
from .paracomplex import J, Jet2, ONE, Paracomplex

__all__ = [
    "GaussSample",
    "DeSitterPoint",
    "HarmonicField",
    "ClosedFormField",
    "GridField",
    "harmonic_residual",
    "dirac_residuals",
    "to_de_sitter",
    "stereographic",
    "regularity_check",
    "pc_mag",
]

VERTICAL_TOL = 1e-9


def pc_mag(z):
    """Componentwise magnitude used for residual reporting."""
    return max(abs(z.re), abs(z.im))


class _J1:
    """First-order jet (value, d/dz, d/dzbar); plumbing for omega_hat."""

    __slots__ = ("v", "dz", "dzb")

    def __init__(self, v, dz, dzb):
        self.v = v
        self.dz = dz
        self.dzb = dzb

    def __add__(self, other):
        o = _J1._coerce(other)
        return _J1(self.v + o.v, self.dz + o.dz, self.dzb + o.dzb)

    __radd__ = __add__

    def __mul__(self, other):
        o = _J1._coerce(other)
        return _J1(
            self.v * o.v,
            self.dz * o.v + self.v * o.dz,
            self.dzb * o.v + self.v * o.dzb,
        )

    __rmul__ = __mul__

    def inverse(self):
        iv = self.v.inverse()
        iv2 = iv * iv
        return _J1(iv, -self.dz * iv2, -self.dzb * iv2)

    @staticmethod
    def _coerce(x):
        if isinstance(x, _J1):
            return x
        p = Paracomplex._coerce(x)
        return _J1(p, Paracomplex(), Paracomplex())


class GaussSample:
    """g with derivatives to second order plus omega_hat data at one point."""

    __slots__ = ("z", "g", "omega_hat", "omega_hat_z", "omega_hat_zb")

    def __init__(self, z, g_jet):
        self.z = z
        self.g = g_jet
        m = g_jet.v.modulus_sq()
        if abs(m + 1.0) < VERTICAL_TOL:
            raise VerticalPoint(f"|g|^2 = -1 at z = {z}")
        g1 = _J1(g_jet.v, g_jet.dz, g_jet.dzb)
        gb1 = _J1(g_jet.v.conj(), g_jet.dzb.conj(), g_jet.dz.conj())
        # conj(g)_z as a first-order jet; its derivatives use g's second order
        gbz1 = _J1(g_jet.dzb.conj(), g_jet.dzbzb.conj(), g_jet.dzzb.conj())
        denom = ONE + g1 * gb1
        w = (-J) * gbz1 * (denom * denom).inverse()
        self.omega_hat = w.v
        self.omega_hat_z = w.dz
        self.omega_hat_zb = w.dzb

    @property
    def g_value(self):
        return self.g.v

    @property
    def modulus_sq(self):
        return self.g.v.modulus_sq()


class DeSitterPoint:
    """A point of the de-Sitter sphere inside L^3 with signature (+,-,+)."""

    __slots__ = ("nu1", "nu2", "nu3")

    def __init__(self, nu1, nu2, nu3):
        self.nu1 = float(nu1)
        self.nu2 = float(nu2)
        self.nu3 = float(nu3)

    def norm_sq(self):
        return self.nu1 ** 2 - self.nu2 ** 2 + self.nu3 ** 2

    def __repr__(self):
        return f"DeSitterPoint({self.nu1}, {self.nu2}, {self.nu3})"


def harmonic_residual(s):
    """Left side of the harmonic equation; zero iff harmonic at the sample."""
    g = s.g
    m = g.v.modulus_sq()
    return g.dzzb - (2.0 * g.v.conj() * g.dz * g.dzb) / Paracomplex(1.0 + m)


def dirac_residuals(s):
    """Residuals of the two first-order structure equations.

    Both vanish for harmonic data with omega_hat built from g.
    """
    g = s.g
    m = g.v.modulus_sq()
    w = s.omega_hat
    wsq = w.modulus_sq()
    r1 = s.omega_hat_zb + 2.0 * J * Paracomplex(wsq * (1.0 + m)) * g.v.conj()
    r2 = g.dzb - J * Paracomplex((1.0 + m) ** 2) * w.conj()
    return r1, r2


def to_de_sitter(g):
    """Map a Gauss value to the de-Sitter sphere, signature (+,-,+)."""
    g = Paracomplex._coerce(g)
    m = g.modulus_sq()
    if abs(m + 1.0) < VERTICAL_TOL:
        raise VerticalPoint(f"|g|^2 = -1 for g = {g}")
    d = 1.0 + m
    return DeSitterPoint(2.0 * g.re / d, 2.0 * g.im / d, (1.0 - m) / d)


def stereographic(nu):
    """Stereographic projection of the de-Sitter sphere from (0, 0, -1)."""
    d = 1.0 + nu.nu3
    if abs(d) < VERTICAL_TOL:
        raise ProjectionPole("nu3 = -1 is the projection pole")
    return Paracomplex(nu.nu1 / d, nu.nu2 / d)


class HarmonicField:
    """Base for Gauss-map sources; subclasses provide jet(x, y)."""

    def __init__(self, tau):
        tau = float(tau)
        if tau == 0.0:
            raise ValueError("tau must be non-zero")
        self.tau = tau

    def jet(self, x, y):
        raise NotImplementedError

    def sample(self, z0):
        z0 = Paracomplex._coerce(z0)
        return GaussSample(z0, self.jet(z0.re, z0.im))

    def sample_xy(self, x, y):
        return GaussSample(Paracomplex(x, y), self.jet(x, y))


class ClosedFormField(HarmonicField):
    """Gauss map given as a closed-form expression; exact jets."""

    def __init__(self, source, tau):
        super().__init__(tau)
        self.ast = parse_text(source) if isinstance(source, str) else source

    def jet(self, x, y):
        return eval_jet(self.ast, Paracomplex(x, y))


class GridField(HarmonicField):
    """Gauss map tabulated on a uniform grid (CSV columns x, y, g_re, g_im).

    Derivatives use 5-point central differences; off-node points are
    evaluated by a second-order Taylor step from the nearest stencil
    center, so all downstream code is source-agnostic.
    """

    def __init__(self, xs, ys, g_re, g_im, tau):
        super().__init__(tau)
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.g_re = np.asarray(g_re, dtype=float)  # shape (ny, nx)
        self.g_im = np.asarray(g_im, dtype=float)
        if self.g_re.shape != (len(self.ys), len(self.xs)):
            raise ValueError("grid value shape mismatch")
        if len(self.xs) < 5 or len(self.ys) < 5:
            raise ValueError("grid fields need at least 5 nodes per axis")
        self.hx = self.xs[1] - self.xs[0]
        self.hy = self.ys[1] - self.ys[0]

    @classmethod
    def from_csv(cls, path, tau):
        rows = []
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                rows.append(
                    (float(rec["x"]), float(rec["y"]), float(rec["g_re"]), float(rec["g_im"]))
                )
        xs = sorted({r[0] for r in rows})
        ys = sorted({r[1] for r in rows})
        g_re = np.full((len(ys), len(xs)), np.nan)
        g_im = np.full((len(ys), len(xs)), np.nan)
        xi = {x: i for i, x in enumerate(xs)}
        yi = {y: j for j, y in enumerate(ys)}
        for x, y, re_, im_ in rows:
            g_re[yi[y], xi[x]] = re_
            g_im[yi[y], xi[x]] = im_
        if np.isnan(g_re).any() or np.isnan(g_im).any():
            raise ValueError("CSV grid is not a complete rectangle")
        return cls(np.array(xs), np.array(ys), g_re, g_im, tau)

    def _node_jet(self, i, j):
        i = min(max(i, 2), len(self.xs) - 3)
        j = min(max(j, 2), len(self.ys) - 3)

        def val(ii, jj):
            return Paracomplex(self.g_re[jj, ii], self.g_im[jj, ii])

        hx, hy = self.hx, self.hy
        f = {(a, b): val(i + a, j + b) for a in range(-2, 3) for b in range(-2, 3)}
        fx = (-f[2, 0] + 8.0 * f[1, 0] - 8.0 * f[-1, 0] + f[-2, 0]) / (12.0 * hx)
        fy = (-f[0, 2] + 8.0 * f[0, 1] - 8.0 * f[0, -1] + f[0, -2]) / (12.0 * hy)
        fxx = (-f[2, 0] + 16.0 * f[1, 0] - 30.0 * f[0, 0] + 16.0 * f[-1, 0] - f[-2, 0]) / (
            12.0 * hx * hx
        )
        fyy = (-f[0, 2] + 16.0 * f[0, 1] - 30.0 * f[0, 0] + 16.0 * f[0, -1] - f[0, -2]) / (
            12.0 * hy * hy
        )
        cs = {-2: 1.0 / 12.0, -1: -8.0 / 12.0, 1: 8.0 / 12.0, 2: -1.0 / 12.0}
        fxy = Paracomplex()
        for a, ca in cs.items():
            for b, cb in cs.items():
                fxy = fxy + (ca * cb) * f[a, b]
        fxy = fxy * (1.0 / (hx * hy))
        fz = 0.5 * (fx + J * fy)
        fzb = 0.5 * (fx - J * fy)
        fzz = 0.25 * (fxx + 2.0 * J * fxy + fyy)
        fzzb = 0.25 * (fxx - fyy)
        fzbzb = 0.25 * (fxx - 2.0 * J * fxy + fyy)
        return f[0, 0], fx, fy, fxx, fxy, fyy, Jet2(f[0, 0], fz, fzb, fzz, fzzb, fzbzb)

    def jet(self, x, y):
        i = int(round((x - self.xs[0]) / self.hx))
        j = int(round((y - self.ys[0]) / self.hy))
        i = min(max(i, 0), len(self.xs) - 1)
        j = min(max(j, 0), len(self.ys) - 1)
        i_c = min(max(i, 2), len(self.xs) - 3)
        j_c = min(max(j, 2), len(self.ys) - 3)
        f0, fx, fy, fxx, fxy, fyy, jet0 = self._node_jet(i_c, j_c)
        ex = x - self.xs[i_c]
        ey = y - self.ys[j_c]
        if abs(ex) < 1e-14 and abs(ey) < 1e-14:
            return jet0
        # Taylor step to the requested point; derivatives shift to first order
        v = (
            f0 + ex * fx + ey * fy
            + 0.5 * ex * ex * fxx + ex * ey * fxy + 0.5 * ey * ey * fyy
        )
        gx = fx + ex * fxx + ey * fxy
        gy = fy + ex * fxy + ey * fyy
        return Jet2(
            v,
            0.5 * (gx + J * gy),
            0.5 * (gx - J * gy),
            0.25 * (fxx + 2.0 * J * fxy + fyy),
            0.25 * (fxx - fyy),
            0.25 * (fxx - 2.0 * J * fxy + fyy),
        )


class RegularityReport:
    def __init__(self):
        self.nonharmonic = []  # (x, y, residual magnitude)
        self.flagged = []      # (x, y, reason)

    @property
    def is_regular(self):
        return not self.nonharmonic and not self.flagged

    def __repr__(self):
        return (
            f"RegularityReport(regular={self.is_regular}, "
            f"nonharmonic={len(self.nonharmonic)}, flagged={len(self.flagged)})"
        )


def regularity_check(field, grid, harmonic_tol=1e-8, zero_tol=1e-9, huge=1e8):
    """Sweep a grid and flag failures of the regularity conditions.

    Non-harmonic samples are reported first and separately; a field is
    regular on the region when neither list has entries.
    """
    report = RegularityReport()
    for i, j, x, y in grid.nodes():
        try:
            s = field.sample_xy(x, y)
        except (VerticalPoint, EvalError):
            report.flagged.append((x, y, "vertical or unevaluable point"))
            continue
        res = pc_mag(harmonic_residual(s))
        if res > harmonic_tol:
            report.nonharmonic.append((x, y, res))
            continue
        m = s.modulus_sq
        w = s.omega_hat
        if abs(m) < huge:
            if pc_mag(w) < zero_tol:
                report.flagged.append((x, y, "omega_hat vanishes at finite |g|^2"))
        else:
            g2w = (s.g.v * s.g.v) * w
            if abs(g2w.modulus_sq()) < zero_tol:
                report.flagged.append((x, y, "|g^2 omega_hat|^2 vanishes at large |g|^2"))
    return report
