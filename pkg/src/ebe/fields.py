"""Field configurations and residual evaluators for the gauge system.

The unitary data is a triple (A, phi_z, phi_1) with A anti-hermitian,
phi_z traceless and phi_1 anti-hermitian in the diagonal models.  Residuals
are organized around the commuting-operator form

    D1 = 2(d/dzbar + A_zbar),   D2 = phi_z dz,   D3 = d/dy + (A_y - i phi_1),

whose pairwise commutators plus one real moment-map equation are equivalent
to the three displayed field equations

    F_A - phi ^ phi = * d_A phi_1,   d_A phi + * [phi, phi_1] = 0,
    d_A^* phi = 0,

with phi = (phi_z dz + phi_z^dag dzbar) / 2 and the product metric
g0^2 |dz|^2 + dy^2.  Each equation's components are recovered from the
commutators by hermitian/anti-hermitian splitting, which pins every sign
against the operator algebra instead of wedge-calculus conventions.

The moment-map residual in a holomorphic chart (dbar_E = dbar, metric H) is

    R(H) = (4/g0^2) dzbar(W_z) + dy(W_y) - (1/g0^2) [phi, H^-1 phi^dag H],

where W_mu = (H^-1 (D_mu H) - (D_mu H^-1) H) / 2 is a symmetrized discrete
stand-in for H^-1 d_mu H (identical in the continuum since
dH^-1 = -H^-1 dH H^-1).  The symmetrization makes the reduction of the
diagonal ansatz H = diag(exp(-u), exp(u)) to the scalar equation exact in
floating point, not merely O(h^2): for such H every pipeline stage maps
diag(-x, x) data to diag(-x', x') data.  Normalization is calibrated so the
diagonal ansatz with phi = z^k e12 yields residual diag(-rho, rho) with
rho = Lap(u) + r^(2k) exp(-2u).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import models
from .algebra import (E12, T_DIAG, DTriple, SingularGauge, as_mat, commutator,
                      dagger, inv2, is_antihermitian, is_traceless)
from .grids import (AxiGrid, TorusGrid, diff_bounded, diff_periodic, l2_norm,
                    sup_norm)


@dataclass
class FieldConfig:
    """Sampled unitary triple on a grid; arrays are (grid shape + (2, 2)).

    ``a2``/``a3``/``ay`` are the connection components (anti-hermitian),
    ``phi_z`` the dz-coefficient of the Higgs 1-form (traceless), ``phi1``
    the scalar field.  ``charge`` marks the phase winding of phi_z for
    axisymmetric data sampled on an AxiGrid half-plane slice.
    """

    a2: np.ndarray
    a3: np.ndarray
    ay: np.ndarray
    phi_z: np.ndarray
    phi1: np.ndarray
    charge: int | None = None

    def __post_init__(self):
        for name in ("a2", "a3", "ay", "phi_z", "phi1"):
            setattr(self, name, as_mat(getattr(self, name)))
        for name in ("a2", "a3", "ay"):
            if not is_antihermitian(getattr(self, name), tol=1e-10):
                raise ValueError(f"{name} must be anti-hermitian to 1e-10")
        if not is_traceless(self.phi_z, tol=1e-10):
            raise ValueError("phi_z must be traceless")

    @property
    def a_zbar(self) -> np.ndarray:
        return 0.5 * (self.a2 + 1j * self.a3)

    @property
    def a_z(self) -> np.ndarray:
        return 0.5 * (self.a2 - 1j * self.a3)


@dataclass
class HolomorphicData:
    """Holomorphic-gauge data: dbar-perturbation, Higgs field, metric."""

    beta: np.ndarray
    higgs: np.ndarray
    metric: np.ndarray

    def __post_init__(self):
        self.beta = as_mat(self.beta)
        self.higgs = as_mat(self.higgs)
        self.metric = as_mat(self.metric)
        if not is_traceless(self.higgs, tol=1e-10):
            raise ValueError("Higgs field must be traceless")


@dataclass
class TangentPair:
    """Deformation direction: (0,1)-part beta and (1,0)-part phi."""

    beta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        self.beta = as_mat(self.beta)
        self.phi = as_mat(self.phi)
        if not (is_traceless(self.beta, 1e-10) and is_traceless(self.phi, 1e-10)):
            raise ValueError("tangent slots must be traceless")


@dataclass
class ResidualReport:
    equation: str
    sup_norm: float
    l2_norm: float
    grid: str

    def as_dict(self) -> dict:
        return {"equation": self.equation, "sup_norm": self.sup_norm,
                "l2_norm": self.l2_norm, "grid": self.grid}


def _norms(label: str, grid_desc: str, cell: float, *arrays) -> ResidualReport:
    stacked = [np.asarray(a) for a in arrays]
    sup = max(sup_norm(a) for a in stacked)
    l2 = float(np.sqrt(sum(l2_norm(a, cell) ** 2 for a in stacked)))
    return ResidualReport(label, sup, l2, grid_desc)


# ---------------------------------------------------------------------------
# assembly from holomorphic data


def assemble_unitary(g: np.ndarray, higgs: np.ndarray, grid: TorusGrid,
                     dg=None) -> FieldConfig:
    """Build the unitary triple from a complex gauge frame g and Higgs field.

    The unitary data is the conjugate of (dbar, higgs, dy) by g, i.e.
    X -> g X g^-1 plus inhomogeneous derivative terms:

        A_zbar = -(dzbar g) g^-1,      A_z = (g^dag)^-1 dz g^dag,
        phi_z  = g higgs g^-1,
        A_y    = -((dy g) g^-1 - (g^dag)^-1 dy g^dag) / 2,
        phi_1  = -(i/2) ((dy g) g^-1 + (g^dag)^-1 dy g^dag).

    ``dg`` optionally supplies analytic derivatives (d2 g, d3 g, dy g);
    otherwise grid stencils are used.
    """
    g = as_mat(g)
    higgs = as_mat(higgs)
    if dg is None:
        d2g = diff_periodic(g, grid.hx, axis=0)
        d3g = diff_periodic(g, grid.hx, axis=1)
        dyg = diff_bounded(g, grid.hy, axis=2)
    else:
        d2g, d3g, dyg = (as_mat(d) for d in dg)
    ginv = inv2(g)  # SingularGauge on tiny determinant
    dzbar_g = 0.5 * (d2g + 1j * d3g)
    a_zbar = -dzbar_g @ ginv
    a_z = -dagger(a_zbar)
    x = -(dyg @ ginv)
    xdag = dagger(x)
    ay = 0.5 * (x - xdag)
    phi1 = 0.5j * (x + xdag)
    phi_z = g @ higgs @ ginv

    a2 = a_z + a_zbar
    a3 = 1j * (a_z - a_zbar)
    # rounding can leave ~1e-16 hermitian dust; project so invariants hold
    a2 = 0.5 * (a2 - dagger(a2))
    a3 = 0.5 * (a3 - dagger(a3))
    ay = 0.5 * (ay - dagger(ay))
    return FieldConfig(a2=a2, a3=a3, ay=ay, phi_z=phi_z, phi1=phi1)


# ---------------------------------------------------------------------------
# commutator-form residuals on a torus grid


def _covariant(d_field, a, field):
    return d_field + commutator(a, field)


def _torus_core(cfg: FieldConfig, grid: TorusGrid, order: int = 2):
    """Complex residual set (E_holo, E_y1, E_y2, R_mm) by finite differences."""
    hx, hy, g0 = grid.hx, grid.hy, grid.g0
    az, azb = cfg.a_z, cfg.a_zbar
    c = cfg.ay - 1j * cfg.phi1

    def dzb(f):
        return 0.5 * (diff_periodic(f, hx, 0, order)
                      + 1j * diff_periodic(f, hx, 1, order))

    def dz(f):
        return 0.5 * (diff_periodic(f, hx, 0, order)
                      - 1j * diff_periodic(f, hx, 1, order))

    def dy(f):
        return diff_bounded(f, hy, 2, order)

    e_holo = _covariant(dzb(cfg.phi_z), azb, cfg.phi_z)
    e_y1 = dzb(c) - dy(azb) + commutator(azb, c)
    e_y2 = -dy(cfg.phi_z) + commutator(cfg.phi_z, c)
    f_zzb = dzb(az) - dz(azb) + commutator(azb, az)
    r_mm = (4.0 / g0 ** 2) * f_zzb \
        - (1.0 / g0 ** 2) * commutator(cfg.phi_z, dagger(cfg.phi_z)) \
        + 2j * _covariant(dy(cfg.phi1), cfg.ay, cfg.phi1)
    return e_holo, e_y1, e_y2, r_mm


def eb1_residual(cfg: FieldConfig, grid, order: int = 2) -> list[ResidualReport]:
    """Interior sup and L2 norms of the three field equations.

    Equation 1 is the curvature equation (three 2-form components), equation
    2 the covariant-constancy equation for the Higgs 1-form, equation 3 the
    coclosedness condition.  Components are reassembled from the commutator
    residuals: with E_y1 = (R1b + i R1c)/2 (both anti-hermitian) and
    E_holo = (g0^2 R3 - i R2a)/2 (both hermitian), splitting by symmetry
    recovers each displayed component exactly.  Norms exclude boundary nodes
    of non-periodic axes, where one-sided stencils degrade the order.
    """
    if isinstance(grid, TorusGrid):
        e_holo, e_y1, e_y2, r_mm = _torus_core(cfg, grid, order)
        g0 = grid.g0
        cell = grid.hx * grid.hx * grid.hy
        desc = f"torus {grid.nx}x{grid.ny_axis}x{grid.ny}"
        interior = np.s_[:, :, 1:-1]
    elif isinstance(grid, AxiGrid):
        e_holo, e_y1, e_y2, r_mm = eb1_core_axi(cfg, grid, order)
        g0 = 1.0
        cell = grid.dr * grid.dy
        desc = f"axi {grid.shape[0]}x{grid.shape[1]}"
        interior = np.s_[1:-1, 1:-1]
    else:
        raise TypeError("unsupported grid type")

    e_holo, e_y1, e_y2, r_mm = (x[interior] for x in (e_holo, e_y1, e_y2, r_mm))
    r1a = 0.5j * g0 ** 2 * r_mm
    r1b = e_y1 - dagger(e_y1)
    r1c = -1j * (e_y1 + dagger(e_y1))
    r2a = 1j * (e_holo - dagger(e_holo))
    r3 = (e_holo + dagger(e_holo)) / g0 ** 2
    r2b = -0.5 * (e_y2 + dagger(e_y2))
    r2c = -0.5j * (e_y2 - dagger(e_y2))
    return [
        _norms("curvature", desc, cell, r1a, r1b, r1c),
        _norms("higgs_transport", desc, cell, r2a, r2b, r2c),
        _norms("coclosed", desc, cell, r3),
    ]


def eb1_core_axi(cfg: FieldConfig, grid: AxiGrid, order: int = 2):
    """Commutator residuals for axisymmetric data on the theta = 0 slice.

    The configuration must have the rotationally symmetric diagonal form

        A = a(r,y) T dtheta,  A_y = m(r,y) T,  phi_1 = p(r,y) T,
        phi_z = f(r,y) exp(i k theta) e12,   T = diag(i/2, -i/2),

    for which all theta-derivatives are analytic and the residuals reduce to
    radial profiles:

        E_holo = (f_r - (k + a) f / r) / 2 * e12
        E_y1   = ((m_r - i p_r) - i a_y / r) / 2 * T
        E_y2   = (-f_y - (i m + p) f) * e12
        R_mm   = 2i (-a_r / r + |f|^2 + p_y) T
    """
    if cfg.charge is None:
        raise ValueError("axisymmetric evaluation needs cfg.charge set")
    k = cfg.charge
    scale = max(1.0, sup_norm(cfg.phi_z), sup_norm(cfg.a3))

    def t_coeff(x, name):
        off = max(sup_norm(x[..., 0, 1]), sup_norm(x[..., 1, 0]))
        tr = sup_norm(x[..., 0, 0] + x[..., 1, 1])
        if max(off, tr) > 1e-9 * scale:
            raise ValueError(f"{name}: expected a multiple of diag(i/2,-i/2)")
        return (-2j * x[..., 0, 0]).real

    if sup_norm(cfg.phi_z[..., 1, 0]) > 1e-9 * scale:
        raise ValueError("phi_z must be strictly upper triangular")
    if sup_norm(cfg.a2) > 1e-9 * scale:
        raise ValueError("a2 must vanish on the theta = 0 slice")
    f = cfg.phi_z[..., 0, 1]
    rr = grid.r[:, None]
    a = t_coeff(cfg.a3, "a3") * rr  # a3 = (a/r) T on the slice
    m = t_coeff(cfg.ay, "ay")
    p = t_coeff(cfg.phi1, "phi1")

    def dr(x):
        return diff_bounded(x, grid.dr, 0, order)

    def dy(x):
        return diff_bounded(x, grid.dy, 1, order)

    e_holo = 0.5 * (dr(f) - (k * f + a * f) / rr)
    e_y1 = 0.5 * ((dr(m) - 1j * dr(p)) - 1j * dy(a) / rr)
    e_y2 = -dy(f) - 1j * m * f - p * f
    r_mm = 2j * (-(dr(a) / rr) + np.abs(f) ** 2 + dy(p))
    return (e_holo[..., None, None] * E12,
            e_y1[..., None, None] * T_DIAG,
            e_y2[..., None, None] * E12,
            r_mm[..., None, None] * T_DIAG)


def model_field_config(k, grid: AxiGrid) -> FieldConfig:
    """Sample the charge-k model triple on the theta = 0 slice of an AxiGrid."""
    triple = models.model_unitary_triple(k)
    rr, yy = grid.mesh()
    a2, a3, ay, phi_z, phi1 = triple.sample(rr, 0.0, yy)
    return FieldConfig(a2=a2, a3=a3, ay=ay, phi_z=phi_z, phi1=phi1,
                       charge=triple.k)


def model_field_config_torus(grid: TorusGrid) -> FieldConfig:
    """Charge-0 model on a torus grid (z-independent, so periodicity is exact)."""
    triple = models.model_unitary_triple(0)
    shape = grid.shape
    y = grid.y[None, None, :]
    _, _, u_y = triple.profiles(np.ones_like(y), y)
    zero = np.zeros(shape + (2, 2), dtype=complex)
    eu = np.broadcast_to(np.exp(-triple.u(np.ones_like(y), y)), shape)
    phi_z = eu[..., None, None] * E12
    phi1 = np.broadcast_to(u_y, shape)[..., None, None] * T_DIAG
    return FieldConfig(a2=zero, a3=zero.copy(), ay=zero.copy(),
                       phi_z=phi_z, phi1=phi1, charge=0)


def gauge_conjugate_config(g: np.ndarray, cfg: FieldConfig, grid: TorusGrid,
                           unitary_tol: float = 1e-8) -> FieldConfig:
    """Conjugate a unitary configuration by a smooth unitary gauge field.

    Connection slots pick up g^-1 dg; tensorial slots conjugate.  g must be
    unitary so the triple stays unitary (general complex gauges change the
    metric slot instead; see algebra.gauge_conjugate_triple).
    """
    g = as_mat(g)
    if sup_norm(dagger(g) @ g - np.eye(2)) > unitary_tol:
        raise SingularGauge("gauge field is not unitary")
    ginv = dagger(g)
    d2g = diff_periodic(g, grid.hx, axis=0)
    d3g = diff_periodic(g, grid.hx, axis=1)
    dyg = diff_bounded(g, grid.hy, axis=2)

    def conj(x):
        return ginv @ x @ g

    a2 = conj(cfg.a2) + ginv @ d2g
    a3 = conj(cfg.a3) + ginv @ d3g
    ay = conj(cfg.ay) + ginv @ dyg
    a2 = 0.5 * (a2 - dagger(a2))
    a3 = 0.5 * (a3 - dagger(a3))
    ay = 0.5 * (ay - dagger(ay))
    return FieldConfig(a2=a2, a3=a3, ay=ay, phi_z=conj(cfg.phi_z),
                       phi1=conj(cfg.phi1))


# ---------------------------------------------------------------------------
# holomorphic-gauge residuals


def holo_commutator_residual(data: HolomorphicData, grid,
                             y_axis: int = -1) -> list[ResidualReport]:
    """Norms of the reduced commutator equations in holomorphic gauge:
    holomorphicity of the Higgs field and y-independence of (beta, Phi)."""
    beta, higgs = data.beta, data.higgs
    if isinstance(grid, TorusGrid):
        hx, hy = grid.hx, grid.hy
        dzb_h = 0.5 * (diff_periodic(higgs, hx, 0) + 1j * diff_periodic(higgs, hx, 1))
        dy_b = diff_bounded(beta, hy, 2)
        dy_h = diff_bounded(higgs, hy, 2)
        cell = hx * hx * hy
        desc = f"torus {grid.nx}x{grid.ny_axis}x{grid.ny}"
    else:
        raise TypeError("holomorphic residuals are evaluated on TorusGrid")
    holo = dzb_h + commutator(beta, higgs)
    return [
        _norms("higgs_holomorphic", desc, cell, holo),
        _norms("beta_y_independent", desc, cell, dy_b),
        _norms("higgs_y_independent", desc, cell, dy_h),
    ]


def _sym_log_derivative(h: np.ndarray, hinv: np.ndarray, diff) -> np.ndarray:
    """W = (H^-1 dH - (dH^-1) H)/2; equals H^-1 dH in the continuum but keeps
    the exact diag(-x, x) structure for diagonal unit-determinant data."""
    return 0.5 * (hinv @ diff(h) - diff(hinv) @ h)


def moment_map_residual(data: HolomorphicData, grid: TorusGrid,
                        order: int = 2):
    """Matrix residual field of the metric moment-map equation, plus norms.

    Evaluated in a trivialized chart (beta = 0); perturbations of the
    holomorphic structure enter through the commutator and tangent residuals
    instead.  Returns (residual array over the full grid, [ResidualReport])
    with norms over interior y-slices.
    """
    if sup_norm(data.beta) > 1e-12:
        raise ValueError("moment-map chart requires beta = 0")
    h = data.metric
    hinv = inv2(h)
    phi = data.higgs
    hx, hy, g0 = grid.hx, grid.hy, grid.g0

    def dx2(f):
        return diff_periodic(f, hx, 0, order)

    def dx3(f):
        return diff_periodic(f, hx, 1, order)

    def dy(f):
        return diff_bounded(f, hy, 2, order)

    w2 = _sym_log_derivative(h, hinv, dx2)
    w3 = _sym_log_derivative(h, hinv, dx3)
    wy = _sym_log_derivative(h, hinv, dy)
    # 4 dzbar(W_z) = (dx2 + i dx3)(W_2 - i W_3)
    lap_term = dx2(w2) + dx3(w3) + 1j * (dx3(w2) - dx2(w3))
    comm = commutator(phi, hinv @ dagger(phi) @ h)
    res = lap_term / g0 ** 2 - comm / g0 ** 2 + dy(wy)
    cell = hx * hx * hy
    desc = f"torus {grid.nx}x{grid.ny_axis}x{grid.ny}"
    return res, [_norms("moment_map", desc, cell, res[:, :, 1:-1])]


def tangent_residual(base: HolomorphicData, t: TangentPair,
                     grid: TorusGrid) -> list[ResidualReport]:
    """Norms of the linearized holomorphicity equation and of y-dependence.

    The first residual dzbar(phi) + [beta0, phi] + [beta, Phi] is the
    linearization of the Higgs holomorphicity residual; gauge directions
    (beta, phi) = (dzbar(gamma) + [beta0, gamma], [Phi, gamma]) lie in its
    kernel whenever the base is holomorphic.
    """
    hx, hy = grid.hx, grid.hy
    dzb_p = 0.5 * (diff_periodic(t.phi, hx, 0) + 1j * diff_periodic(t.phi, hx, 1))
    lin = dzb_p + commutator(base.beta, t.phi) + commutator(t.beta, base.higgs)
    dy_b = diff_bounded(t.beta, hy, 2)
    dy_p = diff_bounded(t.phi, hy, 2)
    cell = hx * hx * hy
    desc = f"torus {grid.nx}x{grid.ny_axis}x{grid.ny}"
    return [
        _norms("tangent_holomorphic", desc, cell, lin),
        _norms("tangent_y_independent", desc, cell, dy_b, dy_p),
    ]


# ---------------------------------------------------------------------------
# dumps


def dump_fields_csv(path, cfg: FieldConfig, grid) -> None:
    """Flat CSV: node coordinates plus Re/Im entry pairs per matrix field."""
    import csv

    names = ["a2", "a3", "ay", "phi_z", "phi1"]
    if isinstance(grid, AxiGrid):
        coord_names = ("r", "y")
        rr, yy = grid.mesh()
        coord_cols = [rr.ravel(), yy.ravel()]
    else:
        rr, ss, yy = grid.mesh()
        coord_cols = [rr.ravel(), ss.ravel(), yy.ravel()]
        coord_names = ("x2", "x3", "y")
    header = list(coord_names)
    for nm in names:
        for ij in ("11", "12", "21", "22"):
            header += [f"{nm}_{ij}_re", f"{nm}_{ij}_im"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        mats = [getattr(cfg, nm).reshape(-1, 2, 2) for nm in names]
        for idx in range(coord_cols[0].size):
            row = [f"{c[idx]:.17g}" for c in coord_cols]
            for m in mats:
                for i in range(2):
                    for j in range(2):
                        row += [f"{m[idx, i, j].real:.17g}",
                                f"{m[idx, i, j].imag:.17g}"]
            w.writerow(row)
