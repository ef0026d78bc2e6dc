"""Exact 2x2 matrix algebra for SL(2) gauge data.

Everything in the package is carried by 2x2 complex matrices: Higgs fields,
connection components, gauge transformations, hermitian metrics.  Functions
here accept plain ``(..., 2, 2)`` ndarrays (broadcasting over leading axes)
or the thin ``Mat2`` / ``HermMetric`` wrappers, and return ndarrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-12

# Handy basis elements.
E12 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
E21 = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
# diag(i/2, -i/2): the Cartan direction every diagonal model field lives on.
T_DIAG = np.array([[0.5j, 0.0], [0.0, -0.5j]], dtype=complex)


class SingularGauge(ValueError):
    """Gauge transformation is (numerically) non-invertible at some node."""


def as_mat(m) -> np.ndarray:
    """Coerce Mat2/HermMetric/array-like to a complex (..., 2, 2) ndarray."""
    if isinstance(m, HermMetric):
        m = m.h
    if isinstance(m, Mat2):
        m = m.a
    arr = np.asarray(m, dtype=complex)
    if arr.shape[-2:] != (2, 2):
        raise ValueError(f"expected trailing shape (2, 2), got {arr.shape}")
    return arr


def dagger(m) -> np.ndarray:
    """Conjugate transpose on the trailing two axes."""
    return np.conj(np.swapaxes(as_mat(m), -1, -2))


def det2(m) -> np.ndarray:
    a = as_mat(m)
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def inv2(m) -> np.ndarray:
    """Inverse via the adjugate; raises SingularGauge below 1e-10 determinant."""
    a = as_mat(m)
    d = det2(a)
    if np.any(np.abs(d) < 1e-10):
        raise SingularGauge("matrix determinant below 1e-10")
    out = np.empty_like(a)
    out[..., 0, 0] = a[..., 1, 1]
    out[..., 1, 1] = a[..., 0, 0]
    out[..., 0, 1] = -a[..., 0, 1]
    out[..., 1, 0] = -a[..., 1, 0]
    return out / d[..., None, None]


def commutator(x, y) -> np.ndarray:
    x, y = as_mat(x), as_mat(y)
    return x @ y - y @ x


def is_traceless(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_mat(m)
    return bool(np.all(np.abs(a[..., 0, 0] + a[..., 1, 1]) <= tol))


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_mat(m)
    return bool(np.all(np.abs(a - dagger(a)) <= tol))


def is_antihermitian(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_mat(m)
    return bool(np.all(np.abs(a + dagger(a)) <= tol))


@dataclass(frozen=True)
class Mat2:
    """A single 2x2 complex matrix with finiteness checked at construction."""

    a: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=complex)
        if arr.shape != (2, 2):
            raise ValueError(f"Mat2 expects shape (2, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr.view(float))):
            raise ValueError("Mat2 entries must be finite")
        object.__setattr__(self, "a", arr)

    def is_traceless(self, tol: float = DEFAULT_TOL) -> bool:
        return is_traceless(self.a, tol)

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> bool:
        return is_hermitian(self.a, tol)

    def is_antihermitian(self, tol: float = DEFAULT_TOL) -> bool:
        return is_antihermitian(self.a, tol)


@dataclass(frozen=True)
class HermMetric:
    """Positive-definite hermitian 2x2 metric, normalized to unit determinant.

    The constructor symmetrizes and rescales, so ``h == h.conj().T`` exactly
    and ``det h == 1`` to rounding.  Positivity is a hard error.
    """

    h: np.ndarray = field(default_factory=lambda: IDENTITY.copy())

    def __post_init__(self):
        arr = np.asarray(self.h, dtype=complex)
        if arr.shape != (2, 2):
            raise ValueError(f"HermMetric expects shape (2, 2), got {arr.shape}")
        arr = hermitize(arr)
        d = det2(arr).real
        tr = (arr[0, 0] + arr[1, 1]).real
        if d <= 0.0 or tr <= 0.0:
            raise ValueError("HermMetric must be positive definite")
        arr = arr / np.sqrt(d)
        arr.setflags(write=False)
        object.__setattr__(self, "h", arr)

    def inv(self) -> np.ndarray:
        return inv2(self.h)


def hermitize(m) -> np.ndarray:
    """Exact hermitian projection: real diagonal, h21 = conj(h12) bitwise."""
    a = as_mat(m).copy()
    upper = 0.5 * (a[..., 0, 1] + np.conj(a[..., 1, 0]))
    a[..., 0, 1] = upper
    a[..., 1, 0] = np.conj(upper)
    a[..., 0, 0] = a[..., 0, 0].real
    a[..., 1, 1] = a[..., 1, 1].real
    return a


def herm_adjoint(m, h) -> np.ndarray:
    """Adjoint of m with respect to the hermitian metric h: h^-1 m^dag h."""
    hm = as_mat(h)
    return inv2(hm) @ dagger(m) @ hm


def cholesky_like_factor(h) -> np.ndarray:
    """Hermitian positive square root g of the metric, so g^dag g = h.

    The factorization h = g^dag g is only fixed up to a unitary; choosing the
    principal (hermitian positive) root makes it deterministic.
    """
    a = as_mat(h)
    a = hermitize(a)
    # Closed-form PD square root of a 2x2 hermitian matrix:
    # sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A))
    d = det2(a).real
    tr = (a[..., 0, 0] + a[..., 1, 1]).real
    if np.any(d <= 0) or np.any(tr <= 0):
        raise ValueError("metric must be positive definite")
    s = np.sqrt(d)
    denom = np.sqrt(tr + 2.0 * s)
    out = (a + s[..., None, None] * IDENTITY) / denom[..., None, None]
    return out


@dataclass
class DTriple:
    """Sampled gauge-covariant operator data (D1, D2, D3) plus optional metric.

    ``a1`` and ``a3`` are the zeroth-order parts of the first and third
    operators (they pick up an inhomogeneous term under gauge change), ``phi``
    is the tensorial middle slot, ``metric`` transforms as g^dag H g.  All
    entries are (..., 2, 2) arrays over a common sample set.
    """

    a1: np.ndarray
    phi: np.ndarray
    a3: np.ndarray
    metric: np.ndarray | None = None


def gauge_conjugate_triple(g, data: DTriple, dg1=None, dg3=None) -> DTriple:
    """Conjugate operator data by the gauge transformation g.

    Derivative slots transform as X -> g^-1 X g + g^-1 (dg), tensorial slots
    as X -> g^-1 X g, the metric as H -> g^dag H g.  ``dg1``/``dg3`` are the
    derivatives of g along the directions of the first/third operators; pass
    zero (the default) for constant g.
    """
    g = as_mat(g)
    ginv = inv2(g)  # raises SingularGauge on |det| < 1e-10
    zero = np.zeros_like(g)
    dg1 = zero if dg1 is None else as_mat(dg1)
    dg3 = zero if dg3 is None else as_mat(dg3)
    a1 = ginv @ as_mat(data.a1) @ g + ginv @ dg1
    phi = ginv @ as_mat(data.phi) @ g
    a3 = ginv @ as_mat(data.a3) @ g + ginv @ dg3
    metric = None
    if data.metric is not None:
        metric = dagger(g) @ as_mat(data.metric) @ g
    return DTriple(a1=a1, phi=phi, a3=a3, metric=metric)
