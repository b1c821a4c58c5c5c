"""Vector-valued natural cubic smoothing splines on [-1, 1].

One regression engine serves both the encoding and the decoding side: given
knots ``t_1 < ... < t_n`` and values ``y_i`` in R^q, :func:`fit` returns the
unique minimizer of

    sum_i ||y_i - u(t_i)||^2  +  lam * integral ||u''(t)||^2 dt

over functions with square-integrable second derivative, solved per output
dimension.  The minimizer is a natural cubic spline with knots at the data
sites, so it is fully described by its knot values and knot second
derivatives; that pair is what :class:`SplineFit` stores.

:func:`fit` uses the classic banded formulation: with ``Q`` the second
divided-difference matrix and ``R`` the Gram matrix of the interior hat
functions, the interior second derivatives ``g`` solve the pentadiagonal
system ``(R + lam Q^T Q) g = Q^T y`` and the fitted values are
``y - lam Q g``.  Cost is one O(n) banded factorization plus O(n) per output
dimension.

:func:`fit_dense_oracle` solves the same problem through an explicit basis
expansion and a dense O(n^3) solve.  It exists purely as a cross-check for
:func:`fit` and is deliberately built on different machinery (B-spline basis,
quadrature penalty matrix, dense least squares).
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline
from scipy.linalg import null_space, solveh_banded

from .errors import (
    NegativeLambda,
    NonFiniteInput,
    NonFiniteQuery,
    NonIncreasingKnots,
    ShapeMismatch,
    SingularSystem,
    TooFewKnots,
)

__all__ = ["SplineFit", "fit", "evaluate", "roughness", "fit_dense_oracle"]


@dataclass(frozen=True)
class SplineFit:
    """A fitted natural cubic smoothing spline.

    Attributes
    ----------
    knots : numpy.ndarray
        Strictly increasing knot locations, shape (n,).
    fitted : numpy.ndarray
        Spline values at the knots, shape (n, q).
    second_derivs : numpy.ndarray
        Spline second derivatives at the knots, shape (n, q).  Rows 0 and
        n-1 are exactly zero (natural boundary conditions).
    lam : float
        The smoothing parameter the fit was computed with.
    """

    knots: np.ndarray
    fitted: np.ndarray
    second_derivs: np.ndarray
    lam: float


def _check_inputs(knots, values, lam):
    t = np.asarray(knots, dtype=float).reshape(-1)
    y = np.asarray(values, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if y.ndim != 2:
        raise ShapeMismatch(f"values must be 1-D or 2-D, got ndim={y.ndim}")
    if t.size < 3:
        raise TooFewKnots(f"need at least 3 knots, got {t.size}")
    if y.shape[0] != t.size:
        raise ShapeMismatch(
            f"{t.size} knots but {y.shape[0]} value rows"
        )
    if not np.all(np.isfinite(t)):
        raise NonFiniteInput("knots contain NaN or infinity")
    if np.any(np.diff(t) <= 0.0):
        raise NonIncreasingKnots("knots must be strictly increasing")
    if not np.all(np.isfinite(y)):
        raise NonFiniteInput("values contain NaN or infinity")
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0.0:
        raise NegativeLambda(f"smoothing parameter must be finite and >= 0, got {lam}")
    return t, y, lam


def fit(knots, values, lam) -> SplineFit:
    """Fit a natural cubic smoothing spline.

    Parameters
    ----------
    knots : array_like
        Strictly increasing sites, length n >= 3.
    values : array_like
        Data at the knots, shape (n,) or (n, q).
    lam : float
        Roughness weight, >= 0.  ``lam=0`` interpolates; large ``lam``
        approaches the least-squares line.

    Returns
    -------
    SplineFit
    """
    t, y, lam = _check_inputs(knots, values, lam)
    n = t.size
    h = np.diff(t)
    inv_h = 1.0 / h

    # Q^T y: second divided differences of the data, (n-2, q).
    mid_coef = inv_h[:-1] + inv_h[1:]
    qty = (
        y[:-2] * inv_h[:-1, None]
        - y[1:-1] * mid_coef[:, None]
        + y[2:] * inv_h[1:, None]
    )

    r_diag = (h[:-1] + h[1:]) / 3.0
    r_sup = h[1:-1] / 6.0

    if lam == 0.0:
        # Interpolation: fitted == data, R g = Q^T y for the curvatures.
        if n == 3:
            interior = qty / r_diag[0]
        else:
            band = np.zeros((2, n - 2))
            band[0, 1:] = r_sup
            band[1] = r_diag
            interior = solveh_banded(band, qty)
        fitted = y.copy()
    else:
        # Pentadiagonal SPD system (R + lam Q^T Q) g = Q^T y.
        a, b, c = inv_h[:-1], -mid_coef, inv_h[1:]
        qtq_diag = a * a + b * b + c * c
        qtq_sup1 = b[:-1] * a[1:] + c[:-1] * b[1:]
        qtq_sup2 = c[:-2] * a[2:]
        if n == 3:
            interior = qty / (r_diag[0] + lam * qtq_diag[0])
        else:
            band = np.zeros((3, n - 2))
            band[0, 2:] = lam * qtq_sup2
            band[1, 1:] = r_sup + lam * qtq_sup1
            band[2] = r_diag + lam * qtq_diag
            interior = solveh_banded(band, qty)
        q_interior = np.zeros_like(y)
        q_interior[: n - 2] += interior * inv_h[:-1, None]
        q_interior[1 : n - 1] -= interior * mid_coef[:, None]
        q_interior[2:] += interior * inv_h[1:, None]
        fitted = y - lam * q_interior

    second = np.zeros_like(y)
    second[1:-1] = interior
    return SplineFit(knots=t, fitted=fitted, second_derivs=second, lam=lam)


def evaluate(fit_result: SplineFit, points) -> np.ndarray:
    """Evaluate a fitted spline, shape (p, q).

    Inside the knot span this is the usual piecewise cubic in terms of knot
    values and knot second derivatives.  Outside, the spline continues
    linearly with the natural boundary slope.
    """
    t = fit_result.knots
    g = fit_result.fitted
    m = fit_result.second_derivs
    x = np.atleast_1d(np.asarray(points, dtype=float))
    if not np.all(np.isfinite(x)):
        raise NonFiniteQuery("evaluation points contain NaN or infinity")

    n = t.size
    h = np.diff(t)
    idx = np.clip(np.searchsorted(t, x, side="right") - 1, 0, n - 2)
    hi = h[idx]
    right = (t[idx + 1] - x) / hi
    left = (x - t[idx]) / hi
    out = (
        right[:, None] * g[idx]
        + left[:, None] * g[idx + 1]
        + (
            (right**3 - right)[:, None] * m[idx]
            + (left**3 - left)[:, None] * m[idx + 1]
        )
        * (hi**2)[:, None]
        / 6.0
    )

    below = x < t[0]
    if np.any(below):
        slope0 = (g[1] - g[0]) / h[0] - h[0] * m[1] / 6.0
        out[below] = g[0] + (x[below] - t[0])[:, None] * slope0
    above = x > t[-1]
    if np.any(above):
        slope1 = (g[-1] - g[-2]) / h[-1] + h[-1] * m[-2] / 6.0
        out[above] = g[-1] + (x[above] - t[-1])[:, None] * slope1
    return out


def roughness(fit_result: SplineFit) -> float:
    """Integral of ||u''||^2 over the knot span, summed over output dims.

    u'' is piecewise linear between knots and zero at the ends, so the
    integral has the closed form ``sum_i h_i/3 (m_i^2 + m_i m_{i+1} +
    m_{i+1}^2)`` per dimension.
    """
    h = np.diff(fit_result.knots)
    m = fit_result.second_derivs
    per_interval = (m[:-1] ** 2 + m[:-1] * m[1:] + m[1:] ** 2).sum(axis=1)
    return float(np.dot(h / 3.0, per_interval))


# --- dense oracle -------------------------------------------------------------


def _natural_basis(knots: np.ndarray):
    """Explicit basis of the natural cubic splines with the given knots.

    Returns ``(ext_knots, comb)`` where ``comb`` has shape (n+2, n): column j
    holds the cubic B-spline coefficients of basis function eta_j.  The
    columns span the null space of the two boundary second-derivative
    constraints, so every eta_j satisfies the natural conditions exactly.
    """
    ext = np.concatenate([[knots[0]] * 3, knots, [knots[-1]] * 3])
    m = knots.size + 2
    curvature = BSpline(ext, np.eye(m), 3, extrapolate=True).derivative(2)
    constraints = curvature(np.array([knots[0], knots[-1]]))
    return ext, null_space(constraints)


def _basis_matrix(ext, comb, x, deriv: int = 0) -> np.ndarray:
    """Design matrix ``eta_j^{(deriv)}(x_i)`` of shape (p, n)."""
    m = comb.shape[0]
    spl = BSpline(ext, np.eye(m), 3, extrapolate=True)
    if deriv:
        spl = spl.derivative(deriv)
    return spl(np.atleast_1d(np.asarray(x, dtype=float))) @ comb


def _penalty_factor(knots, ext, comb):
    """Matrix L with L^T L = Omega, Omega_ij = integral eta_i'' eta_j''.

    The basis second derivatives are piecewise linear, so two-point Gauss
    quadrature per knot interval integrates their products exactly.
    """
    h = np.diff(knots)
    mid = 0.5 * (knots[:-1] + knots[1:])
    off = h / (2.0 * np.sqrt(3.0))
    nodes = np.concatenate([mid - off, mid + off])
    weights = np.concatenate([h, h]) / 2.0
    curv = _basis_matrix(ext, comb, nodes, deriv=2)
    return np.sqrt(weights)[:, None] * curv


def fit_dense_oracle(knots, values, lam) -> SplineFit:
    """Reference implementation of :func:`fit` via an explicit basis.

    Expands the minimizer as ``sum_j theta_j eta_j`` over an explicit
    natural-spline basis and solves the penalized normal equations
    ``(M^T M + lam Omega) theta = M^T y`` with ``M_ij = eta_j(t_i)`` and
    ``Omega_ij = integral eta_i'' eta_j''`` (computed by exact quadrature).
    The solve itself runs as dense least squares on the stacked system
    ``[M; sqrt(lam) L]`` with ``L^T L = Omega``, which has the same unique
    minimizer without squaring the condition number.  O(n^3); test oracle
    only.
    """
    t, y, lam = _check_inputs(knots, values, lam)
    ext, comb = _natural_basis(t)
    design = _basis_matrix(ext, comb, t)
    penalty = _penalty_factor(t, ext, comb)
    stacked = np.vstack([design, np.sqrt(lam) * penalty])
    rhs = np.vstack([y, np.zeros((penalty.shape[0], y.shape[1]))])
    try:
        theta, _, rank, _ = np.linalg.lstsq(stacked, rhs, rcond=None)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if rank < comb.shape[1] or not np.all(np.isfinite(theta)):
        raise SingularSystem("normal system is numerically singular")
    fitted = design @ theta
    second = _basis_matrix(ext, comb, t, deriv=2) @ theta
    second[0] = 0.0
    second[-1] = 0.0
    return SplineFit(knots=t, fitted=fitted, second_derivs=second, lam=lam)
