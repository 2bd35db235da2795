"""Small numeric helpers used by several modules."""

import numpy as np

from .errors import QuadratureError

# Gauss-Legendre nodes/weights on [-1, 1], cached per order.
_GL_CACHE = {}


def gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _panel(f, a, b, order):
    x, w = gauss_legendre(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid + half * x
    vals = f(nodes)
    return half * np.tensordot(w, vals, axes=(0, 0))


def adaptive_panel_integral(f, a, b, abs_tol=1e-10, max_depth=14):
    """Integrate a vector-valued f over [a, b] with recursive Gauss-Legendre.

    ``f`` maps an array of s-nodes to an array of shape (len(s), ...); the
    result has the trailing shape.  Error control compares order-16 and
    order-32 panels and bisects where they disagree.
    """
    total = None
    stack = [(a, b, abs_tol, 0)]
    evals = 0
    while stack:
        lo, hi, tol, depth = stack.pop()
        coarse = _panel(f, lo, hi, 16)
        fine = _panel(f, lo, hi, 32)
        evals += 48
        err = np.max(np.abs(fine - coarse))
        if err <= tol or depth >= max_depth:
            if err > tol:
                raise QuadratureError(
                    f"panel [{lo:g}, {hi:g}] did not converge", residual=err
                )
            total = fine if total is None else total + fine
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, tol / 2, depth + 1))
            stack.append((mid, hi, tol / 2, depth + 1))
        if evals > 2**20:
            raise QuadratureError("evaluation cap exceeded", residual=err)
    return total


def cos_minus_one(theta):
    """cos(theta) - 1 without cancellation for small theta."""
    return -2.0 * np.sin(0.5 * theta) ** 2


def sin_minus_theta(theta):
    """sin(theta) - theta, stable for small theta."""
    theta = np.asarray(theta, dtype=float)
    small = np.abs(theta) < 1e-4
    out = np.sin(theta) - theta
    t2 = theta**2
    series = -(theta**3) / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0))
    return np.where(small, series, out)


def compensated_phase(theta):
    """exp(i*theta) - 1 - i*theta, elementwise and cancellation-safe."""
    return cos_minus_one(theta) + 1j * sin_minus_theta(theta)


def unit_vectors(dim, include_diagonals=True):
    """Probe directions: coordinate axes plus (optionally) +/- diagonals."""
    dirs = [np.eye(dim)[k] for k in range(dim)]
    if include_diagonals and dim > 1:
        ones = np.ones(dim) / np.sqrt(dim)
        dirs.append(ones)
        alt = ones.copy()
        alt[::2] *= -1.0
        dirs.append(alt / np.linalg.norm(alt))
    return dirs


def as_vector(x, dim):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (dim,):
        raise ValueError(f"expected a vector of length {dim}, got shape {x.shape}")
    return x
