"""Coefficient-space algebra for polynomial-times-Gaussian functions.

A function is represented by the coefficient array ``c`` of its polynomial
part, ``f(xi) = (sum_k c[k] xi^k) * exp(-xi^2 / (2 g))``.  All operations
below act on the polynomial coefficients exactly, so there is no grid and
no discretization error anywhere in this module.
"""

from __future__ import annotations

import math

import numpy as np


def as_coeffs(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.ndim != 1:
        raise ValueError("coefficient array must be one-dimensional")
    return c


def trim(c: np.ndarray, rel_tol: float = 0.0) -> np.ndarray:
    """Drop trailing coefficients that are zero (or tiny relative to the max)."""
    c = as_coeffs(c)
    scale = np.abs(c).max() if c.size else 0.0
    cut = c.size
    while cut > 1 and abs(c[cut - 1]) <= rel_tol * scale:
        cut -= 1
    return c[:cut].copy()


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_coeffs(a), as_coeffs(b)
    n = max(a.size, b.size)
    out = np.zeros(n)
    out[: a.size] += a
    out[: b.size] += b
    return out


def times_xi(c: np.ndarray) -> np.ndarray:
    """Multiply the polynomial part by xi."""
    c = as_coeffs(c)
    return np.concatenate(([0.0], c))


def poly_derivative(c: np.ndarray) -> np.ndarray:
    """Derivative of the bare polynomial (not of the full function)."""
    c = as_coeffs(c)
    if c.size == 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, c.size)


def derivative(c: np.ndarray, g: float) -> np.ndarray:
    """d/dxi of the full function, expressed on the same Gaussian.

    (p e^{-xi^2/2g})' = (p' - xi p / g) e^{-xi^2/2g}.
    """
    return add(poly_derivative(c), times_xi(c) * (-1.0 / g))

def parity(c: np.ndarray) -> np.ndarray:
    """Coefficients of p(-xi): alternate the signs of odd powers."""
    c = as_coeffs(c).copy()
    c[1::2] *= -1.0
    return c


def double_factorial(n: int) -> int:
    if n <= 0:
        return 1
    return n * double_factorial(n - 2)


def gaussian_moment(k: int, g: float) -> float:
    """Exact moment  integral xi^k exp(-xi^2/g) dxi  over the real line.

    Zero for odd k; (k-1)!! (g/2)^(k/2) sqrt(pi g) for even k.
    """
    if k % 2 == 1:
        return 0.0
    return double_factorial(k - 1) * (0.5 * g) ** (k // 2) * math.sqrt(math.pi * g)


def inner(c1: np.ndarray, c2: np.ndarray, g: float) -> float:
    """Exact integral of p1 p2 e^{-xi^2/g} via Gaussian moments."""
    c1, c2 = as_coeffs(c1), as_coeffs(c2)
    prod = np.convolve(c1, c2)
    return float(sum(prod[k] * gaussian_moment(k, g) for k in range(prod.size)))


def norm_sq(c: np.ndarray, g: float) -> float:
    return inner(c, c, g)


def evaluate(c: np.ndarray, g: float, xi) -> np.ndarray:
    """Values of the full function p(xi) e^{-xi^2/2g} at the given points."""
    xi = np.asarray(xi, dtype=float)
    p = np.polynomial.polynomial.polyval(xi, as_coeffs(c))
    return p * np.exp(-(xi**2) / (2.0 * g))


def evaluate_with_derivatives(c: np.ndarray, g: float, xi):
    """Function, first and second derivative values (all exact).

    f   = p e^{-xi^2/2g}
    f'  = (p' - xi p/g) e^{...}
    f'' = (p'' - 2 xi p'/g + (xi^2/g^2 - 1/g) p) e^{...}
    """
    xi = np.asarray(xi, dtype=float)
    c = as_coeffs(c)
    pv = np.polynomial.polynomial.polyval
    p = pv(xi, c)
    d1 = pv(xi, poly_derivative(c))
    d2 = pv(xi, poly_derivative(poly_derivative(c)))
    env = np.exp(-(xi**2) / (2.0 * g))
    f = p * env
    fp = (d1 - xi * p / g) * env
    fpp = (d2 - 2.0 * xi * d1 / g + (xi**2 / g**2 - 1.0 / g) * p) * env
    return f, fp, fpp


def max_abs(*coeff_arrays) -> float:
    return max((np.abs(as_coeffs(c)).max() for c in coeff_arrays), default=0.0)
