"""Independent numerical oracles used by the test suite only.

None of these share an algorithm with the production code paths they
check: the characteristic polynomial comes from the Faddeev-LeVerrier
trace recursion and is rooted through a companion matrix, quadrature is
plain trapezoid summation on a wide fine grid, and the 4x4 one-step
matrix is diagonalized by the general (nonsymmetric) solver.
"""

import numpy as np


def char_poly_coeffs(a: np.ndarray) -> np.ndarray:
    """Characteristic polynomial by the Faddeev-LeVerrier recursion.

    Returns c with c[0] = 1 and det(lambda I - A) = sum c[k] lambda^(n-k).
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(a @ m) / k
    return coeffs


def char_poly_roots(a: np.ndarray) -> np.ndarray:
    """Sorted real spectrum through the companion matrix of the char poly."""
    return np.sort(np.roots(char_poly_coeffs(a)).real)


def trapezoid_gaussian_moment(k: int, g: float, span: float = 14.0, n: int = 200001) -> float:
    """integral xi^k exp(-xi^2/g) dxi by trapezoid summation."""
    xi = np.linspace(-span * np.sqrt(g), span * np.sqrt(g), n)
    return float(np.trapezoid(xi**k * np.exp(-(xi**2) / g), xi))


def trapezoid_inner(f1: np.ndarray, f2: np.ndarray, xi: np.ndarray) -> float:
    return float(np.trapezoid(f1 * f2, xi))


def general_eigs_4x4(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a (possibly nonsymmetric) 4x4, sorted by real part."""
    w = np.linalg.eigvals(m)
    return w[np.argsort(w.real)]


def dense_brute_hamiltonian(lam: float, g: float, xi: np.ndarray) -> np.ndarray:
    """Direct dense assembly of the linearized grid, no block shortcuts.

    Built entry-by-entry from the stencil definition as an independent
    cross-check of the production assembly.
    """
    m = xi.size
    h = xi[1] - xi[0]
    big = np.zeros((2 * m, 2 * m))
    for i in range(m):
        big[2 * i, 2 * i] = -xi[i]
        big[2 * i + 1, 2 * i + 1] = xi[i]
        big[2 * i, 2 * i + 1] += lam
        big[2 * i + 1, 2 * i] += lam
        if i + 1 < m:
            big[2 * i, 2 * (i + 1) + 1] += -g / (2 * h)
            big[2 * (i + 1) + 1, 2 * i] += -g / (2 * h)
        if i - 1 >= 0:
            big[2 * i, 2 * (i - 1) + 1] += g / (2 * h)
            big[2 * (i - 1) + 1, 2 * i] += g / (2 * h)
    return big
