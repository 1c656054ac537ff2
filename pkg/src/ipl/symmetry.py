"""Symmetry operators of the continuum model, all in exact real arithmetic.

P = (xi-parity) followed by the component swap commutes with H; the
chiral-partner operator

    V = i [[g d/dxi, xi], [-xi, -g d/dxi]]

anticommutes with H and with sigma_x.  The global factor i is carried as a
bookkeeping tag: ``apply_v_coeff`` returns the real pair W psi with
V = i W, which is all any of the verifiable identities need ({H,V} = 0
reduces to H W + W H = 0, and the spectrum of V equals the singular values
of the real antisymmetric grid form of W with both signs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gausspoly as gp
from .continuum import (
    ContinuumParams,
    GridOperator,
    PolyGaussianSpinor,
    _build_coefficients,
    _check_same_g,
    _normalize,
    apply_h_pair,
    level_energy,
)
from .errors import (
    MissingPartnerError,
    MissingStateError,
    SingularPointError,
    ValidationError,
)


# ---------------------------------------------------------------------------
# operators in coefficient space
# ---------------------------------------------------------------------------

def apply_parity_sigma_x(state: PolyGaussianSpinor) -> PolyGaussianSpinor:
    """P psi: swap the components and send xi -> -xi.  An involution."""
    return PolyGaussianSpinor(
        state.g,
        gp.parity(state.coeffs_b),
        gp.parity(state.coeffs_a),
        state.energy,
        state.level,
        state.sign,
        state.norm_convention,
    )


def parity_eigenvalue(state: PolyGaussianSpinor, tol: float = 1e-10) -> int:
    """Definite parity sign of an eigenstate: P psi = +-psi."""
    flipped = apply_parity_sigma_x(state)
    scale = gp.max_abs(state.coeffs_a, state.coeffs_b)
    for s in (+1, -1):
        da = gp.add(flipped.coeffs_a, -s * state.coeffs_a)
        db = gp.add(flipped.coeffs_b, -s * state.coeffs_b)
        if gp.max_abs(da, db) <= tol * scale:
            return s
    raise ValidationError("state has no definite parity")


def apply_v_pair(g: float, p, q):
    """Real core W of the chiral partner operator, V = i W.

    row1 = g p' - xi p + xi q
    row2 = -xi p - g q' + xi q
    """
    p, q = gp.as_coeffs(p), gp.as_coeffs(q)
    cross = gp.add(gp.times_xi(q), -gp.times_xi(p))
    row1 = gp.add(g * gp.poly_derivative(p), cross)
    row2 = gp.add(-g * gp.poly_derivative(q), cross)
    return row1, row2


def apply_v_coeff(g: float, state: PolyGaussianSpinor):
    """Action of V on a state, modulo the global i tag (real pair returned)."""
    _check_same_g(state.g, g)
    return apply_v_pair(g, state.coeffs_a, state.coeffs_b)


def v_spectrum(g: float, n_max: int) -> list[float]:
    """Exact spectrum of V: 0 and +-sqrt(2 g n), ascending."""
    if g <= 0:
        raise ValidationError("requires g > 0")
    if n_max < 0:
        raise ValidationError("n_max must be >= 0")
    vals = [0.0]
    for n in range(1, n_max + 1):
        e = math.sqrt(2.0 * g * n)
        vals.extend((e, -e))
    return sorted(vals)


def discretize_chiral(g: float, xi_max: float, n_points: int) -> np.ndarray:
    """Real antisymmetric grid form W of the chiral partner operator.

    Same grid conventions as ``discretize_linear``; the spectrum of V is the
    set of singular values of W with both signs (i W is hermitian).
    """
    if g <= 0:
        raise ValidationError("requires g > 0")
    if n_points % 2 == 0 or n_points < 3:
        raise ValidationError("n_points must be odd and >= 3")
    xi = np.linspace(-xi_max, xi_max, n_points)
    h = xi[1] - xi[0]
    m = n_points
    d = np.zeros((m, m))
    i = np.arange(m - 1)
    d[i, i + 1] = 1.0 / (2.0 * h)
    d[i + 1, i] = -1.0 / (2.0 * h)
    w = np.zeros((2 * m, 2 * m))
    w[0::2, 0::2] = g * d
    w[1::2, 1::2] = -g * d
    w[0::2, 1::2] = np.diag(xi)
    w[1::2, 0::2] = np.diag(-xi)
    return w


def chiral_grid_spectrum(g: float, xi_max: float, n_points: int, n_max: int) -> np.ndarray:
    """Grid estimate of the 2 n_max + 1 V levels closest to zero, ascending.

    Magnitudes come from the singular values of W.  Each level appears
    several times there (the +- pair plus the grid-alternating mirror
    branch, all split only at the discretization-error scale), so the
    sorted magnitudes are grouped into clusters separated by at least a
    quarter of the smallest analytic level gap, and each cluster reports
    its mean.
    """
    from .errors import ConsistencyError

    w = discretize_chiral(g, xi_max, n_points)
    sv = np.sqrt(np.clip(np.linalg.eigvalsh(w.T @ w), 0.0, None))
    sv.sort()
    min_gap = math.sqrt(2.0 * g) * (math.sqrt(n_max + 1) - math.sqrt(n_max))
    tol = 0.25 * min_gap
    clusters = [[sv[0]]]
    for s in sv[1:]:
        if s - clusters[-1][-1] < tol:
            clusters[-1].append(s)
        else:
            clusters.append([s])
    means = [float(np.mean(c)) for c in clusters]
    if len(means) < n_max + 1:
        raise ConsistencyError("grid too coarse to resolve the requested levels")
    out = [means[0]]
    for s in means[1 : n_max + 1]:
        out.extend((s, -s))
    return np.array(sorted(out))


# ---------------------------------------------------------------------------
# the lam -> -lam partner construction
# ---------------------------------------------------------------------------

def reflected_eigenstate(params: ContinuumParams, n: int, sign: str,
                         norm_convention: str = "unit-total") -> PolyGaussianSpinor:
    """Eigenstate of the companion model with lam replaced by -lam.

    Its spectrum mirrors the original: the nodeless level sits at -lam (so
    (0, '+') is the missing one here) and the n >= 1 levels are unchanged.
    These states feed ``partner_state``.
    """
    if params.degenerate:
        raise ValidationError("g = 0 has no Gaussian states")
    if n == 0 and sign == "+":
        raise MissingStateError("the +lam level is absent from the reflected model")
    energy = level_energy(params, n, sign)
    if n == 0:
        energy = -params.lam
    a, b = _build_coefficients(-params.lam, params.g, n, energy)
    a, b = _normalize(a, b, params.g, norm_convention)
    return PolyGaussianSpinor(params.g, a, b, energy, n, sign, norm_convention)


PARTNER_RESIDUAL_TOL = 1e-11


def partner_state(params: ContinuumParams, state: PolyGaussianSpinor) -> PolyGaussianSpinor:
    """Map an eigenstate built at -lam to the -E eigenstate at +lam.

    Applies xi-parity alone (no component swap).  The nodeless level maps
    to itself, which is reported as ``MissingPartnerError`` rather than
    returned as a (non-)partner.
    """
    _check_same_g(state.g, params.g)
    pa = gp.parity(state.coeffs_a)
    pb = gp.parity(state.coeffs_b)
    scale = gp.max_abs(state.coeffs_a, state.coeffs_b)
    for s in (+1.0, -1.0):
        if gp.max_abs(gp.add(pa, -s * state.coeffs_a), gp.add(pb, -s * state.coeffs_b)) <= 1e-12 * scale:
            raise MissingPartnerError(
                "parity maps this state to itself: the nodeless level has no partner"
            )
    if pa[-1] < 0:
        pa, pb = -pa, -pb
    out = PolyGaussianSpinor(state.g, pa, pb, -state.energy, state.level,
                             "+" if state.energy < 0 else "-", state.norm_convention)
    # verify the defining property against the +lam model
    r1, r2 = apply_h_pair(params.lam, params.g, out.coeffs_a, out.coeffs_b)
    d1 = gp.add(r1, -out.energy * out.coeffs_a)
    d2 = gp.add(r2, -out.energy * out.coeffs_b)
    resid = gp.max_abs(d1, d2) / gp.max_abs(out.coeffs_a, out.coeffs_b)
    if resid > PARTNER_RESIDUAL_TOL:
        raise ValidationError(
            f"input is not an eigenstate of the reflected model: residual {resid:.3e}"
        )
    return out


# ---------------------------------------------------------------------------
# decoupled second-order equations
# ---------------------------------------------------------------------------

SINGULAR_MARGIN = 1e-3


def ode_residual(params: ContinuumParams, energy: float, state: PolyGaussianSpinor,
                 xi_points) -> np.ndarray:
    """Residuals of the two decoupled second-order equations, shape (2, npts).

    Component 1 obeys  f'' + f'/(E - xi) + [(E^2 - xi^2 - lam^2)/g^2
    + lam/(g (E - xi))] f = 0, singular at xi = +E; component 2 the same
    with (E - xi) -> (E + xi), singular at xi = -E.  Points closer than
    1e-3 to a singularity are rejected.
    """
    _check_same_g(state.g, params.g)
    xi = np.atleast_1d(np.asarray(xi_points, dtype=float))
    lam, g = params.lam, params.g
    if np.abs(xi - energy).min(initial=np.inf) < SINGULAR_MARGIN:
        raise SingularPointError("a sample point is within 1e-3 of xi = +E")
    if np.abs(xi + energy).min(initial=np.inf) < SINGULAR_MARGIN:
        raise SingularPointError("a sample point is within 1e-3 of xi = -E")
    common = (energy**2 - xi**2 - lam**2) / g**2
    f1, d1, dd1 = gp.evaluate_with_derivatives(state.coeffs_a, g, xi)
    r1 = dd1 + d1 / (energy - xi) + (common + lam / (g * (energy - xi))) * f1
    f2, d2, dd2 = gp.evaluate_with_derivatives(state.coeffs_b, g, xi)
    r2 = dd2 - d2 / (energy + xi) + (common + lam / (g * (energy + xi))) * f2
    return np.abs(np.vstack([r1, r2]))


# ---------------------------------------------------------------------------
# aggregate report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryReport:
    """Residuals of the operator identities plus per-level structure checks."""

    commutator_residual_P: float
    anticommutator_residual_V: float
    parity_signs: list[int] = field(default_factory=list)
    partner_energy_checks: list[tuple[float, float, float]] = field(default_factory=list)


def _random_pairs(rng, count: int, max_degree: int):
    for _ in range(count):
        dp = int(rng.integers(0, max_degree + 1))
        dq = int(rng.integers(0, max_degree + 1))
        yield rng.standard_normal(dp + 1), rng.standard_normal(dq + 1)


def commutator_p_residual(params: ContinuumParams, p, q) -> float:
    """max |(H P - P H) psi| over coefficients for one spinor psi = (p, q)."""
    lam, g = params.lam, params.g
    hp1, hp2 = apply_h_pair(lam, g, gp.parity(q), gp.parity(p))
    h1, h2 = apply_h_pair(lam, g, p, q)
    ph1, ph2 = gp.parity(h2), gp.parity(h1)
    return gp.max_abs(gp.add(hp1, -ph1), gp.add(hp2, -ph2))


def anticommutator_v_residual(params: ContinuumParams, p, q) -> float:
    """max |(H W + W H) psi| over coefficients, W being V without the i tag."""
    lam, g = params.lam, params.g
    w1, w2 = apply_v_pair(g, p, q)
    hw1, hw2 = apply_h_pair(lam, g, w1, w2)
    h1, h2 = apply_h_pair(lam, g, p, q)
    wh1, wh2 = apply_v_pair(g, h1, h2)
    return gp.max_abs(gp.add(hw1, wh1), gp.add(hw2, wh2))


def symmetry_report(params: ContinuumParams, n_max: int, *, trials: int = 20,
                    max_degree: int = 6, seed: int = 20260810) -> SymmetryReport:
    """Deterministic identity checks on random spinors and built eigenstates."""
    from .continuum import build_eigenstate  # local import, cycle-free

    rng = np.random.default_rng(seed)
    res_p = res_v = 0.0
    for p, q in _random_pairs(rng, trials, max_degree):
        res_p = max(res_p, commutator_p_residual(params, p, q))
        res_v = max(res_v, anticommutator_v_residual(params, p, q))
    signs = []
    for n in range(n_max + 1):
        state = build_eigenstate(params, n, "+" if n == 0 else "-")
        signs.append(parity_eigenvalue(state))
    checks = []
    for n in range(1, n_max + 1):
        reflected = reflected_eigenstate(params, n, "+")
        partner = partner_state(params, reflected)
        r1, r2 = apply_h_pair(params.lam, params.g, partner.coeffs_a, partner.coeffs_b)
        resid = gp.max_abs(
            gp.add(r1, -partner.energy * partner.coeffs_a),
            gp.add(r2, -partner.energy * partner.coeffs_b),
        ) / gp.max_abs(partner.coeffs_a, partner.coeffs_b)
        checks.append((level_energy(params, n, "+"), partner.energy, resid))
    return SymmetryReport(res_p, res_v, signs, checks)
