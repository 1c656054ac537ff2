"""Construction of finite isospectrally patterned lattices (IPL).

The lattice is a chain of N two-level cells.  Every cell shares the same
spectrum {d1, d2}; cell m is rotated by an angle phi_m,

    A_m = O(phi_m) diag(d1, d2) O(phi_m)^{-1},

and neighbouring cells are coupled through the corner block
C = [[0, eps0], [0, 0]] placed at block position (m+1, m), its transpose
at (m, m+1).  Subtracting the trace part and rescaling by 2/(d1-d2) turns
every cell into the traceless involution

    A_m -> [[cos 2phi_m, sin 2phi_m], [sin 2phi_m, -cos 2phi_m]]

with the rescaled coupling eps = 2 eps0 / (d1 - d2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCellError, ValidationError


@dataclass(frozen=True)
class AngleProfile:
    """Ordered cell angles phi_m in radians."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValidationError("angle profile must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(v)):
            raise ValidationError("angle profile contains non-finite entries")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    @property
    def step(self) -> float:
        """Mean angle increment between consecutive cells."""
        if len(self) < 2:
            raise ValidationError("angle step undefined for a single cell")
        return float((self.values[-1] - self.values[0]) / (len(self) - 1))


def equidistant_angles(n_cells: int) -> AngleProfile:
    """Equidistant angles from pi/8 to 3pi/8 inclusive, centered on pi/4.

    phi_m = pi/8 + (m-1)/(N-1) * pi/4 for m = 1..N.
    """
    if n_cells < 2:
        raise ValidationError("equidistant profile needs at least 2 cells")
    m = np.arange(n_cells, dtype=float)
    return AngleProfile(np.pi / 8 + m / (n_cells - 1) * (np.pi / 4))


@dataclass(frozen=True)
class LatticeSpec:
    """Full parameter set of a finite lattice.

    d1 = 1, d2 = -1 is the documented default, for which the full and the
    reduced Hamiltonians coincide.
    """

    n_cells: int
    angles: AngleProfile
    coupling0: float = 0.0
    d1: float = 1.0
    d2: float = -1.0
    lattice_constant: float = 1.0

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValidationError("n_cells must be positive")
        if len(self.angles) != self.n_cells:
            raise ValidationError(
                f"profile has {len(self.angles)} angles for {self.n_cells} cells"
            )
        for name in ("coupling0", "d1", "d2", "lattice_constant"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if self.coupling0 < 0:
            raise ValidationError("coupling0 must be >= 0")
        if self.lattice_constant <= 0:
            raise ValidationError("lattice_constant must be > 0")

    @classmethod
    def equidistant(cls, n_cells, coupling0=0.0, d1=1.0, d2=-1.0, lattice_constant=1.0):
        return cls(n_cells, equidistant_angles(n_cells), coupling0, d1, d2, lattice_constant)

    @property
    def reduced_coupling(self) -> float:
        """eps = 2 eps0 / (d1 - d2); requires d1 != d2."""
        if self.d1 == self.d2:
            raise DegenerateCellError("d1 == d2: reduced rescaling undefined")
        return 2.0 * self.coupling0 / (self.d1 - self.d2)


@dataclass(frozen=True)
class BlockTridiagonal:
    """Real symmetric block-tridiagonal matrix of 2x2 cells.

    ``upper_blocks[m]`` sits at block position (m+1, m); the (m, m+1) block
    is its transpose, so the dense expansion is symmetric by construction.
    """

    n_cells: int
    diag_blocks: np.ndarray      # (N, 2, 2)
    upper_blocks: np.ndarray     # (N-1, 2, 2)
    reduced: bool = False

    def __post_init__(self):
        d = np.asarray(self.diag_blocks, dtype=float)
        u = np.asarray(self.upper_blocks, dtype=float)
        if d.shape != (self.n_cells, 2, 2):
            raise ValidationError("diag_blocks must have shape (N, 2, 2)")
        if u.shape != (max(self.n_cells - 1, 0), 2, 2):
            raise ValidationError("upper_blocks must have shape (N-1, 2, 2)")
        if np.abs(d - d.transpose(0, 2, 1)).max(initial=0.0) > 0.0:
            raise ValidationError("diagonal blocks must be symmetric")
        d, u = d.copy(), u.copy()
        d.flags.writeable = False
        u.flags.writeable = False
        object.__setattr__(self, "diag_blocks", d)
        object.__setattr__(self, "upper_blocks", u)

    def dense(self) -> np.ndarray:
        """Dense 2N x 2N view, cell-major ordering (cell m -> rows 2m, 2m+1)."""
        n = self.n_cells
        h = np.zeros((2 * n, 2 * n))
        for m in range(n):
            h[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = self.diag_blocks[m]
        for m in range(n - 1):
            h[2 * (m + 1) : 2 * (m + 1) + 2, 2 * m : 2 * m + 2] = self.upper_blocks[m]
            h[2 * m : 2 * m + 2, 2 * (m + 1) : 2 * (m + 1) + 2] = self.upper_blocks[m].T
        return h


def cell_block(phi: float, d1: float, d2: float) -> np.ndarray:
    """Rotated cell block O(phi) diag(d1,d2) O(phi)^{-1}."""
    c, s = np.cos(phi), np.sin(phi)
    off = (d1 - d2) * c * s
    return np.array([[d1 * c * c + d2 * s * s, off], [off, d1 * s * s + d2 * c * c]])


def build_full_hamiltonian(spec: LatticeSpec) -> BlockTridiagonal:
    """Assemble the unreduced lattice Hamiltonian."""
    diag = np.stack([cell_block(p, spec.d1, spec.d2) for p in spec.angles.values])
    coupler = np.array([[0.0, spec.coupling0], [0.0, 0.0]])
    upper = np.broadcast_to(coupler, (max(spec.n_cells - 1, 0), 2, 2)).copy()
    return BlockTridiagonal(spec.n_cells, diag, upper, reduced=False)


def build_reduced_hamiltonian(spec: LatticeSpec) -> BlockTridiagonal:
    """Trace-subtracted, rescaled Hamiltonian with involutive cell blocks.

    Equals (full - (d1+d2)/2 * I) * 2/(d1-d2); the diagonal blocks become
    [[cos 2phi, sin 2phi], [sin 2phi, -cos 2phi]] and the coupling
    eps = 2 eps0 / (d1 - d2).
    """
    eps = spec.reduced_coupling
    phi = spec.angles.values
    c2, s2 = np.cos(2 * phi), np.sin(2 * phi)
    diag = np.empty((spec.n_cells, 2, 2))
    diag[:, 0, 0] = c2
    diag[:, 1, 1] = -c2
    diag[:, 0, 1] = diag[:, 1, 0] = s2
    coupler = np.array([[0.0, eps], [0.0, 0.0]])
    upper = np.broadcast_to(coupler, (max(spec.n_cells - 1, 0), 2, 2)).copy()
    return BlockTridiagonal(spec.n_cells, diag, upper, reduced=True)
