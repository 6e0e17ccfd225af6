"""Density matrices and state-level measures.

Complex linear-algebra substrate used by every other module: validated
density matrices, partial trace, von Neumann entropy, the Helstrom error
probability for discriminating two equiprobable states, the two-qubit
spin flip and the concurrence entanglement monotone.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._errors import DimensionError, ValidationError

__all__ = [
    "TOL_HERM",
    "TOL_PSD",
    "TOL_TRACE",
    "DensityMatrix",
    "PureState",
    "SubsystemSplit",
    "ValidationError",
    "DimensionError",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "partial_trace",
    "von_neumann_entropy",
    "error_probability",
    "spin_flip",
    "concurrence",
    "hermitize",
    "haar_state",
    "haar_unitary",
    "random_density_matrix",
]

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_TRACE = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def hermitize(matrix: np.ndarray) -> np.ndarray:
    """(M + M†)/2, suppressing round-off drift before spectral calls."""
    matrix = np.asarray(matrix, dtype=complex)
    return (matrix + matrix.conj().T) / 2.0


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace complex matrix.

    The stored matrix is symmetrized on construction; Hermiticity, trace
    and positivity are enforced within the module tolerances.
    """

    matrix: np.ndarray
    tol_psd: float = field(default=TOL_PSD, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        if np.abs(m - m.conj().T).max() > TOL_HERM:
            raise ValidationError("matrix is not Hermitian within tolerance")
        m = hermitize(m)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TOL_TRACE:
            raise ValidationError(f"trace {tr} differs from 1 beyond tolerance")
        if np.linalg.eigvalsh(m).min() < -self.tol_psd:
            raise ValidationError("matrix has negative eigenvalues beyond tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, amplitudes: np.ndarray) -> "DensityMatrix":
        v = np.asarray(amplitudes, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if abs(n - 1.0) > 1e-8:
            raise ValidationError(f"pure state norm {n} differs from 1")
        return cls(np.outer(v, v.conj()) / n**2)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    def eigenvalues(self) -> np.ndarray:
        """Real spectrum, ascending, with small negatives clipped to 0."""
        ev = np.linalg.eigvalsh(self.matrix)
        return np.where((ev < 0) & (ev > -self.tol_psd), 0.0, ev)


@dataclass(frozen=True)
class PureState:
    """Normalized complex state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if abs(n - 1.0) > TOL_TRACE * 1e2:
            raise ValidationError(f"state norm {n} differs from 1")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class SubsystemSplit:
    """Tensor factorization of a Hilbert space plus the factors to keep."""

    dims: tuple
    keep: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        keep = tuple(sorted(int(k) for k in self.keep))
        if any(d < 1 for d in dims):
            raise DimensionError("factor dimensions must be positive")
        if any(k < 0 or k >= len(dims) for k in keep) or len(set(keep)) != len(keep):
            raise DimensionError(f"keep indices {keep} invalid for {len(dims)} factors")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "keep", keep)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def kept_dim(self) -> int:
        return int(np.prod([self.dims[k] for k in self.keep]))


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    if isinstance(rho, PureState):
        return rho.density().matrix
    return np.asarray(rho, dtype=complex)


def partial_trace(rho, split: SubsystemSplit) -> DensityMatrix:
    """Trace out the factors not listed in split.keep.

    Parameters
    ----------
    rho : DensityMatrix or ndarray
        State on the full tensor-product space.
    split : SubsystemSplit
        Factor dimensions and which factors survive.
    """
    m = _as_matrix(rho)
    dims = split.dims
    if m.shape[0] != split.total_dim:
        raise DimensionError(
            f"state dim {m.shape[0]} != product of factors {split.total_dim}")
    n = len(dims)
    t = m.reshape(dims + dims)
    # einsum with integer subscripts: traced factors share row/col labels
    row_sub = list(range(n))
    col_sub = [i if i not in split.keep else n + i for i in range(n)]
    out_sub = [i for i in split.keep] + [n + i for i in split.keep]
    out = np.einsum(t, row_sub + col_sub, out_sub)
    d = split.kept_dim
    return DensityMatrix(hermitize(out.reshape(d, d)))


def von_neumann_entropy(rho, base: str | int = "e") -> float:
    """-tr(rho log rho); eigenvalues within tol_psd of 0 contribute nothing.

    base 'e' (natural log, nats) or 2 (bits).
    """
    m = _as_matrix(rho)
    tol = rho.tol_psd if isinstance(rho, DensityMatrix) else TOL_PSD
    ev = np.linalg.eigvalsh(hermitize(m))
    if ev.min() < -tol:
        raise ValidationError("state has negative eigenvalues beyond tolerance")
    ev = np.clip(ev, 0.0, None)
    ev = ev[ev > 0.0]
    s = float(-(ev * np.log(ev)).sum())
    if base == 2 or base == "2":
        return s / np.log(2.0)
    if base == "e":
        return s
    raise ValueError(f"unsupported log base {base!r}")


def error_probability(rho1, rho2) -> float:
    """Minimum error probability for discriminating two equiprobable states.

    Returns 1/2 - tr|rho1 - rho2|/4: zero for orthogonal pure states, 1/2
    for identical states.
    """
    m1, m2 = _as_matrix(rho1), _as_matrix(rho2)
    if m1.shape != m2.shape:
        raise DimensionError(f"shape mismatch {m1.shape} vs {m2.shape}")
    ev = np.linalg.eigvalsh(hermitize(m1 - m2))
    pe = 0.5 - 0.25 * np.abs(ev).sum()
    return float(min(max(pe, 0.0), 0.5))


def spin_flip(rho) -> DensityMatrix:
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y) on a two-qubit state."""
    m = _as_matrix(rho)
    if m.shape != (4, 4):
        raise DimensionError("spin flip is defined for 4x4 two-qubit states")
    syy = np.kron(SIGMA_Y, SIGMA_Y)
    return DensityMatrix(syy @ m.conj() @ syy)


def _sqrtm_psd(m: np.ndarray, tol: float = TOL_PSD) -> np.ndarray:
    ev, vec = np.linalg.eigh(hermitize(m))
    if ev.min() < -tol:
        raise ValidationError("matrix not PSD within tolerance")
    ev = np.clip(ev, 0.0, None)
    return (vec * np.sqrt(ev)) @ vec.conj().T


def concurrence(rho) -> float:
    """Two-qubit concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are the descending eigenvalues of [sqrt(rho) rho~ sqrt(rho)]^(1/2)
    with rho~ the spin-flipped state.
    """
    m = _as_matrix(rho)
    if m.shape != (4, 4):
        raise DimensionError("concurrence is defined for 4x4 two-qubit states")
    root = _sqrtm_psd(m)
    flipped = spin_flip(m).matrix
    inner = hermitize(root @ flipped @ root)
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(inner), 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


# ---------------------------------------------------------------------------
# seeded sampling helpers used by property tests and Monte-Carlo checks

def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density_matrix(dim: int, rng: np.random.Generator,
                          rank: int | None = None) -> DensityMatrix:
    """Random mixed state: normalized GG† with G Ginibre of the given rank."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)
