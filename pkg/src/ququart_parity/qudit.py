"""Complex state-vector and unitary-matrix algebra for d-level systems.

Basis kets are numbered |1>..|d> in every public signature; storage is
zero-based numpy arrays.  All values are immutable after construction, so
they can be shared freely between threads.
"""

from dataclasses import dataclass
from functools import cache

import numpy as np

# Tolerance for construction and round-trip checks on user-supplied data.
NORM_TOL = 1e-10
# Tolerance for pure-arithmetic identities on our own small (<=16x16) products.
ARITHMETIC_TOL = 1e-12


def _as_complex_array(values):
    arr = np.array(values, dtype=np.complex128)
    if not (np.isfinite(arr.real).all() and np.isfinite(arr.imag).all()):
        raise ValueError("amplitudes must be finite (no NaN/Inf components)")
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm vector of complex amplitudes for a d-level system."""

    amps: np.ndarray

    def __post_init__(self):
        arr = _as_complex_array(self.amps)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("state vector must be a nonempty 1-d array")
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector norm {norm} deviates from 1 by more than {NORM_TOL}")
        arr.setflags(write=False)
        object.__setattr__(self, "amps", arr)

    @property
    def dim(self) -> int:
        return self.amps.size

    def amp(self, j: int) -> complex:
        """Amplitude on basis ket |j>, one-based."""
        if not 1 <= j <= self.dim:
            raise ValueError(f"basis index {j} outside 1..{self.dim}")
        return complex(self.amps[j - 1])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    @classmethod
    def normalized(cls, values) -> "StateVector":
        """Build a state from arbitrary nonzero amplitudes, normalizing them."""
        arr = _as_complex_array(values)
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise ValueError("cannot normalize an all-zero vector")
        return cls(arr / norm)


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Square complex matrix validated to be unitary at construction."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_complex_array(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError("unitary must be a nonempty square matrix")
        deviation = np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0])))
        if deviation > NORM_TOL:
            raise ValueError(f"matrix is not unitary: max |U^dag U - I| = {deviation}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        if not isinstance(other, UnitaryMatrix):
            return NotImplemented
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return UnitaryMatrix(self.entries @ other.entries)


def basis_state(j: int, d: int) -> StateVector:
    """Computational basis ket |j> in dimension d, one-based."""
    if d < 1:
        raise ValueError("dimension must be a positive integer")
    if not 1 <= j <= d:
        raise ValueError(f"basis index {j} outside 1..{d}")
    amps = np.zeros(d, dtype=np.complex128)
    amps[j - 1] = 1.0
    return StateVector(amps)


@cache
def qft_matrix(d: int) -> UnitaryMatrix:
    """Discrete Fourier transform unitary: entries[j, k] = omega^(jk) / sqrt(d).

    omega = exp(2*pi*i/d), indices zero-based.  Columns are the phase
    eigenstates of the cyclic shift |x> -> |x+1 mod d>.
    """
    if d < 1:
        raise ValueError("dimension must be a positive integer")
    jk = np.outer(np.arange(d), np.arange(d))
    return UnitaryMatrix(np.exp(2j * np.pi * jk / d) / np.sqrt(d))


def apply(u: UnitaryMatrix, s: StateVector) -> StateVector:
    """Matrix-vector product u @ s as a new StateVector."""
    if u.dim != s.dim:
        raise ValueError(f"dimension mismatch: unitary is {u.dim}, state is {s.dim}")
    return StateVector(u.entries @ s.amps)


def dagger(u: UnitaryMatrix) -> UnitaryMatrix:
    """Conjugate transpose (the inverse, for a unitary)."""
    return UnitaryMatrix(u.entries.conj().T)


def fourier_state(j: int, d: int) -> StateVector:
    """Fourier basis state: the DFT applied to basis ket |j> (one-based)."""
    if not 1 <= j <= d:
        raise ValueError(f"basis index {j} outside 1..{d}")
    return apply(qft_matrix(d), basis_state(j, d))


def _raw(value):
    if isinstance(value, StateVector):
        return value.amps
    if isinstance(value, UnitaryMatrix):
        return value.entries
    raise TypeError(f"expected StateVector or UnitaryMatrix, got {type(value).__name__}")


def equal_up_to_global_phase(a, b, tol: float = NORM_TOL):
    """Test whether a == c * b for some unit-modulus scalar c.

    Both operands must be StateVectors or both UnitaryMatrix.  The scalar is
    fitted from the largest-magnitude entry of ``b`` (avoids dividing by
    near-zero amplitudes).  Returns ``(True, c)`` on success and
    ``(False, None)`` otherwise; ``b`` must not be all zero.
    """
    xa, xb = _raw(a), _raw(b)
    if type(a) is not type(b):
        raise TypeError("operands must be of the same kind")
    if xa.shape != xb.shape:
        raise ValueError(f"shape mismatch: {xa.shape} vs {xb.shape}")
    mags = np.abs(xb)
    if mags.max() == 0:
        raise ValueError("reference operand is all zero; phase is undefined")
    idx = np.argmax(mags)
    c = complex(xa.flat[idx] / xb.flat[idx])
    if abs(abs(c) - 1.0) > tol:
        return False, None
    if np.max(np.abs(xa - c * xb)) > tol:
        return False, None
    return True, c
