"""Linear-optics realization of the eight permutation boxes.

A single photon carries a four-level system encoded in polarization (H/V)
and spatial path (l/r):

    |H,l> -> |1>,  |H,r> -> |2>,  |V,l> -> |3>,  |V,r> -> |4>

The black box is built from a Dove prism (swaps the paths) and half-wave
plates at 45 degrees (swap the polarization in one path).  The input is a
Mach-Zehnder-style superposition whose relative path phase phi is set by a
piezo actuator; after the box, the paths interfere on a 50:50 splitter and
the click statistics of the two output detectors reveal the box parity.
"""

from dataclasses import dataclass
from functools import cache

import numpy as np

from .qudit import NORM_TOL, StateVector, UnitaryMatrix, apply

POLARIZATIONS = ("H", "V")
PATHS = ("l", "r")

_PATH_SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
_PROJ = {"l": np.diag([1.0, 0.0]), "r": np.diag([0.0, 1.0])}


class NonUnitaryElementError(ValueError):
    """Element is projective and has no unitary transfer matrix."""


@dataclass(frozen=True)
class ModeLabel:
    """(polarization, path) label of one ququart basis mode."""

    pol: str
    path: str

    def __post_init__(self):
        if self.pol not in POLARIZATIONS:
            raise ValueError(f"polarization must be H or V, got {self.pol!r}")
        if self.path not in PATHS:
            raise ValueError(f"path must be l or r, got {self.path!r}")


def encode(m: ModeLabel) -> int:
    """Basis index (1..4) of a mode label."""
    return 1 + 2 * POLARIZATIONS.index(m.pol) + PATHS.index(m.path)


def decode(j: int) -> ModeLabel:
    """Mode label of basis index j in 1..4."""
    if not 1 <= j <= 4:
        raise ValueError(f"basis index {j} outside 1..4")
    return ModeLabel(POLARIZATIONS[(j - 1) // 2], PATHS[(j - 1) % 2])


@dataclass(frozen=True)
class DovePrism:
    """Dove prism at 0 degrees: exchanges the two spatial paths."""


@dataclass(frozen=True)
class HalfWavePlate:
    """Half-wave plate at ``angle_deg`` acting on one path or both.

    At 45 degrees it swaps H and V.  At 0 degrees it is modeled as the
    identity: the plate at that angle is only ever inserted to compensate
    the optical thickness of the plate in the other arm, and that phase is
    dropped along with all other global phases.
    """

    angle_deg: float
    path: str = "both"

    def __post_init__(self):
        if not 0.0 <= self.angle_deg < 180.0:
            raise ValueError(f"wave plate angle {self.angle_deg} outside [0, 180)")
        if self.path not in ("l", "r", "both"):
            raise ValueError(f"path must be l, r or both, got {self.path!r}")


@dataclass(frozen=True)
class PhaseShifter:
    """Piezo-driven phase e^(i*phi) on one path (the r arm in the setup)."""

    phi: float
    path: str = "r"

    def __post_init__(self):
        if not np.isfinite(self.phi):
            raise ValueError("phase must be finite")
        if self.path not in PATHS:
            raise ValueError(f"path must be l or r, got {self.path!r}")


@dataclass(frozen=True)
class BeamSplitter:
    """Symmetric 50:50 splitter on the spatial modes (i phase on reflection)."""


@dataclass(frozen=True)
class Polarizer:
    """Projective polarizer; only used in state preparation, never as a unitary."""

    angle_deg: float


OpticalElement = DovePrism | HalfWavePlate | PhaseShifter | BeamSplitter | Polarizer


def _hwp_jones(angle_deg: float) -> np.ndarray:
    if angle_deg == 0.0:
        return np.eye(2)  # compensation-plate convention, see HalfWavePlate
    if angle_deg == 45.0:
        return np.array([[0.0, 1.0], [1.0, 0.0]])
    two_theta = np.deg2rad(2.0 * angle_deg)
    c, s = np.cos(two_theta), np.sin(two_theta)
    return np.array([[c, s], [s, -c]])


def element_unitary(e: OpticalElement) -> UnitaryMatrix:
    """4x4 transfer matrix of one element on the polarization (x) path space."""
    if isinstance(e, DovePrism):
        return UnitaryMatrix(np.kron(np.eye(2), _PATH_SWAP))
    if isinstance(e, HalfWavePlate):
        jones = _hwp_jones(e.angle_deg)
        if e.path == "both":
            return UnitaryMatrix(np.kron(jones, np.eye(2)))
        other = "r" if e.path == "l" else "l"
        return UnitaryMatrix(np.kron(jones, _PROJ[e.path]) + np.kron(np.eye(2), _PROJ[other]))
    if isinstance(e, PhaseShifter):
        phase = np.eye(2, dtype=complex)
        phase[PATHS.index(e.path), PATHS.index(e.path)] = np.exp(1j * e.phi)
        return UnitaryMatrix(np.kron(np.eye(2), phase))
    if isinstance(e, BeamSplitter):
        bs = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)
        return UnitaryMatrix(np.kron(np.eye(2), bs))
    if isinstance(e, Polarizer):
        raise NonUnitaryElementError("a polarizer is projective; model it in state preparation")
    raise TypeError(f"unknown optical element {type(e).__name__}")


@dataclass(frozen=True)
class OpticalTable:
    """Ordered elements, applied left to right in propagation order."""

    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def unitary(self) -> UnitaryMatrix:
        u = np.eye(4, dtype=np.complex128)
        for e in self.elements:
            u = element_unitary(e).entries @ u
        return UnitaryMatrix(u)


@dataclass(frozen=True)
class BlackBoxConfig:
    """Which of the three insertable elements are present in the box."""

    dp: bool
    hwp1: bool  # 45-degree plate in path l
    hwp2: bool  # 45-degree plate in path r


_CONFIG_TABLE = {
    1: BlackBoxConfig(dp=False, hwp1=False, hwp2=False),
    2: BlackBoxConfig(dp=True, hwp1=True, hwp2=False),
    3: BlackBoxConfig(dp=False, hwp1=True, hwp2=True),
    4: BlackBoxConfig(dp=True, hwp1=False, hwp2=True),
    5: BlackBoxConfig(dp=True, hwp1=True, hwp2=True),
    6: BlackBoxConfig(dp=False, hwp1=True, hwp2=False),
    7: BlackBoxConfig(dp=True, hwp1=False, hwp2=False),
    8: BlackBoxConfig(dp=False, hwp1=False, hwp2=True),
}


def config_for(k: int) -> BlackBoxConfig:
    """Element configuration realizing box k (1..8)."""
    if k not in _CONFIG_TABLE:
        raise ValueError(f"box number {k} outside 1..8")
    return _CONFIG_TABLE[k]


@cache
def black_box_unitary(c: BlackBoxConfig) -> UnitaryMatrix:
    """Composed transfer matrix of a box: Dove prism first, then the plates.

    The two 45-degree plates act on disjoint paths and commute.  A lone
    45-degree plate is accompanied by a 0-degree compensation plate in the
    other arm (an identity under the phase convention used here).
    """
    elements = []
    if c.dp:
        elements.append(DovePrism())
    if c.hwp1:
        elements.append(HalfWavePlate(45.0, "l"))
    if c.hwp2:
        elements.append(HalfWavePlate(45.0, "r"))
    if c.hwp1 != c.hwp2:
        elements.append(HalfWavePlate(0.0, "r" if c.hwp1 else "l"))
    return OpticalTable(tuple(elements)).unitary()


def prepare_input(phi: float) -> StateVector:
    """Input state behind the first splitter, with path phase phi on the r arm.

    (|H,l> + e^(i*phi) |H,r> - |V,l> - e^(i*phi) |V,r>) / 2.  At phi = pi/2
    this is the Fourier probe state psi_2; at phi = 3*pi/2 it is psi_4.
    """
    if not np.isfinite(phi):
        raise ValueError("phase must be finite")
    z = np.exp(1j * phi)
    return StateVector(np.array([1.0, z, -1.0, -z]) / 2.0)


def detect_probabilities(s: StateVector):
    """Click probabilities (p_d1, p_d2) after the recombining 50:50 splitter.

    Per polarization, D1 projects onto (|l> - i|r>)/sqrt(2) and D2 onto
    (|l> + i|r>)/sqrt(2).  This is the splitter phase choice under which an
    even box at phi = pi/2 sends all light to D2 and an odd box to D1.
    """
    if s.dim != 4:
        raise ValueError(f"expected a 4-mode state, got dimension {s.dim}")
    if abs(np.linalg.norm(s.amps) - 1.0) > NORM_TOL:
        raise ValueError("input state is not normalized")
    a_l = s.amps[[0, 2]]
    a_r = s.amps[[1, 3]]
    p_d1 = float(np.sum(np.abs(a_l + 1j * a_r) ** 2) / 2.0)
    p_d2 = float(np.sum(np.abs(a_l - 1j * a_r) ** 2) / 2.0)
    return p_d1, p_d2


def run_box(k: int, phi: float) -> StateVector:
    """State after sending the phi-phased input through box k."""
    return apply(black_box_unitary(config_for(k)), prepare_input(phi))
