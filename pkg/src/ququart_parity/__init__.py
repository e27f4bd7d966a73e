"""Simulation of a one-query permutation-parity measurement on a photonic ququart.

Eight permutation black boxes (the dihedral group on four elements) are
modeled twice over: as abstract unitaries and as compositions of Dove
prism, wave plates and beam splitters.  A Fourier-probe algorithm reads the
box parity in a single oracle call; the photon-counting layer reproduces
the interference fringes and contrast statistics such an experiment
records at the detectors.
"""

from .counting import (
    ContrastReport,
    FringeFit,
    FringeFitError,
    FringeScan,
    MarkedPhase,
    NoiseParams,
    SourceParams,
    UndefinedContrastError,
    calibrate_volts_per_2pi,
    contrast_ratio,
    contrast_report,
    contrast_stderr,
    fit_fringe,
    majority_parity,
    marked_phase_reports,
    marked_phases,
    noisy_probabilities,
    sample_counts,
    scan_fringe,
)
from .optics import (
    BeamSplitter,
    BlackBoxConfig,
    DovePrism,
    HalfWavePlate,
    ModeLabel,
    NonUnitaryElementError,
    OpticalTable,
    PhaseShifter,
    Polarizer,
    black_box_unitary,
    config_for,
    decode,
    detect_probabilities,
    element_unitary,
    encode,
    prepare_input,
    run_box,
)
from .oracle import (
    BOXES,
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    NotInOracleFamilyError,
    OracleHandle,
    Parity,
    Permutation,
    UnsupportedProbeError,
    box,
    box_number,
    classical_parity,
    parity,
    permutation_matrix,
    quantum_parity_single_query,
    single_query_ambiguity_witness,
)
from .qudit import (
    StateVector,
    UnitaryMatrix,
    apply,
    basis_state,
    dagger,
    equal_up_to_global_phase,
    fourier_state,
    qft_matrix,
)

__version__ = "0.1.0"
