"""Photon-counting statistics: attenuated source, fringe scans, fits, contrast.

The source is a deeply attenuated coherent beam (mean photon number
alpha^2 per pulse, alpha ~ 0.1), so detector counts per scan step are
Poisson.  Imperfections are phenomenological: a multiplicative fringe
visibility and a per-box systematic phase offset.  Scans are deterministic
for a fixed seed; every step draws from an independent sub-seed, so serial
and parallel evaluation produce identical counts.
"""

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .oracle import Parity
from .optics import detect_probabilities, run_box

LAMBDA_GUARD = 1e9  # refuse absurd Poisson means before they overflow


class UndefinedContrastError(ValueError):
    """Contrast ratio of two zero counts."""


class FringeFitError(RuntimeError):
    """Fringe fit cannot be performed on this scan."""


@dataclass(frozen=True)
class SourceParams:
    """Attenuated coherent source plus detection efficiency."""

    alpha: float = 0.1
    pulses_per_step: int = 1_000_000
    detector_efficiency: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ValueError("alpha must be finite and non-negative")
        if self.pulses_per_step < 1:
            raise ValueError("pulses_per_step must be positive")
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise ValueError("detector_efficiency must lie in (0, 1]")
        if self.alpha**2 > 0.25:
            warnings.warn(
                f"mean photon number per pulse {self.alpha ** 2:.3g} exceeds 0.25; "
                "multi-photon events are no longer negligible",
                stacklevel=2,
            )

    @property
    def mean_photons_per_pulse(self) -> float:
        return self.alpha**2

    @property
    def mean_counts_per_step(self) -> float:
        """Expected clicks per step at unit detection probability, before darks."""
        return self.pulses_per_step * self.alpha**2 * self.detector_efficiency


@dataclass(frozen=True)
class NoiseParams:
    """Fringe visibility, per-box systematic phase shift, dark counts."""

    visibility: float = 1.0
    phase_offset: float = 0.0
    dark_rate: float = 0.0  # expected dark counts per step, per detector

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError("visibility must lie in [0, 1]")
        if not np.isfinite(self.phase_offset):
            raise ValueError("phase_offset must be finite")
        if not (np.isfinite(self.dark_rate) and self.dark_rate >= 0.0):
            raise ValueError("dark_rate must be finite and non-negative")


def noisy_probabilities(k: int, phi: float, noise: NoiseParams):
    """Detector probabilities of box k with the visibility envelope applied.

    p_i = 1/2 + visibility * (p_i_ideal(k, phi + phase_offset) - 1/2);
    the noiseless limit (visibility 1, offset 0) reproduces the ideal case.
    """
    p1, p2 = detect_probabilities(run_box(k, phi + noise.phase_offset))
    v = noise.visibility
    return 0.5 + v * (p1 - 0.5), 0.5 + v * (p2 - 0.5)


def sample_counts(p: float, src: SourceParams, rng_seed: int, dark_rate: float = 0.0) -> int:
    """One Poisson draw of detector counts at click probability p.

    The mean is pulses_per_step * alpha^2 * efficiency * p plus the dark
    contribution.  Identical (inputs, seed) give identical counts.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    lam = src.mean_counts_per_step * p + dark_rate
    if lam > LAMBDA_GUARD:
        raise ValueError(f"Poisson mean {lam:.3g} exceeds the overflow guard {LAMBDA_GUARD:.0e}")
    rng = np.random.default_rng(rng_seed)
    return int(rng.poisson(lam))


def _step_seed(seed: int, step: int, detector: int) -> int:
    # Independent stream per (scan, step, detector); order of evaluation
    # cannot change the counts.
    return int(np.random.SeedSequence((seed, step, detector)).generate_state(1)[0])


class MarkedPhase(Enum):
    """The two families of discrimination phases on the fringe.

    PSI2 marks phi = (2N + 1/2)*pi, where the input equals the Fourier
    probe psi_2 and even boxes drive D2.  PSI4 marks phi = (2N + 3/2)*pi,
    where the input equals psi_4 and the detector roles swap.
    """

    PSI2 = "psi2"
    PSI4 = "psi4"


def marked_phases(phase_min: float, phase_max: float):
    """All discrimination phases inside [phase_min, phase_max], in order."""
    eps = 1e-9
    points = []
    n_lo = int(np.floor((phase_min - np.pi / 2) / (2 * np.pi))) - 1
    n_hi = int(np.ceil((phase_max - np.pi / 2) / (2 * np.pi))) + 1
    for n in range(n_lo, n_hi + 1):
        for kind, offset in ((MarkedPhase.PSI2, 0.5), (MarkedPhase.PSI4, 1.5)):
            phase = (2 * n + offset) * np.pi
            if phase_min - eps <= phase <= phase_max + eps:
                points.append((kind, phase))
    points.sort(key=lambda item: item[1])
    return points


@dataclass(frozen=True, eq=False)
class FringeScan:
    """One voltage scan of a box: per-step phases and both detectors' counts.

    Counts are stored as floats so that the expected-value mode can hold
    non-integral Poisson means; sampled scans hold integer values.
    """

    box: int
    voltages: np.ndarray
    phases: np.ndarray
    counts_d1: np.ndarray
    counts_d2: np.ndarray
    seed: int

    def __post_init__(self):
        if not 1 <= self.box <= 8:
            raise ValueError(f"box number {self.box} outside 1..8")
        arrays = {}
        for name in ("voltages", "phases", "counts_d1", "counts_d2"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).copy()
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError(f"{name} must be a nonempty 1-d array")
            arr.setflags(write=False)
            arrays[name] = arr
        n = arrays["voltages"].size
        if any(a.size != n for a in arrays.values()):
            raise ValueError("scan columns must have equal length")
        dv = np.diff(arrays["voltages"])
        if dv.size and (np.any(dv <= 0) or not np.allclose(dv, dv[0], rtol=1e-9, atol=1e-12)):
            raise ValueError("voltages must be strictly increasing with a uniform step")
        if np.any(arrays["counts_d1"] < 0) or np.any(arrays["counts_d2"] < 0):
            raise ValueError("counts must be non-negative")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)

    @property
    def n_steps(self) -> int:
        return self.voltages.size

    @property
    def steps(self):
        """(voltage, phase, counts_d1, counts_d2) tuples in scan order."""
        return list(zip(self.voltages, self.phases, self.counts_d1, self.counts_d2))

    def to_csv(self) -> str:
        lines = ["voltage,phase,counts_d1,counts_d2"]
        for v, ph, c1, c2 in self.steps:
            lines.append(f"{v:.9g},{ph:.9g},{c1:.9g},{c2:.9g}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def scan_fringe(
    box: int,
    *,
    v_start: float,
    v_end: float,
    v_step: float = 0.5,
    volts_per_2pi: float,
    source: SourceParams,
    noise: NoiseParams,
    seed: int,
    expected_value: bool = False,
) -> FringeScan:
    """Scan the piezo voltage and record both detectors' counts per step.

    The recorded phase column is the nominal calibration phase
    2*pi*(v - v_start)/volts_per_2pi; the per-box systematic offset enters
    only through the probabilities, so it shows up as a shifted fringe, the
    way a misaligned box shifts the dashed discrimination lines.  With
    ``expected_value=True`` the Poisson draw is replaced by its mean.
    """
    if v_step <= 0:
        raise ValueError("v_step must be positive")
    if volts_per_2pi <= 0:
        raise ValueError("volts_per_2pi must be positive")
    if v_end < v_start:
        raise ValueError("empty scan range: v_end < v_start")
    if seed < 0:
        raise ValueError("seed must be non-negative")

    n = int(np.floor((v_end - v_start) / v_step + 1e-9)) + 1
    voltages = v_start + v_step * np.arange(n)
    phases = 2 * np.pi * (voltages - v_start) / volts_per_2pi

    counts_d1 = np.empty(n)
    counts_d2 = np.empty(n)
    for i, phi in enumerate(phases):
        p1, p2 = noisy_probabilities(box, phi, noise)
        if expected_value:
            counts_d1[i] = source.mean_counts_per_step * p1 + noise.dark_rate
            counts_d2[i] = source.mean_counts_per_step * p2 + noise.dark_rate
        else:
            counts_d1[i] = sample_counts(p1, source, _step_seed(seed, i, 1), noise.dark_rate)
            counts_d2[i] = sample_counts(p2, source, _step_seed(seed, i, 2), noise.dark_rate)

    return FringeScan(box, voltages, phases, counts_d1, counts_d2, seed)


def contrast_ratio(counts_d1, counts_d2) -> float:
    """|C_D1 - C_D2| / (C_D1 + C_D2); 1 for a one-sided split, 0 for balance."""
    if counts_d1 < 0 or counts_d2 < 0:
        raise ValueError("counts must be non-negative")
    total = counts_d1 + counts_d2
    if total == 0:
        raise UndefinedContrastError("contrast of zero total counts is undefined")
    return abs(counts_d1 - counts_d2) / total


def contrast_stderr(counts_d1, counts_d2) -> float:
    """First-order Poisson error propagation for the contrast ratio."""
    total = counts_d1 + counts_d2
    if total == 0:
        raise UndefinedContrastError("contrast of zero total counts is undefined")
    return 2.0 * np.sqrt(counts_d1 * counts_d2 / total**3)


@dataclass(frozen=True)
class ContrastReport:
    """Contrast ratio with its counting-statistics uncertainty."""

    eta: float
    stderr: float
    phase_at_eval: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"contrast {self.eta} outside [0, 1]")


def contrast_report(scan: FringeScan, phase: float) -> ContrastReport:
    """Contrast at the scan step closest to ``phase``."""
    i = int(np.argmin(np.abs(scan.phases - phase)))
    c1, c2 = scan.counts_d1[i], scan.counts_d2[i]
    return ContrastReport(contrast_ratio(c1, c2), contrast_stderr(c1, c2), float(scan.phases[i]))


def marked_phase_reports(scan: FringeScan):
    """Contrast at every discrimination phase covered by the scan."""
    return [
        (kind, contrast_report(scan, phase))
        for kind, phase in marked_phases(scan.phases[0], scan.phases[-1])
    ]


def majority_parity(scan: FringeScan) -> Parity:
    """Parity read from the dominant detector at the first discrimination phase.

    At a PSI2 phase even boxes drive D2 and odd boxes D1; at a PSI4 phase
    the detectors swap roles.
    """
    marked = marked_phases(scan.phases[0], scan.phases[-1])
    if not marked:
        raise ValueError("scan covers no discrimination phase")
    kind, phase = marked[0]
    i = int(np.argmin(np.abs(scan.phases - phase)))
    c1, c2 = scan.counts_d1[i], scan.counts_d2[i]
    if c1 == c2:
        raise ValueError("counts are tied; parity readout is ambiguous")
    d2_wins = c2 > c1
    if kind is MarkedPhase.PSI2:
        return Parity.EVEN if d2_wins else Parity.ODD
    return Parity.ODD if d2_wins else Parity.EVEN


@dataclass(frozen=True)
class FringeFit:
    """Least-squares sinusoid fit c(phase) = offset + amplitude*sin(phase + phase0)."""

    amplitude: float
    phase: float
    offset: float
    residual: float

    @property
    def visibility(self) -> float:
        return self.amplitude / self.offset


def _sinusoid_lstsq(phases: np.ndarray, y: np.ndarray):
    design = np.column_stack([np.sin(phases), np.cos(phases), np.ones_like(phases)])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise FringeFitError("degenerate design matrix: phases coincide modulo pi")
    residual = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    return coef, residual


def fit_fringe(scan: FringeScan, detector: int = 1) -> FringeFit:
    """Fit one detector's counts to a fixed-period sinusoid of the scan phase.

    The fit is linear in (a*sin + b*cos, offset); amplitude = sqrt(a^2+b^2)
    and the fitted visibility is amplitude/offset.  Requires at least four
    steps and a non-degenerate phase design.
    """
    if detector not in (1, 2):
        raise ValueError("detector must be 1 or 2")
    y = scan.counts_d1 if detector == 1 else scan.counts_d2
    if scan.n_steps < 4:
        raise FringeFitError(f"need at least 4 steps to fit, got {scan.n_steps}")
    (a, b, offset), residual = _sinusoid_lstsq(scan.phases, y)
    amplitude = float(np.hypot(a, b))
    phase = float(np.arctan2(b, a))
    return FringeFit(amplitude, phase, float(offset), residual)


def calibrate_volts_per_2pi(scan: FringeScan, detector: int = 1) -> float:
    """Estimate the piezo voltage per 2*pi of phase from a reference scan.

    Coarse period from the dominant FFT bin of the counts, refined by
    minimizing the sinusoid-fit residual over the period.  Use an identity
    box scan spanning a couple of fringes.
    """
    if detector not in (1, 2):
        raise ValueError("detector must be 1 or 2")
    y = (scan.counts_d1 if detector == 1 else scan.counts_d2).astype(float)
    if scan.n_steps < 8:
        raise FringeFitError(f"need at least 8 steps to calibrate, got {scan.n_steps}")
    v = scan.voltages
    dv = v[1] - v[0]
    y0 = y - y.mean()
    power = np.abs(np.fft.rfft(y0))
    if power[1:].max() == 0:
        raise FringeFitError("counts carry no fringe; cannot calibrate")
    f0 = np.fft.rfftfreq(v.size, d=dv)[int(np.argmax(power[1:])) + 1]
    period0 = 1.0 / f0

    def residual_at(period):
        return _sinusoid_lstsq(2 * np.pi * v / period, y)[1]

    result = minimize_scalar(
        residual_at,
        bounds=(0.6 * period0, 1.6 * period0),
        method="bounded",
        options={"xatol": 1e-10 * period0},
    )
    return float(result.x)
