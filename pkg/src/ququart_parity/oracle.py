"""Permutation black boxes on four elements and the parity-determining algorithms.

The family consists of the four cyclic rotations (even parity) and the four
anticyclic reflections (odd parity) of {1, 2, 3, 4} -- the dihedral group of
order eight.  A quantum probe in a Fourier basis state reads the parity with
a single oracle call; any classical strategy needs two evaluations, and
`single_query_ambiguity_witness` exhibits why one is never enough.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qudit import StateVector, UnitaryMatrix, apply, dagger, fourier_state, qft_matrix


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"


class NotInOracleFamilyError(ValueError):
    """Permutation is not a cyclic rotation or anticyclic reflection."""


class UnsupportedProbeError(ValueError):
    """Probe state cannot discriminate parity."""


@dataclass(frozen=True)
class Permutation:
    """Bijection on {1..d}; ``mapping[j-1]`` is the image of j."""

    mapping: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.mapping)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise ValueError(f"not a bijection on 1..{len(m)}: {m}")
        object.__setattr__(self, "mapping", m)

    @property
    def d(self) -> int:
        return len(self.mapping)

    def __call__(self, j: int) -> int:
        if not 1 <= j <= self.d:
            raise ValueError(f"input {j} outside 1..{self.d}")
        return self.mapping[j - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition self(other(j)), matching unitary matrix products."""
        if not isinstance(other, Permutation):
            return NotImplemented
        if self.d != other.d:
            raise ValueError("cannot compose permutations of different degree")
        return Permutation(tuple(self(other(j)) for j in range(1, self.d + 1)))


F1 = Permutation((1, 2, 3, 4))
F2 = Permutation((2, 3, 4, 1))
F3 = Permutation((3, 4, 1, 2))
F4 = Permutation((4, 1, 2, 3))
F5 = Permutation((4, 3, 2, 1))
F6 = Permutation((3, 2, 1, 4))
F7 = Permutation((2, 1, 4, 3))
F8 = Permutation((1, 4, 3, 2))

BOXES = (F1, F2, F3, F4, F5, F6, F7, F8)


def box(k: int) -> Permutation:
    """The k-th black box permutation, k in 1..8."""
    if not 1 <= k <= 8:
        raise ValueError(f"box number {k} outside 1..8")
    return BOXES[k - 1]


def box_number(p: Permutation) -> int:
    """Inverse of `box`; raises if p is not one of the eight."""
    try:
        return BOXES.index(p) + 1
    except ValueError:
        raise NotInOracleFamilyError(f"{p} is not one of the eight boxes") from None


def permutation_matrix(p: Permutation) -> UnitaryMatrix:
    """Unitary with column j equal to basis vector e_f(j), i.e. U|j> = |f(j)>.

    Some references tabulate the transpose (the single 1 of column j placed
    in row j of column f(j)), which represents the inverse permutation under
    this convention; parity is unaffected since inverse pairs share parity.
    """
    d = p.d
    m = np.zeros((d, d), dtype=np.complex128)
    for j in range(1, d + 1):
        m[p(j) - 1, j - 1] = 1.0
    return UnitaryMatrix(m)


def parity(p: Permutation) -> Parity:
    """Classify a rotation x -> x + c (even) or reflection x -> c - x (odd).

    Raises NotInOracleFamilyError for permutations outside the dihedral
    family, e.g. a lone transposition on four elements.
    """
    d = p.d
    g = [p.mapping[x] - 1 for x in range(d)]  # zero-based images
    c = g[0]
    if all(g[x] == (x + c) % d for x in range(d)):
        return Parity.EVEN
    if all(g[x] == (c - x) % d for x in range(d)):
        return Parity.ODD
    raise NotInOracleFamilyError(f"{p.mapping} is neither cyclic nor anticyclic")


class OracleHandle:
    """A black box with query accounting.

    Every classical evaluation and every unitary application counts as one
    query.  The counter is the only mutable state in the package; confine a
    handle to one thread of control or synchronize externally.
    """

    def __init__(self, perm: Permutation):
        self.perm = perm
        self.query_count = 0
        self._unitary = permutation_matrix(perm)

    def evaluate(self, x: int) -> int:
        """Classical query: the image of x under the hidden permutation."""
        self.query_count += 1
        return self.perm(x)

    def apply_unitary(self, state: StateVector) -> StateVector:
        """Quantum query: one application of the hidden permutation unitary."""
        self.query_count += 1
        return apply(self._unitary, state)


_FAMILY = {p.mapping for p in BOXES}

# (f(1), f(2)) identifies each box uniquely; asserted once at import.
_FINGERPRINT = {(p(1), p(2)): k for k, p in enumerate(BOXES, start=1)}
assert len(_FINGERPRINT) == 8, "classical fingerprint (f(1), f(2)) is not unique"


def quantum_parity_single_query(oracle: OracleHandle, input_index: int):
    """Determine the box parity with one oracle query.

    Prepares the Fourier probe state for ``input_index`` (2 or 4), applies
    the hidden unitary once, undoes the Fourier transform and reads out the
    computational basis.  The readout is deterministic: probe 2 measures
    |2> for even boxes and |4> for odd ones; probe 4 swaps the two.

    Returns (parity, measured_index).
    """
    if input_index not in (2, 4):
        # Probe 1 is invariant under every box and probe 3 only picks up
        # +-1 phases, so neither discriminates.
        raise UnsupportedProbeError(f"probe index {input_index} cannot discriminate parity; use 2 or 4")
    if oracle.perm.d != 4 or oracle.perm.mapping not in _FAMILY:
        raise NotInOracleFamilyError(f"{oracle.perm} is not one of the eight boxes")

    probe = fourier_state(input_index, 4)
    after_box = oracle.apply_unitary(probe)
    final = apply(dagger(qft_matrix(4)), after_box)

    probs = final.probabilities()
    measured = int(np.argmax(probs)) + 1
    if probs[measured - 1] < 1.0 - 1e-9:
        raise NotInOracleFamilyError("readout is not deterministic; box outside the family")

    other = 4 if input_index == 2 else 2
    if measured == input_index:
        return Parity.EVEN, measured
    if measured == other:
        return Parity.ODD, measured
    raise NotInOracleFamilyError(f"measured |{measured}>, outside the parity readout pair")


def classical_parity(oracle: OracleHandle):
    """Determine parity classically from f(1) and f(2): exactly two queries.

    The pair (f(1), f(2)) pins the box down uniquely among the eight, so two
    evaluations always suffice.  Returns (parity, oracle.query_count).
    """
    y1 = oracle.evaluate(1)
    y2 = oracle.evaluate(2)
    try:
        k = _FINGERPRINT[(y1, y2)]
    except KeyError:
        raise NotInOracleFamilyError(f"responses (1->{y1}, 2->{y2}) match no box") from None
    return parity(box(k)), oracle.query_count


def single_query_ambiguity_witness(x: int, y: int):
    """An even box and an odd box that both map x to y, if they exist.

    Every (x, y) pair on {1..4} is consistent with exactly one rotation and
    one reflection, so a single classical evaluation can never decide
    parity.  Returns (even_box, odd_box), or None when either is missing.
    """
    if not (1 <= x <= 4 and 1 <= y <= 4):
        raise ValueError(f"indices ({x}, {y}) outside 1..4")
    evens = [p for p in BOXES if parity(p) is Parity.EVEN and p(x) == y]
    odds = [p for p in BOXES if parity(p) is Parity.ODD and p(x) == y]
    if not evens or not odds:
        return None
    return evens[0], odds[0]
