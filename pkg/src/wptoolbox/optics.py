"""Optical elements and interferometer circuits on labeled modes.

The network realized by :func:`interferometer_circuit` is a two-arm
Mach-Zehnder with a polarization-controlled splitter stage:

* a polarizing splitter sends V onto path 1 and H onto path 2,
* path 1 enters a balanced interferometer over paths (1, 3) with phase
  ``phi1`` in arm 3, closed by a second balanced splitter,
* path 2 is split once onto paths (2, 4) with phase ``phi2`` in arm 4 and
  is never recombined,
* a final pair of mixers couples (1, 2) and (3, 4) in front of the four
  detectors; their angle ``beta`` selects between keeping the two
  polarization histories separate (``beta = 0``, mixers absent) and
  erasing them on a balanced footing (``beta = pi/8``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import ATOL, Label, ModeBasis, PureState, apply_unitary

POLS: tuple[str, str] = ("V", "H")
PATHS: tuple[str, str, str, str] = ("1", "2", "3", "4")

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)


@dataclass(frozen=True)
class ElementUnitary:
    """A named isometry acting on an explicit subset of modes."""

    name: str
    modes_in: tuple[Label, ...]
    modes_out: tuple[Label, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128).copy()
        if m.shape != (len(self.modes_out), len(self.modes_in)):
            raise ValueError(
                f"{self.name}: matrix shape {m.shape} does not match modes"
            )
        if not np.allclose(m.conj().T @ m, np.eye(len(self.modes_in)), atol=ATOL):
            raise ValueError(f"{self.name}: matrix is not an isometry")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "modes_in", tuple(self.modes_in))
        object.__setattr__(self, "modes_out", tuple(self.modes_out))

    @property
    def changes_basis(self) -> bool:
        return self.modes_out != self.modes_in


# ---------------------------------------------------------------------------
# element factories
# ---------------------------------------------------------------------------

def polarizing_bs(
    pol_labels: tuple[str, str] = POLS,
    path_labels: tuple[str, str, str, str] = PATHS,
) -> ElementUnitary:
    """Polarizing splitter: first polarization to path 1, second to path 2.

    This is the basis-changing element that converts a polarization qubit
    into a path-encoded state over four (initially half-empty) paths.
    """
    m = np.zeros((4, 2))
    m[0, 0] = 1.0
    m[1, 1] = 1.0
    return ElementUnitary("PBS", tuple(pol_labels), tuple(path_labels), m)


def balanced_bs(mode_a: Label, mode_b: Label, name: str = "BS") -> ElementUnitary:
    """50/50 splitter in the real Hadamard convention [[1, 1], [1, -1]]/sqrt(2)."""
    return ElementUnitary(name, (mode_a, mode_b), (mode_a, mode_b), _HADAMARD)


def phase_shifter(mode: Label, phi: float, name: str | None = None) -> ElementUnitary:
    """Single-mode phase e^{i phi}."""
    m = np.array([[np.exp(1j * float(phi))]])
    return ElementUnitary(name or f"phase({mode})", (mode,), (mode,), m)


def output_mixer(mode_a: Label, mode_b: Label, beta: float) -> ElementUnitary:
    """Detection-stage mixer with coupling angle ``beta``.

    ``beta = 0`` means the element is physically absent, so the identity is
    used (note: *not* the beta -> 0 limit of the coupled form, whose lower
    output picks up a sign).  For ``beta != 0`` the mixer is the rotated
    mirror form [[cos 2b, sin 2b], [sin 2b, -cos 2b]], which is balanced at
    ``beta = pi/8``.
    """
    b = float(beta)
    if b == 0.0:
        m = np.eye(2)
    else:
        m = np.array(
            [[np.cos(2 * b), np.sin(2 * b)], [np.sin(2 * b), -np.cos(2 * b)]]
        )
    return ElementUnitary(f"mixer({mode_a},{mode_b})", (mode_a, mode_b), (mode_a, mode_b), m)


# ---------------------------------------------------------------------------
# circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    """Ordered sequence of elements between two labeled bases."""

    input_basis: ModeBasis
    output_basis: ModeBasis
    elements: tuple[ElementUnitary, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))

    def propagate(self, state: PureState) -> PureState:
        """Run ``state`` through every element in order."""
        if state.basis.labels != self.input_basis.labels:
            raise ValueError("state basis does not match circuit input basis")
        out = state
        for el in self.elements:
            out = apply_unitary(
                out,
                el.matrix,
                el.modes_in,
                el.modes_out if el.changes_basis else None,
            )
        if out.basis.labels != self.output_basis.labels:
            raise ValueError("circuit did not land in its declared output basis")
        return out

    def matrix(self) -> np.ndarray:
        """Full transfer matrix (output dim x input dim), columns = basis images."""
        d_in = self.input_basis.dimension
        cols = []
        for k in range(d_in):
            e = np.zeros(d_in)
            e[k] = 1.0
            cols.append(self.propagate(PureState(self.input_basis, e)).amplitudes)
        return np.stack(cols, axis=1)


def interferometer_circuit(
    phi1: float,
    phi2: float,
    beta: float,
    pol_labels: tuple[str, str] = POLS,
    path_labels: tuple[str, str, str, str] = PATHS,
) -> Circuit:
    """The full polarization-to-four-paths network described in the module docstring.

    Args:
        phi1: phase in the recombined arm (path 3).
        phi2: phase in the open arm (path 4).
        beta: detection-stage mixer angle; 0 disables the mixers.
        pol_labels: labels of the two input polarization modes.
        path_labels: labels of the four output paths.
    """
    p1, p2, p3, p4 = path_labels
    elements = (
        polarizing_bs(pol_labels, path_labels),
        balanced_bs(p1, p3, name="BS1"),
        balanced_bs(p2, p4, name="BS2"),
        phase_shifter(p3, phi1, name="phase1"),
        phase_shifter(p4, phi2, name="phase2"),
        balanced_bs(p1, p3, name="BS3"),
        output_mixer(p1, p2, beta),
        output_mixer(p3, p4, beta),
    )
    return Circuit(ModeBasis(tuple(pol_labels)), ModeBasis(tuple(path_labels)), elements)


def network_matrix(phi1: float, phi2: float, beta: float) -> np.ndarray:
    """4x2 transfer matrix of :func:`interferometer_circuit` (paths x polarizations)."""
    return interferometer_circuit(phi1, phi2, beta).matrix()
