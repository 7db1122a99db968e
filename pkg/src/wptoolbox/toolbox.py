"""Single-photon preparation, detection statistics, and coherence measures.

The input qubit ``cos(alpha)|V> + sin(alpha)|H>`` is pushed through the
four-path network of :mod:`wptoolbox.optics`.  Its output always decomposes
as ``cos(alpha)|wave> + sin(alpha)|particle>`` over two orthonormal path
states: the *wave* component has traversed the closed interferometer (its
detection probabilities oscillate in ``phi1``), while the *particle*
component took the open arm and carries no ``phi1`` dependence on its own.

Every probability in this module is computed twice: from closed-form
expressions and by propagating the state through the element-by-element
circuit.  A disagreement beyond ``CROSSCHECK_ATOL`` raises, so a regression
in either route cannot go unnoticed.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .optics import PATHS, POLS, interferometer_circuit
from .qcore import DensityMatrix, ModeBasis, PureState, mix

#: mixer angle that erases which-polarization information on a balanced footing
BETA_SPLIT = np.pi / 8
#: mixer angle 0 means the detection-stage mixers are absent
BETA_DIRECT = 0.0

#: closed form and propagation must agree to this absolute tolerance
CROSSCHECK_ATOL = 1e-12

_POL_BASIS = ModeBasis(POLS)
_PATH_BASIS = ModeBasis(PATHS)


@dataclass(frozen=True)
class ToolboxPhases:
    """Arm phases: ``phi1`` in the recombined arm, ``phi2`` in the open arm."""

    phi1: float = 0.0
    phi2: float = 0.0


@dataclass(frozen=True)
class SingleProbabilities:
    """Four detector probabilities and their mean/oscillating decomposition.

    ``p1 = pc + ic``, ``p2 = pc - ic``, ``p3 = ps + is_``, ``p4 = ps - is_``;
    ``ic`` and ``is_`` are the cross terms between the wave and particle
    components and vanish for their classical mixture.
    """

    p1: float
    p2: float
    p3: float
    p4: float
    pc: float
    ps: float
    ic: float
    is_: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3, self.p4])


# ---------------------------------------------------------------------------
# state preparation
# ---------------------------------------------------------------------------

def prepare_input(alpha: float) -> PureState:
    """Polarization qubit ``cos(alpha)|V> + sin(alpha)|H>``.

    Any finite ``alpha`` is accepted.  Outside ``[0, pi/2]`` one of the
    amplitudes is negative, which flips the sign of the interference terms;
    that is physically meaningful but usually not what a scan intends, so a
    warning is emitted rather than silently folding the angle.
    """
    a = float(alpha)
    if not np.isfinite(a):
        raise ValueError("alpha must be finite")
    if not 0.0 <= a <= np.pi / 2:
        warnings.warn(
            f"alpha={a:.6g} lies outside [0, pi/2]; amplitude signs will flip"
            " the interference terms",
            stacklevel=2,
        )
    return PureState(_POL_BASIS, np.array([np.cos(a), np.sin(a)]))


def wave_state(phi1: float, beta: float = BETA_SPLIT) -> PureState:
    """Network output for a pure-V input (the closed-interferometer history)."""
    g = np.exp(0.5j * phi1)
    cos_h, sin_h = np.cos(phi1 / 2), np.sin(phi1 / 2)
    if float(beta) == 0.0:
        # absent mixers leave the recombined pair (1, 3) untouched
        amps = g * np.array([cos_h, 0.0, -1j * sin_h, 0.0])
    else:
        c, s = np.cos(2 * beta), np.sin(2 * beta)
        amps = g * np.array([c * cos_h, s * cos_h, -1j * c * sin_h, -1j * s * sin_h])
    return PureState(_PATH_BASIS, amps)


def particle_state(phi2: float, beta: float = BETA_SPLIT) -> PureState:
    """Network output for a pure-H input (the open-arm history)."""
    e2 = np.exp(1j * phi2)
    if float(beta) == 0.0:
        # absent mixers pass the open-arm pair (2, 4) straight through
        amps = np.array([0.0, 1.0, 0.0, e2]) / np.sqrt(2.0)
    else:
        c, s = np.cos(2 * beta), np.sin(2 * beta)
        amps = np.array([s, -c, s * e2, -c * e2]) / np.sqrt(2.0)
    return PureState(_PATH_BASIS, amps)


def output_state(
    alpha: float, phases: ToolboxPhases = ToolboxPhases(), beta: float = BETA_SPLIT
) -> PureState:
    """Full network output ``cos(alpha)|wave> + sin(alpha)|particle>``.

    The closed form is cross-checked against element-by-element propagation
    on every call; a mismatch raises ``RuntimeError``.
    """
    w = wave_state(phases.phi1, beta)
    p = particle_state(phases.phi2, beta)
    amps = np.cos(alpha) * w.amplitudes + np.sin(alpha) * p.amplitudes
    closed = PureState(_PATH_BASIS, amps)

    circuit = interferometer_circuit(phases.phi1, phases.phi2, beta)
    propagated = circuit.propagate(prepare_input(alpha))
    dev = np.max(np.abs(closed.amplitudes - propagated.amplitudes))
    if dev > CROSSCHECK_ATOL:
        raise RuntimeError(
            f"closed-form output disagrees with propagation by {dev:.3e}"
        )
    return closed


def mixed_output(
    alpha: float, phases: ToolboxPhases = ToolboxPhases(), beta: float = BETA_SPLIT
) -> DensityMatrix:
    """Classical wave/particle mixture with the same weights as the pure output.

    This is the state obtained by deleting the coherence between the two
    histories: ``cos^2(alpha) |w><w| + sin^2(alpha) |p><p|``.
    """
    a = float(alpha)
    return mix(
        [
            (wave_state(phases.phi1, beta), float(np.cos(a) ** 2)),
            (particle_state(phases.phi2, beta), float(np.sin(a) ** 2)),
        ]
    )


# ---------------------------------------------------------------------------
# detection statistics
# ---------------------------------------------------------------------------

def interference_terms(
    alpha: float, phases: ToolboxPhases = ToolboxPhases()
) -> tuple[float, float]:
    """Oscillating parts (ic, is_) of the balanced-mixer detector signals."""
    a, phi1, phi2 = float(alpha), phases.phi1, phases.phi2
    pref = np.sin(2 * a) / (2 * np.sqrt(2.0))
    ic = pref * np.cos(phi1 / 2) ** 2
    is_ = pref * np.sin(phi1 / 2) * np.sin(phi1 / 2 - phi2)
    return float(ic), float(is_)


def detection_probabilities(
    alpha: float, phases: ToolboxPhases = ToolboxPhases(), beta: float = BETA_SPLIT
) -> SingleProbabilities:
    """Detector probabilities P1..P4 with their mean/oscillating split.

    At ``beta = pi/8`` the closed-form expressions

        pc = cos^2(a) cos^2(phi1/2) / 2 + sin^2(a) / 4
        ps = cos^2(a) sin^2(phi1/2) / 2 + sin^2(a) / 4

    plus :func:`interference_terms` are evaluated and verified against the
    propagated state.  For other mixer angles the probabilities come from
    the propagated state and ``pc, ic`` are defined as the half-sum and
    half-difference of the corresponding detector pair.
    """
    born = output_state(alpha, phases, beta).probabilities()
    if float(beta) == BETA_SPLIT:
        a = float(alpha)
        pc = 0.5 * np.cos(a) ** 2 * np.cos(phases.phi1 / 2) ** 2 + 0.25 * np.sin(a) ** 2
        ps = 0.5 * np.cos(a) ** 2 * np.sin(phases.phi1 / 2) ** 2 + 0.25 * np.sin(a) ** 2
        ic, is_ = interference_terms(alpha, phases)
        closed = np.array([pc + ic, pc - ic, ps + is_, ps - is_])
        dev = np.max(np.abs(closed - born))
        if dev > CROSSCHECK_ATOL:
            raise RuntimeError(
                f"closed-form probabilities disagree with propagation by {dev:.3e}"
            )
        p1, p2, p3, p4 = closed
    else:
        p1, p2, p3, p4 = born
        pc, ps = (p1 + p2) / 2, (p3 + p4) / 2
        ic, is_ = (p1 - p2) / 2, (p3 - p4) / 2
    return SingleProbabilities(
        float(p1), float(p2), float(p3), float(p4),
        float(pc), float(ps), float(ic), float(is_),
    )


def coherence_witness(probs: SingleProbabilities) -> float:
    """Detector-level coherence witness ``|P1 - P2|`` (= 2|ic|)."""
    return abs(probs.p1 - probs.p2)


def coherence(
    alpha: float,
    phases: ToolboxPhases = ToolboxPhases(),
    beta: float = BETA_SPLIT,
    mixed: bool = False,
) -> float:
    """l1 coherence of the output in the {wave, particle} basis.

    The output (pure superposition, or its classical mixture when
    ``mixed=True``) is projected onto the two-dimensional subspace spanned
    by the wave and particle states and the off-diagonal magnitudes of that
    2x2 matrix are summed.  For the pure output this equals ``|sin(2 alpha)|``;
    for the mixture it is zero.
    """
    w = wave_state(phases.phi1, beta).amplitudes
    p = particle_state(phases.phi2, beta).amplitudes
    overlap = np.vdot(w, p)
    if abs(overlap) > 1e-12:
        raise RuntimeError(f"wave/particle basis not orthogonal: {abs(overlap):.3e}")
    if mixed:
        rho = mixed_output(alpha, phases, beta).matrix
    else:
        amps = output_state(alpha, phases, beta).amplitudes
        rho = np.outer(amps, amps.conj())
    basis = np.stack([w, p], axis=1)  # 4x2, columns are the sector states
    sector = basis.conj().T @ rho @ basis
    if abs(np.trace(sector).real - 1.0) > 1e-10:
        raise RuntimeError("output state leaks outside the wave/particle sector")
    return float(abs(sector[0, 1]) + abs(sector[1, 0]))
