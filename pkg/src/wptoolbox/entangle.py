"""Two-photon and n-photon statistics for paired interferometer networks.

Photon A and photon B (primed labels) each traverse their own copy of the
four-path network.  Feeding the polarization-entangled pair
``cos(alpha)|VV'> + sin(alpha)|HH'>`` produces the path-entangled output
``cos(alpha)|w>|w'> + sin(alpha)|p>|p'>``: the wave/particle character of
the two photons is perfectly correlated, and the degree of entanglement is
steered by the same angle ``alpha`` that steers single-photon coherence.

As in :mod:`wptoolbox.toolbox`, every table is computed by two independent
routes (closed-form expressions and tensor propagation) and the routes are
compared on every call.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .optics import PATHS, network_matrix
from .qcore import DensityMatrix, ModeBasis, PureState, mix, product_basis
from .toolbox import (
    BETA_SPLIT,
    CROSSCHECK_ATOL,
    ToolboxPhases,
    particle_state,
    wave_state,
)

PRIMED_PATHS: tuple[str, str, str, str] = ("1'", "2'", "3'", "4'")

MAX_PHOTONS = 8

_PAIR_BASIS = product_basis(ModeBasis(PATHS), ModeBasis(PRIMED_PATHS))
_PAULI_Y = np.array([[0.0, -1j], [1j, 0.0]])
_SPIN_FLIP = np.kron(_PAULI_Y, _PAULI_Y)


@dataclass(frozen=True)
class TwoPhotonSettings:
    """Source angle plus the per-photon network settings."""

    alpha: float = np.pi / 4
    phases_a: ToolboxPhases = field(default_factory=ToolboxPhases)
    phases_b: ToolboxPhases = field(default_factory=ToolboxPhases)
    beta_a: float = BETA_SPLIT
    beta_b: float = BETA_SPLIT


@dataclass(frozen=True)
class CoincidenceTable:
    """4x4 joint detector probabilities; rows = photon A, columns = photon B."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float).copy()
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 table, got {m.shape}")
        if np.min(m) < -1e-12 or np.max(m) > 1 + 1e-12:
            raise ValueError("coincidence probabilities outside [0, 1]")
        if abs(m.sum() - 1.0) > 1e-9:
            raise ValueError(f"coincidence table sums to {m.sum()}, not 1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def prob(self, det_a: int, det_b: int) -> float:
        """Joint probability for detectors ``det_a`` and ``det_b`` (1-based)."""
        if not (1 <= det_a <= 4 and 1 <= det_b <= 4):
            raise ValueError("detector indices run from 1 to 4")
        return float(self.matrix[det_a - 1, det_b - 1])

    def marginal_a(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def marginal_b(self) -> np.ndarray:
        return self.matrix.sum(axis=0)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def prepare_entangled_input(alpha: float) -> PureState:
    """Polarization pair ``cos(alpha)|VV'> + sin(alpha)|HH'>``."""
    basis = product_basis(ModeBasis(("V", "H")), ModeBasis(("V'", "H'")))
    a = float(alpha)
    return PureState(basis, np.array([np.cos(a), 0.0, 0.0, np.sin(a)]))


def _component_states(s: TwoPhotonSettings):
    wa = wave_state(s.phases_a.phi1, s.beta_a).amplitudes
    pa = particle_state(s.phases_a.phi2, s.beta_a).amplitudes
    wb = wave_state(s.phases_b.phi1, s.beta_b).amplitudes
    pb = particle_state(s.phases_b.phi2, s.beta_b).amplitudes
    return wa, pa, wb, pb


def two_photon_output(s: TwoPhotonSettings) -> PureState:
    """Joint path state ``cos(alpha)|w w'> + sin(alpha)|p p'>``.

    Cross-checked against propagating the polarization pair through the
    tensor product of the two network transfer matrices.
    """
    wa, pa, wb, pb = _component_states(s)
    amps = np.cos(s.alpha) * np.kron(wa, wb) + np.sin(s.alpha) * np.kron(pa, pb)
    closed = PureState(_PAIR_BASIS, amps)

    ma = network_matrix(s.phases_a.phi1, s.phases_a.phi2, s.beta_a)
    mb = network_matrix(s.phases_b.phi1, s.phases_b.phi2, s.beta_b)
    propagated = np.kron(ma, mb) @ prepare_entangled_input(s.alpha).amplitudes
    dev = np.max(np.abs(closed.amplitudes - propagated))
    if dev > CROSSCHECK_ATOL:
        raise RuntimeError(
            f"closed-form pair state disagrees with propagation by {dev:.3e}"
        )
    return closed


def mixture_two_photon_output(s: TwoPhotonSettings) -> DensityMatrix:
    """Classical mixture ``cos^2 |ww'><ww'| + sin^2 |pp'><pp'|``."""
    wa, pa, wb, pb = _component_states(s)
    ww = PureState(_PAIR_BASIS, np.kron(wa, wb))
    pp = PureState(_PAIR_BASIS, np.kron(pa, pb))
    a = float(s.alpha)
    return mix([(ww, float(np.cos(a) ** 2)), (pp, float(np.sin(a) ** 2))])


# ---------------------------------------------------------------------------
# coincidence statistics
# ---------------------------------------------------------------------------

def coincidence_closed_forms(
    alpha: float, phases_a: ToolboxPhases, phases_b: ToolboxPhases
) -> np.ndarray:
    """The sixteen balanced-mixer coincidence expressions as a 4x4 array.

    Valid only when both networks run balanced mixers (beta = pi/8).  Every
    entry is ``<mean> + <fringe>`` where the mean part factorizes over the
    photons and the fringe carries the nonlocal phase ``(phi1 + phi1')/2``.
    """
    a = float(alpha)
    q = np.cos(a) ** 2 / 4
    r = np.sin(a) ** 2 / 16
    g = np.sin(2 * a) / 8
    sigma = (phases_a.phi1 + phases_b.phi1) / 2
    c1, s1 = np.cos(phases_a.phi1 / 2), np.sin(phases_a.phi1 / 2)
    c1p, s1p = np.cos(phases_b.phi1 / 2), np.sin(phases_b.phi1 / 2)
    phi2, phi2p = phases_a.phi2, phases_b.phi2

    cc = q * c1**2 * c1p**2 + r
    cs = q * c1**2 * s1p**2 + r
    sc = q * s1**2 * c1p**2 + r
    ss = q * s1**2 * s1p**2 + r
    f_cc = g * c1 * c1p * np.cos(sigma)
    f_cs = g * c1 * s1p * np.sin(phi2p - sigma)
    f_sc = g * s1 * c1p * np.sin(phi2 - sigma)
    f_ss = g * s1 * s1p * np.cos(phi2 + phi2p - sigma)

    return np.array(
        [
            [cc + f_cc, cc - f_cc, cs - f_cs, cs + f_cs],
            [cc - f_cc, cc + f_cc, cs + f_cs, cs - f_cs],
            [sc - f_sc, sc + f_sc, ss - f_ss, ss + f_ss],
            [sc + f_sc, sc - f_sc, ss + f_ss, ss - f_ss],
        ]
    )


def coincidence_probabilities(s: TwoPhotonSettings) -> CoincidenceTable:
    """Joint detector table from the propagated pair state.

    When both mixers are balanced the table is additionally verified
    against :func:`coincidence_closed_forms`.
    """
    amps = two_photon_output(s).amplitudes
    table = (np.abs(amps) ** 2).reshape(4, 4)
    if float(s.beta_a) == BETA_SPLIT and float(s.beta_b) == BETA_SPLIT:
        closed = coincidence_closed_forms(s.alpha, s.phases_a, s.phases_b)
        dev = np.max(np.abs(closed - table))
        if dev > CROSSCHECK_ATOL:
            raise RuntimeError(
                f"coincidence closed forms disagree with propagation by {dev:.3e}"
            )
    return CoincidenceTable(table)


def mixture_coincidence_probabilities(s: TwoPhotonSettings) -> CoincidenceTable:
    """Joint table for the classical wave/particle mixture."""
    rho = mixture_two_photon_output(s)
    return CoincidenceTable(rho.probabilities().reshape(4, 4))


def entanglement_witness(table: CoincidenceTable) -> float:
    """Fringe witness ``P(2,2') - P(2,1')``.

    For the entangled pair with balanced mixers this equals
    ``sin(2 alpha) cos(phi1/2) cos(phi1'/2) cos((phi1 + phi1')/2) / 4``,
    which survives even though each photon's own counts show no fringe;
    for the classical mixture it vanishes identically.
    """
    return table.prob(2, 2) - table.prob(2, 1)


# ---------------------------------------------------------------------------
# concurrence
# ---------------------------------------------------------------------------

def _sector_isometry(s: TwoPhotonSettings) -> np.ndarray:
    """16x4 isometry onto span{|ww'>, |wp'>, |pw'>, |pp'>}."""
    wa, pa, wb, pb = _component_states(s)
    cols = [np.kron(wa, wb), np.kron(wa, pb), np.kron(pa, wb), np.kron(pa, pb)]
    return np.stack(cols, axis=1)


def sector_projection(
    state: PureState | DensityMatrix, s: TwoPhotonSettings
) -> np.ndarray:
    """Express a pair state as a 4x4 two-qubit density matrix.

    The qubit basis per photon is {wave, particle} at that photon's own
    settings.  Raises if the state has weight outside this sector, since a
    two-qubit description would then be lossy.
    """
    basis = _sector_isometry(s)
    if isinstance(state, PureState):
        rho = np.outer(state.amplitudes, state.amplitudes.conj())
    else:
        rho = state.matrix
    sector = basis.conj().T @ rho @ basis
    if abs(np.trace(sector).real - 1.0) > 1e-10:
        raise ValueError("state is not expressible in the wave/particle sector")
    return sector


def wootters_concurrence(rho: np.ndarray) -> float:
    """Concurrence of an arbitrary two-qubit density matrix (spin-flip form).

    Uses the Hermitian formulation sqrt(rho) * flipped * sqrt(rho), whose
    eigenvalues are obtained with full symmetric-solver accuracy; the
    non-Hermitian product rho * flipped loses several digits on rank-one
    states.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ValueError("two-qubit density matrix must be 4x4")
    flipped = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    d, v = np.linalg.eigh(rho)
    root = (v * np.sqrt(np.clip(d, 0.0, None))) @ v.conj().T
    eigs = np.linalg.eigvalsh(root @ flipped @ root)
    # the square root would blow machine noise around zero up to ~1e-8
    eigs[eigs < 1e-13] = 0.0
    lam = np.sqrt(eigs)
    return float(max(0.0, lam[-1] - lam[-2] - lam[-3] - lam[-4]))


def concurrence(s: TwoPhotonSettings, mixed: bool = False) -> float:
    """Concurrence of the pair output (``|sin 2 alpha|``) or its mixture (0).

    For the pure output the spin-flip value is verified against the direct
    pure-state formula ``2 |c_ww c_pp - c_wp c_pw|``.
    """
    if mixed:
        return wootters_concurrence(
            sector_projection(mixture_two_photon_output(s), s)
        )
    state = two_photon_output(s)
    rho = sector_projection(state, s)
    value = wootters_concurrence(rho)
    coeffs = _sector_isometry(s).conj().T @ state.amplitudes
    direct = 2 * abs(coeffs[0] * coeffs[3] - coeffs[1] * coeffs[2])
    if abs(value - direct) > 1e-10:
        raise RuntimeError(
            f"spin-flip concurrence {value:.12f} disagrees with the pure-state"
            f" formula {direct:.12f}"
        )
    return value


# ---------------------------------------------------------------------------
# variant pair and n-photon extension
# ---------------------------------------------------------------------------

def vh_variant_output(s: TwoPhotonSettings) -> PureState:
    """Output for the anti-correlated source ``(|VH'> + |HV'>)/sqrt(2)``.

    The photons end up in opposite histories: ``(|w p'> + |p w'>)/sqrt(2)``,
    a maximally entangled sector state regardless of the phases.  ``alpha``
    in ``s`` is ignored.
    """
    wa, pa, wb, pb = _component_states(s)
    amps = (np.kron(wa, pb) + np.kron(pa, wb)) / np.sqrt(2.0)
    closed = PureState(_PAIR_BASIS, amps)

    ma = network_matrix(s.phases_a.phi1, s.phases_a.phi2, s.beta_a)
    mb = network_matrix(s.phases_b.phi1, s.phases_b.phi2, s.beta_b)
    pol_in = np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2.0)
    propagated = np.kron(ma, mb) @ pol_in
    dev = np.max(np.abs(closed.amplitudes - propagated))
    if dev > CROSSCHECK_ATOL:
        raise RuntimeError(
            f"variant pair state disagrees with propagation by {dev:.3e}"
        )
    return closed


def _photon_basis(k: int) -> ModeBasis:
    return ModeBasis(tuple(path + "'" * k for path in PATHS))


def ghz_output(
    n: int,
    alpha: float,
    phases: ToolboxPhases = ToolboxPhases(),
    beta: float = BETA_SPLIT,
) -> PureState:
    """n-photon output ``cos(alpha)|w>^n + sin(alpha)|p>^n`` (n <= 8).

    All photons share one set of phases and one mixer angle.  The closed
    form is verified against applying the network transfer matrix to every
    photon of the polarization state ``cos(alpha)|V..V> + sin(alpha)|H..H>``.
    """
    if not isinstance(n, int) or not 1 <= n <= MAX_PHOTONS:
        raise ValueError(f"photon number must be an integer in [1, {MAX_PHOTONS}]")
    w = wave_state(phases.phi1, beta).amplitudes
    p = particle_state(phases.phi2, beta).amplitudes
    w_all, p_all = w, p
    basis = _photon_basis(0)
    for k in range(1, n):
        w_all = np.kron(w_all, w)
        p_all = np.kron(p_all, p)
        basis = product_basis(basis, _photon_basis(k))
    amps = np.cos(alpha) * w_all + np.sin(alpha) * p_all
    closed = PureState(basis, amps)

    # propagation route: network matrix applied to each axis of the
    # polarization tensor cos|V..V> + sin|H..H>
    pol = np.zeros((2,) * n)
    pol[(0,) * n] = np.cos(alpha)
    pol[(1,) * n] = np.sin(alpha)
    m = network_matrix(phases.phi1, phases.phi2, beta)
    t = pol.astype(np.complex128)
    for k in range(n):
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [k])), 0, k)
    dev = np.max(np.abs(closed.amplitudes - t.reshape(-1)))
    if dev > CROSSCHECK_ATOL:
        raise RuntimeError(
            f"closed-form n-photon state disagrees with propagation by {dev:.3e}"
        )
    return closed


def ghz_sector_probabilities(
    n: int,
    alpha: float,
    phases: ToolboxPhases = ToolboxPhases(),
    beta: float = 0.0,
) -> dict[str, float]:
    """History-pattern probabilities ('w'/'p' per photon) with mixers off.

    Only ``beta = 0`` keeps the wave history on detector pair {1, 3} and the
    particle history on {2, 4}, so only there does a detector pattern map to
    a history pattern.  Returns all 2^n patterns; for the shared-angle
    source every mixed pattern has probability zero.
    """
    if float(beta) != 0.0:
        raise ValueError(
            "history patterns are only detector-resolvable with mixers off (beta=0)"
        )
    probs = ghz_output(n, alpha, phases, beta).probabilities().reshape((4,) * n)
    out: dict[str, float] = {}
    # paths 1, 3 (indices 0, 2) carry the wave history; 2, 4 the particle one
    for pattern in range(2**n):
        letters = [(pattern >> (n - 1 - k)) & 1 for k in range(n)]
        key = "".join("wp"[bit] for bit in letters)
        sel = probs
        for axis, bit in enumerate(letters):
            idx = (0, 2) if bit == 0 else (1, 3)
            sel = sel.take(idx, axis=axis)
        out[key] = float(sel.sum())
    return out
