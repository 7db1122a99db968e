"""End-to-end acceptance checks for the full toolbox.

Each test covers one acceptance criterion and prints a single PASS/FAIL
line (visible with ``pytest -s`` or in failure reports).  The expected
values are computed inside this module from the closed-form expressions,
independently of the library code under test.
"""
import subprocess
import sys
import time

import numpy as np
import pytest

from wptoolbox import (
    BETA_SPLIT,
    NoiseModel,
    ToolboxPhases,
    TwoPhotonSettings,
    coherence_witness,
    coincidence_probabilities,
    concurrence,
    detection_probabilities,
    entanglement_witness,
    equivalence_scan,
    estimate_witness,
    ghz_output,
    ghz_sector_probabilities,
    measure_distribution,
    mixed_output,
    mixture_coincidence_probabilities,
    network_matrix,
    noisy_coincidence_probabilities,
    noisy_single_probabilities,
    partial_trace,
    pure_density,
    sample_counts,
)

ALPHA_GRID = np.linspace(0.0, np.pi / 2, 21)
PHI_GRID = np.linspace(0.0, 2 * np.pi, 21)


def _report(tag: str, ok: bool, detail: str) -> None:
    print(f"{tag}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{tag}: {detail}"


# ---------------------------------------------------------------------------
# independent closed-form oracles (kept local to this module on purpose)
# ---------------------------------------------------------------------------

def single_forms(alpha: float, phi1: float, phi2: float):
    """Balanced-mixer detector probabilities and their mean/fringe split."""
    ca2, sa2 = np.cos(alpha) ** 2, np.sin(alpha) ** 2
    ch, sh = np.cos(phi1 / 2), np.sin(phi1 / 2)
    pc = 0.5 * ca2 * ch**2 + 0.25 * sa2
    ps = 0.5 * ca2 * sh**2 + 0.25 * sa2
    pref = np.sin(2 * alpha) / (2 * np.sqrt(2.0))
    ic = pref * ch**2
    is_ = pref * sh * np.sin(phi1 / 2 - phi2)
    return np.array([pc + ic, pc - ic, ps + is_, ps - is_]), (pc, ps, ic, is_)


def pair_forms(alpha, phi1, phi2, phi1p, phi2p):
    """Balanced-mixer 4x4 coincidence table from the sixteen closed forms."""
    q, r = np.cos(alpha) ** 2 / 4, np.sin(alpha) ** 2 / 16
    g = np.sin(2 * alpha) / 8
    c1, s1 = np.cos(phi1 / 2), np.sin(phi1 / 2)
    c1p, s1p = np.cos(phi1p / 2), np.sin(phi1p / 2)
    sigma = (phi1 + phi1p) / 2
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


@pytest.fixture(scope="module")
def single_grid():
    """Library output over the full 21^3 grid, with the build time."""
    t0 = time.perf_counter()
    records = []
    for phi1 in PHI_GRID:
        for phi2 in PHI_GRID:
            matrix = network_matrix(phi1, phi2, BETA_SPLIT)
            for alpha in ALPHA_GRID:
                lib = detection_probabilities(alpha, ToolboxPhases(phi1, phi2))
                amps = matrix @ np.array([np.cos(alpha), np.sin(alpha)])
                born = np.abs(amps) ** 2
                records.append((alpha, phi1, phi2, lib, born))
    return records, time.perf_counter() - t0


class TestAcceptance:
    def test_criterion_01_single_photon_grid(self, single_grid):
        records, elapsed = single_grid
        worst_closed = worst_terms = worst_born = 0.0
        for alpha, phi1, phi2, lib, born in records:
            expected, (pc, ps, ic, is_) = single_forms(alpha, phi1, phi2)
            lib_vec = lib.as_array()
            worst_closed = max(worst_closed, np.max(np.abs(lib_vec - expected)))
            worst_terms = max(
                worst_terms,
                abs(lib.pc - pc), abs(lib.ps - ps),
                abs(lib.ic - ic), abs(lib.is_ - is_),
            )
            worst_born = max(worst_born, np.max(np.abs(lib_vec - born)))
        dev = max(worst_closed, worst_terms, worst_born)
        _report(
            "criterion 01 single-photon grid",
            dev < 1e-12 and elapsed < 5.0,
            f"max dev {dev:.2e}, {len(records)} points in {elapsed:.2f}s",
        )

    def test_criterion_02_limiting_cases(self):
        worst = 0.0
        for phi1 in PHI_GRID:
            for phi2 in (0.0, 1.3):
                p = detection_probabilities(0.0, ToolboxPhases(phi1, phi2))
                half_c = 0.5 * np.cos(phi1 / 2) ** 2
                half_s = 0.5 * np.sin(phi1 / 2) ** 2
                worst = max(
                    worst,
                    abs(p.p1 - half_c), abs(p.p2 - half_c),
                    abs(p.p3 - half_s), abs(p.p4 - half_s),
                )
        flat = 0.0
        slope = 0.0
        h = 1e-5
        for phi1 in np.linspace(0, 2 * np.pi, 7):
            for phi2 in np.linspace(0, 2 * np.pi, 7):
                p = detection_probabilities(np.pi / 2, ToolboxPhases(phi1, phi2))
                flat = max(flat, np.max(np.abs(p.as_array() - 0.25)))
                up = detection_probabilities(
                    np.pi / 2, ToolboxPhases(phi1, phi2 + h)
                ).as_array()
                down = detection_probabilities(
                    np.pi / 2, ToolboxPhases(phi1, phi2 - h)
                ).as_array()
                slope = max(slope, np.max(np.abs(up - down)) / (2 * h))
        _report(
            "criterion 02 limiting cases",
            worst < 1e-12 and flat < 1e-12 and slope < 1e-8,
            f"alpha=0 dev {worst:.2e}, alpha=pi/2 dev {flat:.2e}, "
            f"dP/dphi2 {slope:.2e}",
        )

    def test_criterion_03_coherence_witness(self, single_grid):
        records, _ = single_grid
        worst = 0.0
        for alpha, phi1, phi2, lib, _born in records:
            _, (_pc, _ps, ic, _is) = single_forms(alpha, phi1, phi2)
            worst = max(worst, abs(coherence_witness(lib) - 2 * abs(ic)))
        worst_mixed = 0.0
        for phi1 in PHI_GRID:
            for phi2 in np.linspace(0, 2 * np.pi, 5):
                for alpha in np.linspace(0, np.pi / 2, 5):
                    dist = measure_distribution(
                        mixed_output(alpha, ToolboxPhases(phi1, phi2))
                    )
                    worst_mixed = max(worst_mixed, abs(dist[0] - dist[1]))
        _report(
            "criterion 03 coherence witness",
            worst < 1e-12 and worst_mixed < 1e-12,
            f"W_C vs 2|ic| dev {worst:.2e}, mixture W_C {worst_mixed:.2e}",
        )

    def test_criterion_04_two_photon_direct_tables(self):
        worst_particle = worst_crossed = worst_wave = 0.0
        for phi1 in (0.0, np.pi):
            for phi1p in (0.0, np.pi):
                table = coincidence_probabilities(
                    TwoPhotonSettings(
                        phases_a=ToolboxPhases(phi1, 0.7),
                        phases_b=ToolboxPhases(phi1p, 1.9),
                        beta_a=0.0,
                        beta_b=0.0,
                    )
                ).matrix
                for a in (1, 3):  # particle ports of photon A (0-based)
                    for b in (1, 3):
                        worst_particle = max(
                            worst_particle, abs(table[a, b] - 0.125)
                        )
                for a in (0, 2):  # wave x particle ports must be empty
                    for b in (1, 3):
                        worst_crossed = max(
                            worst_crossed, abs(table[a, b]), abs(table[b, a])
                        )
                c2, s2 = np.cos(phi1 / 2) ** 2, np.sin(phi1 / 2) ** 2
                c2p, s2p = np.cos(phi1p / 2) ** 2, np.sin(phi1p / 2) ** 2
                expected_wave = 0.5 * np.array(
                    [[c2 * c2p, c2 * s2p], [s2 * c2p, s2 * s2p]]
                )
                wave_block = table[np.ix_((0, 2), (0, 2))]
                worst_wave = max(
                    worst_wave, np.max(np.abs(wave_block - expected_wave))
                )
        ok = max(worst_particle, worst_crossed, worst_wave) < 1e-12
        _report(
            "criterion 04 mixers-off coincidence tables",
            ok,
            f"particle dev {worst_particle:.2e}, crossed {worst_crossed:.2e}, "
            f"wave dev {worst_wave:.2e}",
        )

    def test_criterion_05_sixteen_probability_forms(self):
        phi_a = np.linspace(0, 2 * np.pi, 9)
        phi2_grid = np.linspace(0, 2 * np.pi, 5)
        worst = worst_sym = 0.0
        swap = (1, 0, 3, 2)  # exchange ports 1<->2 and 3<->4 on either photon

        def scan(alpha, phi1s, phi2s):
            nonlocal worst, worst_sym
            for phi1 in phi1s:
                for phi1p in phi1s:
                    for phi2 in phi2s:
                        for phi2p in phi2s:
                            table = coincidence_probabilities(
                                TwoPhotonSettings(
                                    alpha=alpha,
                                    phases_a=ToolboxPhases(phi1, phi2),
                                    phases_b=ToolboxPhases(phi1p, phi2p),
                                )
                            ).matrix
                            oracle = pair_forms(alpha, phi1, phi2, phi1p, phi2p)
                            worst = max(worst, np.max(np.abs(table - oracle)))
                            flipped = table[np.ix_(swap, swap)]
                            worst_sym = max(
                                worst_sym, np.max(np.abs(table - flipped))
                            )

        scan(np.pi / 4, phi_a, phi2_grid)
        for alpha in (0.0, 0.3, 1.0, 1.3, np.pi / 2):
            scan(alpha, np.linspace(0, 2 * np.pi, 5), np.linspace(0, 2 * np.pi, 3))
        _report(
            "criterion 05 sixteen coincidence forms",
            worst < 1e-12 and worst_sym < 1e-12,
            f"propagation vs forms dev {worst:.2e}, symmetry dev {worst_sym:.2e}",
        )

    def test_criterion_06_entanglement_witness(self):
        worst = 0.0
        for phi1 in np.linspace(0, 2 * np.pi, 25):
            table = coincidence_probabilities(
                TwoPhotonSettings(phases_a=ToolboxPhases(phi1, 0.0))
            )
            expected = 0.25 * np.cos(phi1 / 2) ** 2
            worst = max(worst, abs(entanglement_witness(table) - expected))
        worst_null = 0.0
        for phi1 in np.linspace(0, 2 * np.pi, 9):
            for alpha in (0.0, np.pi / 2):
                table = coincidence_probabilities(
                    TwoPhotonSettings(alpha=alpha, phases_a=ToolboxPhases(phi1, 0.0))
                )
                worst_null = max(worst_null, abs(entanglement_witness(table)))
            mixture = mixture_coincidence_probabilities(
                TwoPhotonSettings(phases_a=ToolboxPhases(phi1, 0.0))
            )
            worst_null = max(worst_null, abs(entanglement_witness(mixture)))
        _report(
            "criterion 06 entanglement witness",
            worst < 1e-12 and worst_null < 1e-12,
            f"fringe dev {worst:.2e}, separable/mixture max {worst_null:.2e}",
        )

    def test_criterion_07_concurrence(self):
        worst = worst_mixed = 0.0
        for alpha in np.linspace(0.0, np.pi / 2, 13):
            settings = TwoPhotonSettings(
                alpha=alpha,
                phases_a=ToolboxPhases(0.9, 0.2),
                phases_b=ToolboxPhases(2.1, 1.4),
            )
            worst = max(worst, abs(concurrence(settings) - np.sin(2 * alpha)))
            worst_mixed = max(worst_mixed, concurrence(settings, mixed=True))
        _report(
            "criterion 07 concurrence",
            worst < 1e-12 and worst_mixed < 1e-12,
            f"sin(2a) dev {worst:.2e}, mixture max {worst_mixed:.2e}",
        )

    def test_criterion_08_hardware_equivalence(self):
        rng = np.random.default_rng(20260815)
        points = [
            (
                rng.uniform(0, np.pi / 2),
                rng.uniform(0, 2 * np.pi),
                rng.uniform(0, 2 * np.pi),
            )
            for _ in range(100)
        ]
        t0 = time.perf_counter()
        dev = equivalence_scan(points)
        elapsed = time.perf_counter() - t0
        _report(
            "criterion 08 hardware equivalence",
            dev < 1e-10 and elapsed < 5.0,
            f"max dev {dev:.2e} at 100 points x 2 mixers in {elapsed:.2f}s",
        )

    def test_criterion_09_three_photon_sectors(self):
        phases = ToolboxPhases(np.pi / 2, 0.0)
        sectors = ghz_sector_probabilities(3, np.pi / 4, phases, beta=0.0)
        crossed = sum(v for key, v in sectors.items() if len(set(key)) > 1)
        dev_sectors = max(abs(sectors["www"] - 0.5), abs(sectors["ppp"] - 0.5))
        rho = pure_density(ghz_output(3, np.pi / 4, phases, beta=0.0))
        dev_marginal = 0.0
        for k in range(3):
            marginal = np.real(np.diag(partial_trace(rho, keep=k).matrix))
            dev_marginal = max(dev_marginal, np.max(np.abs(marginal - 0.25)))
        _report(
            "criterion 09 three-photon history sectors",
            crossed < 1e-12 and dev_sectors < 1e-12 and dev_marginal < 1e-12,
            f"crossed {crossed:.2e}, sector dev {dev_sectors:.2e}, "
            f"marginal dev {dev_marginal:.2e}",
        )

    def test_criterion_10_sampling(self):
        n_shots = 100_000
        worst_sigma = 0.0
        for k, phi1 in enumerate((0.0, np.pi / 2, np.pi)):
            table = coincidence_probabilities(
                TwoPhotonSettings(phases_a=ToolboxPhases(phi1, 0.0))
            )
            counts = sample_counts(table, n_shots, seed=420 + k)
            estimate = estimate_witness(counts, "entanglement")
            expected = 0.25 * np.cos(phi1 / 2) ** 2
            worst_sigma = max(
                worst_sigma, abs(estimate.value - expected) / estimate.error
            )
        dist = detection_probabilities(
            np.pi / 4, ToolboxPhases(0.7, 0.3)
        ).as_array()
        tv_small = tv_large = 0.0
        for seed in range(64):
            small = sample_counts(dist, 4000, seed=seed).frequencies()
            large = sample_counts(dist, 16000, seed=10_000 + seed).frequencies()
            tv_small += 0.5 * np.sum(np.abs(small - dist))
            tv_large += 0.5 * np.sum(np.abs(large - dist))
        ratio = tv_large / tv_small
        _report(
            "criterion 10 counting statistics",
            worst_sigma < 3.0 and 0.35 <= ratio <= 0.65,
            f"witness pull {worst_sigma:.2f} sigma, TV ratio at 4x shots {ratio:.3f}",
        )

    def test_criterion_11_noise_model(self):
        settings = TwoPhotonSettings(phases_a=ToolboxPhases(0.0, 0.0))
        worst_vis = 0.0
        for vis in (0.0, 0.25, 0.5, 0.9, 1.0):
            table = noisy_coincidence_probabilities(
                settings, NoiseModel(visibility=vis)
            )
            worst_vis = max(
                worst_vis, abs(entanglement_witness(table) - vis * 0.25)
            )
        worst_dephased = 0.0
        dead = NoiseModel(dephase_wp=1.0)
        for phi1 in np.linspace(0, 2 * np.pi, 9):
            table = noisy_coincidence_probabilities(
                TwoPhotonSettings(phases_a=ToolboxPhases(phi1, 0.0)), dead
            )
            worst_dephased = max(worst_dephased, abs(entanglement_witness(table)))
            probs = noisy_single_probabilities(
                np.pi / 4, ToolboxPhases(phi1, 0.0), model=dead
            )
            worst_dephased = max(worst_dephased, coherence_witness(probs))
        _report(
            "criterion 11 noise model",
            worst_vis < 1e-12 and worst_dephased < 1e-12,
            f"visibility scaling dev {worst_vis:.2e}, "
            f"dephased witness max {worst_dephased:.2e}",
        )

    def test_criterion_12_verify_command(self):
        t0 = time.perf_counter()
        result = subprocess.run(
            [sys.executable, "-m", "wptoolbox", "verify"],
            capture_output=True,
            text=True,
        )
        elapsed = time.perf_counter() - t0
        _report(
            "criterion 12 verify command",
            result.returncode == 0 and elapsed < 60.0,
            f"exit {result.returncode} in {elapsed:.1f}s",
        )
