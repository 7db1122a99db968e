"""Tests for count sampling, Poisson errors, and noise models."""
import numpy as np
import pytest

from wptoolbox.entangle import TwoPhotonSettings, coincidence_probabilities, entanglement_witness
from wptoolbox.shots import (
    CountTable,
    NoiseModel,
    WitnessEstimate,
    apply_noise,
    apply_noise_table,
    estimate_probabilities,
    estimate_witness,
    noisy_coincidence_probabilities,
    noisy_single_probabilities,
    poisson_error,
    sample_counts,
)
from wptoolbox.toolbox import BETA_SPLIT, ToolboxPhases, coherence_witness, detection_probabilities

PI = np.pi
FLAT4 = np.full(4, 0.25)


class TestNoiseModel:
    def test_range_enforced(self):
        with pytest.raises(ValueError, match="visibility"):
            NoiseModel(visibility=1.2)
        with pytest.raises(ValueError, match="dephase_wp"):
            NoiseModel(dephase_wp=-0.1)

    def test_fringe_scale(self):
        assert NoiseModel().fringe_scale == 1.0
        assert NoiseModel(visibility=0.8, dephase_wp=0.5).fringe_scale == pytest.approx(0.4)


class TestCountTable:
    def test_sum_invariant(self):
        with pytest.raises(ValueError, match="declared total"):
            CountTable(np.array([1, 2, 3, 4]), 11, seed=0)

    def test_outcome_count_checked(self):
        with pytest.raises(ValueError, match="4 or 16"):
            CountTable(np.array([5, 5]), 10, seed=0)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            CountTable(np.array([-1, 1, 0, 0]), 0, seed=0)

    def test_frequencies(self):
        t = CountTable(np.array([1, 2, 3, 4]), 10, seed=0)
        np.testing.assert_allclose(t.frequencies(), [0.1, 0.2, 0.3, 0.4])


class TestSampling:
    def test_deterministic_for_fixed_seed(self):
        a = sample_counts(FLAT4, 10_000, seed=42)
        b = sample_counts(FLAT4, 10_000, seed=42)
        np.testing.assert_array_equal(a.counts, b.counts)
        assert a.seed == 42

    def test_point_mass(self):
        t = sample_counts(np.array([1.0, 0.0, 0.0, 0.0]), 500, seed=1)
        np.testing.assert_array_equal(t.counts, [500, 0, 0, 0])

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="sums to"):
            sample_counts(np.array([0.3, 0.3, 0.3, 0.3]), 10, seed=0)

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError, match="at least one"):
            sample_counts(FLAT4, 0, seed=0)

    def test_flat_distribution_within_five_sigma(self):
        n = 100_000
        t = sample_counts(FLAT4, n, seed=7)
        sigma = np.sqrt(n * 0.25 * 0.75)
        assert np.all(np.abs(t.counts - n * 0.25) < 5 * sigma)

    def test_coincidence_tables_keep_shape(self):
        table = coincidence_probabilities(TwoPhotonSettings())
        t = sample_counts(table, 1000, seed=3)
        assert t.counts.shape == (4, 4)
        assert t.counts.sum() == 1000

    def test_total_variation_shrinks_with_shots(self):
        p = detection_probabilities(0.6, ToolboxPhases(0.9, 0.4)).as_array()
        ratios = []
        for seed in range(30):
            tv_small = 0.5 * np.abs(
                sample_counts(p, 2_000, seed).frequencies() - p
            ).sum()
            tv_big = 0.5 * np.abs(
                sample_counts(p, 8_000, seed + 1000).frequencies() - p
            ).sum()
            ratios.append(tv_big / tv_small)
        # quadrupling the shots should halve the distance on average
        assert 0.3 < np.mean(ratios) < 0.75


class TestPoissonError:
    def test_sqrt_counts(self):
        t = CountTable(np.array([10_000, 100, 1, 0]), 10_101, seed=0)
        np.testing.assert_allclose(poisson_error(t), [100.0, 10.0, 1.0, 1.0])

    def test_probability_estimates(self):
        t = CountTable(np.array([400, 100, 0, 0]), 500, seed=0)
        p, e = estimate_probabilities(t)
        np.testing.assert_allclose(p, [0.8, 0.2, 0.0, 0.0])
        np.testing.assert_allclose(e, [20 / 500, 10 / 500, 1 / 500, 1 / 500])

    def test_three_sigma_coverage(self):
        p_true = detection_probabilities(PI / 4, ToolboxPhases(0.7, 0.2)).as_array()
        n, hits, trials = 10_000, 0, 400
        for seed in range(trials):
            t = sample_counts(p_true, n, seed=seed)
            est, err = estimate_probabilities(t)
            if abs(est[0] - p_true[0]) <= 3 * err[0]:
                hits += 1
        assert hits / trials >= 0.99


class TestNoise:
    def test_identity_model_is_noop(self):
        probs = detection_probabilities(0.5, ToolboxPhases(1.0, 0.3))
        noisy = apply_noise(probs, NoiseModel())
        np.testing.assert_allclose(noisy.as_array(), probs.as_array(), atol=1e-15)

    def test_full_dephasing_kills_coherence_witness(self):
        probs = detection_probabilities(PI / 4, ToolboxPhases(0.0, 0.0))
        noisy = apply_noise(probs, NoiseModel(dephase_wp=1.0))
        assert coherence_witness(noisy) == pytest.approx(0.0, abs=1e-15)
        assert sum(noisy.as_array()) == pytest.approx(1.0, abs=1e-14)

    def test_visibility_scales_fringes(self):
        probs = detection_probabilities(0.7, ToolboxPhases(1.1, 2.0))
        noisy = apply_noise(probs, NoiseModel(visibility=0.9))
        assert noisy.ic == pytest.approx(0.9 * probs.ic, abs=1e-15)
        assert noisy.is_ == pytest.approx(0.9 * probs.is_, abs=1e-15)
        assert noisy.pc == pytest.approx(probs.pc, abs=1e-15)

    def test_interpolation_route_agrees_with_fringe_scaling(self):
        rng = np.random.default_rng(44)
        for _ in range(15):
            alpha = rng.uniform(0, PI / 2)
            phases = ToolboxPhases(*rng.uniform(0, 2 * PI, size=2))
            model = NoiseModel(visibility=rng.uniform(), dephase_wp=rng.uniform())
            direct = apply_noise(detection_probabilities(alpha, phases), model)
            interp = noisy_single_probabilities(alpha, phases, BETA_SPLIT, model)
            np.testing.assert_allclose(
                interp.as_array(), direct.as_array(), atol=1e-13
            )

    def test_mixers_off_statistics_are_noise_immune(self):
        alpha, phases = 0.8, ToolboxPhases(1.4, 0.5)
        ideal = detection_probabilities(alpha, phases, 0.0)
        noisy = noisy_single_probabilities(
            alpha, phases, 0.0, NoiseModel(visibility=0.5, dephase_wp=0.7)
        )
        np.testing.assert_allclose(noisy.as_array(), ideal.as_array(), atol=1e-13)

    def test_entanglement_witness_scales_with_visibility(self):
        s = TwoPhotonSettings()  # alpha = pi/4, all phases zero
        noisy = noisy_coincidence_probabilities(s, NoiseModel(visibility=0.9))
        assert entanglement_witness(noisy) == pytest.approx(0.225, abs=1e-14)

    def test_full_dephasing_kills_entanglement_witness(self):
        for phi1 in (0.0, 0.9, 2.4):
            s = TwoPhotonSettings(phases_a=ToolboxPhases(phi1, 0.3))
            noisy = noisy_coincidence_probabilities(s, NoiseModel(dephase_wp=1.0))
            assert entanglement_witness(noisy) == pytest.approx(0.0, abs=1e-14)

    def test_noisy_table_still_normalized(self):
        s = TwoPhotonSettings(phases_a=ToolboxPhases(1.2, 0.1))
        ideal = coincidence_probabilities(s)
        noisy = apply_noise_table(
            ideal, noisy_coincidence_probabilities(s, NoiseModel(dephase_wp=1.0)),
            NoiseModel(visibility=0.3),
        )
        assert noisy.matrix.sum() == pytest.approx(1.0, abs=1e-12)


class TestWitnessEstimation:
    def test_exact_proportion_counts(self):
        # the all-zero-phase table has probabilities in 32nds
        table = coincidence_probabilities(TwoPhotonSettings())
        counts = np.rint(table.matrix * 32).astype(int)
        t = CountTable(counts, 32, seed=0)
        est = estimate_witness(t, "entanglement")
        assert est.value == pytest.approx(0.25, abs=1e-15)
        assert isinstance(est, WitnessEstimate)

    def test_coherence_hand_values(self):
        t = CountTable(np.array([300, 100, 300, 300]), 1000, seed=0)
        est = estimate_witness(t, "coherence")
        assert est.value == pytest.approx(0.2)
        assert est.error == pytest.approx(np.sqrt(400) / 1000)

    def test_sampling_three_sigma(self):
        table = coincidence_probabilities(TwoPhotonSettings())
        t = sample_counts(table, 100_000, seed=11)
        est = estimate_witness(t, "entanglement")
        assert abs(est.value - 0.25) < 3 * est.error

    def test_unbiased_over_seeds(self):
        table = coincidence_probabilities(TwoPhotonSettings())
        estimates = [
            estimate_witness(sample_counts(table, 20_000, seed=s), "entanglement").value
            for s in range(60)
        ]
        mean = np.mean(estimates)
        stderr = np.std(estimates, ddof=1) / np.sqrt(len(estimates))
        assert abs(mean - 0.25) < 3 * stderr

    def test_shape_mismatches_rejected(self):
        four = CountTable(np.array([5, 5, 5, 5]), 20, seed=0)
        sixteen = sample_counts(coincidence_probabilities(TwoPhotonSettings()), 100, seed=0)
        with pytest.raises(ValueError, match="coincidence"):
            estimate_witness(four, "entanglement")
        with pytest.raises(ValueError, match="4-outcome"):
            estimate_witness(sixteen, "coherence")
        with pytest.raises(ValueError, match="unknown witness"):
            estimate_witness(four, "parity")
