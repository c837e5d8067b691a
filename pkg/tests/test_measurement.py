import math

import numpy as np
import pytest

from kerrqrc.config import PhysicalConfig
from kerrqrc.dynamics import PulseSchedule, coherent_state, evolve, vacuum_state
from kerrqrc.measurement import (FeatureVector, MeasurementModel,
                                 apply_distortion, extract_features,
                                 features_from_probabilities,
                                 fock_probabilities, sample_shots)


class TestModelValidation:
    def test_defaults_ok(self):
        m = MeasurementModel()
        assert m.n_states == 5 and m.shots == 0

    @pytest.mark.parametrize("kwargs", [
        dict(n_states=0), dict(shots=-1),
        dict(distortion_b=-0.1), dict(distortion_a=0.8, distortion_b=0.3),
        dict(distortion_a=1.2, distortion_b=0.0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            MeasurementModel(**kwargs)

    def test_derived_seed_xor(self):
        m = MeasurementModel(rng_seed=12)
        assert m.derived(5).rng_seed == 12 ^ 5


class TestFockProbabilities:
    def test_vacuum(self):
        assert np.allclose(fock_probabilities(vacuum_state(8), 3), [1, 0, 0])

    def test_coherent_closed_form(self):
        rho = coherent_state(1.0, 30)  # |alpha|^2 = 1
        p = fock_probabilities(rho, 3)
        assert p[0] == pytest.approx(math.exp(-1), abs=1e-9)
        assert p[1] == pytest.approx(math.exp(-1), abs=1e-9)
        assert p[2] == pytest.approx(math.exp(-1) / 2, abs=1e-9)

    def test_joint_reduction(self):
        rho_c = coherent_state(0.7, 6)
        ground = np.zeros((2, 2), complex)
        ground[0, 0] = 1.0
        joint = np.kron(rho_c, ground)
        assert np.allclose(fock_probabilities(joint, 4, qubit=True),
                           fock_probabilities(rho_c, 4))

    def test_n_states_bound(self):
        with pytest.raises(ValueError):
            fock_probabilities(vacuum_state(4), 5)

    def test_normalization_of_evolved_state(self):
        cfg = PhysicalConfig()
        snap = evolve(vacuum_state(cfg.dim), cfg,
                      PulseSchedule.constant(6.0, 0.2))[0]
        p_all = fock_probabilities(snap, cfg.n_fock)
        assert np.sum(p_all) == pytest.approx(1.0, abs=1e-6)


class TestDistortion:
    def test_identity(self):
        assert apply_distortion(0.42, MeasurementModel()) == 0.42

    def test_affine(self):
        m = MeasurementModel(distortion_a=0.5, distortion_b=0.25)
        assert apply_distortion(1.0, m) == pytest.approx(0.75)
        assert apply_distortion(0.0, m) == pytest.approx(0.25)


class TestShotSampling:
    def test_ideal_limit(self):
        assert sample_shots(0.3, MeasurementModel(shots=0)) == 0.3

    def test_zero_probability(self):
        for shots in (1, 100, 4000):
            assert sample_shots(0.0, MeasurementModel(shots=shots, rng_seed=4)) == 0.0

    def test_mean_against_binomial_error(self):
        m = MeasurementModel(shots=4000)
        rng = np.random.default_rng(123)
        draws = [sample_shots(0.5, m, rng) for _ in range(1000)]
        assert abs(np.mean(draws) - 0.5) < 0.002  # 3 sigma of the repeat mean

    def test_unbiased(self):
        p = 0.137
        shots = 200
        m = MeasurementModel(shots=shots)
        rng = np.random.default_rng(99)
        n = 10_000
        draws = [sample_shots(p, m, rng) for _ in range(n)]
        se = math.sqrt(p * (1 - p) / shots / n)
        assert abs(np.mean(draws) - p) < 4 * se

    def test_seeded_determinism(self):
        m = MeasurementModel(shots=50, rng_seed=7)
        assert sample_shots(0.4, m) == sample_shots(0.4, m)


class TestExtractFeatures:
    def test_vacuum_single_snapshot(self):
        fv = extract_features([vacuum_state(8)], MeasurementModel())
        assert np.allclose(fv.values, [1, 0, 0, 0, 0])

    def test_twenty_features(self):
        snaps = [vacuum_state(8)] * 4
        fv = extract_features(snaps, MeasurementModel(), (0.25, 0.3, 0.35, 0.4))
        assert len(fv.values) == 20
        assert len(fv.labels) == 20

    def test_state_major_ordering(self):
        snaps = [coherent_state(0.6, 10), coherent_state(1.1, 10)]
        fv = extract_features(snaps, MeasurementModel(n_states=3), (0.1, 0.2))
        assert fv.labels == ((0, 0.1), (0, 0.2), (1, 0.1), (1, 0.2), (2, 0.1), (2, 0.2))
        p0_first = fock_probabilities(snaps[0], 3)
        assert fv.values[0] == pytest.approx(p0_first[0])

    def test_same_seed_identical(self):
        snaps = [coherent_state(0.9, 12)] * 3
        m = MeasurementModel(shots=300, rng_seed=21)
        a = extract_features(snaps, m)
        b = extract_features(snaps, m)
        assert np.array_equal(a.values, b.values)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            extract_features([], MeasurementModel())

    def test_matches_probability_path(self):
        # the cached-probability pipeline route produces the same values
        snaps = [coherent_state(0.5, 9), coherent_state(1.0, 9)]
        m = MeasurementModel(n_states=4, shots=777, rng_seed=3)
        via_snapshots = extract_features(snaps, m, (0.1, 0.2))
        probs = np.stack([fock_probabilities(s, 4) for s in snaps], axis=1)
        via_probs = features_from_probabilities(probs, m)
        assert np.array_equal(via_snapshots.values, via_probs)

    def test_label_length_guard(self):
        with pytest.raises(ValueError):
            FeatureVector(np.zeros(3), ((0, 0.0),))
