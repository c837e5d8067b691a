"""Reservoir feature extraction from density-matrix snapshots.

The chain per (Fock state, sample time) is: ideal occupation probability ->
affine readout distortion p -> a*p + b -> finite-shot binomial estimate.
Feature ordering is state-major: all sample times of |0>, then of |1>, ...
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dynamics import partial_trace_qubit


@dataclass(frozen=True)
class MeasurementModel:
    """Readout configuration: which probabilities are measured and how.

    ``shots = 0`` means the infinite-shot ideal.  The affine pair (a, b)
    models the switching-probability distortion of the hardware readout;
    the identity (1, 0) is the default.
    """

    n_states: int = 5
    shots: int = 0
    distortion_a: float = 1.0
    distortion_b: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_states < 1:
            raise ValueError(f"n_states must be >= 1, got {self.n_states}")
        if self.shots < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots}")
        lo, hi = self.distortion_b, self.distortion_a + self.distortion_b
        if not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0):
            raise ValueError(
                f"distortion must map [0,1] into [0,1]; endpoints ({lo}, {hi})")

    def derived(self, sample_index: int) -> "MeasurementModel":
        """Model with a per-sample seed (seed XOR sample index)."""
        return replace(self, rng_seed=self.rng_seed ^ sample_index)


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    labels: tuple[tuple[int, float], ...]  # (Fock state, sample time)

    def __post_init__(self) -> None:
        if len(self.values) != len(self.labels):
            raise ValueError("values and labels lengths differ")


def fock_probabilities(rho: np.ndarray, n_states: int, *, qubit: bool = False) -> np.ndarray:
    """First n_states diagonal entries of the cavity reduced state, clamped
    to [0, 1].  Entries outside [-1e-7, 1+1e-7] indicate a corrupt state."""
    rho_c = partial_trace_qubit(rho) if qubit else rho
    if n_states > rho_c.shape[0]:
        raise ValueError(f"n_states={n_states} exceeds cavity dimension {rho_c.shape[0]}")
    probs = np.real(np.diag(rho_c)[:n_states]).copy()
    if np.any(probs < -1e-7) or np.any(probs > 1.0 + 1e-7):
        raise ValueError(f"occupation probabilities outside tolerance: {probs}")
    return np.clip(probs, 0.0, 1.0)


def apply_distortion(p: float, model: MeasurementModel) -> float:
    """Affine readout distortion a*p + b, clamped to [0, 1]."""
    return float(np.clip(model.distortion_a * p + model.distortion_b, 0.0, 1.0))


def sample_shots(p: float, model: MeasurementModel,
                 rng: np.random.Generator | None = None) -> float:
    """Finite-shot estimate of a probability: Binomial(shots, p) / shots.

    With shots = 0 the exact value is returned.  A fresh generator seeded
    from the model is used unless one is passed in (extract_features passes
    a shared stream so successive features draw independently).
    """
    if model.shots == 0:
        return float(p)
    if rng is None:
        rng = np.random.default_rng(model.rng_seed)
    return float(rng.binomial(model.shots, p)) / model.shots


def extract_features(snapshots: list[np.ndarray], model: MeasurementModel,
                     sample_times: tuple[float, ...] | None = None,
                     *, qubit: bool = False) -> FeatureVector:
    """Feature vector over (state, time): distorted, shot-sampled occupation
    probabilities of |0>..|n_states-1> at each snapshot, state-major order."""
    if not snapshots:
        raise ValueError("snapshots must be non-empty")
    if sample_times is None:
        sample_times = tuple(float(i) for i in range(len(snapshots)))
    if len(sample_times) != len(snapshots):
        raise ValueError("sample_times and snapshots lengths differ")
    probs = np.stack([fock_probabilities(s, model.n_states, qubit=qubit)
                      for s in snapshots], axis=1)  # (n_states, n_times)
    rng = np.random.default_rng(model.rng_seed)
    values = np.empty(model.n_states * len(snapshots))
    labels = []
    pos = 0
    for n in range(model.n_states):
        for t_idx, t in enumerate(sample_times):
            p = apply_distortion(probs[n, t_idx], model)
            values[pos] = sample_shots(p, model, rng)
            labels.append((n, float(t)))
            pos += 1
    return FeatureVector(values, tuple(labels))


def ideal_probability_matrix(snapshots: list[np.ndarray], n_states: int,
                             *, qubit: bool = False) -> np.ndarray:
    """(n_states, n_times) ideal probabilities; the cacheable front half of
    extract_features used by the sweep pipelines."""
    return np.stack([fock_probabilities(s, n_states, qubit=qubit)
                     for s in snapshots], axis=1)


def features_from_probabilities(probs: np.ndarray, model: MeasurementModel) -> np.ndarray:
    """Distortion + shot sampling applied to a precomputed (n_states, n_times)
    probability matrix, in the same state-major order as extract_features."""
    n_states, n_times = probs.shape
    if n_states != model.n_states:
        raise ValueError(f"probability matrix has {n_states} states, model wants {model.n_states}")
    rng = np.random.default_rng(model.rng_seed)
    values = np.empty(n_states * n_times)
    pos = 0
    for n in range(n_states):
        for t_idx in range(n_times):
            p = apply_distortion(probs[n, t_idx], model)
            values[pos] = sample_shots(p, model, rng)
            pos += 1
    return values
