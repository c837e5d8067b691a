"""Benchmark inputs: sine/square waveform sequences, Mackey-Glass series,
and the affine map from data values to drive amplitudes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

POINTS_PER_PERIOD = 8

SINE_PERIOD = np.sin(2.0 * np.pi * np.arange(8) / 8.0)
SQUARE_PERIOD = np.array([1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0])

LABEL_SINE = "sine"
LABEL_SQUARE = "square"


@dataclass(frozen=True)
class WaveformDataset:
    """Concatenated 8-point waveform periods with per-point labels."""

    points: np.ndarray
    labels: tuple[str, ...]
    n_periods: int
    split: float = 0.5  # train fraction, in whole periods

    def __post_init__(self) -> None:
        if len(self.points) != POINTS_PER_PERIOD * self.n_periods:
            raise ValueError("points length must be 8 * n_periods")
        if len(self.labels) != len(self.points):
            raise ValueError("labels length must match points")
        for p in range(self.n_periods):
            block = self.labels[p * 8:(p + 1) * 8]
            if len(set(block)) != 1:
                raise ValueError(f"labels change inside period {p}")

    @property
    def n_train(self) -> int:
        """Number of training points; the split never cuts a period."""
        return 8 * int(round(self.split * self.n_periods))

    def binary_targets(self) -> np.ndarray:
        """0 for sine, 1 for square."""
        return np.array([1.0 if l == LABEL_SQUARE else 0.0 for l in self.labels])


def gen_sine_square(n_periods: int, seed: int) -> WaveformDataset:
    """Random sequence of sine and square periods, fair i.i.d. via seed."""
    if n_periods < 2:
        raise ValueError(f"n_periods must be >= 2, got {n_periods}")
    rng = np.random.default_rng(seed)
    kinds = rng.integers(0, 2, size=n_periods)  # 0 sine, 1 square
    points = np.concatenate([SQUARE_PERIOD if k else SINE_PERIOD for k in kinds])
    labels = tuple(
        (LABEL_SQUARE if k else LABEL_SINE) for k in kinds for _ in range(8))
    return WaveformDataset(points, labels, n_periods)


@dataclass(frozen=True)
class MackeyGlassSeries:
    values: np.ndarray
    beta: float = 0.2
    gamma: float = 0.1
    tau: float = 17.0
    exponent: float = 10.0
    dt_internal: float = 0.1
    sample_stride: float = 1.0

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.values)):
            raise ValueError("series contains non-finite values")


def _check_divides(value: float, dt: float, name: str) -> int:
    steps = value / dt
    if abs(steps - round(steps)) > 1e-9:
        raise ValueError(f"dt_internal={dt} does not divide {name}={value} cleanly")
    return int(round(steps))


def gen_mackey_glass(n_points: int, tau: float = 17.0, seed: int = 0, *,
                     beta: float = 0.2, gamma: float = 0.1, exponent: float = 10.0,
                     x0: float = 1.2, burn_in: float = 1000.0,
                     dt_internal: float = 0.1, sample_stride: float = 1.0
                     ) -> MackeyGlassSeries:
    """Integrate dx/dt = beta*x(t-tau)/(1+x(t-tau)^exponent) - gamma*x(t).

    Fixed-step RK4 with linear interpolation of the delayed value, constant
    history x = x0 for t <= 0, a discarded burn-in, and uniform sampling
    every sample_stride.  The trajectory is fully determined by the pinned
    initial history, so ``seed`` does not influence the output; it is part
    of the generator interface for symmetry with the other dataset builders.
    """
    if n_points < 1:
        raise ValueError(f"n_points must be >= 1, got {n_points}")
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    n_delay = _check_divides(tau, dt_internal, "tau")
    stride = _check_divides(sample_stride, dt_internal, "sample_stride")
    burn_steps = _check_divides(burn_in, dt_internal, "burn_in") if burn_in else 0

    total_steps = burn_steps + n_points * stride
    x = np.empty(total_steps + n_delay + 1)
    x[:n_delay + 1] = x0  # history on t in [-tau, 0]
    dt = dt_internal

    def deriv(x_now: float, x_lag: float) -> float:
        return beta * x_lag / (1.0 + x_lag ** exponent) - gamma * x_now

    for k in range(total_steps):
        i = n_delay + k  # index of x(t_k)
        lag0 = x[i - n_delay]          # x(t_k - tau)
        lag1 = x[i - n_delay + 1]      # x(t_k + dt - tau)
        lag_half = 0.5 * (lag0 + lag1)
        k1 = deriv(x[i], lag0)
        k2 = deriv(x[i] + 0.5 * dt * k1, lag_half)
        k3 = deriv(x[i] + 0.5 * dt * k2, lag_half)
        k4 = deriv(x[i] + dt * k3, lag1)
        x[i + 1] = x[i] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    samples = x[n_delay + burn_steps + stride::stride][:n_points].copy()
    return MackeyGlassSeries(samples, beta, gamma, tau, exponent,
                             dt_internal, sample_stride)


@dataclass(frozen=True)
class EncodingMap:
    """Affine map from data values onto drive amplitudes (sqrt(MHz))."""

    alpha_min: float = 1.0
    alpha_max: float = 10.4
    data_min: float = -1.0
    data_max: float = 1.0

    def __post_init__(self) -> None:
        if not (self.alpha_max > self.alpha_min >= 0.0):
            raise ValueError(
                f"need alpha_max > alpha_min >= 0, got [{self.alpha_min}, {self.alpha_max}]")
        if not (self.data_max > self.data_min):
            raise ValueError(
                f"degenerate data range [{self.data_min}, {self.data_max}]")

    def with_data_range(self, data: np.ndarray) -> "EncodingMap":
        lo, hi = float(np.min(data)), float(np.max(data))
        if hi <= lo:
            raise ValueError(f"degenerate data range [{lo}, {hi}]")
        return EncodingMap(self.alpha_min, self.alpha_max, lo, hi)


def encode(x: float | np.ndarray, emap: EncodingMap):
    """Map data values onto [alpha_min, alpha_max]; out-of-range values clamp."""
    frac = (np.clip(x, emap.data_min, emap.data_max) - emap.data_min) \
        / (emap.data_max - emap.data_min)
    return emap.alpha_min + frac * (emap.alpha_max - emap.alpha_min)


def best_threshold_accuracy(points: np.ndarray, targets01: np.ndarray) -> float:
    """Best accuracy of any single-threshold rule on raw values (both
    polarities, all distinct thresholds): the ceiling for a memoryless
    linear classifier."""
    values = np.unique(points)
    candidates = np.concatenate(([values[0] - 1.0], values))
    best = 0.0
    for theta in candidates:
        above = points > theta
        for polarity in (above, ~above):
            acc = float(np.mean(polarity.astype(float) == targets01))
            best = max(best, acc)
    return best


def threshold_classifier_ceiling() -> float:
    """Single-threshold accuracy ceiling on the two waveform templates with
    balanced classes; evaluates to exactly 11/16 = 0.6875."""
    points = np.concatenate([SINE_PERIOD, SQUARE_PERIOD])
    targets = np.concatenate([np.zeros(8), np.ones(8)])
    return best_threshold_accuracy(points, targets)


def dataset_to_csv(path, values: np.ndarray, labels=None) -> None:
    """Write (index, value, label-or-blank) rows with a documented header."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("# columns: index,value,label (label blank for unlabeled series)\n")
        f.write("index,value,label\n")
        for i, v in enumerate(values):
            lab = labels[i] if labels is not None else ""
            f.write(f"{i},{float(v)!r},{lab}\n")


def dataset_from_csv(path) -> tuple[np.ndarray, list[str]]:
    values, labels = [], []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("index,"):
                continue
            _, value, label = line.split(",")
            values.append(float(value))
            labels.append(label)
    return np.asarray(values), labels
