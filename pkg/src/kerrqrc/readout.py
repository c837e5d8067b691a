"""Trained linear output layer: ridge regression, feature selection, metrics.

The readout minimizes J(W) = |Y - F W|^2 + beta |W|^2 where F carries a
trailing bias column of ones.  The solve goes through a Cholesky
factorization of the regularized normal matrix; beta = 0 falls back to a
rank-revealing least-squares solve and reports rank deficiency explicitly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

BETA_GRID = (1e-8, 1e-6, 1e-4, 1e-2, 1.0)
VALIDATION_FRACTION = 0.2


@dataclass(frozen=True)
class FeatureMatrix:
    """Samples by (features + trailing bias column of ones)."""

    values: np.ndarray
    feature_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 2:
            raise ValueError(f"feature matrix must be 2-D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("feature matrix contains non-finite entries")
        if not np.all(v[:, -1] == 1.0):
            raise ValueError("last column must be the bias column of ones")
        if self.feature_labels and len(self.feature_labels) != v.shape[1] - 1:
            raise ValueError("feature_labels must name the non-bias columns")

    @classmethod
    def from_features(cls, features: np.ndarray,
                      labels: tuple[str, ...] = ()) -> "FeatureMatrix":
        features = np.atleast_2d(np.asarray(features, dtype=float))
        bias = np.ones((features.shape[0], 1))
        return cls(np.hstack([features, bias]), labels)

    @property
    def n_features(self) -> int:
        return self.values.shape[1] - 1

    def rows(self, idx) -> "FeatureMatrix":
        return FeatureMatrix(self.values[idx], self.feature_labels)

    def select(self, feature_idx) -> "FeatureMatrix":
        """Submatrix with the given non-bias columns (bias kept last)."""
        cols = list(feature_idx) + [self.values.shape[1] - 1]
        labels = tuple(self.feature_labels[i] for i in feature_idx) \
            if self.feature_labels else ()
        return FeatureMatrix(self.values[:, cols], labels)


@dataclass(frozen=True)
class ReadoutModel:
    weights: np.ndarray  # (n_features + 1, n_outputs)
    beta: float
    feature_labels: tuple[str, ...] = ()
    target_names: tuple[str, ...] = ()


def _as_2d(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return y[:, None] if y.ndim == 1 else y


def _matrix_of(f) -> np.ndarray:
    """FeatureMatrix or plain 2-D array (the bias column is then the
    caller's business)."""
    return f.values if isinstance(f, FeatureMatrix) else np.asarray(f, dtype=float)


def ridge_fit(f, y: np.ndarray, beta: float,
              target_names: tuple[str, ...] = ()) -> ReadoutModel:
    """Solve W = (F^T F + beta I)^-1 F^T Y."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    fm = _matrix_of(f)
    ym = _as_2d(y)
    if fm.shape[0] != ym.shape[0]:
        raise ValueError(f"row mismatch: F has {fm.shape[0]}, Y has {ym.shape[0]}")
    n_cols = fm.shape[1]
    if beta == 0.0:
        w, _, rank, _ = np.linalg.lstsq(fm, ym, rcond=None)
        if rank < n_cols:
            raise np.linalg.LinAlgError(
                f"normal matrix is singular at beta=0: feature matrix rank "
                f"{rank} < {n_cols} columns")
    else:
        gram = fm.T @ fm + beta * np.eye(n_cols)
        cho = scipy.linalg.cho_factor(gram)
        w = scipy.linalg.cho_solve(cho, fm.T @ ym)
    labels = f.feature_labels if isinstance(f, FeatureMatrix) else ()
    return ReadoutModel(w, float(beta), labels, target_names)


def predict(model: ReadoutModel, f) -> np.ndarray:
    fm = _matrix_of(f)
    if fm.shape[1] != model.weights.shape[0]:
        raise ValueError(
            f"shape mismatch: F has {fm.shape[1]} columns, "
            f"W has {model.weights.shape[0]} rows")
    return fm @ model.weights


def classify_accuracy(pred: np.ndarray, labels01: np.ndarray) -> float:
    """Fraction correct after thresholding scalar predictions at 0.5;
    the tie pred == 0.5 resolves to label 0."""
    pred = np.asarray(pred).reshape(-1)
    labels01 = np.asarray(labels01).reshape(-1)
    if pred.shape[0] != labels01.shape[0]:
        raise ValueError("prediction and label row counts differ")
    decided = (pred > 0.5).astype(float)
    return float(np.mean(decided == labels01))


def nrmse(pred, target) -> float:
    """Root-mean-square error normalized by the target range."""
    pred = np.asarray(pred, dtype=float).reshape(-1)
    target = np.asarray(target, dtype=float).reshape(-1)
    if pred.shape != target.shape or pred.size < 2:
        raise ValueError("pred and target must have equal length >= 2")
    span = float(np.max(target) - np.min(target))
    if span == 0.0:
        raise ValueError("target is constant; range normalization divides by zero")
    return float(np.sqrt(np.mean((pred - target) ** 2)) / span)


def _train_val_split(n_rows: int, val_fraction: float) -> tuple[slice, slice]:
    n_val = max(1, int(round(val_fraction * n_rows)))
    return slice(0, n_rows - n_val), slice(n_rows - n_val, n_rows)


def margin_score(pred: np.ndarray, labels01: np.ndarray) -> tuple[float, float]:
    """(accuracy, worst signed margin) of thresholded predictions; the margin
    breaks ties between models whose accuracies saturate."""
    pred = np.asarray(pred).reshape(-1)
    signed = (pred - 0.5) * (2.0 * np.asarray(labels01).reshape(-1) - 1.0)
    return float(np.mean(signed > 0)), float(np.min(signed))


def select_beta(f: FeatureMatrix, y: np.ndarray, *, classification: bool,
                grid: tuple[float, ...] = BETA_GRID,
                val_fraction: float = VALIDATION_FRACTION) -> float:
    """Grid-search beta on a held-out tail of the training rows.

    Classification scores by accuracy with the worst validation margin as
    tie-breaker (accuracy alone saturates on noiseless features); regression
    scores by NRMSE.  Remaining ties go to the larger beta.
    """
    tr, va = _train_val_split(f.values.shape[0], val_fraction)
    f_tr, f_va = f.rows(tr), f.rows(va)
    y = _as_2d(y)
    best_beta, best_score = None, None
    for beta in grid:
        model = ridge_fit(f_tr, y[tr], beta)
        p = predict(model, f_va)
        score = margin_score(p, y[va]) if classification \
            else (-nrmse(p, y[va]),)
        if best_score is None or score >= best_score:
            best_beta, best_score = beta, score
    return float(best_beta)


def greedy_select(f: FeatureMatrix, y: np.ndarray, k: int, beta: float,
                  *, val_fraction: float = VALIDATION_FRACTION) -> list[int]:
    """Forward selection of k feature indices by validation accuracy.

    Each round adds the candidate that maximizes accuracy on the held-out
    tail of the provided rows; ties keep the lowest feature index.  Returns
    the indices in selection order.
    """
    n_features = f.n_features
    if not (1 <= k <= n_features):
        raise ValueError(f"k must be in [1, {n_features}], got {k}")
    tr, va = _train_val_split(f.values.shape[0], val_fraction)
    y = _as_2d(y)
    selected: list[int] = []
    remaining = list(range(n_features))
    for _ in range(k):
        best_j, best_acc = None, -1.0
        for j in remaining:
            sub = f.select(selected + [j])
            model = ridge_fit(sub.rows(tr), y[tr], beta)
            acc = classify_accuracy(predict(model, sub.rows(va)), y[va])
            if acc > best_acc:
                best_j, best_acc = j, acc
        selected.append(best_j)
        remaining.remove(best_j)
    return selected


def save_model(model: ReadoutModel, path) -> None:
    payload = {
        "beta": model.beta,
        "feature_labels": list(model.feature_labels),
        "weights": [float(x) for x in model.weights.reshape(-1)],
        "weights_shape": list(model.weights.shape),
        "target_names": list(model.target_names),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)


def load_model(path) -> ReadoutModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    weights = np.asarray(payload["weights"], dtype=float).reshape(payload["weights_shape"])
    return ReadoutModel(weights, float(payload["beta"]),
                        tuple(payload["feature_labels"]),
                        tuple(payload["target_names"]))
