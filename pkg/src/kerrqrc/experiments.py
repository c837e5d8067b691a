"""End-to-end benchmark pipelines: population curves, sine/square
classification with its sweeps, Mackey-Glass delay prediction, and the
Kerr-effect simulation campaign.

Every pipeline is a deterministic function of (config, seed).  Sweep cells
are independent work items run on a bounded thread pool (the integrator
kernel releases the GIL); rows are emitted in axis order regardless of
scheduling, so tables are reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .analytic import linear_cavity_populations
from .config import TWO_PI, PhysicalConfig
from .dynamics import (DT_DEFAULT, PulseSchedule, TruncationOverflowError,
                       evolve, mean_photon, vacuum_state)
from .measurement import (MeasurementModel, features_from_probabilities,
                          ideal_probability_matrix)
from .readout import (BETA_GRID, FeatureMatrix, classify_accuracy,
                      greedy_select, margin_score, nrmse, predict, ridge_fit,
                      select_beta)
from .tasks import EncodingMap, encode, gen_mackey_glass, gen_sine_square

DEFAULT_KERR_LIST = tuple(TWO_PI * k for k in (0.0, -0.1, -0.3, -1.0, -3.0))
DEFAULT_DETUNING_GRID = tuple(TWO_PI * d for d in np.linspace(-3.0, 3.0, 25))
DEFAULT_AMP_GRID = tuple(np.linspace(0.0, 12.0, 49))
DEFAULT_POPULATION_GRID = tuple(np.linspace(0.0, 10.4, 53))
DEFAULT_RANGES = ((1.0, 3.0), (1.0, 6.0), (1.0, 10.4))

ALPHA0_TOLERANCE = 0.01  # photons
AUTO_N_FOCK_CAP = 120


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a pipeline needs: device, readout, encoding, task and
    sweep parameters, and the run seed."""

    physical: PhysicalConfig = field(default_factory=PhysicalConfig)
    measurement: MeasurementModel = field(default_factory=MeasurementModel)
    encoding: EncodingMap = field(default_factory=EncodingMap)
    seed: int = 0
    dt: float = DT_DEFAULT
    workers: int = 0  # 0 = hardware parallelism

    # sine/square task
    n_periods: int = 400
    pulse_duration: float = 0.2  # us
    sample_offsets: tuple[float, ...] = (0.05, 0.10, 0.15, 0.20)
    greedy_k: int = 8

    # Mackey-Glass task
    n_points: int = 2000
    mg_tau: float = 17.0
    mg_history: int = 20
    mg_pulse_duration: float = 0.1  # us
    mg_delays: tuple[int, ...] = tuple(range(0, 61))

    # sweep axes for the sine/square pipeline (at most one may be active)
    seeds: tuple[int, ...] = ()
    kappa_phi_list: tuple[float, ...] = ()
    shots_list: tuple[int, ...] = ()
    n_states_list: tuple[int, ...] = ()
    time_subsets: tuple[tuple[float, ...], ...] = ()
    ranges: tuple[tuple[float, float], ...] = ()

    # Kerr campaign grids
    kerr_list: tuple[float, ...] = DEFAULT_KERR_LIST
    detuning_grid: tuple[float, ...] = DEFAULT_DETUNING_GRID
    amp_grid: tuple[float, ...] = DEFAULT_AMP_GRID
    population_grid: tuple[float, ...] = DEFAULT_POPULATION_GRID
    n_targets: tuple[int, ...] = (1, 2, 3)

    def __post_init__(self) -> None:
        if self.n_periods < 2:
            raise ValueError("n_periods must be >= 2")
        if self.mg_history < 1:
            raise ValueError("mg_history must be >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")

    def active_sweep_axis(self) -> str | None:
        """The sine/square sweep axis, if any; at most one may be set."""
        axes = [name for name in ("kappa_phi_list", "shots_list",
                                  "n_states_list", "time_subsets", "ranges")
                if getattr(self, name)]
        if len(axes) > 1:
            raise ValueError(
                f"at most one sine/square sweep axis may be set, got {axes}")
        return axes[0] if axes else None

    @property
    def run_seeds(self) -> tuple[int, ...]:
        return self.seeds if self.seeds else (self.seed,)

    @property
    def max_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


def config_digest(cfg: ExperimentConfig, experiment: str) -> str:
    """Eight hex chars identifying (experiment, resolved config)."""
    payload = {"experiment": experiment, "config": asdict(cfg)}
    blob = json.dumps(payload, sort_keys=True, default=repr).encode()
    return hashlib.sha256(blob).hexdigest()[:8]


@dataclass
class ResultTable:
    """Rectangular named columns of reals plus provenance."""

    experiment: str
    config_hash: str
    columns: dict[str, list[float]]
    version: str = __version__
    created_at: str = ""

    def __post_init__(self) -> None:
        if not self.created_at:
            self.created_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: lengths {lengths}")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self.columns[name], dtype=float)

    def merge(self, other: "ResultTable") -> "ResultTable":
        if other.config_hash != self.config_hash:
            raise ValueError(
                f"refusing to merge tables from different configs "
                f"({self.config_hash} != {other.config_hash})")
        if other.columns.keys() != self.columns.keys():
            raise ValueError("column sets differ")
        merged = {k: list(v) + list(other.columns[k]) for k, v in self.columns.items()}
        return ResultTable(self.experiment, self.config_hash, merged,
                           self.version, self.created_at)

    def to_csv(self, path) -> None:
        """CSV with '#' provenance header; no timestamp so reruns are
        byte-identical."""
        names = list(self.columns)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(f"# kerrqrc {self.version}\n")
            f.write(f"# experiment={self.experiment}\n")
            f.write(f"# config={self.config_hash}\n")
            f.write(",".join(names) + "\n")
            for i in range(self.n_rows):
                f.write(",".join(repr(float(self.columns[n][i])) for n in names) + "\n")


def _rows_to_table(experiment: str, digest: str, names: list[str],
                   rows: list[tuple]) -> ResultTable:
    columns = {n: [float(r[i]) for r in rows] for i, n in enumerate(names)}
    return ResultTable(experiment, digest, columns)


def _pool(cfg: ExperimentConfig) -> ThreadPoolExecutor:
    return ThreadPoolExecutor(max_workers=cfg.max_workers)


# ---------------------------------------------------------------------------
# shared sine/square machinery
# ---------------------------------------------------------------------------

def _probe_pairs(physical: PhysicalConfig, pairs: set[tuple[float, float]],
                 pulse: float, sample_times: tuple[float, ...], n_states: int,
                 dt: float, pool: ThreadPoolExecutor,
                 cache: dict) -> dict[tuple[float, float], np.ndarray]:
    """Ideal probability matrices for unique (previous, current) amplitude
    pairs of the two-pulse protocol; results are cached per physical config."""

    def job(pair):
        schedule = PulseSchedule(((pulse, complex(pair[0])), (pulse, complex(pair[1]))),
                                 sample_times)
        snaps = evolve(vacuum_state(physical.dim), physical, schedule, dt)
        return ideal_probability_matrix(snaps, n_states, qubit=physical.include_qubit)

    missing = [p for p in pairs if (physical, p) not in cache]
    for pair, probs in zip(missing, pool.map(job, missing)):
        cache[(physical, pair)] = probs
    return {p: cache[(physical, p)] for p in pairs}


@dataclass
class _TaskResult:
    accuracy: float
    nrmse: float
    greedy_accuracy: float = float("nan")
    greedy_indices: tuple[int, ...] = ()
    beta: float = float("nan")


def _fit_eval(values: np.ndarray, targets: np.ndarray, n_train: int,
              labels: tuple[str, ...] = (), greedy_k: int = 0) -> _TaskResult:
    """Split, pick beta on a validation tail, train, and score the test half."""
    fm = FeatureMatrix.from_features(values, labels)
    f_train, f_test = fm.rows(slice(0, n_train)), fm.rows(slice(n_train, None))
    y_train, y_test = targets[:n_train], targets[n_train:]
    beta = select_beta(f_train, y_train, classification=True)
    model = ridge_fit(f_train, y_train, beta)
    pred = predict(model, f_test)
    result = _TaskResult(accuracy=classify_accuracy(pred, y_test),
                         nrmse=nrmse(pred, y_test), beta=beta)
    if greedy_k:
        idx, sub_model = _greedy_submodel(f_train, y_train, greedy_k)
        sub_pred = predict(sub_model, f_test.select(idx))
        result.greedy_accuracy = classify_accuracy(sub_pred, y_test)
        result.greedy_indices = tuple(idx)
    return result


def _greedy_submodel(f_train: FeatureMatrix, y_train: np.ndarray,
                     k: int) -> tuple[list[int], "object"]:
    """Greedy feature subset plus its trained model.

    The selection beta is not knowable a priori (the forward search behaves
    differently at each regularization strength), so every grid beta
    proposes a candidate set; the shipped (set, refit beta) is the one whose
    trained model has the best worst-case margin on the training rows.
    All scoring stays on the training side of the split."""
    candidates: list[tuple[int, ...]] = []
    for b in BETA_GRID:
        idx = tuple(greedy_select(f_train, y_train, k, b))
        if idx not in candidates:
            candidates.append(idx)
    best = None
    for idx in candidates:
        sub = f_train.select(list(idx))
        for b in BETA_GRID:
            model = ridge_fit(sub, y_train, b)
            score = margin_score(predict(model, sub), y_train)
            if best is None or score > best[0]:
                best = (score, list(idx), model)
    return best[1], best[2]


def _sine_square_cell(cfg: ExperimentConfig, physical: PhysicalConfig,
                      encoding: EncodingMap, meas: MeasurementModel, seed: int,
                      sample_offsets: tuple[float, ...],
                      pool: ThreadPoolExecutor, cache: dict,
                      greedy_k: int = 0) -> _TaskResult:
    """One full sine/square classification run for a single parameter cell."""
    ds = gen_sine_square(cfg.n_periods, seed)
    targets = ds.binary_targets()
    emap = encoding.with_data_range(ds.points[:ds.n_train])
    amps = np.round(encode(ds.points, emap), 12)  # dedupe-stable values
    prev = np.concatenate(([amps[0]], amps[:-1]))
    pairs = list(zip(prev.tolist(), amps.tolist()))

    pulse = cfg.pulse_duration
    sample_times = tuple(pulse + off for off in sample_offsets)
    probe = _probe_pairs(physical, set(pairs), pulse, sample_times,
                         meas.n_states, cfg.dt, pool, cache)

    base = replace(meas, rng_seed=seed)
    values = np.stack([
        features_from_probabilities(probe[pair], base.derived(i))
        for i, pair in enumerate(pairs)])
    labels = tuple(f"P{n}@t{round((pulse + off) * 1000)}ns"
                   for n in range(meas.n_states) for off in sample_offsets)
    return _fit_eval(values, targets, ds.n_train, labels, greedy_k)


# ---------------------------------------------------------------------------
# pipelines
# ---------------------------------------------------------------------------

def run_population_curves(cfg: ExperimentConfig) -> ResultTable:
    """Occupation probabilities P_0..P_{n-1} after one displacement pulse,
    swept over the drive amplitude."""
    digest = config_digest(cfg, "populations")
    meas = cfg.measurement
    pulse = cfg.pulse_duration
    physical = cfg.physical

    def job(amp):
        schedule = PulseSchedule.constant(complex(amp), pulse)
        snaps = evolve(vacuum_state(physical.dim), physical, schedule, cfg.dt)
        return ideal_probability_matrix(snaps, meas.n_states,
                                        qubit=physical.include_qubit)

    with _pool(cfg) as pool:
        probs = list(pool.map(job, cfg.population_grid))
    rows = []
    base = replace(meas, rng_seed=cfg.seed)
    for i, (amp, pr) in enumerate(zip(cfg.population_grid, probs)):
        feats = features_from_probabilities(pr, base.derived(i))
        rows.append((amp, *feats))
    names = ["alpha_in"] + [f"P{n}" for n in range(meas.n_states)]
    return _rows_to_table("populations", digest, names, rows)


def run_sine_square(cfg: ExperimentConfig) -> ResultTable:
    """Sine/square classification; optionally swept over one axis
    (dephasing, shots, measured states, sample-time subsets, or encoding
    ranges), each cell repeated over cfg seeds."""
    digest = config_digest(cfg, "sinesquare")
    axis = cfg.active_sweep_axis()
    cache: dict = {}
    rows: list[tuple] = []

    with _pool(cfg) as pool:
        if axis == "kappa_phi_list":
            if not cfg.physical.include_qubit:
                raise ValueError("the dephasing sweep needs physical.include_qubit=true")
            names = ["kappa_phi_mhz", "seed", "accuracy", "nrmse"]
            for kphi in cfg.kappa_phi_list:
                phys = cfg.physical.with_(kappa_phi=kphi)
                for seed in cfg.run_seeds:
                    r = _sine_square_cell(cfg, phys, cfg.encoding, cfg.measurement,
                                          seed, cfg.sample_offsets, pool, cache)
                    rows.append((kphi / TWO_PI, seed, r.accuracy, r.nrmse))
        elif axis == "shots_list":
            names = ["shots", "seed", "accuracy", "nrmse"]
            for shots in cfg.shots_list:
                meas = replace(cfg.measurement, shots=shots)
                for seed in cfg.run_seeds:
                    r = _sine_square_cell(cfg, cfg.physical, cfg.encoding, meas,
                                          seed, cfg.sample_offsets, pool, cache)
                    rows.append((shots, seed, r.accuracy, r.nrmse))
        elif axis == "n_states_list":
            names = ["n_states", "seed", "accuracy", "nrmse"]
            for n_states in cfg.n_states_list:
                meas = replace(cfg.measurement, n_states=n_states)
                for seed in cfg.run_seeds:
                    r = _sine_square_cell(cfg, cfg.physical, cfg.encoding, meas,
                                          seed, cfg.sample_offsets, pool, cache)
                    rows.append((n_states, seed, r.accuracy, r.nrmse))
        elif axis == "time_subsets":
            names = ["subset", "n_times", "seed", "accuracy", "nrmse"]
            for si, subset in enumerate(cfg.time_subsets):
                for seed in cfg.run_seeds:
                    r = _sine_square_cell(cfg, cfg.physical, cfg.encoding,
                                          cfg.measurement, seed, tuple(subset),
                                          pool, cache)
                    rows.append((si, len(subset), seed, r.accuracy, r.nrmse))
        elif axis == "ranges":
            names = ["alpha_min", "alpha_max", "seed", "accuracy", "nrmse"]
            for lo, hi in cfg.ranges:
                emap = EncodingMap(lo, hi, cfg.encoding.data_min, cfg.encoding.data_max)
                for seed in cfg.run_seeds:
                    r = _sine_square_cell(cfg, cfg.physical, emap, cfg.measurement,
                                          seed, cfg.sample_offsets, pool, cache)
                    rows.append((lo, hi, seed, r.accuracy, r.nrmse))
        else:
            names = ["seed", "accuracy", "nrmse", "greedy_k", "greedy_accuracy"]
            for seed in cfg.run_seeds:
                r = _sine_square_cell(cfg, cfg.physical, cfg.encoding,
                                      cfg.measurement, seed, cfg.sample_offsets,
                                      pool, cache, greedy_k=cfg.greedy_k)
                rows.append((seed, r.accuracy, r.nrmse, cfg.greedy_k,
                             r.greedy_accuracy))
    return _rows_to_table("sinesquare", digest, names, rows)


def run_mackey_glass(cfg: ExperimentConfig,
                     delays: tuple[int, ...] | None = None) -> ResultTable:
    """Delay-prediction NRMSE on a Mackey-Glass series: 20 consecutive
    encoding pulses per sample, features from the final snapshot."""
    digest = config_digest(cfg, "mackeyglass")
    delays = tuple(delays) if delays is not None else cfg.mg_delays
    series = gen_mackey_glass(cfg.n_points, cfg.mg_tau, cfg.seed)
    values = series.values
    n = len(values)
    hist = cfg.mg_history
    ks = np.arange(hist - 1, n)
    if delays and hist - 1 + max(delays) >= n:
        raise ValueError("history + max delay exceed the series length")

    split_k = ks[:len(ks) // 2][-1]
    emap = cfg.encoding.with_data_range(values[:split_k + 1])
    amps = np.asarray(encode(values, emap))
    pulse = cfg.mg_pulse_duration
    total = pulse * hist
    meas = replace(cfg.measurement, rng_seed=cfg.seed)

    def job(k):
        schedule = PulseSchedule.from_amplitudes(amps[k - hist + 1:k + 1], pulse,
                                                 (total,))
        snaps = evolve(vacuum_state(cfg.physical.dim), cfg.physical, schedule, cfg.dt)
        return ideal_probability_matrix(snaps, meas.n_states,
                                        qubit=cfg.physical.include_qubit)

    with _pool(cfg) as pool:
        probs = list(pool.map(job, ks.tolist()))
    features = np.stack([
        features_from_probabilities(pr, meas.derived(int(k)))
        for k, pr in zip(ks, probs)])

    rows = []
    for d in delays:
        valid = ks + d <= n - 1
        kd = ks[valid]
        fm = FeatureMatrix.from_features(features[valid])
        y = values[kd + d]
        n_train = len(kd) // 2
        f_train, f_test = fm.rows(slice(0, n_train)), fm.rows(slice(n_train, None))
        y_train, y_test = y[:n_train], y[n_train:]
        beta = select_beta(f_train, y_train, classification=False)
        model = ridge_fit(f_train, y_train, beta)
        rows.append((d, nrmse(predict(model, f_test), y_test)))
    return _rows_to_table("mackeyglass", digest, ["d", "nrmse"], rows)


# ---------------------------------------------------------------------------
# Kerr campaign
# ---------------------------------------------------------------------------

def _grow_truncation(physical: PhysicalConfig, run) -> object:
    """Call run(cfg) starting at the configured truncation, growing n_fock on
    overflow up to the cap.  Starting small keeps strong-Kerr cells cheap
    (their population saturates) while weak-Kerr cells grow as needed."""
    n_fock = physical.n_fock
    while True:
        try:
            return run(physical.with_(n_fock=n_fock))
        except TruncationOverflowError:
            if n_fock >= AUTO_N_FOCK_CAP:
                raise
            n_fock = min(AUTO_N_FOCK_CAP, int(math.ceil(1.35 * n_fock)) + 4)


def _mean_photon_after_drive(physical: PhysicalConfig, amp: float,
                             duration: float, dt: float) -> float:
    """Mean photon number after a constant drive from vacuum, cavity-only."""

    def run(cfg: PhysicalConfig) -> float:
        snap = evolve(vacuum_state(cfg.dim), cfg,
                      PulseSchedule.constant(complex(amp), duration), dt)[0]
        return mean_photon(snap, cfg)

    return _grow_truncation(physical.with_(include_qubit=False), run)


def run_kerr_photon_map(cfg: ExperimentConfig,
                        kerr_list: tuple[float, ...] | None = None,
                        detuning_grid: tuple[float, ...] | None = None,
                        amp_grid: tuple[float, ...] | None = None) -> ResultTable:
    """Mean photon number after a 400 ns constant drive over
    (Kerr, detuning, amplitude); cavity-only model."""
    digest = config_digest(cfg, "kerr-map")
    kerr_list = tuple(kerr_list) if kerr_list is not None else cfg.kerr_list
    detuning_grid = tuple(detuning_grid) if detuning_grid is not None else cfg.detuning_grid
    amp_grid = tuple(amp_grid) if amp_grid is not None else cfg.amp_grid
    duration = 2.0 * cfg.pulse_duration
    cells = [(k, d, a) for k in kerr_list for d in detuning_grid for a in amp_grid]

    def job(cell):
        k, d, a = cell
        phys = cfg.physical.with_(k_cc=k, delta_c=d, include_qubit=False)
        return _mean_photon_after_drive(phys, a, duration, cfg.dt)

    with _pool(cfg) as pool:
        means = list(pool.map(job, cells))
    rows = [(k / TWO_PI, d / TWO_PI, a, m)
            for (k, d, a), m in zip(cells, means)]
    names = ["k_cc_mhz", "delta_mhz", "alpha_in", "mean_n"]
    return _rows_to_table("kerr-map", digest, names, rows)


def find_alpha0(cfg: ExperimentConfig, k_cc: float, n_target: float,
                pool: ThreadPoolExecutor | None = None) -> list[tuple[float, float]]:
    """All (detuning, amplitude) pairs where the 400 ns mean photon number
    crosses n_target from below, located by bisection between bracketing
    grid points.  Detunings without a crossing are omitted; a detuning may
    contribute several crossings when the response is non-monotonic."""
    duration = 2.0 * cfg.pulse_duration
    amps = np.asarray(cfg.amp_grid, dtype=float)

    def scan_delta(delta):
        phys = cfg.physical.with_(k_cc=k_cc, delta_c=delta, include_qubit=False)
        means = [_mean_photon_after_drive(phys, a, duration, cfg.dt) for a in amps]
        found = []
        for lo_i in range(len(amps) - 1):
            m_lo, m_hi = means[lo_i], means[lo_i + 1]
            if not (m_lo < n_target <= m_hi):
                continue
            lo, hi = float(amps[lo_i]), float(amps[lo_i + 1])
            val = m_hi
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                val = _mean_photon_after_drive(phys, mid, duration, cfg.dt)
                if abs(val - n_target) < ALPHA0_TOLERANCE:
                    lo = hi = mid
                    break
                if val < n_target:
                    lo = mid
                else:
                    hi = mid
            found.append((float(delta), 0.5 * (lo + hi)))
        return found

    deltas = list(cfg.detuning_grid)
    if pool is None:
        with _pool(cfg) as local_pool:
            per_delta = list(local_pool.map(scan_delta, deltas))
    else:
        per_delta = list(pool.map(scan_delta, deltas))
    return [pair for sub in per_delta for pair in sub]


def run_kerr_task_sweep(cfg: ExperimentConfig,
                        kerr_list: tuple[float, ...] | None = None,
                        detuning_grid: tuple[float, ...] | None = None,
                        ranges: tuple[tuple[float, float], ...] | None = None
                        ) -> ResultTable:
    """Sine/square NRMSE over (Kerr, detuning, encoding range), cavity-only."""
    digest = config_digest(cfg, "kerr-sweep")
    kerr_list = tuple(kerr_list) if kerr_list is not None else cfg.kerr_list
    detuning_grid = tuple(detuning_grid) if detuning_grid is not None else cfg.detuning_grid
    ranges = tuple(ranges) if ranges is not None else (cfg.ranges or DEFAULT_RANGES)

    rows = []
    cache: dict = {}
    with _pool(cfg) as pool:
        for k in kerr_list:
            for d in detuning_grid:
                phys = cfg.physical.with_(k_cc=k, delta_c=d, include_qubit=False)
                for lo, hi in ranges:
                    emap = EncodingMap(lo, hi, cfg.encoding.data_min,
                                       cfg.encoding.data_max)
                    r = _grow_truncation(phys, lambda p: _sine_square_cell(
                        cfg, p, emap, cfg.measurement, cfg.seed,
                        cfg.sample_offsets, pool, cache))
                    rows.append((k / TWO_PI, d / TWO_PI, lo, hi,
                                 r.nrmse, r.accuracy))
    names = ["k_cc_mhz", "delta_mhz", "alpha_min", "alpha_max", "nrmse", "accuracy"]
    return _rows_to_table("kerr-sweep", digest, names, rows)


def run_kerr_isolation(cfg: ExperimentConfig,
                       kerr_list: tuple[float, ...] | None = None,
                       n_targets: tuple[int, ...] | None = None) -> ResultTable:
    """Sine/square NRMSE with the encoding range pinned to [0.7, 1.3] times
    the amplitude that prepares a target mean photon number, for every
    (Kerr, target, detuning) combination with a crossing."""
    digest = config_digest(cfg, "kerr-isolation")
    kerr_list = tuple(kerr_list) if kerr_list is not None else cfg.kerr_list
    n_targets = tuple(n_targets) if n_targets is not None else cfg.n_targets

    rows = []
    cache: dict = {}
    with _pool(cfg) as pool:
        for k in kerr_list:
            phys = cfg.physical.with_(k_cc=k, include_qubit=False)
            for n_target in n_targets:
                for delta, alpha0 in find_alpha0(cfg, k, n_target, pool):
                    emap = EncodingMap(0.7 * alpha0, 1.3 * alpha0,
                                       cfg.encoding.data_min, cfg.encoding.data_max)
                    cell_phys = phys.with_(delta_c=delta)
                    r = _grow_truncation(cell_phys, lambda p: _sine_square_cell(
                        cfg, p, emap, cfg.measurement, cfg.seed,
                        cfg.sample_offsets, pool, cache))
                    rows.append((k / TWO_PI, n_target, delta / TWO_PI, alpha0,
                                 r.nrmse, r.accuracy))
    names = ["k_cc_mhz", "n_target", "delta_mhz", "alpha0", "nrmse", "accuracy"]
    return _rows_to_table("kerr-isolation", digest, names, rows)


def poisson_reference_curve(cfg: ExperimentConfig) -> ResultTable:
    """Kerr-free oracle populations over the population grid (diagnostic)."""
    digest = config_digest(cfg, "populations-oracle")
    phys = cfg.physical.with_(k_cc=0.0)
    n_states = cfg.measurement.n_states
    rows = []
    for amp in cfg.population_grid:
        schedule = PulseSchedule.constant(complex(amp), cfg.pulse_duration)
        pops = linear_cavity_populations(schedule, phys, n_states)[0]
        rows.append((amp, *pops))
    names = ["alpha_in"] + [f"P{n}" for n in range(n_states)]
    return _rows_to_table("populations-oracle", digest, names, rows)
