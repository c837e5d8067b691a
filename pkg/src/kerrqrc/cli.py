"""Command-line front end.

Subcommands map one-to-one onto the experiment pipelines; a small INI config
file (sections [physical], [measurement], [encoding], [task], [sweep],
[run]) mirrors ExperimentConfig.  Rates in the file are linear frequencies
in MHz and are converted to angular rad/us at parse time; amplitudes are in
sqrt(MHz) and times in the units named by each key.  Dotted-path overrides
(--set section.key=value) are applied after the file; unknown keys are hard
errors with a nearest-key suggestion.
"""

from __future__ import annotations

import argparse
import configparser
import difflib
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import TWO_PI, PhysicalConfig
from .measurement import MeasurementModel
from .tasks import EncodingMap
from .experiments import (ExperimentConfig, ResultTable, config_digest,
                          run_kerr_isolation, run_kerr_photon_map,
                          run_kerr_task_sweep, run_mackey_glass,
                          run_population_curves, run_sine_square)

EXPERIMENTS = ("populations", "sinesquare", "mackeyglass",
               "kerr-map", "kerr-sweep", "kerr-isolation")


class ConfigError(ValueError):
    """A config file or override that cannot be applied."""


# --- file-value codecs -----------------------------------------------------

def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_floats(s: str) -> tuple[float, ...]:
    """Comma list of floats, or lo:hi:n for an inclusive linear grid."""
    s = s.strip()
    if ":" in s and "," not in s and ";" not in s:
        lo, hi, n = s.split(":")
        return tuple(float(x) for x in np.linspace(float(lo), float(hi), int(n)))
    return tuple(float(x) for x in s.split(",") if x.strip())


def _parse_ints(s: str) -> tuple[int, ...]:
    s = s.strip()
    if ":" in s and "," not in s:
        lo, hi = s.split(":")[:2]
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(x) for x in s.split(",") if x.strip())


def _parse_pairs(s: str) -> tuple[tuple[float, float], ...]:
    """Semicolon list of lo:hi pairs, e.g. '1:3;1:6;1:10.4'."""
    out = []
    for part in s.split(";"):
        part = part.strip()
        if not part:
            continue
        lo, hi = part.split(":")
        out.append((float(lo), float(hi)))
    return tuple(out)


def _parse_subsets(s: str) -> tuple[tuple[float, ...], ...]:
    """Semicolon list of comma lists of sample times in ns (offsets into the
    second pulse), e.g. '200;100,200;50,100,150,200'."""
    out = []
    for part in s.split(";"):
        part = part.strip()
        if not part:
            continue
        out.append(tuple(float(x) * 1e-3 for x in part.split(",")))
    return tuple(out)


def _fmt_floats(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def _fmt_ints(values) -> str:
    return ",".join(str(int(v)) for v in values)


def _fmt_pairs(values) -> str:
    return ";".join(f"{lo!r}:{hi!r}" for lo, hi in values)


def _fmt_subsets(values) -> str:
    return ";".join(",".join(repr(t * 1e3) for t in subset) for subset in values)


_MHZ = ("mhz", lambda s: TWO_PI * float(s), lambda v: repr(v / TWO_PI))
_MHZ_LIST = ("mhz list", lambda s: tuple(TWO_PI * x for x in _parse_floats(s)),
             lambda v: _fmt_floats(x / TWO_PI for x in v))
_FLOAT = ("float", float, lambda v: repr(float(v)))
_INT = ("int", int, lambda v: str(int(v)))
_BOOL = ("bool", _parse_bool, lambda v: "true" if v else "false")
_FLOATS = ("float list", _parse_floats, _fmt_floats)
_INTS = ("int list", _parse_ints, _fmt_ints)
_PAIRS = ("range list", _parse_pairs, _fmt_pairs)
_SUBSETS = ("time subsets", _parse_subsets, _fmt_subsets)

# section -> key -> (codec, attribute path into ExperimentConfig)
SCHEMA: dict[str, dict[str, tuple[tuple, tuple[str, ...]]]] = {
    "physical": {
        "n_fock": (_INT, ("physical", "n_fock")),
        "include_qubit": (_BOOL, ("physical", "include_qubit")),
        "delta_c": (_MHZ, ("physical", "delta_c")),
        "delta_q": (_MHZ, ("physical", "delta_q")),
        "chi": (_MHZ, ("physical", "chi")),
        "k_cc": (_MHZ, ("physical", "k_cc")),
        "k_cq": (_MHZ, ("physical", "k_cq")),
        "kappa_ext": (_MHZ, ("physical", "kappa_ext")),
        "kappa_int": (_MHZ, ("physical", "kappa_int")),
        "t1_qubit": (_FLOAT, ("physical", "t1_qubit")),
        "kappa_phi": (_MHZ, ("physical", "kappa_phi")),
    },
    "measurement": {
        "n_states": (_INT, ("measurement", "n_states")),
        "shots": (_INT, ("measurement", "shots")),
        "distortion_a": (_FLOAT, ("measurement", "distortion_a")),
        "distortion_b": (_FLOAT, ("measurement", "distortion_b")),
    },
    "encoding": {
        "alpha_min": (_FLOAT, ("encoding", "alpha_min")),
        "alpha_max": (_FLOAT, ("encoding", "alpha_max")),
        "data_min": (_FLOAT, ("encoding", "data_min")),
        "data_max": (_FLOAT, ("encoding", "data_max")),
    },
    "task": {
        "n_periods": (_INT, ("n_periods",)),
        "greedy_k": (_INT, ("greedy_k",)),
        "n_points": (_INT, ("n_points",)),
        "tau": (_FLOAT, ("mg_tau",)),
        "history": (_INT, ("mg_history",)),
        "delays": (_INTS, ("mg_delays",)),
    },
    "sweep": {
        "seeds": (_INTS, ("seeds",)),
        "kappa_phi_list": (_MHZ_LIST, ("kappa_phi_list",)),
        "shots_list": (_INTS, ("shots_list",)),
        "n_states_list": (_INTS, ("n_states_list",)),
        "time_subsets": (_SUBSETS, ("time_subsets",)),
        "ranges": (_PAIRS, ("ranges",)),
        "kerr_list": (_MHZ_LIST, ("kerr_list",)),
        "detuning_grid": (_MHZ_LIST, ("detuning_grid",)),
        "amp_grid": (_FLOATS, ("amp_grid",)),
        "population_grid": (_FLOATS, ("population_grid",)),
        "n_targets": (_INTS, ("n_targets",)),
    },
    "run": {
        "seed": (_INT, ("seed",)),
        "workers": (_INT, ("workers",)),
        "dt_ns": (("float", lambda s: float(s) * 1e-3, lambda v: repr(v * 1e3)),
                  ("dt",)),
    },
}


def _suggest(word: str, options) -> str:
    close = difflib.get_close_matches(word, list(options), n=1)
    return f"; did you mean {close[0]!r}?" if close else ""


def _apply_value(cfg: ExperimentConfig, section: str, key: str,
                 raw: str) -> ExperimentConfig:
    if section not in SCHEMA:
        raise ConfigError(f"unknown config section [{section}]"
                          + _suggest(section, SCHEMA))
    if key not in SCHEMA[section]:
        raise ConfigError(f"unknown key {key!r} in section [{section}]"
                          + _suggest(key, SCHEMA[section]))
    (_, parse, _), path = SCHEMA[section][key]
    try:
        value = parse(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(
            f"invalid value for {section}.{key}: {raw!r} ({exc})") from exc
    try:
        if len(path) == 2:
            inner = replace(getattr(cfg, path[0]), **{path[1]: value})
            return replace(cfg, **{path[0]: inner})
        return replace(cfg, **{path[0]: value})
    except ValueError as exc:
        raise ConfigError(f"invalid {section}.{key}: {exc}") from exc


def resolved_config_dict(cfg: ExperimentConfig) -> dict[str, dict[str, str]]:
    """The config rendered back to file-unit strings; re-parseable."""
    out: dict[str, dict[str, str]] = {}
    for section, keys in SCHEMA.items():
        out[section] = {}
        for key, ((_, _, fmt), path) in keys.items():
            obj = getattr(cfg, path[0])
            value = getattr(obj, path[1]) if len(path) == 2 else obj
            out[section][key] = fmt(value)
    return out


def config_from_dict(data: dict[str, dict[str, str]],
                     base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = base if base is not None else ExperimentConfig()
    for section, keys in data.items():
        for key, raw in keys.items():
            cfg = _apply_value(cfg, section, key, raw)
    return cfg


def parse_config(path: str | None, overrides: list[str] = ()) -> ExperimentConfig:
    """Load an INI config (empty or missing sections mean defaults) and then
    apply dotted-path overrides ('section.key=value')."""
    cfg = ExperimentConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"config parse failure: {exc}") from exc
        for section in parser.sections():
            for key, raw in parser.items(section):
                cfg = _apply_value(cfg, section, key, raw)
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(
                f"override must look like section.key=value, got {item!r}")
        dotted, raw = item.split("=", 1)
        section, key = dotted.split(".", 1)
        cfg = _apply_value(cfg, section.strip(), key.strip(), raw.strip())
    return cfg


# --- dispatch ---------------------------------------------------------------

_RUNNERS = {
    "populations": run_population_curves,
    "sinesquare": run_sine_square,
    "mackeyglass": run_mackey_glass,
    "kerr-map": run_kerr_photon_map,
    "kerr-sweep": run_kerr_task_sweep,
    "kerr-isolation": run_kerr_isolation,
}


def _headline(table: ResultTable) -> dict:
    cols = table.columns
    metrics: dict[str, float] = {"rows": table.n_rows}
    if "accuracy" in cols and cols["accuracy"]:
        metrics["accuracy"] = float(np.mean(cols["accuracy"]))
    if "greedy_accuracy" in cols and cols["greedy_accuracy"]:
        metrics["greedy_accuracy"] = float(np.mean(cols["greedy_accuracy"]))
    if "nrmse" in cols and cols["nrmse"]:
        metrics["nrmse_min"] = float(np.min(cols["nrmse"]))
        metrics["nrmse_mean"] = float(np.mean(cols["nrmse"]))
    if "mean_n" in cols and cols["mean_n"]:
        metrics["mean_n_max"] = float(np.max(cols["mean_n"]))
    return metrics


def _write_table_json(table: ResultTable, path: Path) -> None:
    payload = {
        "experiment": table.experiment,
        "config": table.config_hash,
        "version": table.version,
        "columns": table.columns,
    }
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def dispatch(subcommand: str, cfg: ExperimentConfig, out_dir: str,
             fmt: str = "csv", figures: bool = True) -> int:
    """Run one experiment, write its table (+ JSON summary, + figure), and
    print the summary."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"error: output directory {out_dir!r} is not writable: {exc}",
              file=sys.stderr)
        return 1

    runner = _RUNNERS[subcommand]
    try:
        table = runner(cfg)
    except Exception as exc:
        print(f"error: experiment {subcommand!r} failed: {exc}", file=sys.stderr)
        return 1

    stem = f"{subcommand}-{table.config_hash}"
    outputs = []
    if fmt == "json":
        table_path = out / f"{stem}.table.json"
        _write_table_json(table, table_path)
    else:
        table_path = out / f"{stem}.csv"
        table.to_csv(table_path)
    outputs.append(table_path.name)

    if figures:
        from .figures import render_figure
        fig_path = out / f"{stem}.png"
        render_figure(table, fig_path)
        outputs.append(fig_path.name)

    summary = {
        "experiment": subcommand,
        "config_hash": table.config_hash,
        "version": __version__,
        "created_at": table.created_at,
        "seed": cfg.seed,
        "metrics": _headline(table),
        "outputs": outputs,
        "resolved_config": resolved_config_dict(cfg),
    }
    summary_path = out / f"{stem}.json"
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(json.dumps({k: summary[k] for k in
                      ("experiment", "config_hash", "metrics", "outputs")},
                     indent=2))
    return 0


# --- selftest ---------------------------------------------------------------

def run_selftest() -> int:
    """Analytic-oracle suite: each check prints one pass/fail line."""
    import math

    from .analytic import (invert_linear_amplitude, linear_cavity_populations,
                           poisson_populations)
    from .dynamics import (PulseSchedule, check_density_matrix, evolve,
                           fock_state, lindblad_rhs, partial_trace_qubit,
                           structured_rhs, vacuum_state)
    from .operators import annihilation, build_hamiltonian, lindblad_ops
    from .readout import FeatureMatrix, nrmse, predict, ridge_fit
    from .tasks import gen_mackey_glass, threshold_classifier_ceiling

    checks: list[tuple[str, bool]] = []

    def check(name: str, ok: bool) -> None:
        checks.append((name, bool(ok)))
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")

    a = annihilation(6)
    comm = a @ a.conj().T - a.conj().T @ a
    expected = np.eye(6, dtype=complex)
    expected[5, 5] = -5.0
    check("annihilation commutator identity",
          float(np.max(np.abs(comm - expected))) < 1e-12)

    cfg = PhysicalConfig(n_fock=8, include_qubit=True, kappa_phi=0.4, delta_q=1.0)
    h = build_hamiltonian(cfg, 1.3 - 0.8j)
    check("hamiltonian hermitian", float(np.max(np.abs(h - h.conj().T))) < 1e-12)

    kappa = 0.7
    rhs = lindblad_rhs(fock_state(1, 4), np.zeros((4, 4), complex),
                       [(kappa, annihilation(4))])
    ref = np.zeros((4, 4), complex)
    ref[0, 0], ref[1, 1] = kappa, -kappa
    check("dissipator on one-photon state", float(np.max(np.abs(rhs - ref))) < 1e-12)

    rng = np.random.default_rng(3)
    m = rng.normal(size=(cfg.dim, cfg.dim)) + 1j * rng.normal(size=(cfg.dim, cfg.dim))
    rho = 0.5 * (m + m.conj().T)
    dense = lindblad_rhs(rho, h, lindblad_ops(cfg))
    fast = structured_rhs(rho, cfg, 1.3 - 0.8j)
    check("structured kernel matches dense rhs",
          float(np.max(np.abs(dense - fast))) < 1e-10)

    lin = PhysicalConfig(k_cc=0.0)
    sched = PulseSchedule.constant(6.0, 0.2, (0.1, 0.2))
    snaps = evolve(vacuum_state(lin.dim), lin, sched)
    oracle = linear_cavity_populations(sched, lin, lin.n_fock)
    err = max(float(np.max(np.abs(np.real(np.diag(s)) - p)))
              for s, p in zip(snaps, oracle))
    check("linear-cavity populations match Poisson oracle (<1e-6)", err < 1e-6)

    kerr_sched = PulseSchedule(((0.2, 10.4 + 0j), (0.2, 10.4 + 0j)), (0.3, 0.4))
    dev = PhysicalConfig()
    s_full = evolve(vacuum_state(dev.dim), dev, kerr_sched)
    s_half = evolve(vacuum_state(dev.dim), dev, kerr_sched, dt=0.25e-3)
    diff = max(float(np.max(np.abs(x - y))) for x, y in zip(s_full, s_half))
    check("dt halving changes snapshots by <1e-8", diff < 1e-8)

    ok = True
    try:
        for s in s_full:
            check_density_matrix(s)
    except ValueError:
        ok = False
    check("trace/hermiticity/positivity invariants", ok)

    bell = np.zeros((4, 4), complex)  # (|0,g> + |1,e>)/sqrt(2), cavity-major
    bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
    reduced = partial_trace_qubit(bell)
    check("partial trace of entangled state",
          float(np.max(np.abs(reduced - 0.5 * np.eye(2)))) < 1e-12)

    f = FeatureMatrix.from_features(rng.normal(size=(50, 6)))
    y = rng.normal(size=(50, 2))
    beta = 0.1
    model = ridge_fit(f, y, beta)
    brute = np.linalg.solve(f.values.T @ f.values + beta * np.eye(7),
                            f.values.T @ y)
    check("ridge matches normal-equation solve",
          float(np.max(np.abs(model.weights - brute))) < 1e-10)
    grad = f.values.T @ (predict(model, f) - y) + beta * model.weights
    scale = float(np.max(np.abs(f.values.T @ y)))
    check("ridge residual gradient vanishes",
          float(np.max(np.abs(grad))) < 1e-8 * scale)

    check("nrmse hand values",
          abs(nrmse([1.0, 0.0], [0.0, 1.0]) - 1.0) < 1e-15
          and abs(nrmse([1.0, 1.0], [0.0, 2.0]) - 0.5) < 1e-15)

    check("memoryless threshold ceiling is 11/16",
          threshold_classifier_ceiling() == 11.0 / 16.0)

    series = gen_mackey_glass(40, 17.0, 0, beta=0.0, burn_in=0.0)
    t = np.arange(1, 41)
    decay_err = float(np.max(np.abs(series.values - 1.2 * np.exp(-0.1 * t))))
    check("mackey-glass decay oracle (<1e-6)", decay_err < 1e-6)

    amp = invert_linear_amplitude(1.0, 0.4, lin)
    got = poisson_populations(1.0, 3)
    check("poisson formula vs analytic inversion",
          abs(got[0] - math.exp(-1.0)) < 1e-12 and amp > 0)

    failed = [name for name, ok in checks if not ok]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 1 if failed else 0


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerrqrc",
        description="Kerr-cavity quantum reservoir computing simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    descriptions = {
        "populations": "occupation probabilities vs displacement amplitude",
        "sinesquare": "sine/square waveform classification (and its sweeps)",
        "mackeyglass": "Mackey-Glass delay-prediction NRMSE curve",
        "kerr-map": "mean photon number over (Kerr, detuning, amplitude)",
        "kerr-sweep": "classification error over (Kerr, detuning, range)",
        "kerr-isolation": "classification error at matched photon number",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=descriptions[name])
        p.add_argument("--config", default=None, help="INI config file")
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       dest="overrides", help="override, e.g. physical.k_cc=-0.3")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads (default: hardware parallelism)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--no-figures", action="store_true",
                       help="skip rendering the PNG companion figure")

    sub.add_parser("selftest", help="run the analytic-oracle checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.subcommand == "selftest":
        return run_selftest()
    try:
        cfg = parse_config(args.config, args.overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = cfg.with_(seed=args.seed)
    if args.workers is not None:
        cfg = cfg.with_(workers=args.workers)
    return dispatch(args.subcommand, cfg, args.out, args.format,
                    figures=not args.no_figures)


if __name__ == "__main__":
    raise SystemExit(main())
