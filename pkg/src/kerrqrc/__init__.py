"""Quantum reservoir computing with a driven Kerr cavity and a dispersive
ancilla: Lindblad simulation, Fock-probability features, ridge readout, and
the benchmark experiment pipelines."""

__version__ = "0.1.0"

from .config import PhysicalConfig, default_joint_config, rate_from_mhz, rate_to_mhz
from .dynamics import (DT_DEFAULT, PulseSchedule, TruncationOverflowError,
                       coherent_state, evolve, lindblad_rhs, mean_photon,
                       partial_trace_qubit, vacuum_state)
from .measurement import (FeatureVector, MeasurementModel, apply_distortion,
                          extract_features, fock_probabilities, sample_shots)
from .operators import annihilation, build_hamiltonian, lindblad_ops
from .readout import (FeatureMatrix, ReadoutModel, classify_accuracy,
                      greedy_select, nrmse, predict, ridge_fit)
from .tasks import (EncodingMap, MackeyGlassSeries, WaveformDataset, encode,
                    gen_mackey_glass, gen_sine_square)

__all__ = [
    "__version__",
    "PhysicalConfig", "default_joint_config", "rate_from_mhz", "rate_to_mhz",
    "DT_DEFAULT", "PulseSchedule", "TruncationOverflowError", "coherent_state",
    "evolve", "lindblad_rhs", "mean_photon", "partial_trace_qubit", "vacuum_state",
    "FeatureVector", "MeasurementModel", "apply_distortion", "extract_features",
    "fock_probabilities", "sample_shots",
    "annihilation", "build_hamiltonian", "lindblad_ops",
    "FeatureMatrix", "ReadoutModel", "classify_accuracy", "greedy_select",
    "nrmse", "predict", "ridge_fit",
    "EncodingMap", "MackeyGlassSeries", "WaveformDataset", "encode",
    "gen_mackey_glass", "gen_sine_square",
]
