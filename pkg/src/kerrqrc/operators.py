"""Truncated-Fock-space operators and rotating-frame Hamiltonians.

Tensor ordering for the joint model is cavity-major, qubit-minor: the basis
index is ``2*n + q`` with qubit states ordered (g, e).  sigma_z is -1 on the
ground state, +1 on the excited state.
"""

from __future__ import annotations

import cmath

import numpy as np

from .config import PhysicalConfig

SIGMA_Z = np.diag([-1.0 + 0j, 1.0 + 0j])
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|


def annihilation(n_fock: int) -> np.ndarray:
    """Bosonic annihilation operator on the first ``n_fock`` Fock states."""
    if n_fock < 2:
        raise ValueError(f"n_fock must be >= 2, got {n_fock}")
    a = np.zeros((n_fock, n_fock), dtype=complex)
    m = np.arange(n_fock - 1)
    a[m, m + 1] = np.sqrt(m + 1.0)
    return a


def number_operator(n_fock: int) -> np.ndarray:
    return np.diag(np.arange(n_fock, dtype=float)).astype(complex)


def build_hamiltonian(cfg: PhysicalConfig, drive_amp: complex) -> np.ndarray:
    """Rotating-frame Hamiltonian (units of rad/us) for a given drive amplitude.

    Cavity-only:
        H = delta_c * n + k_cc * n^2 + sqrt(kappa_ext) * (amp * adag + conj(amp) * a)

    With the ancilla, on the cavity (x) qubit tensor space:
        H = delta_c * n + delta_q * sz/2 - (chi/2) * n * sz
            + k_cc * n^2 + k_cq * n^2 * sz/2 + drive term
    """
    if not (cmath.isfinite(drive_amp)):
        raise ValueError(f"drive_amp must be finite, got {drive_amp!r}")
    n_fock = cfg.n_fock
    a = annihilation(n_fock)
    num = number_operator(n_fock)
    num2 = num @ num
    drive = np.sqrt(cfg.kappa_ext) * (drive_amp * a.conj().T + np.conj(drive_amp) * a)

    h_cav = cfg.delta_c * num + cfg.k_cc * num2 + drive
    if not cfg.include_qubit:
        return h_cav

    eye_c = np.eye(n_fock, dtype=complex)
    eye_q = np.eye(2, dtype=complex)
    h = np.kron(h_cav, eye_q)
    h += cfg.delta_q / 2.0 * np.kron(eye_c, SIGMA_Z)
    h += -cfg.chi / 2.0 * np.kron(num, SIGMA_Z)
    h += cfg.k_cq / 2.0 * np.kron(num2, SIGMA_Z)
    return h


def lindblad_ops(cfg: PhysicalConfig) -> list[tuple[float, np.ndarray]]:
    """Collapse operators as (rate, operator) pairs on the full tensor space.

    Cavity decay at kappa_ext + kappa_int always; qubit decay (1/t1) and pure
    dephasing (kappa_phi/2 on sigma_z) when the ancilla is included.
    """
    a = annihilation(cfg.n_fock)
    if not cfg.include_qubit:
        return [(cfg.kappa_tot, a)]
    eye_c = np.eye(cfg.n_fock, dtype=complex)
    eye_q = np.eye(2, dtype=complex)
    return [
        (cfg.kappa_tot, np.kron(a, eye_q)),
        (1.0 / cfg.t1_qubit, np.kron(eye_c, SIGMA_MINUS)),
        (cfg.kappa_phi / 2.0, np.kron(eye_c, SIGMA_Z)),
    ]
