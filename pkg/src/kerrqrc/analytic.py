"""Closed-form references for the linear (Kerr-free) cavity.

With k_cc = 0 a classical drive keeps the cavity in a coherent state whose
amplitude obeys

    d alpha/dt = -i sqrt(kappa_ext) * amp - (i*delta + kappa_tot/2) * alpha,

so Fock populations are Poissonian in |alpha(t)|^2.  These formulas are the
independent oracle against which the master-equation integrator is checked;
they must stay free of any dependency on the integrator.
"""

from __future__ import annotations

import math

import numpy as np

from .config import PhysicalConfig
from .dynamics import PulseSchedule


def drive_response(amp: complex, t: float, kappa_ext: float, kappa_tot: float,
                   delta: float = 0.0, alpha0: complex = 0.0) -> complex:
    """Coherent amplitude after a constant drive of duration t."""
    z = 1j * delta + kappa_tot / 2.0
    force = -1j * math.sqrt(kappa_ext) * amp
    if abs(z) < 1e-14:
        return alpha0 + force * t
    decay = np.exp(-z * t)
    return alpha0 * decay + force / z * (1.0 - decay)


def schedule_response(schedule: PulseSchedule, kappa_ext: float, kappa_tot: float,
                      delta: float = 0.0) -> list[complex]:
    """Coherent amplitude at each schedule sample time, starting from vacuum."""
    out = []
    for t in schedule.sample_times:
        alpha = 0.0 + 0.0j
        elapsed = 0.0
        remaining = t
        for dur, amp in schedule.segments:
            step = min(dur, remaining)
            if step <= 0:
                break
            alpha = drive_response(amp, step, kappa_ext, kappa_tot, delta, alpha)
            elapsed += step
            remaining -= step
        out.append(alpha)
    return out


def poisson_populations(n_mean: float, n_states: int) -> np.ndarray:
    """P_n = exp(-n_mean) * n_mean^n / n! for n = 0..n_states-1."""
    n = np.arange(n_states)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n_states)))))
    with np.errstate(divide="ignore", invalid="ignore"):
        log_p = -n_mean + n * (np.log(n_mean) if n_mean > 0 else -np.inf) - log_fact
    p = np.exp(log_p)
    if n_mean == 0:
        p = np.zeros(n_states)
        p[0] = 1.0
    return p


def linear_cavity_populations(schedule: PulseSchedule, cfg: PhysicalConfig,
                              n_states: int) -> list[np.ndarray]:
    """Poisson populations at every sample time for the Kerr-free cavity."""
    if cfg.k_cc != 0.0:
        raise ValueError("the linear-cavity oracle requires k_cc = 0")
    alphas = schedule_response(schedule, cfg.kappa_ext, cfg.kappa_tot, cfg.delta_c)
    return [poisson_populations(abs(a) ** 2, n_states) for a in alphas]


def linear_mean_photon(amp: complex, t: float, cfg: PhysicalConfig) -> float:
    """|alpha(t)|^2 for a constant drive from vacuum without Kerr."""
    a = drive_response(amp, t, cfg.kappa_ext, cfg.kappa_tot, cfg.delta_c)
    return abs(a) ** 2


def invert_linear_amplitude(n_target: float, t: float, cfg: PhysicalConfig) -> float:
    """Drive amplitude giving mean photon number n_target after time t
    (Kerr-free, analytic inversion; the response is linear in the drive)."""
    base = linear_mean_photon(1.0, t, cfg)
    if base <= 0:
        raise ValueError("degenerate response; cannot invert")
    return math.sqrt(n_target / base)
