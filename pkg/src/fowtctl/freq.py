"""Frequency-domain evaluation: full transfer matrix and reduced filters.

The full 4x4 transfer matrix is (sI - A)^-1 [Bc | Bd].  The reduced
rotor (band-pass) and platform (low-pass) filters come from the
decoupled second-order forms and are what the Bode sweep emits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NearPoleError, ParameterError
from .model import AeroSensitivities, StateSpace, StructuralParams
from .stability import platform_summary, rotor_summary


@dataclass(frozen=True)
class FrequencyResponse:
    """Magnitude/phase samples over a strictly increasing grid.
    Magnitude is linear and phase is in radians inside the library; the
    CLI converts to dB/degrees on output."""

    nu_grid: np.ndarray   # rad/s
    magnitude: np.ndarray
    phase: np.ndarray     # rad
    label: str
    degenerate: bool = False

    def __post_init__(self):
        if np.any(np.diff(self.nu_grid) <= 0.0):
            raise ParameterError("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(self.magnitude)):
            raise ParameterError("magnitude not finite on grid (pole on grid?)")


def eval_G(ss: StateSpace, s: complex) -> np.ndarray:
    """Entrywise (sI - A)^-1 [Bc | Bd] at one complex frequency.

    Input ordering: (beta_ol, tau_g_ol, v, w).  Raises NearPoleError if
    s sits within 1e-9 (relative) of an eigenvalue of A.
    """
    a = ss.closed
    eigs = np.linalg.eigvals(a)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(eigs))))
    if np.min(np.abs(eigs - s)) < tol:
        raise NearPoleError(f"s = {s} is within {tol:.2e} of a pole")
    return np.linalg.solve(s * np.eye(4) - a, ss.b_full())


def default_grid(params: StructuralParams, n: int = 400) -> np.ndarray:
    """400 log-spaced points spanning [nu_plt/100, 100*nu_plt]."""
    nu_plt = math.sqrt(params.kt / params.jt)
    return np.logspace(math.log10(nu_plt / 100.0), math.log10(100.0 * nu_plt), n)


def bode_gplt(params: StructuralParams, sens: AeroSensitivities, kbeta: float,
              nu_grid: np.ndarray, input_channel: str = "wave") -> FrequencyResponse:
    """Closed-form second-order low-pass of the reduced platform
    dynamics, from wind ("wind") or wave ("wave") forcing to phi."""
    summ = platform_summary(params, sens, kbeta)
    if input_channel == "wave":
        dc = sens.dtw_dw / params.kt
        label = "phi<-w"
    elif input_channel == "wind":
        dc = params.ht * sens.dfa_dv / params.kt
        label = "phi<-v"
    else:
        raise ParameterError(f"unknown input channel {input_channel!r}")
    nu = np.asarray(nu_grid, dtype=float)
    h = dc / (1.0 - (nu / summ.nu) ** 2 + 2j * summ.zeta * nu / summ.nu)
    return FrequencyResponse(nu_grid=nu, magnitude=np.abs(h),
                             phase=np.unwrap(np.angle(h)), label=label)


def bode_grot(params: StructuralParams, sens: AeroSensitivities, kp: float,
              ki: float, nu_grid: np.ndarray) -> FrequencyResponse:
    """Band-pass response of the reduced rotor loop, wind to omega.

    If the band-pass parameterisation degenerates (ki <= 0 radicand),
    the raw rational form is evaluated instead and flagged.
    """
    nu = np.asarray(nu_grid, dtype=float)
    g = params.ng / params.jr
    summ = rotor_summary(params, sens, kp, ki)
    s = 1j * nu
    denom = s ** 2 - g * sens.dta_domega * s - g * sens.dta_dbeta * (kp * s + ki)
    h = g * sens.dta_dv * s / denom
    return FrequencyResponse(nu_grid=nu, magnitude=np.abs(h),
                             phase=np.unwrap(np.angle(h)), label="omega<-v",
                             degenerate=summ.degenerate)


def damped_band(params: StructuralParams) -> tuple[float, float]:
    """Angular-frequency interval around nu_plt where imposing extra
    platform damping visibly reduces the response:
    (nu_plt/sqrt(2), sqrt(2)*nu_plt)."""
    nu_plt = math.sqrt(params.kt / params.jt)
    return nu_plt / math.sqrt(2.0), math.sqrt(2.0) * nu_plt
