"""Time-domain integration of the closed loop and disturbance synthesis.

Disturbances (blade-pitch steps, wind steps, monochromatic and JONSWAP
waves, wind files) are turned into continuous input signals; the linear
closed loop is integrated with classical RK4 or with the exact
zero-order-hold discretization.  Blade-pitch saturation and rate limits
can be applied at the actuator boundary, which makes the loop mildly
nonlinear and disables the exact method.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import ParameterError
from .model import AeroSensitivities, ControlGains, StateSpace, StructuralParams

DISTURBANCE_KINDS = ("step-beta", "step-wind", "mono-wave", "jonswap-wave", "wind-file")


@dataclass
class TimeSeries:
    """Uniformly sampled multi-channel signal."""

    dt: float
    channels: dict[str, np.ndarray]
    units: dict[str, str] = field(default_factory=dict)
    t0: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ParameterError(f"dt must be > 0 (got {self.dt})")
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) > 1:
            raise ParameterError(f"channel lengths differ: {lengths}")

    def __len__(self) -> int:
        return len(next(iter(self.channels.values()))) if self.channels else 0

    @property
    def time(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    def window(self, t_start: float, t_end: float | None = None) -> "TimeSeries":
        """Sub-series restricted to [t_start, t_end]."""
        t = self.time
        mask = t >= t_start
        if t_end is not None:
            mask &= t <= t_end
        idx = np.flatnonzero(mask)
        return TimeSeries(
            dt=self.dt,
            channels={k: v[idx] for k, v in self.channels.items()},
            units=dict(self.units),
            t0=float(t[idx[0]]) if idx.size else self.t0,
            meta=dict(self.meta),
        )

    def to_csv(self, path, header_lines: list[str] | None = None):
        names = list(self.channels)
        with open(path, "w", newline="") as fh:
            for line in header_lines or []:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(["t [s]"] + [f"{n} [{self.units.get(n, '-')}]" for n in names])
            t = self.time
            cols = [self.channels[n] for n in names]
            for i in range(len(self)):
                writer.writerow([f"{t[i]:.6f}"] + [f"{c[i]:.12g}" for c in cols])

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        with open(path) as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        header, data = rows[0], rows[1:]
        names, units = [], {}
        for col in header[1:]:
            name, _, unit = col.partition(" [")
            names.append(name)
            units[name] = unit.rstrip("]")
        arr = np.array(data, dtype=float)
        t = arr[:, 0]
        dt = float(t[1] - t[0]) if len(t) > 1 else 1.0
        channels = {n: arr[:, i + 1] for i, n in enumerate(names)}
        return cls(dt=dt, channels=channels, units=units, t0=float(t[0]))


@dataclass(frozen=True)
class DisturbanceSpec:
    """One external input contribution.

    kind selects the target channel: step-beta feeds the open-loop blade
    pitch, step-wind and wind-file feed the wind speed, the wave kinds
    feed the wave forcing signal.
    """

    kind: str
    amplitude: float = 0.0  # step height or wave height, channel units
    period: float = 0.0     # wave period Tp, s
    onset: float = 0.0      # step onset time, s
    hs: float = 0.0         # significant wave height, m (jonswap)
    gamma: float = 1.0      # peak-enhancement factor (jonswap)
    seed: int | None = None
    path: str | None = None  # two-column CSV (t, v) for wind-file

    def __post_init__(self):
        if self.kind not in DISTURBANCE_KINDS:
            raise ParameterError(f"unknown disturbance kind {self.kind!r}")
        if self.kind in ("mono-wave", "jonswap-wave") and self.period <= 0.0:
            raise ParameterError(f"{self.kind} requires period > 0")
        if self.hs < 0.0:
            raise ParameterError(f"hs must be >= 0 (got {self.hs})")
        if self.onset < 0.0:
            raise ParameterError(f"onset must be >= 0 (got {self.onset})")
        if self.kind == "jonswap-wave" and self.seed is None:
            raise ParameterError("jonswap-wave requires a seed")
        if self.kind == "wind-file" and self.path is None:
            raise ParameterError("wind-file requires a path")


def mono_wave(tp: float, hw: float, dt: float, t_end: float, t0: float = 0.0) -> TimeSeries:
    """Monochromatic wave signal: sinusoid of period tp, peak-to-trough
    height hw (amplitude hw/2)."""
    if tp <= 0.0:
        raise ParameterError(f"tp must be > 0 (got {tp})")
    t = t0 + dt * np.arange(int(round(t_end / dt)) + 1)
    w = 0.5 * hw * np.sin(2.0 * math.pi * t / tp)
    return TimeSeries(dt=dt, channels={"w": w}, units={"w": "m"}, t0=t0)


def jonswap_spectrum(f: np.ndarray, hs: float, tp: float, gamma: float) -> np.ndarray:
    """JONSWAP spectral density on frequency grid f (Hz), normalized so
    the zeroth moment equals (hs/4)^2."""
    f = np.asarray(f, dtype=float)
    fp = 1.0 / tp
    s = np.zeros_like(f)
    pos = f > 0.0
    fpos = f[pos]
    sigma = np.where(fpos <= fp, 0.07, 0.09)
    peak = np.exp(-((fpos - fp) ** 2) / (2.0 * sigma ** 2 * fp ** 2))
    shape = fpos ** -5 * np.exp(-1.25 * (fp / fpos) ** 4) * gamma ** peak
    m0 = np.trapezoid(shape, fpos)
    if m0 > 0.0:
        s[pos] = shape * (hs / 4.0) ** 2 / m0
    return s


def jonswap_wave(hs: float, tp: float, gamma: float, seed: int,
                 dt: float, t_end: float) -> TimeSeries:
    """Irregular wave synthesis: inverse-FFT of the JONSWAP spectrum with
    seeded random phases.  Deterministic for a given seed."""
    if tp <= 0.0:
        raise ParameterError(f"tp must be > 0 (got {tp})")
    if t_end < 10.0 * tp:
        warnings.warn(f"duration {t_end} s short for spectral resolution "
                      f"(< 10*Tp = {10 * tp} s)", UserWarning, stacklevel=2)
    n = int(round(t_end / dt)) + 1
    f = np.fft.rfftfreq(n, dt)
    df = f[1] if len(f) > 1 else 1.0
    s = jonswap_spectrum(f, hs, tp, gamma)
    amp = np.sqrt(2.0 * s * df)
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=len(f))
    spec = 0.5 * n * amp * np.exp(1j * phases)
    spec[0] = 0.0
    if n % 2 == 0:
        spec[-1] = 0.0
    w = np.fft.irfft(spec, n=n)
    return TimeSeries(dt=dt, channels={"w": w}, units={"w": "m"})


def load_wind_file(path):
    """Two-column CSV (t, v); returns a callable with linear interpolation."""
    data = np.loadtxt(path, delimiter=",", comments="#")
    if data.ndim != 2 or data.shape[1] < 2:
        raise ParameterError(f"wind file {path} must have two columns (t, v)")
    t, v = data[:, 0], data[:, 1]
    return lambda tt: np.interp(tt, t, v)


def build_inputs(disturbances, dt: float, t_end: float):
    """Combine disturbance specs into callables (beta_ol, v, w) of time.

    Accepts scalars or arrays; contributions to the same channel add."""
    steps_beta, steps_wind, funcs_wind, monos = [], [], [], []
    irregular = None
    for spec in disturbances:
        if spec.kind == "step-beta":
            steps_beta.append((spec.onset, spec.amplitude))
        elif spec.kind == "step-wind":
            steps_wind.append((spec.onset, spec.amplitude))
        elif spec.kind == "wind-file":
            funcs_wind.append(load_wind_file(spec.path))
        elif spec.kind == "mono-wave":
            monos.append((spec.period, spec.amplitude))
        elif spec.kind == "jonswap-wave":
            ts = jonswap_wave(spec.hs, spec.period, spec.gamma, spec.seed, dt, t_end)
            series = ts.channels["w"]
            tgrid = ts.time
            prev = irregular
            if prev is None:
                irregular = lambda t, s=series, g=tgrid: np.interp(t, g, s)
            else:
                irregular = lambda t, p=prev, s=series, g=tgrid: p(t) + np.interp(t, g, s)

    def beta_ol(t):
        return sum((amp * (t >= onset) for onset, amp in steps_beta), np.zeros_like(t, dtype=float) if np.ndim(t) else 0.0)

    def v(t):
        out = sum((amp * (t >= onset) for onset, amp in steps_wind), np.zeros_like(t, dtype=float) if np.ndim(t) else 0.0)
        for fn in funcs_wind:
            out = out + fn(t)
        return out

    def w(t):
        out = np.zeros_like(t, dtype=float) if np.ndim(t) else 0.0
        for tp, hw in monos:
            out = out + 0.5 * hw * np.sin(2.0 * math.pi * np.asarray(t) / tp)
        if irregular is not None:
            out = out + irregular(t)
        return out

    return beta_ol, v, w


@dataclass(frozen=True)
class PitchLimits:
    """Actuator limits on the total blade pitch command.

    beta_op is the fine (operating-point) pitch the perturbation rides
    on; lo/hi clamp the total pitch; rate limits its slew per second."""

    beta_op: float = 0.0
    lo: float = 0.0
    hi: float = math.pi / 2.0
    rate: float = math.radians(2.0)


def _derived_channels(params: StructuralParams, sens: AeroSensitivities,
                      x: np.ndarray, beta: np.ndarray,
                      v: np.ndarray, w: np.ndarray) -> dict[str, np.ndarray]:
    theta, omega, phi, phidot = x.T
    v_rel = v - params.ht * phidot
    tower = params.ht * (sens.dfa_dv * v_rel + sens.dfa_domega * omega
                         + sens.dfa_dbeta * beta) + params.kt * phi
    return {
        "theta": theta, "omega": omega, "phi": phi, "phidot": phidot,
        "beta": beta, "v": v, "w": w, "v_rel": v_rel, "tower_moment": tower,
    }

_UNITS = {
    "theta": "rad", "omega": "rad/s", "phi": "rad", "phidot": "rad/s",
    "beta": "rad", "v": "m/s", "w": "m", "v_rel": "m/s", "tower_moment": "N*m",
}

_DIVERGENCE_NORM = 1e12


def simulate(ss: StateSpace, gains: ControlGains, params: StructuralParams,
             sens: AeroSensitivities, disturbances, dt: float, t_end: float,
             method: str = "rk4", x0=None,
             limits: PitchLimits | None = None) -> TimeSeries:
    """Integrate the closed loop under the given disturbances.

    Returns state channels plus the total blade pitch command, relative
    wind and a tower-base-moment proxy.  A run whose state overflows is
    truncated and flagged in meta["diverged_at"]; divergence is a valid
    result for unstable parameter sets.
    """
    if dt <= 0.0 or t_end < dt:
        raise ParameterError("need dt > 0 and t_end >= dt")
    if method not in ("rk4", "exact"):
        raise ParameterError(f"unknown method {method!r}")
    if limits is not None and method == "exact":
        raise ParameterError("exact discretization is linear only; "
                             "saturation requires rk4")

    n = int(round(t_end / dt)) + 1
    t = dt * np.arange(n)
    beta_ol_f, v_f, w_f = build_inputs(disturbances, dt, t_end)
    a = ss.closed
    x = np.zeros(4) if x0 is None else np.asarray(x0, dtype=float).copy()

    states = np.empty((n, 4))
    states[0] = x
    beta_applied = np.empty(n)
    diverged_at = None

    if limits is None:
        b = ss.b_full()

        def u_at(tt):
            return np.array([beta_ol_f(tt), 0.0, v_f(tt), w_f(tt)])

        if method == "exact":
            # augmented exponential handles singular A exactly
            aug = np.zeros((8, 8))
            aug[:4, :4] = a
            aug[:4, 4:] = b
            phi_mat = expm(aug * dt)
            ad, bd = phi_mat[:4, :4], phi_mat[:4, 4:]
            for k in range(1, n):
                x = ad @ x + bd @ u_at(t[k - 1])
                states[k] = x
                if not np.all(np.isfinite(x)) or np.linalg.norm(x) > _DIVERGENCE_NORM:
                    diverged_at = t[k]
                    n = k + 1
                    break
        else:
            for k in range(1, n):
                tk = t[k - 1]
                k1 = a @ x + b @ u_at(tk)
                k2 = a @ (x + 0.5 * dt * k1) + b @ u_at(tk + 0.5 * dt)
                k3 = a @ (x + 0.5 * dt * k2) + b @ u_at(tk + 0.5 * dt)
                k4 = a @ (x + dt * k3) + b @ u_at(tk + dt)
                x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                states[k] = x
                if not np.all(np.isfinite(x)) or np.linalg.norm(x) > _DIVERGENCE_NORM:
                    diverged_at = t[k]
                    n = k + 1
                    break
        states = states[:n]
        beta_ol = np.asarray(beta_ol_f(t[:n]), dtype=float) * np.ones(n)
        beta = (gains.kp * states[:, 1] + gains.ki * states[:, 0]
                + gains.kbeta * states[:, 3] + beta_ol)
    else:
        # saturated actuator: beta command computed at each step start,
        # clamped and rate-limited, then held over the step
        a0, bc, bd_mat = ss.a0, ss.bc, ss.bd
        total_prev = limits.beta_op
        beta_applied[0] = _clamp_pitch(
            limits, total_prev,
            limits.beta_op + gains.kp * x[1] + gains.ki * x[0]
            + gains.kbeta * x[3] + float(beta_ol_f(t[0])), dt) - limits.beta_op
        total_prev = limits.beta_op + beta_applied[0]
        for k in range(1, n):
            tk = t[k - 1]
            cmd_total = (limits.beta_op + gains.kp * x[1] + gains.ki * x[0]
                         + gains.kbeta * x[3] + float(beta_ol_f(tk)))
            total = _clamp_pitch(limits, total_prev, cmd_total, dt)
            total_prev = total
            beta_pert = total - limits.beta_op

            def f(xx, tt):
                uc = np.array([beta_pert, gains.ktaug * xx[3]])
                ud = np.array([float(v_f(tt)), float(w_f(tt))])
                return a0 @ xx + bc @ uc + bd_mat @ ud

            k1 = f(x, tk)
            k2 = f(x + 0.5 * dt * k1, tk + 0.5 * dt)
            k3 = f(x + 0.5 * dt * k2, tk + 0.5 * dt)
            k4 = f(x + dt * k3, tk + dt)
            x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            states[k] = x
            beta_applied[k] = beta_pert
            if not np.all(np.isfinite(x)) or np.linalg.norm(x) > _DIVERGENCE_NORM:
                diverged_at = t[k]
                n = k + 1
                break
        states = states[:n]
        beta = beta_applied[:n]

    tt = t[:n]
    v_arr = np.asarray(v_f(tt), dtype=float) * np.ones(n)
    w_arr = np.asarray(w_f(tt), dtype=float) * np.ones(n)
    channels = _derived_channels(params, sens, states, beta, v_arr, w_arr)
    meta = {"method": method}
    if diverged_at is not None:
        meta["diverged_at"] = float(diverged_at)
    return TimeSeries(dt=dt, channels=channels, units=dict(_UNITS), meta=meta)


def _clamp_pitch(limits: PitchLimits, prev_total: float, cmd_total: float,
                 dt: float) -> float:
    step = limits.rate * dt
    total = min(max(cmd_total, prev_total - step), prev_total + step)
    return min(max(total, limits.lo), limits.hi)


def power_proxy(ts: TimeSeries, params: StructuralParams, taug_op: float,
                omega_op: float, taug: np.ndarray | None = None) -> np.ndarray:
    """Generator power about the operating point: ng*(taug_op+taug)*(omega_op+omega).
    Reported for trend comparison only."""
    tg = np.zeros(len(ts)) if taug is None else taug
    return params.ng * (taug_op + tg) * (omega_op + ts.channels["omega"])


@dataclass(frozen=True)
class FreeDecayResult:
    zeta: float
    nu: float
    overdamped: bool = False
    n_peaks: int = 0
    decay_rate: float = math.nan  # exponential-fit fallback, 1/s


def free_decay(a: np.ndarray, x0, dt: float, t_end: float) -> FreeDecayResult:
    """Log-decrement damping estimate from the platform-pitch channel of
    a free response.

    Uses successive positive phi peaks (parabolic refinement); with
    fewer than 3 peaks the motion is flagged overdamped and an
    exponential fit of |phi| is reported instead.
    """
    n = int(round(t_end / dt)) + 1
    t = dt * np.arange(n)
    aug = expm(np.asarray(a) * dt)
    x = np.asarray(x0, dtype=float).copy()
    phi = np.empty(n)
    phi[0] = x[2]
    for k in range(1, n):
        x = aug @ x
        phi[k] = x[2]

    peaks_t, peaks_v = [], []
    for k in range(1, n - 1):
        if phi[k] > 0.0 and phi[k] >= phi[k - 1] and phi[k] > phi[k + 1]:
            # parabolic vertex through the three samples
            denom = phi[k - 1] - 2.0 * phi[k] + phi[k + 1]
            if denom != 0.0:
                delta = 0.5 * (phi[k - 1] - phi[k + 1]) / denom
                vertex = phi[k] - 0.25 * (phi[k - 1] - phi[k + 1]) * delta
                peaks_t.append(t[k] + delta * dt)
                peaks_v.append(vertex)
            else:
                peaks_t.append(t[k])
                peaks_v.append(phi[k])

    if len(peaks_t) < 3:
        mask = np.abs(phi) > 1e-300
        rate = math.nan
        if mask.sum() > 2:
            slope = np.polyfit(t[mask], np.log(np.abs(phi[mask])), 1)[0]
            rate = -slope
        return FreeDecayResult(zeta=math.nan, nu=math.nan, overdamped=True,
                               n_peaks=len(peaks_t), decay_rate=rate)

    peaks_t = np.array(peaks_t)
    peaks_v = np.array(peaks_v)
    decs = np.log(peaks_v[:-1] / peaks_v[1:])
    delta = float(np.mean(decs))
    zeta = delta / math.sqrt(4.0 * math.pi ** 2 + delta ** 2)
    nu_d = 2.0 * math.pi / float(np.mean(np.diff(peaks_t)))
    nu = nu_d / math.sqrt(1.0 - zeta ** 2)
    return FreeDecayResult(zeta=zeta, nu=nu, n_peaks=len(peaks_t))
