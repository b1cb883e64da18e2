"""Zero/pole analysis of the closed loop.

Non-minimum-phase-zero (NMPZ) conditions for the blade-pitch channels,
the numerator polynomials they derive from, the characteristic
polynomial, an eigen summary with per-mode damping, and the closed-form
second-order summaries of the reduced rotor and platform dynamics.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import FowtctlError, GainSingularityError
from .model import AeroSensitivities, StructuralParams

#: relative distance to the strict-inequality boundary below which a
#: warning is emitted (the boundary itself is classified as no-NMPZ)
BOUNDARY_RTOL = 1e-9


class NmpzBoundaryWarning(UserWarning):
    """The operating point sits numerically on an NMPZ boundary."""


class RootConvergenceError(FowtctlError, ArithmeticError):
    """Polynomial root refinement failed to reach the residual tolerance."""


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients ascending in s."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, s):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def deriv(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0.0,))
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def roots(self, polish: bool = True, rtol: float = 1e-10) -> np.ndarray:
        """Roots via companion-matrix eigensolve, one Newton polish step.

        Raises RootConvergenceError if the polished residual exceeds
        rtol relative to the coefficient scale.
        """
        if self.degree == 0:
            return np.array([], dtype=complex)
        r = np.roots(self.coeffs[::-1]).astype(complex)
        if polish:
            dp = self.deriv()
            for i, x in enumerate(r):
                d = dp(x)
                if d != 0.0:
                    step = self(x) / d
                    if abs(step) < 1.0 + abs(x):  # keep polish local
                        r[i] = x - step
            scale = max(abs(c) * max(1.0, abs(x)) ** k
                        for x in r for k, c in enumerate(self.coeffs))
            worst = max(abs(self(x)) for x in r)
            if scale > 0.0 and worst > rtol * scale * self.degree * 10.0:
                raise RootConvergenceError(
                    f"root residual {worst:.3e} above tolerance "
                    f"(scale {scale:.3e}, rtol {rtol:g})")
        return r


@dataclass(frozen=True)
class Mode:
    """One characteristic root (or conjugate pair) with its natural
    frequency and damping ratio."""

    eigenvalue: complex
    nu: float    # rad/s, |lambda|
    zeta: float  # -Re(lambda)/|lambda|
    oscillatory: bool


@dataclass(frozen=True)
class ModalReport:
    eigenvalues: tuple[complex, ...]
    modes: tuple[Mode, ...] = field(default=())
    stable: bool = False

    def mode_nearest(self, nu: float) -> Mode:
        """Mode whose natural frequency is closest to nu."""
        return min(self.modes, key=lambda m: abs(m.nu - nu))


def _warn_if_boundary(lhs: float, rhs: float):
    scale = max(abs(lhs), abs(rhs), 1e-300)
    if abs(lhs - rhs) <= BOUNDARY_RTOL * scale:
        warnings.warn("operating point within 1e-9 of the NMPZ boundary",
                      NmpzBoundaryWarning, stacklevel=3)


def nmpz_phi_condition(sens: AeroSensitivities) -> bool:
    """True iff the blade-pitch -> platform-pitch channel carries a
    right-half-plane zero: dta_domega/dta_dbeta < dfa_domega/dfa_dbeta."""
    if sens.dta_dbeta == 0.0 or sens.dfa_dbeta == 0.0:
        raise GainSingularityError("dta_dbeta and dfa_dbeta must be nonzero")
    lhs = sens.dta_domega / sens.dta_dbeta
    rhs = sens.dfa_domega / sens.dfa_dbeta
    _warn_if_boundary(lhs, rhs)
    return lhs < rhs


def nmpz_omega_condition(params: StructuralParams, sens: AeroSensitivities,
                         ktaug: float = 0.0) -> bool:
    """True iff the blade-pitch -> rotor-speed channel carries a
    right-half-plane zero.

    Evaluated from the coefficient signs of the channel numerator (its
    cubic factors as s times a quadratic with positive root product, so
    an RHP root exists iff the quadratic's middle and leading
    coefficients differ in sign).  This is algebraically equivalent to

        ht^2 (dfa_dv - (dta_dv + ktaug*ng/ht) * dfa_dbeta/dta_dbeta) < -dt
    """
    if sens.dta_dbeta == 0.0:
        raise GainSingularityError("dta_dbeta must be nonzero")
    tb, fb = sens.dta_dbeta, sens.dfa_dbeta
    # numerator coefficients scaled by ht (>0), which preserves signs
    c3 = params.jt * tb
    c2 = (params.dt * tb
          + params.ht ** 2 * (tb * sens.dfa_dv - fb * sens.dta_dv)
          - ktaug * params.ng * params.ht * fb)
    _warn_if_boundary(c2 / c3, 0.0)
    return c2 / c3 < 0.0


def numerator_phi(params: StructuralParams, sens: AeroSensitivities) -> Polynomial:
    """Numerator of the blade-pitch -> platform-pitch transfer entry:
    (jr/ng) dfa_dbeta s^2 + (dta_dbeta dfa_domega - dfa_dbeta dta_domega) s.
    """
    a2 = params.jr / params.ng * sens.dfa_dbeta
    a1 = sens.dta_dbeta * sens.dfa_domega - sens.dfa_dbeta * sens.dta_domega
    return Polynomial((0.0, a1, a2))


def numerator_omega(params: StructuralParams, sens: AeroSensitivities,
                    ktaug: float = 0.0) -> Polynomial:
    """Numerator of the blade-pitch -> rotor-speed transfer entry, a
    cubic with zero constant term."""
    if params.ht == 0.0:
        raise GainSingularityError("ht = 0: channel numerator undefined")
    tb, fb = sens.dta_dbeta, sens.dfa_dbeta
    a3 = params.jt / params.ht * tb
    a2 = (params.dt / params.ht * tb
          + params.ht * (tb * sens.dfa_dv - fb * sens.dta_dv)
          - ktaug * params.ng * fb)
    a1 = params.kt / params.ht * tb
    return Polynomial((0.0, a1, a2, a3))


def char_poly(a: np.ndarray) -> Polynomial:
    """Monic characteristic polynomial of the (closed-loop) state matrix,
    coefficients ascending, via the Faddeev-LeVerrier recursion."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"square matrix expected, got {a.shape}")
    coeffs_desc = [1.0]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs_desc[-1] * np.eye(n)
        coeffs_desc.append(-np.trace(a @ m) / k)
    return Polynomial(tuple(coeffs_desc[::-1]))


def modal_report(a: np.ndarray) -> ModalReport:
    """Roots of the characteristic polynomial with per-mode natural
    frequency and damping ratio; stable iff all real parts negative."""
    roots = char_poly(a).roots()
    order = sorted(range(len(roots)), key=lambda i: (abs(roots[i]), roots[i].imag))
    roots = roots[order]
    modes = []
    seen_conj = set()
    for i, lam in enumerate(roots):
        if i in seen_conj:
            continue
        oscillatory = abs(lam.imag) > 1e-12 * max(1.0, abs(lam))
        if oscillatory:
            # pair up the conjugate so each pair reports once
            j = min((k for k in range(len(roots)) if k != i and k not in seen_conj
                     and abs(roots[k] - lam.conjugate()) <= 1e-8 * max(1.0, abs(lam))),
                    default=None)
            if j is not None:
                seen_conj.add(j)
            lam = complex(lam.real, abs(lam.imag))
        nu = abs(lam)
        zeta = -lam.real / nu if nu > 0.0 else math.inf
        modes.append(Mode(eigenvalue=lam, nu=nu, zeta=zeta, oscillatory=oscillatory))
    stable = bool(all(r.real < 0.0 for r in roots))
    return ModalReport(eigenvalues=tuple(roots), modes=tuple(modes), stable=stable)


@dataclass(frozen=True)
class ModeSummary:
    """Closed-form (nu, zeta) of a reduced second-order channel.
    degenerate marks the case where the band-pass form does not exist
    (non-positive radicand); nu and zeta are then NaN."""

    nu: float
    zeta: float
    degenerate: bool = False


def rotor_summary(params: StructuralParams, sens: AeroSensitivities,
                  kp: float, ki: float) -> ModeSummary:
    """Band-pass parameters of the reduced rotor loop.  Degenerate when
    the radicand -(ng/jr) dta_dbeta ki is not strictly positive."""
    g = params.ng / params.jr
    radicand = -g * sens.dta_dbeta * ki
    if radicand <= 0.0:
        return ModeSummary(nu=math.nan, zeta=math.nan, degenerate=True)
    nu = math.sqrt(radicand)
    zeta = -(g * sens.dta_domega + g * sens.dta_dbeta * kp) / (2.0 * nu)
    return ModeSummary(nu=nu, zeta=zeta)


def platform_summary(params: StructuralParams, sens: AeroSensitivities,
                     kbeta: float) -> ModeSummary:
    """Low-pass parameters of the reduced platform dynamics.  nu_plt
    depends only on kt and jt, never on the compensation gain."""
    nu = math.sqrt(params.kt / params.jt)
    zeta = (params.dt + params.ht ** 2 * sens.dfa_dv
            - kbeta * params.ht * sens.dfa_dbeta) \
        / (2.0 * math.sqrt(params.kt * params.jt))
    return ModeSummary(nu=nu, zeta=zeta)
