"""Rainflow cycle counting, damage-equivalent load and Miner damage.

Counting follows the classical rainflow rule with the residual counted
as half cycles, reproducing the standard worked-example decomposition.
Damage uses a single-slope or bilinear S-N curve, linear in log-log
space and continuous at the knee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class Cycle:
    range: float
    mean: float
    count: float  # 0.5 or 1.0

    def __post_init__(self):
        if self.range < 0.0:
            raise ParameterError(f"cycle range must be >= 0 (got {self.range})")
        if self.count not in (0.5, 1.0):
            raise ParameterError(f"cycle count must be 0.5 or 1.0 (got {self.count})")


def turning_points(signal, hysteresis: float = 0.0) -> np.ndarray:
    """Local extrema of the signal, endpoints included.

    Adjacent extrema closer than `hysteresis` (absolute units) are
    merged to suppress numerical chatter from the integrator.
    """
    x = np.asarray(signal, dtype=float)
    if x.size < 2:
        return x.copy()
    keep = [x[0]]
    for i in range(1, x.size - 1):
        if (x[i] - keep[-1]) * (x[i + 1] - x[i]) < 0.0:
            keep.append(x[i])
    keep.append(x[-1])
    pts = np.array(keep)
    # drop flat repeats
    mask = np.ones(pts.size, dtype=bool)
    mask[1:] = np.diff(pts) != 0.0
    pts = pts[mask]
    if hysteresis > 0.0 and pts.size > 2:
        filtered = [pts[0]]
        for p in pts[1:]:
            if abs(p - filtered[-1]) >= hysteresis:
                filtered.append(p)
            elif len(filtered) > 1:
                # keep the more extreme of the merged pair
                if (filtered[-1] - filtered[-2]) * (p - filtered[-1]) > 0.0:
                    filtered[-1] = p
        pts = np.array(filtered)
    return pts


def rainflow(signal, hysteresis_frac: float = 0.0) -> list[Cycle]:
    """Rainflow decomposition of a load history.

    hysteresis_frac discards turning-point moves smaller than that
    fraction of the signal's peak-to-peak before counting (0 disables
    the filter).  Residual stack pairs are counted as half cycles.
    """
    x = np.asarray(signal, dtype=float)
    if x.size < 2:
        return []
    hyst = 0.0
    if hysteresis_frac > 0.0:
        hyst = hysteresis_frac * float(np.ptp(x))
    pts = turning_points(x, hysteresis=hyst)
    cycles: list[Cycle] = []
    stack: list[float] = []
    for p in pts:
        stack.append(p)
        while len(stack) >= 3:
            rng_x = abs(stack[-1] - stack[-2])
            rng_y = abs(stack[-2] - stack[-3])
            if rng_x < rng_y:
                break
            if len(stack) == 3:
                # Y contains the history's (current) starting point:
                # half cycle, then the start moves one point forward
                cycles.append(Cycle(range=rng_y,
                                    mean=0.5 * (stack[0] + stack[1]),
                                    count=0.5))
                stack.pop(0)
            else:
                cycles.append(Cycle(range=rng_y,
                                    mean=0.5 * (stack[-2] + stack[-3]),
                                    count=1.0))
                del stack[-3:-1]
    for a, b in zip(stack, stack[1:]):
        cycles.append(Cycle(range=abs(b - a), mean=0.5 * (a + b), count=0.5))
    return [c for c in cycles if c.range > 0.0]


def damage_equivalent_load(cycles, m: float, n_ref: float) -> float:
    """Constant-amplitude range giving, over n_ref cycles, the same
    m-th-power damage sum as the counted spectrum."""
    if m <= 0.0 or n_ref <= 0.0:
        raise ParameterError("m and n_ref must be > 0")
    acc = sum(c.count * c.range ** m for c in cycles)
    return (acc / n_ref) ** (1.0 / m)


@dataclass(frozen=True)
class WohlerCurve:
    """S-N curve, log-log linear; bilinear variants change slope from m1
    to m2 at `knee` cycles, anchored by the stress range at the knee."""

    kind: str          # "single" | "bilinear"
    m1: float
    stress_knee: float  # stress range at the knee, Pa
    knee: float = 1e6   # cycles at the slope change
    m2: float | None = None

    def __post_init__(self):
        if self.kind not in ("single", "bilinear"):
            raise ParameterError(f"unknown curve kind {self.kind!r}")
        if self.m1 <= 0.0 or self.knee <= 0.0 or self.stress_knee <= 0.0:
            raise ParameterError("m1, knee and stress_knee must be > 0")
        if self.kind == "bilinear" and (self.m2 is None or self.m2 <= 0.0):
            raise ParameterError("bilinear curve requires m2 > 0")

    def cycles_to_failure(self, stress_range: float) -> float:
        """N(delta_sigma); continuous at the knee by construction."""
        if stress_range <= 0.0:
            return math.inf
        if self.kind == "single" or stress_range >= self.stress_knee:
            return self.knee * (self.stress_knee / stress_range) ** self.m1
        return self.knee * (self.stress_knee / stress_range) ** self.m2


def miner_damage(cycles, curve: WohlerCurve, section_modulus: float,
                 lifetime_scale: float = 1.0) -> float:
    """Linear damage accumulation: lifetime_scale * sum(count / N(range/W))."""
    if section_modulus <= 0.0:
        raise ParameterError(f"section modulus must be > 0 (got {section_modulus})")
    if lifetime_scale < 0.0:
        raise ParameterError(f"lifetime_scale must be >= 0 (got {lifetime_scale})")
    total = 0.0
    for c in cycles:
        n_fail = curve.cycles_to_failure(c.range / section_modulus)
        if math.isfinite(n_fail):
            total += c.count / n_fail
    return lifetime_scale * total
