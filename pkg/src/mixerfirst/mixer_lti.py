"""LTI equivalent of the 4-phase, 25 % duty-cycle passive mixer.

Near the LO the mixer looks, from the antenna, like the switch resistance in
series with ``R_sh || gamma * Z_B(f - f_LO)``.  ``R_sh`` lumps the power that
harmonic re-conversion returns to the source, so it scales with the effective
source resistance ``R_a' = R_a + R_sw``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import OutOfValidityWindow

GAMMA = 2.0 / math.pi**2
N_PHASES = 4
DUTY = 0.25

ImpedanceFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MixerConfig:
    """Antenna, switch and LO parameters of the 4-phase mixer."""

    ra_ohm: float
    rsw_ohm: float
    f_lo_hz: float
    n_phases: int = N_PHASES
    duty: float = DUTY

    def __post_init__(self):
        if not self.ra_ohm > 0:
            raise ValueError(f"ra_ohm must be > 0, got {self.ra_ohm}")
        if not self.rsw_ohm >= 0:
            raise ValueError(f"rsw_ohm must be >= 0, got {self.rsw_ohm}")
        if not self.f_lo_hz > 0:
            raise ValueError(f"f_lo_hz must be > 0, got {self.f_lo_hz}")
        # gamma is only known for the 4-phase / 25 % case
        if self.n_phases != N_PHASES:
            raise ValueError(f"only a 4-phase mixer is modeled, got n_phases={self.n_phases}")
        if self.duty != DUTY:
            raise ValueError(f"only 25% duty cycle is modeled, got duty={self.duty}")

    def with_rsw(self, rsw_ohm: float) -> "MixerConfig":
        return MixerConfig(self.ra_ohm, rsw_ohm, self.f_lo_hz)

    def with_ra(self, ra_ohm: float) -> "MixerConfig":
        return MixerConfig(ra_ohm, self.rsw_ohm, self.f_lo_hz)


@dataclass(frozen=True)
class LtiEquivalent:
    ra_prime_ohm: float
    gamma: float
    rsh_ohm: float


def derive_lti(cfg: MixerConfig) -> LtiEquivalent:
    """Lump the switch into the source and compute the shunt resistance."""
    ra_prime = cfg.ra_ohm + cfg.rsw_ohm
    rsh = ra_prime * 4.0 * GAMMA / (1.0 - 4.0 * GAMMA)
    return LtiEquivalent(ra_prime_ohm=ra_prime, gamma=GAMMA, rsh_ohm=rsh)


def in_validity_window(cfg: MixerConfig, f_hz) -> np.ndarray:
    return np.abs(np.asarray(f_hz, dtype=float) - cfg.f_lo_hz) < cfg.f_lo_hz / 2.0


def _shunt(rsh: float, zb: np.ndarray) -> np.ndarray:
    # R_sh || gamma*Z_B; an infinite Z_B leaves R_sh alone
    infinite = np.isinf(zb)
    z = GAMMA * np.where(infinite, 0j, zb)
    return np.where(infinite, rsh + 0j, rsh * z / (rsh + z))


def input_impedance(cfg: MixerConfig, zb: ImpedanceFunction, f_hz, *, allow_outside: bool = False):
    """Input impedance seen from the antenna at RF frequency ``f_hz``.

    ``zb`` is called with the signed baseband offset ``f - f_LO`` and may
    receive an array.  Frequencies outside ``|f - f_LO| < f_LO/2`` raise
    :class:`OutOfValidityWindow` unless ``allow_outside`` is set.
    """
    f = np.asarray(f_hz, dtype=float)
    if np.any(f <= 0):
        raise ValueError("f_hz must be > 0")
    if not allow_outside and not np.all(in_validity_window(cfg, f)):
        raise OutOfValidityWindow(
            f"f outside |f - f_LO| < {cfg.f_lo_hz / 2:.6g} Hz (f_LO = {cfg.f_lo_hz:.6g} Hz)"
        )
    lti = derive_lti(cfg)
    zbv = np.asarray(zb(f - cfg.f_lo_hz), dtype=complex)
    zin = cfg.rsw_ohm + _shunt(lti.rsh_ohm, zbv)
    return complex(zin) if zin.ndim == 0 else zin


@dataclass(frozen=True)
class FrequencyResponse:
    """Sampled response on a strictly increasing frequency grid.

    ``flags`` holds one string per point; an empty string means the point is
    clean.  Non-finite values are only permitted at flagged points.
    """

    f_hz: np.ndarray
    values: np.ndarray
    unit: str = "ohm"
    flags: tuple = field(default=())

    def __post_init__(self):
        f = np.asarray(self.f_hz, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        flags = tuple(self.flags) if self.flags else ("",) * len(f)
        if f.ndim != 1 or f.shape != v.shape or len(flags) != len(f):
            raise ValueError("f_hz, values and flags must be 1-D and the same length")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        clean = np.array([not fl for fl in flags], dtype=bool)
        if not np.all(np.isfinite(v[clean])):
            raise ValueError("non-finite value at an unflagged point")
        object.__setattr__(self, "f_hz", f)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "flags", flags)

    def __len__(self):
        return len(self.f_hz)

    @property
    def points(self) -> list[tuple[float, complex]]:
        return list(zip(self.f_hz.tolist(), self.values.tolist()))

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def flagged(self) -> np.ndarray:
        return np.array([bool(fl) for fl in self.flags])

    def peak_frequency(self) -> float:
        """Grid frequency of the largest finite magnitude."""
        mag = np.where(np.isfinite(self.values), np.abs(self.values), -np.inf)
        return float(self.f_hz[int(np.argmax(mag))])


def frequency_grid(f_start: float, f_stop: float, n_points: int) -> np.ndarray:
    if not f_start < f_stop:
        raise ValueError("f_start must be < f_stop")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    return np.linspace(f_start, f_stop, int(n_points))


def evaluate_flagged(fn: Callable[[np.ndarray], np.ndarray], f: np.ndarray, window: np.ndarray,
                     unit: str = "ohm") -> FrequencyResponse:
    """Evaluate ``fn`` over ``f``; failures become flagged NaN points."""
    try:
        values = np.asarray(fn(f), dtype=complex)
        errors = [""] * len(f)
    except Exception:
        values = np.empty(len(f), dtype=complex)
        errors = []
        for idx, fi in enumerate(f):
            try:
                values[idx] = complex(fn(np.array(fi)))
                errors.append("")
            except Exception as exc:  # propagated as a flag, never aborts the sweep
                values[idx] = complex(np.nan, np.nan)
                errors.append(type(exc).__name__)
    flags: Sequence[str] = [
        e if e else ("" if w else "OutOfValidityWindow") for e, w in zip(errors, window)
    ]
    return FrequencyResponse(f, values, unit, tuple(flags))


def impedance_sweep(cfg: MixerConfig, zb: ImpedanceFunction, f_start: float, f_stop: float,
                    n_points: int) -> FrequencyResponse:
    """Uniform sweep of :func:`input_impedance`; out-of-window points are flagged."""
    f = frequency_grid(f_start, f_stop, n_points)
    return evaluate_flagged(
        lambda x: input_impedance(cfg, zb, x, allow_outside=True), f, in_validity_window(cfg, f)
    )
