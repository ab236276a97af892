"""Complex (I/Q) baseband impedance built from R_BB || C_BB and a Gm cross-coupling.

The Gm stage turns the low-pass ``R_BB || C_BB`` into a band-pass whose center
sits at ``-Gm / C_BB`` rad/s: the response is asymmetric about DC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import DivisionDegenerate

# Gm-stage bandwidth must exceed this multiple of the center offset
GM_BANDWIDTH_MARGIN = 10.0


@dataclass(frozen=True)
class ComplexImpedanceSpec:
    r_bb_ohm: float
    c_bb_f: float
    gm_s: float = 0.0
    gm_bandwidth_hz: Optional[float] = None

    def __post_init__(self):
        if not self.r_bb_ohm > 0:
            raise ValueError(f"r_bb_ohm must be > 0, got {self.r_bb_ohm}")
        if not self.c_bb_f > 0:
            raise ValueError(f"c_bb_f must be > 0, got {self.c_bb_f}")
        if not self.gm_s >= 0:
            raise ValueError(f"gm_s must be >= 0, got {self.gm_s}")
        if self.gm_bandwidth_hz is not None and not self.gm_bandwidth_hz > 0:
            raise ValueError("gm_bandwidth_hz must be > 0 when given")

    @property
    def offset_rad_s(self) -> float:
        return self.gm_s / self.c_bb_f

    @property
    def offset_hz(self) -> float:
        return self.gm_s / (2.0 * math.pi * self.c_bb_f)

    @property
    def bandwidth_hz(self) -> float:
        """Full -3 dB width of the band-pass; independent of Gm."""
        return 1.0 / (math.pi * self.r_bb_ohm * self.c_bb_f)

    def with_gm(self, gm_s: float) -> "ComplexImpedanceSpec":
        return replace(self, gm_s=gm_s)

    def __call__(self, f_hz):
        return zc_at(self, f_hz)


@dataclass(frozen=True)
class ComplexSignalPair:
    """An I/Q pair handled as one complex quantity ``re + j*im``."""

    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("ComplexSignalPair components must be finite")

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexSignalPair":
        return cls(float(z.real), float(z.imag))

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


def zc_at(spec: ComplexImpedanceSpec, f_hz):
    """Closed-form ``R/(1 + j R C (w + Gm/C))`` at signed offset ``f_hz``."""
    w = 2.0 * math.pi * np.asarray(f_hz, dtype=float)
    z = spec.r_bb_ohm / (1.0 + 1j * spec.r_bb_ohm * spec.c_bb_f * (w + spec.offset_rad_s))
    return complex(z) if np.ndim(z) == 0 else z


def complex_load(zbb: Callable, gm_s: float, f_hz):
    """``Z_BB / (1 + j Gm Z_BB)`` evaluated at ``f_hz`` (scalar or array)."""
    z = np.asarray(zbb(f_hz), dtype=complex)
    den = 1.0 + 1j * gm_s * z
    if np.any(den == 0):
        raise DivisionDegenerate("1 + j*Gm*Z_BB vanished; Z_BB is not passive at this frequency")
    out = z / den
    return complex(out) if out.ndim == 0 else out


def response_voltage(zbb: Callable, gm_s: float, current: ComplexSignalPair,
                     f_hz: float) -> ComplexSignalPair:
    """Complex output voltage for complex input current at frequency ``f_hz``."""
    return ComplexSignalPair.from_complex(complex(current) * complex_load(zbb, gm_s, f_hz))


@dataclass(frozen=True)
class ValidityReport:
    status: str
    message: str


def check_gm_bandwidth(spec: ComplexImpedanceSpec) -> ValidityReport:
    """WARN when the Gm stage bandwidth is below 10x the center offset."""
    if spec.gm_s == 0:
        return ValidityReport("PASS", "gm = 0, no center shift")
    if spec.gm_bandwidth_hz is None:
        raise ValueError("gm_bandwidth_hz is required for the bandwidth check")
    ratio = spec.gm_bandwidth_hz / spec.offset_hz
    msg = f"gm bandwidth {spec.gm_bandwidth_hz:.6g} Hz = {ratio:.3g} x f_OC {spec.offset_hz:.6g} Hz"
    return ValidityReport("PASS" if ratio >= GM_BANDWIDTH_MARGIN else "WARN", msg)
