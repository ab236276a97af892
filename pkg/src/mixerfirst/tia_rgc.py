"""Small-signal model of the regulated-cascode (RGC) TIA used as baseband load.

M1 is a common-gate device whose source is the TIA input; M2 is a
common-source amplifier from the input back to the gate of M1.  The local
feedback divides the common-gate input impedance by the loop gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .complex_impedance import complex_load
from .errors import MissingCbb
from .nodal import SmallSignalNetwork


@dataclass(frozen=True)
class RgcParams:
    gm1_s: float
    gm2_s: float
    ro1_ohm: float
    ro2_ohm: float
    rl_ohm: float
    cl_f: float
    r_fb_ohm: float
    ideal_buffer: bool = False
    c_bb_f: Optional[float] = None

    def __post_init__(self):
        for name in ("gm1_s", "gm2_s", "ro1_ohm", "ro2_ohm", "rl_ohm", "r_fb_ohm"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.cl_f >= 0:
            raise ValueError(f"cl_f must be >= 0, got {self.cl_f}")
        if self.c_bb_f is not None and not self.c_bb_f > 0:
            raise ValueError("c_bb_f must be > 0 when given")

    @property
    def loop_gain(self) -> float:
        """Gain of the M2 stage, gm2 * (ro2 || R)."""
        return self.gm2_s * _par(self.ro2_ohm, self.r_fb_ohm)

    @property
    def regulation_factor(self) -> float:
        """Divisor ``1 + ro1*gm1*(gm2*(ro2||R) + 1)`` applied to the numerator."""
        return 1.0 + self.ro1_ohm * self.gm1_s * (self.loop_gain + 1.0)


def _par(a, b):
    return a * b / (a + b)


def _load(p: RgcParams, f_hz):
    w = 2.0 * math.pi * np.asarray(f_hz, dtype=float)
    if p.ideal_buffer or p.cl_f == 0:
        # buffer isolates the feedback tap; C_L drops out of the input impedance
        return p.rl_ohm + 0j * w
    return p.rl_ohm / (1.0 + 1j * w * p.rl_ohm * p.cl_f)


def rgc_input_impedance(p: RgcParams, f_hz):
    """Closed-form RGC input impedance.

    Negative ``f_hz`` is accepted and returns the Hermitian image
    ``conj(Z(|f|))`` of the real network.
    """
    z = (_load(p, f_hz) + p.ro1_ohm) / p.regulation_factor
    return complex(z) if np.ndim(z) == 0 else z


def rgc_input_impedance_nodal(p: RgcParams, f_hz: float) -> complex:
    """Input impedance from a nodal solve of the two-transistor small-signal circuit."""
    net = SmallSignalNetwork()
    # x: input / source of M1 / gate of M2, y: drain of M2 / gate of M1, o: drain of M1
    net.resistor("o", "0", p.rl_ohm)
    if not p.ideal_buffer and p.cl_f > 0:
        net.capacitor("o", "0", p.cl_f)
    net.resistor("o", "x", p.ro1_ohm)
    net.vccs("o", "x", "y", "x", p.gm1_s)
    net.vccs("y", "0", "x", "0", p.gm2_s)
    net.resistor("y", "0", p.ro2_ohm)
    net.resistor("y", "0", p.r_fb_ohm)
    net.current_source("0", "x", 1.0)
    return complex(net.solve(2.0 * math.pi * f_hz)["x"])


def tia_baseband_impedance(p: RgcParams, f_hz):
    """RGC input impedance in parallel with the baseband capacitor C_BB."""
    if p.c_bb_f is None:
        raise MissingCbb("tia_baseband_impedance needs c_bb_f")
    w = 2.0 * math.pi * np.asarray(f_hz, dtype=float)
    zr = rgc_input_impedance(p, f_hz)
    z = zr / (1.0 + 1j * w * p.c_bb_f * zr)
    return complex(z) if np.ndim(z) == 0 else z


@dataclass(frozen=True)
class ComplexTia:
    """RGC TIA with C_BB and a Gm stage cross-coupling the I and Q branches."""

    params: RgcParams
    gm_s: float = 0.0

    def __post_init__(self):
        if self.params.c_bb_f is None:
            raise MissingCbb("compose_complex_tia needs c_bb_f")
        if not self.gm_s >= 0:
            raise ValueError(f"gm_s must be >= 0, got {self.gm_s}")

    @property
    def c_bb_f(self) -> float:
        return self.params.c_bb_f

    def with_gm(self, gm_s: float) -> "ComplexTia":
        return replace(self, gm_s=gm_s)

    def __call__(self, f_hz):
        return complex_load(lambda f: tia_baseband_impedance(self.params, f), self.gm_s, f_hz)


def compose_complex_tia(p: RgcParams, gm_s: float) -> ComplexTia:
    return ComplexTia(p, gm_s)
