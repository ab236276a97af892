"""S11, Gm center tuning and switch-bank trimming of a composed receiver."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateDenominator, OffsetOutOfRange
from .mixer_lti import (
    FrequencyResponse,
    MixerConfig,
    evaluate_flagged,
    frequency_grid,
    in_validity_window,
    input_impedance,
)

S11_FLOOR_DB = -100.0
PEAK_SEARCH_POINTS = 1001
PEAK_SEARCH_SPAN_HZ = 50e6


def s11(zin, ra_ohm: float):
    """Reflection coefficient ``(Z_in - R_a)/(Z_in + R_a)``."""
    z = np.asarray(zin, dtype=complex)
    den = z + ra_ohm
    if np.any(den == 0):
        raise DegenerateDenominator("Z_in + R_a = 0")
    g = (z - ra_ohm) / den
    return complex(g) if g.ndim == 0 else g


def s11_db(gamma):
    """``20 log10 |gamma|`` clamped at -100 dB."""
    mag = np.abs(np.asarray(gamma, dtype=complex))
    with np.errstate(divide="ignore"):
        db = np.maximum(20.0 * np.log10(mag), S11_FLOOR_DB)
    return float(db) if db.ndim == 0 else db


@dataclass(frozen=True)
class Receiver:
    """Mixer plus baseband load; one evaluation surface for sweeps and tuning.

    ``baseband`` is called with the signed baseband offset.  ``orientation``
    is the I/Q wiring: ``+1`` evaluates it at ``f - f_LO`` (a Gm-shifted load
    peaks below the LO).  ``-1`` swaps I and Q, which conjugates the complex
    baseband signal, so the load seen is ``conj(Z_B(f_LO - f))`` and the peak
    moves above the LO.  For a real (Hermitian) load both wirings agree.
    """

    cfg: MixerConfig
    baseband: Callable
    orientation: int = 1

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def baseband_at(self, offset_hz):
        offset = np.asarray(offset_hz, dtype=float)
        if self.orientation == 1:
            return self.baseband(offset)
        return np.conj(self.baseband(-offset))

    def input_impedance(self, f_hz, *, allow_outside: bool = False):
        return input_impedance(self.cfg, self.baseband_at, f_hz, allow_outside=allow_outside)

    def __call__(self, f_hz):
        return self.input_impedance(f_hz, allow_outside=True)

    def sweep(self, f_start: float, f_stop: float, n_points: int) -> FrequencyResponse:
        f = frequency_grid(f_start, f_stop, n_points)
        return evaluate_flagged(self, f, in_validity_window(self.cfg, f))

    @property
    def c_bb_f(self) -> Optional[float]:
        return getattr(self.baseband, "c_bb_f", None)

    @property
    def gm_s(self) -> float:
        return getattr(self.baseband, "gm_s", 0.0)

    def with_cfg(self, cfg: MixerConfig) -> "Receiver":
        return replace(self, cfg=cfg)

    def with_gm(self, gm_s: float, orientation: Optional[int] = None) -> "Receiver":
        if not hasattr(self.baseband, "with_gm"):
            raise TypeError("baseband has no tunable Gm stage")
        return Receiver(self.cfg, self.baseband.with_gm(gm_s),
                        self.orientation if orientation is None else orientation)


def compose_receiver(cfg: MixerConfig, baseband: Callable, orientation: int = 1) -> Receiver:
    return Receiver(cfg, baseband, orientation)


def find_peak(rx: Receiver, f_lo_hz: float, f_hi_hz: float, n_points: int = PEAK_SEARCH_POINTS) -> float:
    """Frequency of max ``|Z_in|``: grid search refined to sub-bin accuracy."""
    f = frequency_grid(f_lo_hz, f_hi_hz, n_points)
    mag = np.abs(rx(f))
    i = int(np.argmax(mag))
    lo, hi = f[max(i - 1, 0)], f[min(i + 1, len(f) - 1)]
    if hi <= lo:
        return float(f[i])
    # work in offset from the bracket start so the optimizer sees O(bin) numbers
    res = minimize_scalar(lambda x: -abs(rx(lo + x)), bounds=(0.0, hi - lo), method="bounded",
                          options={"xatol": 1e-6 * (hi - lo)})
    best = lo + float(res.x)
    return best if abs(rx(best)) >= mag[i] else float(f[i])


@dataclass(frozen=True)
class SwitchBank:
    """Identical parallel switch units; enabled units set the effective R_sw."""

    unit_rsw_ohm: float
    n_units: int
    enabled_mask: tuple = ()

    def __post_init__(self):
        if not self.unit_rsw_ohm > 0:
            raise ValueError("unit_rsw_ohm must be > 0")
        if self.n_units < 1:
            raise ValueError("n_units must be >= 1")
        mask = tuple(bool(b) for b in self.enabled_mask) if self.enabled_mask else (True,) * self.n_units
        if len(mask) != self.n_units:
            raise ValueError("enabled_mask length must equal n_units")
        if not any(mask):
            raise ValueError("at least one unit must be enabled")
        object.__setattr__(self, "enabled_mask", mask)

    @property
    def n_enabled(self) -> int:
        return sum(self.enabled_mask)

    @property
    def effective_rsw_ohm(self) -> float:
        return self.unit_rsw_ohm / self.n_enabled

    def masks(self):
        """Every non-empty mask, ordered by enabled count, then by lowest indices."""
        for count in range(1, self.n_units + 1):
            for on in itertools.combinations(range(self.n_units), count):
                yield tuple(i in on for i in range(self.n_units))

    def with_mask(self, mask) -> "SwitchBank":
        return SwitchBank(self.unit_rsw_ohm, self.n_units, tuple(mask))


@dataclass(frozen=True)
class TuneResult:
    gm_s: float
    enabled_mask: Optional[tuple]
    achieved_s11_db: float
    center_f_hz: float
    orientation: int = 1
    rsw_ohm: Optional[float] = None
    receiver: Optional[Receiver] = None


def gm_for_offset(c_bb_f: float, offset_hz: float) -> float:
    return 2.0 * math.pi * c_bb_f * abs(offset_hz)


def tune_center(rx: Receiver, target_f_hz: float, gm_max_s: Optional[float] = None,
                span_hz: float = PEAK_SEARCH_SPAN_HZ) -> TuneResult:
    """Set Gm so the band-pass center lands on ``target_f_hz``.

    Gm is ``2 pi C_BB |target - f_LO|``; the I/Q orientation is chosen so the
    shift goes to the target's side of the LO.  The reported center is the
    analytic ``|Z_in|`` peak of the tuned receiver.
    """
    cfg = rx.cfg
    offset = target_f_hz - cfg.f_lo_hz
    if abs(offset) >= cfg.f_lo_hz / 2:
        raise OffsetOutOfRange(f"offset {offset:.6g} Hz is outside the model window")
    if rx.c_bb_f is None:
        raise TypeError("receiver baseband has no C_BB to tune against")
    gm = gm_for_offset(rx.c_bb_f, offset)
    if gm_max_s is not None and gm > gm_max_s:
        raise OffsetOutOfRange(f"offset needs gm = {gm:.6g} S > gm_max = {gm_max_s:.6g} S")
    # a Gm-shifted load peaks at -offset in baseband terms; flip I/Q for the upper side
    orientation = rx.orientation if offset == 0 else (1 if offset < 0 else -1)
    tuned = rx.with_gm(gm, orientation)
    half = max(span_hz, 1.5 * abs(offset))
    half = min(half, 0.499 * cfg.f_lo_hz)
    center = find_peak(tuned, cfg.f_lo_hz - half, cfg.f_lo_hz + half)
    achieved = s11_db(s11(tuned(center), cfg.ra_ohm))
    return TuneResult(gm, None, achieved, center, orientation, cfg.rsw_ohm, tuned)


def _evaluate_mask(rx: Receiver, bank: SwitchBank, mask, ra_ohm: float, center_f_hz: float):
    b = bank.with_mask(mask)
    cfg = MixerConfig(ra_ohm, b.effective_rsw_ohm, rx.cfg.f_lo_hz)
    gamma = s11(rx.with_cfg(cfg)(center_f_hz), ra_ohm)
    return abs(gamma), b


def trim_switch_bank(bank: SwitchBank, rx: Receiver, ra_ohm: float, center_f_hz: float) -> TuneResult:
    """Pick the enabled-unit mask with minimal |S11| at ``center_f_hz``.

    Exhaustive over all non-empty masks; among equal |S11| (relative 1e-12)
    the fewest enabled units win, then the lowest unit indices.
    """
    best = None
    for mask in bank.masks():
        mag, b = _evaluate_mask(rx, bank, mask, ra_ohm, center_f_hz)
        key = (b.n_enabled, tuple(not m for m in mask))
        if best is None or mag < best[0] * (1 - 1e-12) or (
            mag <= best[0] * (1 + 1e-12) and key < best[1]
        ):
            best = (mag, key, b)
    mag, _, b = best
    cfg = MixerConfig(ra_ohm, b.effective_rsw_ohm, rx.cfg.f_lo_hz)
    return TuneResult(
        gm_s=rx.gm_s,
        enabled_mask=b.enabled_mask,
        achieved_s11_db=s11_db(mag),
        center_f_hz=center_f_hz,
        orientation=rx.orientation,
        rsw_ohm=b.effective_rsw_ohm,
        receiver=rx.with_cfg(cfg),
    )
