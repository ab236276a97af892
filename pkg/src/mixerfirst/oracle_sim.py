"""Time-domain simulator of the switched network used as the reference oracle.

The network is a sinusoidal source with series ``R_a`` driving one RF node,
four ideal switches (``R_sw`` when on, open when off) clocked by 25 %
non-overlapping phases, and four identical baseband branches ``R || C`` with an
optional Gm cross-coupling.  Switch ``k`` conducts during
``[k*T_LO/4, (k+1)*T_LO/4)`` and the Gm stage draws ``gm * v[k + orientation]``
out of branch ``k``.

Integration is trapezoidal on a grid whose points land exactly on the switch
edges, so each step sees one fixed topology.  Steps inside one LO period are
composed into a period map; that is the same recursion evaluated in a
different order, not an approximation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import NotSettled, StepTooLarge
from .mixer_lti import MixerConfig

MIN_SAMPLES_PER_LO = 64
SETTLE_TOLERANCE = 0.01
# settle at least this many time constants of the slowest network mode
SETTLE_TIME_CONSTANTS = 15.0
MAX_RATIO_DENOMINATOR = 100_000
NODES = ("rf", "bb0", "bb1", "bb2", "bb3", "bbi", "bbq")


@dataclass(frozen=True)
class BasebandLoad:
    """One baseband branch; all four branches are identical.

    ``r_ohm`` may be ``math.inf`` (capacitor only); ``c_f = 0`` gives an
    R-only load.
    """

    r_ohm: float
    c_f: float = 0.0
    gm_s: float = 0.0
    orientation: int = 1

    def __post_init__(self):
        if not self.r_ohm > 0:
            raise ValueError(f"r_ohm must be > 0, got {self.r_ohm}")
        if not self.c_f >= 0:
            raise ValueError(f"c_f must be >= 0, got {self.c_f}")
        if not self.gm_s >= 0:
            raise ValueError(f"gm_s must be >= 0, got {self.gm_s}")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if math.isinf(self.r_ohm) and self.c_f == 0:
            raise ValueError("a branch needs a finite R or a C")


@dataclass(frozen=True)
class Source:
    amplitude_v: float
    f_rf_hz: float

    def __post_init__(self):
        if not math.isfinite(self.amplitude_v):
            raise ValueError("amplitude_v must be finite")
        if not self.f_rf_hz >= 0:
            raise ValueError("f_rf_hz must be >= 0")


@dataclass(frozen=True)
class SimScenario:
    """Complete oracle setup.

    Window lengths count *periods* of the LO/RF pair: the shortest interval
    holding whole cycles of both.  When ``f_LO / |f_RF - f_LO|`` is an integer
    that is exactly the beat period; at ``f_RF = f_LO`` it is one LO period.

    ``init="zero"`` starts from discharged capacitors and the settle window is
    stretched to cover the slowest mode; ``init="steady"`` starts on the
    periodic steady state of the discrete recursion.  ``clock="always_on"``
    keeps switch 0 closed permanently (degenerate single-branch check).
    """

    cfg: MixerConfig
    load: BasebandLoad
    source: Source
    dt_s: Optional[float] = None
    settle_periods: int = 20
    measure_periods: int = 10
    init: str = "zero"
    clock: str = "four_phase"

    def __post_init__(self):
        if self.settle_periods < 0:
            raise ValueError("settle_periods must be >= 0")
        if self.measure_periods < 1:
            raise ValueError("measure_periods must be >= 1")
        if self.init not in ("zero", "steady"):
            raise ValueError("init must be 'zero' or 'steady'")
        if self.clock not in ("four_phase", "always_on"):
            raise ValueError("clock must be 'four_phase' or 'always_on'")
        if self.dt_s is not None and not self.dt_s > 0:
            raise ValueError("dt_s must be > 0")
        self.ratio  # ratio check happens eagerly

    @property
    def step(self) -> float:
        return self.dt_s if self.dt_s is not None else 1.0 / (MIN_SAMPLES_PER_LO * self.cfg.f_lo_hz)

    @property
    def ratio(self) -> Fraction:
        """``f_RF / f_LO`` as an exact fraction ``p/q``."""
        x = self.source.f_rf_hz / self.cfg.f_lo_hz
        fr = Fraction(x).limit_denominator(MAX_RATIO_DENOMINATOR)
        if abs(float(fr) - x) > 1e-12 * max(1.0, x):
            raise ValueError(
                f"f_rf/f_lo = {x!r} is not a ratio with denominator <= {MAX_RATIO_DENOMINATOR}"
            )
        return fr

    @property
    def lo_per_period(self) -> int:
        return self.ratio.denominator

    @property
    def beat_hz(self) -> float:
        return abs(self.source.f_rf_hz - self.cfg.f_lo_hz)

    def samples_per_lo(self) -> int:
        """Steps per LO period; raises if the grid is too coarse or misaligned."""
        t_lo = 1.0 / self.cfg.f_lo_hz
        n_float = t_lo / self.step
        if n_float < MIN_SAMPLES_PER_LO * (1 - 1e-9):
            raise StepTooLarge(
                f"dt = {self.step:.6g} s gives {n_float:.3g} samples per LO period "
                f"(need >= {MIN_SAMPLES_PER_LO})"
            )
        n = int(round(n_float))
        if abs(n - n_float) > 1e-6 or n % 4:
            raise ValueError("switch edges must land on the time grid: T_LO/dt must be a multiple of 4")
        return n


@dataclass(frozen=True)
class SpectrumLine:
    f_hz: float
    amplitude: complex
    sideband_k: int


def _phase_of_step(s: SimScenario, n: int) -> np.ndarray:
    if s.clock == "always_on":
        return np.zeros(n, dtype=int)
    return (4 * np.arange(n)) // n


class _Network:
    """Per-phase state-space matrices of the switched network."""

    def __init__(self, s: SimScenario, n: int):
        self.s = s
        self.n = n
        self.dt = 1.0 / (n * s.cfg.f_lo_hz)
        cfg, ld = s.cfg, s.load
        self.r_src = cfg.ra_ohm + cfg.rsw_ohm
        self.dynamic = ld.c_f > 0
        self.phase = _phase_of_step(s, n)
        coupling = np.roll(np.eye(4), ld.orientation, axis=1)  # coupling[k, k+o] = 1
        g_load = 0.0 if math.isinf(ld.r_ohm) else 1.0 / ld.r_ohm
        self.M, self.N, self.H = {}, {}, {}
        for k in set(self.phase.tolist()):
            e = np.zeros(4)
            e[k] = 1.0
            # nodal conductance with the source branch attached to node k
            G = g_load * np.eye(4) + ld.gm_s * coupling + np.outer(e, e) / self.r_src
            b = e / self.r_src
            if self.dynamic:
                A = -G / ld.c_f
                B = b / ld.c_f
                L = np.eye(4) - 0.5 * self.dt * A
                self.M[k] = np.linalg.solve(L, np.eye(4) + 0.5 * self.dt * A)
                self.N[k] = np.linalg.solve(L, B) * 0.5 * self.dt
            else:
                self.H[k] = np.linalg.solve(G, b)

    def period_maps(self):
        """Prefix maps ``S[j]`` (state) and ``G[j]`` (input samples) for one LO period."""
        n = self.n
        S = np.empty((n + 1, 4, 4))
        G = np.zeros((n + 1, 4, n + 1))
        S[0] = np.eye(4)
        for j in range(n):
            M, Nv = self.M[self.phase[j]], self.N[self.phase[j]]
            S[j + 1] = M @ S[j]
            G[j + 1] = M @ G[j]
            G[j + 1, :, j] += Nv
            G[j + 1, :, j + 1] += Nv
        return S, G


@dataclass
class SimResult:
    """Recorded window of a simulation.

    Arrays are per time step ``n`` covering ``[t[n], t[n] + dt)``: ``*_a`` are
    values just after ``t[n]`` and ``*_b`` just before ``t[n] + dt``, so
    waveforms that jump at switch edges are integrated exactly.
    """

    scenario: SimScenario
    dt: float
    index: np.ndarray  # global sample index of each step start
    phase: np.ndarray
    u_a: np.ndarray
    u_b: np.ndarray
    x_a: np.ndarray
    x_b: np.ndarray
    settle_periods_used: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def t(self) -> np.ndarray:
        return self.index * self.dt

    @property
    def samples_per_lo(self) -> int:
        return int(round(1.0 / (self.dt * self.scenario.cfg.f_lo_hz)))

    def _src(self):
        r = self.scenario.cfg.ra_ohm + self.scenario.cfg.rsw_ohm
        rows = np.arange(len(self.phase))
        i_a = (self.u_a - self.x_a[rows, self.phase]) / r
        i_b = (self.u_b - self.x_b[rows, self.phase]) / r
        return i_a, i_b

    def signal(self, name: str):
        """(start, end) values per step for ``i_source``, ``v_src`` or a node in NODES."""
        if name == "i_source":
            return self._src()
        if name == "v_src":
            return self.u_a, self.u_b
        if name == "rf":
            i_a, i_b = self._src()
            ra = self.scenario.cfg.ra_ohm
            return self.u_a - ra * i_a, self.u_b - ra * i_b
        if name in ("bb0", "bb1", "bb2", "bb3"):
            k = int(name[2])
            return self.x_a[:, k], self.x_b[:, k]
        if name == "bbi":
            return self.x_a[:, 0] - self.x_a[:, 2], self.x_b[:, 0] - self.x_b[:, 2]
        if name == "bbq":
            return self.x_a[:, 1] - self.x_a[:, 3], self.x_b[:, 1] - self.x_b[:, 3]
        raise KeyError(f"unknown signal {name!r}")

    def samples(self, name: str) -> np.ndarray:
        return self.signal(name)[0]

    def switch_states(self) -> np.ndarray:
        """Boolean (steps, 4) array of which switch conducts during each step."""
        if self.scenario.clock == "always_on":
            states = np.zeros((len(self.phase), 4), dtype=bool)
            states[:, 0] = True
            return states
        return np.eye(4, dtype=bool)[self.phase]

    def _coefficient(self, y_a, y_b, harmonic: Fraction, sl=slice(None)) -> complex:
        # (1/T) * integral of y(t) exp(-j 2 pi f t), trapezoidal per step,
        # f = harmonic * f_LO; phases use exact integer arithmetic
        n = self.samples_per_lo
        num, den = harmonic.numerator, harmonic.denominator * n
        idx = self.index[sl]
        ph_a = ((num * idx) % den) / den
        ph_b = ((num * (idx + 1)) % den) / den
        acc = np.sum(y_a[sl] * np.exp(-2j * np.pi * ph_a) + y_b[sl] * np.exp(-2j * np.pi * ph_b))
        return complex(acc / (2 * len(idx)))

    def phasor(self, name: str, harmonic: Fraction, sl=slice(None)) -> complex:
        """Complex amplitude of ``name`` at ``harmonic * f_LO`` (one-sided, cos-referenced)."""
        c = self._coefficient(*self.signal(name), Fraction(harmonic), sl)
        return c if harmonic == 0 else 2 * c

    def period_slices(self) -> list[slice]:
        per = self.samples_per_lo * self.scenario.lo_per_period
        return [slice(i, i + per) for i in range(0, len(self.index), per)]

    def to_csv(self, path):
        """Write ``t_s, v_rf, v_bb0..v_bb3, i_source`` rows (values just after each t)."""
        v_rf = self.samples("rf")
        i_src = self.samples("i_source")
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_s", "v_rf", "v_bb0", "v_bb1", "v_bb2", "v_bb3", "i_source"])
            for n in range(len(self.index)):
                row = [self.t[n], v_rf[n], *self.x_a[n], i_src[n]]
                w.writerow([f"{v:.8e}" for v in row])


def _input_samples(s: SimScenario, n: int, index: np.ndarray) -> np.ndarray:
    r = s.ratio
    den = r.denominator * n
    ph = ((r.numerator * index) % den) / den
    return s.source.amplitude_v * np.cos(2.0 * np.pi * ph)


def _settle_periods(s: SimScenario, phi: Optional[np.ndarray]) -> int:
    q = s.lo_per_period
    periods = s.settle_periods
    if s.init == "zero" and phi is not None:
        rho = float(np.max(np.abs(np.linalg.eigvals(phi))))
        if rho > 0:
            lo_needed = SETTLE_TIME_CONSTANTS / -math.log(min(rho, 1 - 1e-15))
            periods = max(periods, math.ceil(lo_needed / q))
    return periods


def simulate(s: SimScenario, record: str = "measure") -> SimResult:
    """Integrate the scenario; record the measurement window or the whole run."""
    if record not in ("measure", "all"):
        raise ValueError("record must be 'measure' or 'all'")
    n = s.samples_per_lo()
    net = _Network(s, n)
    q = s.lo_per_period
    r = s.ratio

    if not net.dynamic:
        settle = s.settle_periods
        first = 0 if record == "all" else settle * q * n
        total = (settle + s.measure_periods) * q * n
        index = np.arange(first, total, dtype=np.int64)
        phase = net.phase[index % n]
        u_a = _input_samples(s, n, index)
        u_b = _input_samples(s, n, index + 1)
        hk = np.empty((len(index), 4))
        for k, h in net.H.items():
            hk[phase == k] = h
        return SimResult(s, net.dt, index, phase, u_a, u_b, hk * u_a[:, None], hk * u_b[:, None], settle)

    S, G = net.period_maps()
    phi = S[n]
    # per LO period m the sampled input is Re{z^m * A e^{jw j dt}}, z = e^{jw T_LO}
    j = np.arange(n + 1)
    den = r.denominator * n
    local = s.source.amplitude_v * np.exp(2j * np.pi * ((r.numerator * j) % den) / den)
    h = np.einsum("jai,i->ja", G, local)  # (n+1, 4) complex
    g = h[n]

    settle = _settle_periods(s, phi)
    n_lo = (settle + s.measure_periods) * q
    m_all = np.arange(n_lo + 1, dtype=np.int64)
    z_m = np.exp(2j * np.pi * ((r.numerator * m_all) % q) / q)

    if s.init == "steady":
        z = np.exp(2j * np.pi * (r.numerator % q) / q)
        x = np.linalg.solve(z * np.eye(4) - phi, g).real
    else:
        x = np.zeros(4)
    drive = (z_m[:, None] * g[None, :]).real
    xs = np.empty((n_lo + 1, 4))
    xs[0] = x
    for m in range(n_lo):
        x = phi @ x + drive[m]
        xs[m + 1] = x

    m0 = 0 if record == "all" else settle * q
    m_rec = np.arange(m0, n_lo)
    X = np.einsum("jab,mb->mja", S, xs[m_rec]) + (z_m[m_rec, None, None] * h[None, :, :]).real
    x_a = X[:, :n, :].reshape(-1, 4)
    x_b = X[:, 1:, :].reshape(-1, 4)
    index = (m_rec[:, None] * n + np.arange(n)[None, :]).reshape(-1)
    phase = net.phase[index % n]
    u_a = _input_samples(s, n, index)
    u_b = _input_samples(s, n, index + 1)
    return SimResult(s, net.dt, index, phase, u_a, u_b, x_a, x_b, settle)


def _zin(res: SimResult, sl=slice(None)) -> complex:
    h = res.scenario.ratio
    v = res.phasor("rf", h, sl)
    i = res.phasor("i_source", h, sl)
    return v / i


def measure_input_impedance(s: SimScenario) -> complex:
    """``V_rf / I_source`` at ``f_RF`` over the measurement window.

    Raises :class:`NotSettled` if the last two periods of the window disagree
    by more than 1 %.
    """
    res = simulate(s)
    z = _zin(res)
    periods = res.period_slices()
    if len(periods) >= 2:
        z1, z2 = _zin(res, periods[-2]), _zin(res, periods[-1])
        if abs(z2 - z1) > SETTLE_TOLERANCE * abs(z2):
            raise NotSettled(f"last two windows differ: {z1:.6g} vs {z2:.6g}")
    return z


def sideband_spectrum(s: SimScenario, node: str = "bbi", ks: Iterable[int] = range(-4, 5),
                      result: Optional[SimResult] = None) -> list[SpectrumLine]:
    """Lines of ``node`` at ``f_out = f_RF + k*f_LO`` for each sideband ``k``.

    ``f_hz`` is signed; a negative-frequency line carries the conjugate of the
    phasor at ``|f_hz|``.
    """
    if node not in NODES:
        raise KeyError(f"unknown node {node!r}; expected one of {NODES}")
    res = result if result is not None else simulate(s)
    r = s.ratio
    lines = []
    for k in ks:
        harmonic = r + k
        amp = res.phasor(node, harmonic)
        lines.append(SpectrumLine(float(harmonic) * s.cfg.f_lo_hz, amp, int(k)))
    return lines


def power_balance(res: SimResult) -> tuple[float, float]:
    """Time-averaged source power and total resistive dissipation over the window.

    Only meaningful without the Gm stage, which is an active element.
    """
    cfg, ld = res.scenario.cfg, res.scenario.load
    i_a, i_b = res._src()

    def mean(ya, yb):
        return float(np.mean(0.5 * (ya + yb)))

    p_src = mean(res.u_a * i_a, res.u_b * i_b)
    p_diss = (cfg.ra_ohm + cfg.rsw_ohm) * mean(i_a**2, i_b**2)
    if not math.isinf(ld.r_ohm):
        p_diss += mean(np.sum(res.x_a**2, axis=1), np.sum(res.x_b**2, axis=1)) / ld.r_ohm
    return p_src, p_diss
