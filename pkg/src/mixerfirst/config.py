"""Run configuration: sectioned ``key = value`` text with SI suffixes.

Example::

    [mixer]
    ra = 50 Ohm
    rsw = 5 Ohm
    f_lo = 1GHz

    [baseband]
    kind = rc
    r_bb = 274.6
    c_bb = 55pF
    gm = 3.46mS
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from .complex_impedance import ComplexImpedanceSpec
from .errors import ConfigError
from .matching import Receiver, SwitchBank, compose_receiver
from .mixer_lti import MixerConfig
from .oracle_sim import BasebandLoad, SimScenario, Source
from .tia_rgc import RgcParams, compose_complex_tia, rgc_input_impedance

_PREFIX = {"f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "m": 1e-3,
           "": 1.0, "k": 1e3, "M": 1e6, "G": 1e9, "T": 1e12}
_UNITS = {"Hz": "Hz", "Ohm": "Ohm", "ohm": "Ohm", "Ω": "Ohm", "F": "F", "S": "S", "V": "V", "s": "s"}
_SI_RE = re.compile(
    r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?inf)\s*([fpnuµmkMGT]?)\s*(Hz|Ohm|ohm|Ω|F|S|V|s)?\s*$"
)


def parse_si(text: str, unit: Optional[str] = None) -> float:
    """Parse ``'55pF'``, ``'3.46 mS'``, ``'1e9'`` ... into a float in base units.

    A unit letter, when present, must match ``unit``.
    """
    m = _SI_RE.match(text)
    if not m:
        raise ConfigError(f"cannot parse quantity {text!r}")
    number, prefix, u = m.groups()
    if u is not None and unit is not None and _UNITS[u] != unit:
        raise ConfigError(f"{text!r}: expected unit {unit}, got {u}")
    return float(number) * _PREFIX[prefix]


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


# field name -> (kind, unit); kinds: float, ofloat (optional), int, bool, str, floats
@dataclass(frozen=True)
class MixerSection:
    ra: float = 50.0
    rsw: float = 5.0
    f_lo: float = 1e9
    _schema = {"ra": ("float", "Ohm"), "rsw": ("float", "Ohm"), "f_lo": ("float", "Hz")}


@dataclass(frozen=True)
class BasebandSection:
    kind: str = "tia"
    r_bb: float = 274.6
    c_bb: float = 55e-12
    gm: float = 0.0
    gm_bandwidth: Optional[float] = 1e9
    orientation: int = 1
    _schema = {"kind": ("str", None), "r_bb": ("float", "Ohm"), "c_bb": ("float", "F"),
               "gm": ("float", "S"), "gm_bandwidth": ("ofloat", "Hz"), "orientation": ("int", None)}


@dataclass(frozen=True)
class TiaSection:
    gm1: float = 1e-3
    gm2: float = 0.9e-3
    ro1: float = 20e3
    ro2: float = 10e3
    rl: float = 5e3
    cl: float = 20e-15
    r_fb: float = 10e3
    ideal_buffer: bool = False
    _schema = {"gm1": ("float", "S"), "gm2": ("float", "S"), "ro1": ("float", "Ohm"),
               "ro2": ("float", "Ohm"), "rl": ("float", "Ohm"), "cl": ("float", "F"),
               "r_fb": ("float", "Ohm"), "ideal_buffer": ("bool", None)}


@dataclass(frozen=True)
class SweepSection:
    f_start: float = 0.5e9
    f_stop: float = 1.5e9
    points: int = 1001
    _schema = {"f_start": ("float", "Hz"), "f_stop": ("float", "Hz"), "points": ("int", None)}


@dataclass(frozen=True)
class TuneSection:
    target: Optional[float] = 1.01e9
    gm_max: Optional[float] = None
    _schema = {"target": ("ofloat", "Hz"), "gm_max": ("ofloat", "S")}


@dataclass(frozen=True)
class BankSection:
    unit_rsw: float = 20.0
    n_units: int = 4
    _schema = {"unit_rsw": ("float", "Ohm"), "n_units": ("int", None)}


@dataclass(frozen=True)
class LadderSection:
    gm: tuple = (0.0, 1.73e-3, 3.46e-3)
    _schema = {"gm": ("floats", "S")}


@dataclass(frozen=True)
class SimSection:
    amplitude: float = 1e-3
    f_rf: float = 1.01e9
    dt: Optional[float] = None
    settle_periods: int = 20
    measure_periods: int = 10
    init: str = "zero"
    offsets: tuple = (-50e6, -20e6, -10e6, -5e6, 0.0, 5e6, 10e6, 20e6, 50e6)
    _schema = {"amplitude": ("float", "V"), "f_rf": ("float", "Hz"), "dt": ("ofloat", "s"),
               "settle_periods": ("int", None), "measure_periods": ("int", None),
               "init": ("str", None), "offsets": ("floats", "Hz")}


_SECTIONS = {
    "mixer": MixerSection, "baseband": BasebandSection, "tia": TiaSection,
    "sweep": SweepSection, "tune": TuneSection, "bank": BankSection,
    "ladder": LadderSection, "sim": SimSection,
}


def _parse_value(kind: str, unit: Optional[str], text: str):
    if kind == "float":
        return parse_si(text, unit)
    if kind == "ofloat":
        return None if text.strip().lower() == "none" else parse_si(text, unit)
    if kind == "int":
        try:
            return int(text.strip())
        except ValueError:
            raise ConfigError(f"not an integer: {text!r}") from None
    if kind == "bool":
        return _parse_bool(text)
    if kind == "floats":
        items = [t for t in text.split(",") if t.strip()]
        return tuple(parse_si(t, unit) for t in items)
    return text.strip()


def _format_value(kind: str, value) -> str:
    if value is None:
        return "none"
    if kind == "floats":
        return ", ".join(repr(float(v)) for v in value)
    if kind in ("float", "ofloat"):
        return repr(float(value))
    if kind == "bool":
        return "true" if value else "false"
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    mixer: MixerSection = field(default_factory=MixerSection)
    baseband: BasebandSection = field(default_factory=BasebandSection)
    tia: TiaSection = field(default_factory=TiaSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    tune: TuneSection = field(default_factory=TuneSection)
    bank: BankSection = field(default_factory=BankSection)
    ladder: LadderSection = field(default_factory=LadderSection)
    sim: SimSection = field(default_factory=SimSection)

    def with_sweep(self, f_start=None, f_stop=None, points=None) -> "RunConfig":
        sw = self.sweep
        sw = replace(sw, f_start=sw.f_start if f_start is None else f_start,
                     f_stop=sw.f_stop if f_stop is None else f_stop,
                     points=sw.points if points is None else points)
        return replace(self, sweep=sw)

    # builders -----------------------------------------------------------
    def mixer_config(self) -> MixerConfig:
        m = self.mixer
        return MixerConfig(m.ra, m.rsw, m.f_lo)

    def rgc_params(self) -> RgcParams:
        t = self.tia
        return RgcParams(t.gm1, t.gm2, t.ro1, t.ro2, t.rl, t.cl, t.r_fb, t.ideal_buffer,
                         c_bb_f=self.baseband.c_bb)

    def baseband_model(self):
        bb = self.baseband
        if bb.kind == "rc":
            return ComplexImpedanceSpec(bb.r_bb, bb.c_bb, bb.gm, bb.gm_bandwidth)
        if bb.kind == "tia":
            return compose_complex_tia(self.rgc_params(), bb.gm)
        if bb.kind == "r":
            r = bb.r_bb
            return lambda f: r + 0j * f
        raise ConfigError(f"baseband kind must be rc, tia or r; got {bb.kind!r}")

    def receiver(self) -> Receiver:
        return compose_receiver(self.mixer_config(), self.baseband_model(), self.baseband.orientation)

    def switch_bank(self) -> SwitchBank:
        return SwitchBank(self.bank.unit_rsw, self.bank.n_units)

    def rc_equivalent(self, gm: float) -> ComplexImpedanceSpec:
        """RC stand-in for the baseband, used by the time-domain oracle."""
        bb = self.baseband
        if bb.kind == "tia":
            r = rgc_input_impedance(self.rgc_params(), 0.0).real
            return ComplexImpedanceSpec(r, bb.c_bb, gm, bb.gm_bandwidth)
        if bb.kind == "rc":
            return ComplexImpedanceSpec(bb.r_bb, bb.c_bb, gm, bb.gm_bandwidth)
        raise ConfigError("the oracle needs an rc or tia baseband (kind = r has no C_BB)")

    def scenario(self, f_rf: float, gm: float, orientation: int, dt: Optional[float] = None) -> SimScenario:
        spec = self.rc_equivalent(gm)
        sim = self.sim
        return SimScenario(
            self.mixer_config(),
            BasebandLoad(spec.r_bb_ohm, spec.c_bb_f, gm, orientation),
            Source(sim.amplitude, f_rf),
            dt_s=sim.dt if dt is None else dt,
            settle_periods=sim.settle_periods,
            measure_periods=sim.measure_periods,
            init=sim.init,
        )

    def require(self, command: str):
        """Check that every parameter the command uses is present and valid."""
        try:
            self.receiver()
            if command in ("tune", "trim") and self.tune.target is None:
                raise ConfigError(f"{command} needs [tune] target")
            if command == "trim":
                self.switch_bank()
            if command == "gm-ladder" and not self.ladder.gm:
                raise ConfigError("gm-ladder needs a non-empty [ladder] gm list")
            if command in ("validate", "oracle"):
                self.rc_equivalent(self.baseband.gm)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0]) from None
    sections = {}
    for name in cp.sections():
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        cls = _SECTIONS[name]
        values = {}
        for key, text_value in cp.items(name):
            if key not in cls._schema:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            kind, unit = cls._schema[key]
            values[key] = _parse_value(kind, unit, text_value)
        sections[name] = cls(**values)
    return RunConfig(**sections)


def serialize_config(cfg: RunConfig) -> str:
    out = []
    for name, cls in _SECTIONS.items():
        sec = getattr(cfg, name)
        out.append(f"[{name}]")
        for f in fields(cls):
            kind, _ = cls._schema[f.name]
            out.append(f"{f.name} = {_format_value(kind, getattr(sec, f.name))}")
        out.append("")
    return "\n".join(out)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
