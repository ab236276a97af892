"""Exception types raised by the mixer-first toolkit."""


class MixerFirstError(Exception):
    """Base class for all toolkit errors."""


class OutOfValidityWindow(MixerFirstError):
    """Frequency lies outside |f - f_LO| < f_LO/2 where the LTI model holds."""


class DivisionDegenerate(MixerFirstError):
    """The complex-impedance denominator 1 + j*Gm*Z_BB vanished."""


class MissingCbb(MixerFirstError):
    """A baseband capacitance was required but not supplied."""


class StepTooLarge(MixerFirstError):
    """Simulation step is coarser than 64 samples per LO period."""


class NotSettled(MixerFirstError):
    """Consecutive measurement windows disagree beyond the settling tolerance."""


class OffsetOutOfRange(MixerFirstError):
    """Requested center offset cannot be reached with the available Gm."""


class DegenerateDenominator(MixerFirstError):
    """Z_in + R_a is zero, so S11 is undefined."""


class ConfigError(MixerFirstError):
    """Invalid or incomplete run configuration."""
