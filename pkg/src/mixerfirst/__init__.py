"""Modeling and simulation of passive mixer-first receivers."""

from .complex_impedance import (
    ComplexImpedanceSpec,
    ComplexSignalPair,
    check_gm_bandwidth,
    response_voltage,
    zc_at,
)
from .errors import (
    ConfigError,
    DegenerateDenominator,
    DivisionDegenerate,
    MissingCbb,
    MixerFirstError,
    NotSettled,
    OffsetOutOfRange,
    OutOfValidityWindow,
    StepTooLarge,
)
from .matching import (
    Receiver,
    SwitchBank,
    TuneResult,
    compose_receiver,
    s11,
    s11_db,
    trim_switch_bank,
    tune_center,
)
from .mixer_lti import (
    GAMMA,
    FrequencyResponse,
    LtiEquivalent,
    MixerConfig,
    derive_lti,
    impedance_sweep,
    input_impedance,
)
from .oracle_sim import (
    BasebandLoad,
    SimScenario,
    Source,
    SpectrumLine,
    measure_input_impedance,
    sideband_spectrum,
    simulate,
)
from .tia_rgc import (
    RgcParams,
    compose_complex_tia,
    rgc_input_impedance,
    rgc_input_impedance_nodal,
    tia_baseband_impedance,
)

__version__ = "0.1.0"
