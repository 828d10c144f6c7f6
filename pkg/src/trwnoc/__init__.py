"""Time-reversal precoding simulator for wireless links inside a chip package."""

from .channel import (
    CavityModel,
    ChannelImpulseResponse,
    MultipathTap,
    Position,
    discretize,
    export_cir_trace,
    import_cir_trace,
    monopole_length,
    propagation_velocity,
    rms_delay_spread,
    synth_cavity_cir,
)
from .link import (
    BerResult,
    LinkConfig,
    NoiseReference,
    NoiseSpec,
    add_awgn,
    run_interference_probe,
    run_trial,
    run_trials,
)
from .metrics import (
    extrapolate_ber_curve,
    midpoint_ber,
    q_function,
    suppression_ratio_db,
    theoretical_ber,
)
from .modem import ModulationScheme, SchemeKind, Waveform, demodulate, estimate_threshold, modulate
from .trcore import (
    TimeReversalFilter,
    TimeReversalPrecoder,
    build_tr_filter,
    effective_channel,
    precode,
    spatial_response,
    temporal_focusing_gain,
)

__version__ = "0.1.0"
