"""rangekit: spectrally-sparse ranging waveforms for multi-node arrays.

Library layout:

* ``waveforms``   -- complex-baseband generation of the two-tone, stepped,
  two-tone-stepped, and chirp waveforms, plus spec/IQ serialization.
* ``bounds``      -- closed-form and numeric delay-variance lower bounds.
* ``ambiguity``   -- analytic and numeric delay-Doppler ambiguity surfaces
  and the lobe-notching report.
* ``channelplan`` -- frequency-division channel assignment with constant
  tone separation, timing floors, and node capacity.
* ``estimator``   -- matched filter, interpolated peak extraction, capture
  averaging, calibration, and eigendecomposition SNR estimation.
* ``simulator``   -- propagation channel, multi-node scenarios, and Monte
  Carlo variance sweeps against the bounds.
* ``cli``         -- command-line front end emitting CSV/JSON artifacts.
"""

from .waveforms import (
    ComplexSignal,
    WaveformSpec,
    generate,
    generate_lfm,
    generate_pttw,
    generate_sfw,
    generate_ttsfw,
    read_signal_csv,
    step_order_for_pair,
    write_signal_csv,
)
from .bounds import (
    CrlbReport,
    NoiseSpec,
    crlb_limits,
    crlb_ttsfw,
    crlb_two_tone,
    numeric_msbw,
    processing_gain_db,
    scalability_params,
    ttsfw_centered_msbw,
    ttsfw_msbw,
)
from .ambiguity import (
    AmbiguitySurface,
    ambiguity_analytic,
    ambiguity_numeric,
    ambiguity_pttw_analytic,
    ambiguity_sfw_analytic,
    ambiguity_ttsfw_analytic,
    default_axes,
    notch_report,
)
from .channelplan import (
    CapacityError,
    ChannelPlan,
    build_plan,
    min_pulse_time,
    min_range,
    node_capacity,
)
from .estimator import (
    ObservationMatrix,
    RangingEstimate,
    average_peaks,
    calibrate,
    estimate_snr_eigen,
    interpolate_peak,
    matched_filter,
    matched_filter_direct,
)
from .simulator import (
    LinkModel,
    MonteCarloConfig,
    MonteCarloResult,
    Node,
    NodeScenario,
    RangingPair,
    ThreeNodeConfig,
    ThreeNodeResult,
    apply_channel,
    monte_carlo_variance,
    propagate,
    run_pair_session,
    run_three_node_demo,
)

__version__ = "0.1.0"
