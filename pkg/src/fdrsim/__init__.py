"""Sum-rate simulator for a relay-aided multiuser MIMO downlink with ZFBF."""

from .channel import (
    ChannelRealization,
    DrawRole,
    EstimatedChannels,
    SystemParams,
    TrialStreams,
    db_to_linear,
    draw_realization,
    inject_csi_errors,
)
from .harness import (
    ErgodicEstimate,
    SweepConfig,
    SweepRow,
    estimate_ergodic,
    evaluate_trial,
    run_sweep,
)
from .numerics import SingularChannel, column_squared_norms, right_pseudo_inverse
from .power import (
    DegenerateRelayWeight,
    PowerAllocation,
    relay_cap,
    two_stage_allocate,
    water_fill,
)
from .precoding import (
    InvalidSelection,
    Mode,
    PrecoderSet,
    Selection,
    build_stacked_channel,
    compute_precoder,
)
from .schemes import (
    SchemeResult,
    ShapeMismatch,
    effective_gains,
    evaluate_baseline,
    evaluate_fdr,
    evaluate_hdr,
    hdr_combine,
    sinr_from_gains,
)

__version__ = "0.1.0"
