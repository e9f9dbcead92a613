"""Fading model: channel draws and the noisy CSI copies held by the BS.

Every link is i.i.d. circularly-symmetric complex Gaussian.  BS-to-MS
entries have unit variance; the RS-to-MS, BS-to-RS and RS self-interference
links are scaled by the Q, G and I gains (dB -> linear power via 10^(x/10)).
Receiver noise has unit variance by convention, so transmit powers double
as SNRs and no noise field is stored.

Randomness is organized as one substream per (master seed, trial index,
draw role).  A draw role is one link group (or its CSI-error counterpart),
so changing a single gain parameter rescales that link's draws without
perturbing any other stream, and trials can be evaluated in any order or in
parallel with bit-stable results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Scenario constants (powers linear and noise-normalized, gains in dB)."""

    L: int = 2            # BS transmit antennas
    n1: int = 4           # MS-1 group size (reachable from BS and RS)
    n2: int = 4           # MS-2 group size (reachable from RS only)
    pt_bs: float = 100.0  # total BS transmit power
    pt_rs: float = 50.0   # total RS transmit power
    q_db: float = 6.0     # RS-to-MS channel variance
    g_db: float = 20.0    # BS-to-RS gain over the BS-to-MS link
    i_db: float = 10.0    # RS self-interference gain over the BS-to-MS link
    sigma_e2: float = 0.0  # CSI feedback error variance (linear)

    def __post_init__(self) -> None:
        if self.L < 2:
            raise ValueError(f"need at least 2 BS antennas, got L={self.L}")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError(f"need n1 >= 1 and n2 >= 1, got {self.n1}, {self.n2}")
        if self.pt_bs <= 0:
            raise ValueError(f"pt_bs must be positive, got {self.pt_bs}")
        if self.pt_rs < 0:
            raise ValueError(f"pt_rs must be non-negative, got {self.pt_rs}")
        if self.sigma_e2 < 0:
            raise ValueError(f"sigma_e2 must be non-negative, got {self.sigma_e2}")


def db_to_linear(x_db: float) -> float:
    """dB power gain to a linear variance scale."""
    return 10.0 ** (x_db / 10.0)


class DrawRole(IntEnum):
    """Substream labels; each (seed, trial, role) triple is independent."""

    BS_TO_MS1 = 0
    RS_TO_MS1 = 1
    RS_TO_MS2 = 2
    BS_TO_RS = 3
    RS_SELF = 4
    ERR_BS_TO_MS1 = 5
    ERR_RS_TO_MS1 = 6
    ERR_RS_TO_MS2 = 7
    ERR_BS_TO_RS = 8
    ERR_RS_SELF = 9


@dataclass(frozen=True)
class TrialStreams:
    """Per-role random streams for one Monte Carlo trial.

    Splitting rule: role streams are PCG64 generators seeded by the
    SeedSequence of the triple (master_seed, trial, role).  The object is
    immutable and ``role`` always returns a fresh generator, so every draw
    made from it is a pure function of the triple.
    """

    master_seed: int
    trial: int

    def __post_init__(self) -> None:
        if self.master_seed < 0 or self.trial < 0:
            raise ValueError("master_seed and trial must be non-negative")

    def role(self, role: DrawRole) -> np.random.Generator:
        seq = np.random.SeedSequence((int(self.master_seed), int(self.trial), int(role)))
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all true channels."""

    h_bs1: np.ndarray    # (n1, L) BS -> MS-1 rows
    h_rs1: np.ndarray    # (n1,)   RS -> MS-1
    h_rs2: np.ndarray    # (n2,)   RS -> MS-2
    h_bs_rs: np.ndarray  # (L,)    BS -> RS
    h_rs_rs: complex     # RS transmit antenna -> RS receive antenna


@dataclass(frozen=True)
class EstimatedChannels(ChannelRealization):
    """The BS's copies of the channels, possibly with feedback errors."""


def _complex_gaussian(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    # Variance enters only as a scale on standard-normal draws, so sweeping a
    # gain parameter reuses the identical underlying draws (common random
    # numbers).
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_realization(params: SystemParams, streams: TrialStreams) -> ChannelRealization:
    """Draw one set of true channels for the given trial streams."""
    q_lin = db_to_linear(params.q_db)
    g_lin = db_to_linear(params.g_db)
    i_lin = db_to_linear(params.i_db)
    return ChannelRealization(
        h_bs1=_complex_gaussian(streams.role(DrawRole.BS_TO_MS1), (params.n1, params.L), 1.0),
        h_rs1=_complex_gaussian(streams.role(DrawRole.RS_TO_MS1), (params.n1,), q_lin),
        h_rs2=_complex_gaussian(streams.role(DrawRole.RS_TO_MS2), (params.n2,), q_lin),
        h_bs_rs=_complex_gaussian(streams.role(DrawRole.BS_TO_RS), (params.L,), g_lin),
        h_rs_rs=complex(_complex_gaussian(streams.role(DrawRole.RS_SELF), (), i_lin)),
    )


def inject_csi_errors(
    real: ChannelRealization, sigma_e2: float, streams: TrialStreams
) -> EstimatedChannels:
    """Add i.i.d. complex Gaussian feedback errors of variance sigma_e2.

    Errors are independent across all entries and links; sigma_e2 = 0
    returns bit-identical copies of the true channels.
    """
    if sigma_e2 < 0:
        raise ValueError(f"sigma_e2 must be non-negative, got {sigma_e2}")
    n1, L = real.h_bs1.shape
    n2 = real.h_rs2.shape[0]
    return EstimatedChannels(
        h_bs1=real.h_bs1
        + _complex_gaussian(streams.role(DrawRole.ERR_BS_TO_MS1), (n1, L), sigma_e2),
        h_rs1=real.h_rs1
        + _complex_gaussian(streams.role(DrawRole.ERR_RS_TO_MS1), (n1,), sigma_e2),
        h_rs2=real.h_rs2
        + _complex_gaussian(streams.role(DrawRole.ERR_RS_TO_MS2), (n2,), sigma_e2),
        h_bs_rs=real.h_bs_rs
        + _complex_gaussian(streams.role(DrawRole.ERR_BS_TO_RS), (L,), sigma_e2),
        h_rs_rs=complex(
            real.h_rs_rs
            + _complex_gaussian(streams.role(DrawRole.ERR_RS_SELF), (), sigma_e2)
        ),
    )
