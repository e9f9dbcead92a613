"""Stacked channels, zero-forcing precoders and their structural partition.

Four stacking modes share one precoder recipe (the right pseudo-inverse of
the stacked channel known at the BS):

* ``HDR_PHASE1`` -- BS alone serves selected MS-1 users plus the relay feed;
  the stack is (|gamma|+1) x L over the BS antennas only.
* ``HDR_PHASE2`` -- BS and relay transmit together through an (L+1)-input
  stack; the relay forwards one stream to an MS-2 user.
* ``FDR`` -- like phase 2 but the relay's own receive row (including its
  self-interference coefficient) joins the stack, so zero-forcing nulls the
  self-interference along with the multiuser interference.
* ``BASELINE`` -- plain multiuser ZFBF from the BS, no relay.

In the modes with a relay transmit input, the MS-2 row of the stack is zero
across all BS antennas, which forces the relay row of the precoder to be
zero everywhere except the forwarded-stream column: the relay can only ever
transmit the stream it decodes.  Those forced entries are validated and
snapped to exact zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelRealization
from .numerics import SingularChannel, right_pseudo_inverse

STRUCTURAL_ZERO_TOL = 1e-10


class InvalidSelection(Exception):
    """User selection violates the cardinality or index bounds of a mode."""


class Mode(Enum):
    HDR_PHASE1 = "hdr_phase1"
    HDR_PHASE2 = "hdr_phase2"
    FDR = "fdr"
    BASELINE = "baseline"


#: Modes whose stack has the relay transmit input as an extra column.
RELAY_INPUT_MODES = (Mode.HDR_PHASE2, Mode.FDR)


@dataclass(frozen=True)
class Selection:
    """An ordered set of MS-1 user indices plus, where needed, one MS-2 user.

    Indices are 0-based positions into the realization arrays.
    """

    gamma: tuple[int, ...] = ()
    ms2: int | None = None

    def __post_init__(self) -> None:
        if len(set(self.gamma)) != len(self.gamma):
            raise InvalidSelection(f"duplicate MS-1 indices in {self.gamma}")
        if any(g < 0 for g in self.gamma):
            raise InvalidSelection(f"negative MS-1 index in {self.gamma}")
        if self.ms2 is not None and self.ms2 < 0:
            raise InvalidSelection(f"negative MS-2 index {self.ms2}")


def _validate(mode: Mode, sel: Selection, n1: int, n2: int, L: int) -> None:
    if any(g >= n1 for g in sel.gamma):
        raise InvalidSelection(f"MS-1 index out of range for n1={n1}: {sel.gamma}")
    if mode in (Mode.FDR, Mode.HDR_PHASE2):
        if sel.ms2 is None:
            raise InvalidSelection(f"{mode.value} requires an MS-2 index")
        if sel.ms2 >= n2:
            raise InvalidSelection(f"MS-2 index {sel.ms2} out of range for n2={n2}")
    elif sel.ms2 is not None:
        raise InvalidSelection(f"{mode.value} takes no MS-2 index")
    size = len(sel.gamma)
    if mode in (Mode.FDR, Mode.HDR_PHASE1) and size > L - 1:
        raise InvalidSelection(f"{mode.value} allows at most L-1={L - 1} MS-1 users, got {size}")
    if mode is Mode.HDR_PHASE2 and size > L:
        raise InvalidSelection(f"hdr_phase2 allows at most L={L} MS-1 users, got {size}")
    if mode is Mode.BASELINE and not 1 <= size <= L:
        raise InvalidSelection(f"baseline needs 1..L={L} MS-1 users, got {size}")


def build_stacked_channel(
    mode: Mode, chans: ChannelRealization, sel: Selection
) -> np.ndarray:
    """Stack the selected receive rows into the channel matrix of a mode.

    Works on true channels and on estimated channels alike; the caller
    decides which side of the CSI it is building.
    """
    n1, L = chans.h_bs1.shape
    n2 = chans.h_rs2.shape[0]
    _validate(mode, sel, n1, n2, L)
    idx = list(sel.gamma)
    k = len(idx)

    if mode is Mode.BASELINE:
        return np.array(chans.h_bs1[idx, :], dtype=np.complex128)
    if mode is Mode.HDR_PHASE1:
        stacked = np.empty((k + 1, L), dtype=np.complex128)
        stacked[:k] = chans.h_bs1[idx, :]
        stacked[k] = chans.h_bs_rs
        return stacked

    # Relay-input modes: columns are the L BS antennas plus the RS input.
    rows = k + 1 if mode is Mode.HDR_PHASE2 else k + 2
    stacked = np.zeros((rows, L + 1), dtype=np.complex128)
    stacked[:k, :L] = chans.h_bs1[idx, :]
    stacked[:k, L] = chans.h_rs1[idx]
    if mode is Mode.FDR:
        stacked[k, :L] = chans.h_bs_rs
        stacked[k, L] = chans.h_rs_rs
    stacked[rows - 1, L] = chans.h_rs2[sel.ms2]
    return stacked


@dataclass(frozen=True)
class PrecoderSet:
    """A stacked channel, its right pseudo-inverse and partition metadata.

    Column k of ``w`` carries stream k (the stream aimed at receive row k of
    ``stacked``); rows of ``w`` are the L BS antennas followed, in the
    relay-input modes, by the relay's transmit input.
    """

    mode: Mode
    selection: Selection
    stacked: np.ndarray
    w: np.ndarray
    n_bs_antennas: int

    @property
    def has_rs_row(self) -> bool:
        return self.mode in RELAY_INPUT_MODES

    @property
    def bs_block(self) -> np.ndarray:
        """The BS-antenna rows of the precoder."""
        return self.w[: self.n_bs_antennas, :] if self.has_rs_row else self.w

    @property
    def rs_weight(self) -> complex:
        """Transmit weight applied at the relay for the forwarded stream."""
        if not self.has_rs_row:
            raise ValueError(f"{self.mode.value} has no relay transmit input")
        return complex(self.w[self.n_bs_antennas, -1])


def compute_precoder(mode: Mode, stacked: np.ndarray, sel: Selection) -> PrecoderSet:
    """Zero-forcing precoder of a stacked channel, with forced zeros snapped.

    Raises SingularChannel (propagated from the pseudo-inverse, or when a
    structurally-forced zero fails to come out numerically zero).
    """
    w = right_pseudo_inverse(stacked)
    n_bs = stacked.shape[1] - (1 if mode in RELAY_INPUT_MODES else 0)
    if mode in RELAY_INPUT_MODES:
        # The MS-2 stack row is zero over the BS antennas, so every column
        # except the forwarded stream must have a zero relay entry.
        leak = np.abs(w[n_bs, :-1])
        if leak.size and float(leak.max()) > STRUCTURAL_ZERO_TOL:
            raise SingularChannel(
                f"relay-row leakage {leak.max():.3e} exceeds {STRUCTURAL_ZERO_TOL:g}"
            )
        w[n_bs, :-1] = 0.0
    return PrecoderSet(mode=mode, selection=sel, stacked=stacked, w=w, n_bs_antennas=n_bs)
