"""End-to-end sum-rate evaluation of one channel draw under each scheme.

Three schemes are compared, each with exhaustive user selection:

* ``evaluate_fdr``     -- full-duplex relay: the BS zero-forces the relay's
  self-interference together with the multiuser interference, and the
  relay-bound stream is charged the combined BS cost of its feed and
  forward beams under a single shared power.
* ``evaluate_hdr``     -- half-duplex relay: phase 1 feeds the relay, phase 2
  forwards; the slot split balances the relay's in/out information, and
  the best (phase-1 set, phase-2 set, MS-2 user) triple wins.
* ``evaluate_baseline`` -- multiuser ZFBF from the BS alone; MS-2 users are
  unreachable.

Power allocation sees only the channel copies the BS holds (the
estimates); SINR evaluation always runs on the true channels.  With
perfect CSI the composite gain matrix collapses to the identity and every
stream's SINR equals its allocated power.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization, EstimatedChannels, SystemParams
from .numerics import SingularChannel, column_squared_norms
from .power import DegenerateRelayWeight, relay_cap, two_stage_allocate, water_fill
from .precoding import Mode, PrecoderSet, Selection, build_stacked_channel, compute_precoder


class ShapeMismatch(Exception):
    """True stacked channel and precoder were built for different shapes."""


@dataclass(frozen=True)
class SchemeResult:
    """Outcome of evaluating one scheme on one channel draw.

    ``stream_sinrs`` and ``stream_powers`` are aligned per stream; for HDR
    they concatenate phase-1 streams then phase-2 streams.  ``degenerate``
    marks the vanishingly rare case where every candidate selection had to
    be skipped as singular.
    """

    scheme: str
    sum_rate: float
    stream_sinrs: np.ndarray = field(default_factory=lambda: np.empty(0))
    stream_powers: np.ndarray = field(default_factory=lambda: np.empty(0))
    selection: Selection | None = None
    phase1: Selection | None = None
    phase2: Selection | None = None
    time_share: float | None = None
    degenerate: bool = False


def effective_gains(true_stacked: np.ndarray, precoder: PrecoderSet) -> np.ndarray:
    """Composite gain matrix G = H_true W_hat seen through a precoder.

    Row r, column l is the complex gain from stream l into receive row r;
    diagonal entries carry the signals, off-diagonal entries the residual
    interference (zero under perfect CSI).  The relay-forwarded column
    automatically combines the BS and RS paths, including the relay
    self-interference where the stack carries it.
    """
    true_stacked = np.asarray(true_stacked, dtype=np.complex128)
    if true_stacked.shape != precoder.stacked.shape:
        raise ShapeMismatch(
            f"true stack {true_stacked.shape} vs precoder stack {precoder.stacked.shape}"
        )
    return true_stacked @ precoder.w


def sinr_from_gains(gains: np.ndarray, stream_powers) -> np.ndarray:
    """Per-stream SINRs |G_kk|^2 P_k / (1 + sum_{l!=k} |G_kl|^2 P_l)."""
    powers = np.asarray(stream_powers, dtype=np.float64)
    gains = np.asarray(gains)
    if gains.ndim != 2 or gains.shape[0] != gains.shape[1] or gains.shape[1] != powers.size:
        raise ShapeMismatch(
            f"gain matrix {gains.shape} does not match {powers.size} streams"
        )
    received = np.abs(gains) ** 2 * powers
    signal = np.diagonal(received).copy()
    interference = received.sum(axis=1) - signal
    return signal / (1.0 + interference)


def hdr_combine(
    r_gamma: float, r_rs: float, r_gamma_check: float, r_2j: float
) -> tuple[float, float]:
    """Time share and overall HDR rate for one (phase-1, phase-2) pairing.

    The phase-2 fraction t balances the relay's incoming and outgoing
    information, (1-t) r_rs = t r_2j.  Returns (t, rate) with
    rate = (1-t) r_gamma + t (r_gamma_check + r_2j); when the relay link
    carries nothing in either direction the slot is all phase 1.
    """
    denom = r_rs + r_2j
    if denom <= 0.0:
        return 0.0, r_gamma
    t = r_rs / denom
    rate = (1.0 - t) * r_gamma + t * (r_gamma_check + r_2j)
    return t, rate


def _rates(sinrs: np.ndarray) -> np.ndarray:
    return np.log2(1.0 + sinrs)


def _subsets(n: int, max_size: int, min_size: int = 0) -> list[tuple[int, ...]]:
    """All index subsets with min_size <= size <= max_size, lexicographic."""
    hi = min(max_size, n)
    combos = itertools.chain.from_iterable(
        itertools.combinations(range(n), k) for k in range(min_size, hi + 1)
    )
    return sorted(combos)


def evaluate_fdr(
    real: ChannelRealization, est: EstimatedChannels, params: SystemParams
) -> SchemeResult:
    """Best FDR sum rate over all MS-1 subsets (empty allowed) and MS-2 users.

    The relay-bound stream appears twice in the stack (the relay's receive
    row and the MS-2 row) under one shared power; its delivered rate is the
    smaller of the relay-decode and MS-2 legs, which coincide under perfect
    CSI.
    """
    n1, L = real.h_bs1.shape
    n2 = real.h_rs2.shape[0]
    best: SchemeResult | None = None
    for gamma in _subsets(n1, L - 1):
        k = len(gamma)
        for j in range(n2):
            sel = Selection(gamma, j)
            try:
                stacked_est = build_stacked_channel(Mode.FDR, est, sel)
                pre = compute_precoder(Mode.FDR, stacked_est, sel)
                cap = relay_cap(params.pt_rs, pre.rs_weight)
            except (SingularChannel, DegenerateRelayWeight):
                continue
            bs_cost = column_squared_norms(pre.bs_block)
            alloc = two_stage_allocate(
                1.0 / bs_cost[:k], float(bs_cost[k] + bs_cost[k + 1]), cap, params.pt_bs
            )
            p_relay = alloc.stream_powers[-1]
            powers = np.append(alloc.stream_powers[:-1], [p_relay, p_relay])
            gains = effective_gains(build_stacked_channel(Mode.FDR, real, sel), pre)
            sinrs = sinr_from_gains(gains, powers)
            rates = _rates(sinrs)
            rate = float(rates[:k].sum() + min(rates[k], rates[k + 1]))
            if best is None or rate > best.sum_rate:
                best = SchemeResult(
                    scheme="fdr",
                    sum_rate=rate,
                    stream_sinrs=sinrs,
                    stream_powers=powers,
                    selection=sel,
                )
    if best is None:
        return SchemeResult(scheme="fdr", sum_rate=0.0, degenerate=True)
    return best


def _hdr_phase1_candidates(real, est, params):
    """Per-gamma phase-1 rates: (r_gamma, r_rs, sinrs, powers), lex order."""
    n1, L = real.h_bs1.shape
    out: dict[tuple[int, ...], tuple] = {}
    for gamma in _subsets(n1, L - 1):
        sel = Selection(gamma)
        try:
            pre = compute_precoder(
                Mode.HDR_PHASE1, build_stacked_channel(Mode.HDR_PHASE1, est, sel), sel
            )
        except SingularChannel:
            continue
        alloc = water_fill(1.0 / column_squared_norms(pre.w), params.pt_bs)
        gains = effective_gains(build_stacked_channel(Mode.HDR_PHASE1, real, sel), pre)
        sinrs = sinr_from_gains(gains, alloc.stream_powers)
        rates = _rates(sinrs)
        out[gamma] = (
            float(rates[:-1].sum()),
            float(rates[-1]),
            sinrs,
            alloc.stream_powers,
        )
    return out


def _hdr_phase2_candidates(real, est, params):
    """Per-(gamma, j) phase-2 rates: (r_gamma_check, r_2j, sinrs, powers)."""
    n1, L = real.h_bs1.shape
    n2 = real.h_rs2.shape[0]
    out: dict[tuple[tuple[int, ...], int], tuple] = {}
    for gamma in _subsets(n1, L):
        k = len(gamma)
        for j in range(n2):
            sel = Selection(gamma, j)
            try:
                stacked_est = build_stacked_channel(Mode.HDR_PHASE2, est, sel)
                pre = compute_precoder(Mode.HDR_PHASE2, stacked_est, sel)
                cap = relay_cap(params.pt_rs, pre.rs_weight)
            except (SingularChannel, DegenerateRelayWeight):
                continue
            bs_cost = column_squared_norms(pre.bs_block)
            alloc = two_stage_allocate(
                1.0 / bs_cost[:k], float(bs_cost[k]), cap, params.pt_bs
            )
            gains = effective_gains(
                build_stacked_channel(Mode.HDR_PHASE2, real, sel), pre
            )
            sinrs = sinr_from_gains(gains, alloc.stream_powers)
            rates = _rates(sinrs)
            out[(gamma, j)] = (
                float(rates[:-1].sum()),
                float(rates[-1]),
                sinrs,
                alloc.stream_powers,
            )
    return out


def evaluate_hdr(
    real: ChannelRealization, est: EstimatedChannels, params: SystemParams
) -> SchemeResult:
    """Best HDR sum rate over the joint (phase-1 set, phase-2 set, MS-2) search.

    Phase rates combine through ``hdr_combine``; both phases are optimized
    jointly because the time share couples them.  If no phase-2 candidate
    survives, the slot degenerates to phase 1 alone (t = 0).
    """
    phase1 = _hdr_phase1_candidates(real, est, params)
    if not phase1:
        return SchemeResult(scheme="hdr", sum_rate=0.0, degenerate=True)
    phase2 = _hdr_phase2_candidates(real, est, params)

    best: SchemeResult | None = None
    for gamma, (r_g, r_rs, sinrs1, powers1) in phase1.items():
        if phase2:
            for (gcheck, j), (r_gc, r_2j, sinrs2, powers2) in phase2.items():
                t, rate = hdr_combine(r_g, r_rs, r_gc, r_2j)
                if best is None or rate > best.sum_rate:
                    best = SchemeResult(
                        scheme="hdr",
                        sum_rate=rate,
                        stream_sinrs=np.concatenate([sinrs1, sinrs2]),
                        stream_powers=np.concatenate([powers1, powers2]),
                        phase1=Selection(gamma),
                        phase2=Selection(gcheck, j),
                        time_share=t,
                    )
        else:
            if best is None or r_g > best.sum_rate:
                best = SchemeResult(
                    scheme="hdr",
                    sum_rate=r_g,
                    stream_sinrs=sinrs1,
                    stream_powers=powers1,
                    phase1=Selection(gamma),
                    time_share=0.0,
                )
    return best


def evaluate_baseline(
    real: ChannelRealization, est: EstimatedChannels, params: SystemParams
) -> SchemeResult:
    """Best no-relay ZFBF sum rate over non-empty MS-1 subsets of size <= L."""
    n1, L = real.h_bs1.shape
    best: SchemeResult | None = None
    for gamma in _subsets(n1, L, min_size=1):
        sel = Selection(gamma)
        try:
            pre = compute_precoder(
                Mode.BASELINE, build_stacked_channel(Mode.BASELINE, est, sel), sel
            )
        except SingularChannel:
            continue
        alloc = water_fill(1.0 / column_squared_norms(pre.w), params.pt_bs)
        gains = effective_gains(build_stacked_channel(Mode.BASELINE, real, sel), pre)
        sinrs = sinr_from_gains(gains, alloc.stream_powers)
        rate = float(_rates(sinrs).sum())
        if best is None or rate > best.sum_rate:
            best = SchemeResult(
                scheme="baseline",
                sum_rate=rate,
                stream_sinrs=sinrs,
                stream_powers=alloc.stream_powers,
                selection=sel,
            )
    if best is None:
        return SchemeResult(scheme="baseline", sum_rate=0.0, degenerate=True)
    return best
