"""Water-filling power allocation and the relay-capped two-stage split.

The BS spends a total budget P subject to sum_k ||w_k||^2 P_k = P, where
||w_k||^2 is the beamforming cost of stream k.  With tau_k = 1/||w_k||^2 the
optimum of sum_k log2(1+P_k) is the water-filling P_k = (mu tau_k - 1)^+
with the level mu fixed by sum_k (mu - 1/tau_k)^+ = P.

When one stream is re-transmitted by the relay, the relay's own power
budget caps that stream at P_T^RS / |w_rs|^2.  The split is greedy: fill
jointly first; if the relay-bound stream lands above its cap, pin it at the
cap and re-fill the remaining streams with the leftover BS budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateRelayWeight(Exception):
    """The relay's transmit weight is too small to carry any power."""


@dataclass(frozen=True)
class PowerAllocation:
    """Per-stream transmit powers under one BS budget.

    ``stream_powers`` lists MS streams in their given order with the
    relay-bound stream last when one exists.  ``water_level`` is the level
    of the final BS water-fill (0.0 when no BS stream was left to fill).
    ``cap_exceeds_budget`` flags the pathological case where the relay cap
    alone would overrun the BS budget; the relay power is then clamped to
    the full budget and the MS streams get nothing.
    """

    stream_powers: np.ndarray
    water_level: float
    weights: np.ndarray  # per-stream beamforming cost ||w_k||^2
    relay_cap_active: bool = False
    cap_exceeds_budget: bool = False

    @property
    def rate(self) -> float:
        """Sum rate log2(1+P_k) over all streams at these powers."""
        return float(np.sum(np.log2(1.0 + self.stream_powers)))


def water_fill(taus, p_total: float) -> PowerAllocation:
    """Exact KKT water-filling over streams with effective gains ``taus``.

    Maximizes sum log2(1+P_k) subject to sum P_k/tau_k = p_total, P_k >= 0.
    The active set is found by sorting the fill floors 1/tau ascending and
    solving for the water level in closed form, so the result is exact and
    branch-deterministic.
    """
    taus = np.asarray(taus, dtype=np.float64)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("taus must be a non-empty 1-D vector")
    if np.any(taus <= 0.0):
        raise ValueError("all taus must be positive")
    if p_total < 0.0:
        raise ValueError(f"p_total must be non-negative, got {p_total}")

    floors = 1.0 / taus
    if p_total == 0.0:
        return PowerAllocation(
            stream_powers=np.zeros_like(taus),
            water_level=float(floors.min()),
            weights=floors,
        )
    order = np.argsort(floors, kind="stable")
    sorted_floors = floors[order]
    counts = np.arange(1, taus.size + 1, dtype=np.float64)
    mu_candidates = (p_total + np.cumsum(sorted_floors)) / counts
    # Largest active set whose level still clears its own floor.  Equality
    # (possible when p_total underflows below the floor's ulp) means the
    # marginal stream gets exactly zero power, which is the correct limit.
    n_active = int(np.nonzero(mu_candidates >= sorted_floors)[0][-1]) + 1
    mu = float(mu_candidates[n_active - 1])
    powers = np.maximum(mu * taus - 1.0, 0.0)
    return PowerAllocation(stream_powers=powers, water_level=mu, weights=floors)


def relay_cap(pt_rs: float, w_rs_at_relay: complex) -> float:
    """Largest stream power the relay can transmit through weight ``w``."""
    if pt_rs < 0.0:
        raise ValueError(f"pt_rs must be non-negative, got {pt_rs}")
    mag = abs(w_rs_at_relay)
    if mag <= 1e-12:
        raise DegenerateRelayWeight(
            f"relay weight magnitude {mag:.3e} cannot beamform to this MS"
        )
    return pt_rs / mag**2


def two_stage_allocate(
    ms_taus,
    relay_weight: float,
    relay_cap: float | None,
    p_total_bs: float,
) -> PowerAllocation:
    """Joint water-fill with an optional cap on the relay-bound stream.

    ``ms_taus`` are the MS streams' effective gains; ``relay_weight`` is the
    relay-bound stream's total BS beamforming cost.  Stage 1 fills all
    streams jointly.  If the relay stream lands at or above ``relay_cap``,
    it is pinned at the cap and the MS streams are re-filled with the
    residual budget.  ``relay_weight`` may be 0 only when a cap is given
    (the stream then costs the BS nothing and the cap is the only limit).

    The returned powers are [ms streams ..., relay stream].
    """
    ms_taus = np.asarray(ms_taus, dtype=np.float64)
    if ms_taus.ndim != 1:
        raise ValueError("ms_taus must be a 1-D vector")
    if np.any(ms_taus <= 0.0):
        raise ValueError("all ms_taus must be positive")
    if relay_weight < 0.0:
        raise ValueError(f"relay_weight must be non-negative, got {relay_weight}")
    if relay_weight == 0.0 and relay_cap is None:
        raise ValueError("relay_weight 0 needs a relay cap to bound the stream")
    if relay_cap is not None and relay_cap < 0.0:
        raise ValueError(f"relay_cap must be non-negative, got {relay_cap}")

    weights = np.append(1.0 / ms_taus, relay_weight)

    if relay_weight > 0.0:
        stage1 = water_fill(np.append(ms_taus, 1.0 / relay_weight), p_total_bs)
        if relay_cap is None or stage1.stream_powers[-1] < relay_cap:
            return PowerAllocation(
                stream_powers=stage1.stream_powers,
                water_level=stage1.water_level,
                weights=weights,
            )

    residual = p_total_bs - relay_weight * relay_cap
    if residual < 0.0:
        # The cap alone would overrun the budget: clamp and flag rather than
        # abort, so extreme parameter sweeps keep running.
        powers = np.append(np.zeros_like(ms_taus), p_total_bs / relay_weight)
        return PowerAllocation(
            stream_powers=powers,
            water_level=0.0,
            weights=weights,
            relay_cap_active=True,
            cap_exceeds_budget=True,
        )
    if ms_taus.size == 0:
        return PowerAllocation(
            stream_powers=np.array([relay_cap], dtype=np.float64),
            water_level=0.0,
            weights=weights,
            relay_cap_active=True,
        )
    stage2 = water_fill(ms_taus, residual)
    return PowerAllocation(
        stream_powers=np.append(stage2.stream_powers, relay_cap),
        water_level=stage2.water_level,
        weights=weights,
        relay_cap_active=True,
    )
