import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdrsim.channel import (
    ChannelRealization,
    EstimatedChannels,
    SystemParams,
    TrialStreams,
    draw_realization,
    inject_csi_errors,
)
from fdrsim.precoding import Mode, Selection, build_stacked_channel, compute_precoder
from fdrsim.schemes import (
    ShapeMismatch,
    effective_gains,
    evaluate_baseline,
    evaluate_fdr,
    evaluate_hdr,
    hdr_combine,
    sinr_from_gains,
)

import oracles


def make_pair(seed, params, sigma_e2=None):
    streams = TrialStreams(seed, 0)
    real = draw_realization(params, streams)
    sigma = params.sigma_e2 if sigma_e2 is None else sigma_e2
    return real, inject_csi_errors(real, sigma, streams)


def copy_as_estimate(real):
    return EstimatedChannels(
        h_bs1=real.h_bs1,
        h_rs1=real.h_rs1,
        h_rs2=real.h_rs2,
        h_bs_rs=real.h_bs_rs,
        h_rs_rs=real.h_rs_rs,
    )


def restrict_ms1(ch, n):
    return type(ch)(
        h_bs1=ch.h_bs1[:n],
        h_rs1=ch.h_rs1[:n],
        h_rs2=ch.h_rs2,
        h_bs_rs=ch.h_bs_rs,
        h_rs_rs=ch.h_rs_rs,
    )


def scale_channels(ch, factor):
    return type(ch)(
        h_bs1=ch.h_bs1 * factor,
        h_rs1=ch.h_rs1 * factor,
        h_rs2=ch.h_rs2 * factor,
        h_bs_rs=ch.h_bs_rs * factor,
        h_rs_rs=ch.h_rs_rs * factor,
    )


# ---------------------------------------------------------------------------
# effective gains


def test_perfect_csi_gains_are_identity():
    params = SystemParams(L=3)
    real, est = make_pair(3, params, sigma_e2=0.0)
    sel = Selection((0, 2), 1)
    pre = compute_precoder(Mode.FDR, build_stacked_channel(Mode.FDR, est, sel), sel)
    g = effective_gains(build_stacked_channel(Mode.FDR, real, sel), pre)
    assert np.abs(g - np.eye(4)).max() <= 1e-9


def test_ms2_row_sees_no_bs_streams_under_csi_errors():
    params = SystemParams(sigma_e2=0.05)
    real, est = make_pair(4, params)
    sel = Selection((1,), 0)
    pre = compute_precoder(Mode.FDR, build_stacked_channel(Mode.FDR, est, sel), sel)
    g = effective_gains(build_stacked_channel(Mode.FDR, real, sel), pre)
    # true MS-2 row is [0...0, h] and those columns have zero relay entries
    np.testing.assert_array_equal(g[2, :2], [0.0, 0.0])
    assert g[2, 2] != 0.0


def test_gains_match_by_hand_product():
    # all-real channels with fixed estimate offsets; L=2, one MS-1 user
    real = ChannelRealization(
        h_bs1=np.array([[1.0 + 0j, 0.5 + 0j]]),
        h_rs1=np.array([0.25 + 0j]),
        h_rs2=np.array([0.75 + 0j]),
        h_bs_rs=np.array([2.0 + 0j, 1.0 + 0j]),
        h_rs_rs=0.5 + 0j,
    )
    est = EstimatedChannels(
        h_bs1=real.h_bs1 + 0.1,
        h_rs1=real.h_rs1 - 0.05,
        h_rs2=real.h_rs2 + 0.2,
        h_bs_rs=real.h_bs_rs + 0.1,
        h_rs_rs=real.h_rs_rs - 0.1,
    )
    sel = Selection((0,), 0)
    pre = compute_precoder(Mode.FDR, build_stacked_channel(Mode.FDR, est, sel), sel)
    true_stack = build_stacked_channel(Mode.FDR, real, sel)
    g = effective_gains(true_stack, pre)
    w = pre.w
    for r in range(3):
        for c in range(3):
            by_hand = (
                true_stack[r, 0] * w[0, c]
                + true_stack[r, 1] * w[1, c]
                + true_stack[r, 2] * w[2, c]
            )
            assert abs(g[r, c] - by_hand) <= 1e-12


def test_gains_shape_mismatch():
    params = SystemParams(L=3)
    real, est = make_pair(5, params, sigma_e2=0.0)
    sel = Selection((0,), 0)
    pre = compute_precoder(Mode.FDR, build_stacked_channel(Mode.FDR, est, sel), sel)
    wrong = build_stacked_channel(Mode.FDR, real, Selection((0, 1), 0))
    with pytest.raises(ShapeMismatch):
        effective_gains(wrong, pre)


# ---------------------------------------------------------------------------
# SINR


def test_sinr_identity_gains():
    np.testing.assert_allclose(sinr_from_gains(np.eye(2), [3.0, 7.0]), [3.0, 7.0])


def test_sinr_with_interference():
    g = np.array([[1.0, 0.1], [0.0, 1.0]])
    sinrs = sinr_from_gains(g, [10.0, 10.0])
    np.testing.assert_allclose(sinrs, [10.0 / 1.1, 10.0], rtol=1e-12)


def test_sinr_zero_powers():
    np.testing.assert_array_equal(sinr_from_gains(np.eye(3), np.zeros(3)), np.zeros(3))


def test_sinr_shape_checks():
    with pytest.raises(ShapeMismatch):
        sinr_from_gains(np.eye(2), [1.0, 2.0, 3.0])
    with pytest.raises(ShapeMismatch):
        sinr_from_gains(np.ones((2, 3)), [1.0, 2.0, 3.0])


# ---------------------------------------------------------------------------
# HDR combination


def test_hdr_combine_relay_silent():
    t, rate = hdr_combine(4.0, 0.0, 5.0, 3.0)
    assert t == 0.0
    assert rate == 4.0


def test_hdr_combine_symmetric():
    t, rate = hdr_combine(4.0, 2.0, 4.0, 2.0)
    assert t == pytest.approx(0.5)
    assert rate == pytest.approx(4.0 + 1.0)


def test_hdr_combine_worked_example():
    t, rate = hdr_combine(4.0, 2.0, 5.0, 3.0)
    assert t == pytest.approx(0.4)
    assert rate == pytest.approx(5.6)


@settings(max_examples=200, deadline=None)
@given(
    r_g=st.floats(0.0, 30.0),
    r_rs=st.floats(0.0, 30.0),
    r_gc=st.floats(0.0, 30.0),
    r_2j=st.floats(0.0, 30.0),
)
def test_hdr_combine_time_share_identity(r_g, r_rs, r_gc, r_2j):
    t, rate = hdr_combine(r_g, r_rs, r_gc, r_2j)
    assert 0.0 <= t <= 1.0
    assert abs(rate - ((1.0 - t) * r_g + t * (r_gc + r_2j))) <= 1e-12 * max(1.0, rate)
    # the relay forwards exactly what it received
    assert abs((1.0 - t) * r_rs - t * r_2j) <= 1e-9 * max(1.0, r_rs)


# ---------------------------------------------------------------------------
# FDR


def test_fdr_perfect_csi_collapse():
    params = SystemParams()
    real, est = make_pair(21, params, sigma_e2=0.0)
    res = evaluate_fdr(real, est, params)
    assert np.abs(res.stream_sinrs - res.stream_powers).max() <= 1e-8
    k = len(res.selection.gamma)
    powers_rate = float(
        np.log2(1.0 + res.stream_powers[: k + 1]).sum()
    )  # relay stream counted once
    assert abs(res.sum_rate - powers_rate) <= 1e-12


def test_fdr_zero_relay_power():
    params = SystemParams(pt_rs=0.0)
    real, est = make_pair(22, params, sigma_e2=0.0)
    res = evaluate_fdr(real, est, params)
    assert res.stream_powers[-1] == 0.0
    k = len(res.selection.gamma)
    ms_rate = float(np.log2(1.0 + res.stream_sinrs[:k]).sum())
    assert res.sum_rate == pytest.approx(ms_rate, abs=1e-12)


def test_fdr_matches_oracle_small():
    params = SystemParams(L=2, n1=1, n2=1, sigma_e2=0.01)
    real, est = make_pair(23, params)
    res = evaluate_fdr(real, est, params)
    rate, sel = oracles.fdr_best(real, est, params)
    assert res.sum_rate == pytest.approx(rate, abs=1e-9)
    assert (res.selection.gamma, res.selection.ms2) == sel


def test_fdr_relay_conservation_perfect_csi():
    params = SystemParams()
    for seed in range(10):
        real, est = make_pair(100 + seed, params, sigma_e2=0.0)
        res = evaluate_fdr(real, est, params)
        k = len(res.selection.gamma)
        credited = res.sum_rate - float(np.log2(1.0 + res.stream_sinrs[:k]).sum())
        assert credited <= np.log2(1.0 + res.stream_powers[-1]) + 1e-9


# ---------------------------------------------------------------------------
# HDR


def test_hdr_zero_relay_power_lower_bound():
    params = SystemParams(pt_rs=0.0)
    real, est = make_pair(31, params, sigma_e2=0.0)
    res = evaluate_hdr(real, est, params)
    # with the relay silenced the slot still beats pure phase-1 service
    best_phase1 = max(
        r_g for r_g, _ in _phase1_rates_via_oracle(real, est, params).values()
    )
    assert res.sum_rate >= best_phase1 - 1e-9


def _phase1_rates_via_oracle(real, est, params):
    n1, L = real.h_bs1.shape
    out = {}
    for gamma in oracles.subsets(n1, L - 1):
        k = len(gamma)
        w = oracles.pinv_right(oracles.stack_hdr1(est, gamma))
        taus = [1.0 / sum(abs(w[r, c]) ** 2 for r in range(L)) for c in range(k + 1)]
        powers, _ = oracles.waterfill_bisect(taus, params.pt_bs)
        s = oracles.sinrs_explicit(oracles.stack_hdr1(real, gamma), w, powers)
        out[gamma] = (sum(np.log2(1.0 + x) for x in s[:k]), np.log2(1.0 + s[k]))
    return out


def test_hdr_duplicate_phase1_rows_skipped():
    params = SystemParams(L=3, n1=2, n2=1)
    real, est = make_pair(32, params, sigma_e2=0.0)
    h_bs1 = real.h_bs1.copy()
    h_bs1[1] = h_bs1[0]
    clone = ChannelRealization(
        h_bs1=h_bs1,
        h_rs1=real.h_rs1,
        h_rs2=real.h_rs2,
        h_bs_rs=real.h_bs_rs,
        h_rs_rs=real.h_rs_rs,
    )
    res = evaluate_hdr(clone, copy_as_estimate(clone), params)
    assert not res.degenerate
    assert len(res.phase1.gamma) <= 1


def test_hdr_matches_oracle_small():
    params = SystemParams(L=2, n1=2, n2=1, sigma_e2=0.01)
    real, est = make_pair(33, params)
    res = evaluate_hdr(real, est, params)
    rate, sel = oracles.hdr_best(real, est, params)
    assert res.sum_rate == pytest.approx(rate, abs=1e-9)
    assert (res.phase1.gamma, res.phase2.gamma, res.phase2.ms2) == sel


def test_hdr_identity_between_rate_and_time_share():
    params = SystemParams(sigma_e2=0.02)
    for seed in range(8):
        real, est = make_pair(200 + seed, params)
        res = evaluate_hdr(real, est, params)
        k1 = len(res.phase1.gamma)
        rates = np.log2(1.0 + res.stream_sinrs)
        r_g, r_rs = float(rates[:k1].sum()), float(rates[k1])
        r_gc = float(rates[k1 + 1 : -1].sum())
        r_2j = float(rates[-1])
        t = res.time_share
        reconstructed = (1.0 - t) * r_g + t * (r_gc + r_2j)
        assert abs(res.sum_rate - reconstructed) <= 1e-12 * max(1.0, res.sum_rate)


# ---------------------------------------------------------------------------
# baseline


def test_baseline_single_user_closed_form():
    real = ChannelRealization(
        h_bs1=np.array([[1.0 + 0j, 0.0 + 0j]]),
        h_rs1=np.array([0.3 + 0j]),
        h_rs2=np.array([0.5 + 0j]),
        h_bs_rs=np.array([0.2 + 0j, 0.1 + 0j]),
        h_rs_rs=0.1 + 0j,
    )
    params = SystemParams(L=2, n1=1, n2=1)
    res = evaluate_baseline(real, copy_as_estimate(real), params)
    assert res.sum_rate == pytest.approx(np.log2(101.0), abs=1e-12)
    np.testing.assert_allclose(res.stream_powers, [100.0])


def test_baseline_sinr_equals_power_perfect_csi():
    params = SystemParams()
    real, est = make_pair(41, params, sigma_e2=0.0)
    res = evaluate_baseline(real, est, params)
    assert np.abs(res.stream_sinrs - res.stream_powers).max() <= 1e-8


def test_baseline_duplicate_rows_skipped():
    params = SystemParams(L=2, n1=2, n2=1)
    real, _ = make_pair(42, params, sigma_e2=0.0)
    h_bs1 = real.h_bs1.copy()
    h_bs1[1] = h_bs1[0]
    clone = ChannelRealization(
        h_bs1=h_bs1,
        h_rs1=real.h_rs1,
        h_rs2=real.h_rs2,
        h_bs_rs=real.h_bs_rs,
        h_rs_rs=real.h_rs_rs,
    )
    res = evaluate_baseline(clone, copy_as_estimate(clone), params)
    assert not res.degenerate
    assert len(res.selection.gamma) == 1


def test_baseline_matches_oracle_small():
    params = SystemParams(L=2, n1=3, n2=1, sigma_e2=0.02)
    real, est = make_pair(43, params)
    res = evaluate_baseline(real, est, params)
    rate, sel = oracles.baseline_best(real, est, params)
    assert res.sum_rate == pytest.approx(rate, abs=1e-9)
    assert res.selection.gamma == sel


# ---------------------------------------------------------------------------
# cross-scheme invariants


def test_rate_monotone_in_ms1_pool():
    params3 = SystemParams(L=2, n1=3, n2=2, sigma_e2=0.01)
    params2 = SystemParams(L=2, n1=2, n2=2, sigma_e2=0.01)
    for seed in range(6):
        real, est = make_pair(300 + seed, params3)
        real2, est2 = restrict_ms1(real, 2), restrict_ms1(est, 2)
        for fn in (evaluate_fdr, evaluate_hdr, evaluate_baseline):
            full = fn(real, est, params3).sum_rate
            small = fn(real2, est2, params2).sum_rate
            assert full >= small - 1e-9


def test_global_phase_invariance():
    params = SystemParams(L=2, n1=3, n2=2, sigma_e2=0.01)
    real, est = make_pair(55, params)
    phase = np.exp(1j * 0.73)
    real_p, est_p = scale_channels(real, phase), scale_channels(est, phase)
    for fn in (evaluate_fdr, evaluate_hdr, evaluate_baseline):
        a, b = fn(real, est, params), fn(real_p, est_p, params)
        assert a.sum_rate == pytest.approx(b.sum_rate, abs=1e-9)
        assert a.selection == b.selection
        assert a.phase1 == b.phase1 and a.phase2 == b.phase2
