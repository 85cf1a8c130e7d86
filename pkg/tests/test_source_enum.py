import math

import numpy as np
import pytest

from gicdesign import (
    DesignError,
    PenaltyRule,
    design_nu_enum,
    enum_free_params,
    estimate_num_signals,
    overest_threshold,
    pover_highsnr,
    ratio_root,
    scm_eigenvalues,
    wk_minus2loglik,
)
from gicdesign.source_enum import enum_profile

seed = 20240


def noise_batch(rng, p, n, var=1.0):
    return math.sqrt(var / 2) * (
        rng.standard_normal((p, n)) + 1j * rng.standard_normal((p, n))
    )


# -- sample covariance spectrum ----------------------------------------------


def test_scm_identity_batch():
    n = 6
    eigs = scm_eigenvalues(np.eye(n, dtype=complex))
    assert np.allclose(eigs, 1.0 / n, rtol=1e-12)


def test_scm_descending_nonnegative_trace():
    rng = np.random.default_rng(seed)
    y = noise_batch(rng, 5, 40)
    eigs = scm_eigenvalues(y)
    assert np.all(np.diff(eigs) <= 0)
    assert np.all(eigs >= 0)
    trace = np.sum(np.abs(y) ** 2) / 40
    assert eigs.sum() == pytest.approx(trace, rel=1e-9)


def test_scm_rejects_bad_shapes():
    with pytest.raises(ValueError):
        scm_eigenvalues(np.zeros(5, dtype=complex))
    with pytest.raises(ValueError):
        scm_eigenvalues(np.zeros((1, 10), dtype=complex))


# -- eigenvalue likelihood metric --------------------------------------------


def test_wk_zero_for_flat_tail():
    eigs = np.array([5.0, 1.0, 1.0, 1.0])
    assert wk_minus2loglik(eigs, 1, 100) == pytest.approx(0.0, abs=1e-9)


def test_wk_zero_at_top_order():
    eigs = np.array([5.0, 3.0, 1.0, 0.5])
    assert wk_minus2loglik(eigs, 3, 100) == 0.0


def test_wk_nonnegative():
    rng = np.random.default_rng(seed + 1)
    for _ in range(30):
        eigs = np.sort(rng.uniform(0.1, 10.0, size=6))[::-1]
        for k in range(6):
            assert wk_minus2loglik(eigs, k, 57) >= 0.0


def test_wk_degenerate_tail_is_inf():
    eigs = np.array([4.0, 2.0, 1.0, 0.0])
    assert wk_minus2loglik(eigs, 1, 100) == np.inf
    # a single-element tail has nothing to compare, even when zero
    assert wk_minus2loglik(eigs, 3, 100) == 0.0


def test_enum_free_params():
    assert enum_free_params(0, 8) == 1
    assert enum_free_params(1, 4) == 8
    assert enum_free_params(4, 8) == 49
    with pytest.raises(ValueError):
        enum_free_params(8, 8)


def test_enum_profile_shape():
    rng = np.random.default_rng(seed + 2)
    eigs = scm_eigenvalues(noise_batch(rng, 6, 50))
    prof = enum_profile(eigs, 50, 4)
    assert prof.q_max == 4
    assert list(prof.free_params) == [enum_free_params(k, 6) for k in range(5)]


# -- selection ---------------------------------------------------------------


def test_rank_one_batch_selects_one():
    rng = np.random.default_rng(seed + 3)
    steer = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    sig = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    y = 10.0 * np.outer(steer, sig) + 1e-6 * noise_batch(rng, 6, 200)
    res = estimate_num_signals(y, PenaltyRule.bic(), 4)
    assert res.selected == 1


def test_pure_noise_rarely_false_alarms():
    """BIC on noise-only batches keeps the selected order at zero."""
    rng = np.random.default_rng(seed + 4)
    hits = 0
    trials = 300
    for _ in range(trials):
        y = noise_batch(rng, 8, 1000)
        if estimate_num_signals(y, PenaltyRule.bic(), 7).selected == 0:
            hits += 1
    assert hits / trials >= 0.99


def test_selection_scale_invariant():
    rng = np.random.default_rng(seed + 5)
    for _ in range(10):
        y = noise_batch(rng, 5, 60)
        base = estimate_num_signals(y, PenaltyRule.aic(), 4).selected
        for c in (1e-3, 7.0, 2.5e4):
            assert estimate_num_signals(c * y, PenaltyRule.aic(), 4).selected == base


def test_estimate_rejects_bad_qmax():
    rng = np.random.default_rng(seed + 6)
    y = noise_batch(rng, 4, 30)
    with pytest.raises(ValueError):
        estimate_num_signals(y, PenaltyRule.aic(), 4)


# -- threshold level and its root --------------------------------------------


def test_threshold_closed_forms():
    assert overest_threshold(2, 4, 100, 0.0) == pytest.approx(0.25, rel=1e-12)
    closed = (27 / 256) * math.exp(-2 * 7 / 2000)
    assert overest_threshold(4, 8, 1000, 2.0) == pytest.approx(closed, rel=1e-12)


def test_threshold_decays_with_nu():
    vals = [overest_threshold(4, 8, 1000, nu) for nu in (0.0, 2.0, 7.0, 50.0, 2000.0)]
    assert np.all(np.diff(vals) < 0)
    assert vals[-1] < 1e-3


def test_threshold_domain():
    with pytest.raises(ValueError):
        overest_threshold(7, 8, 1000, 2.0)    # q > p-2
    with pytest.raises(ValueError):
        overest_threshold(1, 8, 1000, -1.0)


def test_ratio_root_quadratic_case():
    # m = 2: v(1-v) = 0.21 has roots 0.3 and 0.7; only 0.7 is in [1/2, 1]
    assert ratio_root(0.21, 2) == pytest.approx(0.7, abs=1e-12)


def test_ratio_root_boundaries():
    for m in (2, 4, 8):
        peak = (m - 1) ** (m - 1) / m**m
        assert ratio_root(peak, m) == pytest.approx(1.0 / m, rel=1e-12)
        # root -> 1 as the threshold -> 0; at m = 8 the approach goes like
        # 1 - xi**(1/7), so a very small xi is needed to land above 0.99
        assert ratio_root(1e-20, m) > 0.99


def test_ratio_root_residual():
    rng = np.random.default_rng(seed + 7)
    for _ in range(50):
        m = int(rng.integers(2, 10))
        peak = (m - 1) ** (m - 1) / m**m
        xi = rng.uniform(1e-6, peak)
        v = ratio_root(xi, m)
        assert 1.0 / m <= v <= 1.0
        assert abs(v * (1 - v) ** (m - 1) - xi) <= 1e-12


def test_ratio_root_rejects_out_of_range():
    with pytest.raises(ValueError):
        ratio_root(0.3, 2)       # above the peak 1/4
    with pytest.raises(ValueError):
        ratio_root(0.0, 2)
    with pytest.raises(ValueError):
        ratio_root(0.1, 1)


# -- high-SNR overestimation probability -------------------------------------


def test_pover_reference_values():
    aic = pover_highsnr(4, 8, 1000, 2.0, backend="asymptotic")
    assert 0.08 <= aic <= 0.12
    bic = pover_highsnr(4, 8, 1000, math.log(1000), backend="asymptotic")
    assert bic < 0.01


def test_pover_decreasing_in_nu():
    vals = [
        pover_highsnr(4, 8, 1000, nu, backend="asymptotic")
        for nu in (0.5, 2.0, 3.0, 5.0, 8.0)
    ]
    assert np.all(np.diff(vals) < 0)


def test_pover_model_reuse_matches():
    from gicdesign import WishartSpec, u_model

    model = u_model(WishartSpec(4, 1000), backend="asymptotic")
    direct = pover_highsnr(4, 8, 1000, 2.5, backend="asymptotic")
    reused = pover_highsnr(4, 8, 1000, 2.5, model=model)
    assert reused == direct


# -- penalty designer --------------------------------------------------------


def test_design_round_trip():
    res = design_nu_enum(8, 1000, 4, 0.05, backend="asymptotic")
    assert res.q_star == 4
    assert res.nu == pytest.approx(2.3394091931292493, rel=1e-9)
    assert abs(res.predicted_pover - 0.05) <= 1e-6
    assert res.predicted_pover <= 0.05 + 1e-9
    # external recomputation with the designed nu lands on the target
    back = pover_highsnr(res.q_star, 8, 1000, res.nu, backend="asymptotic")
    assert abs(back - 0.05) <= 1e-6


def test_design_monotone_in_target():
    tight = design_nu_enum(8, 1000, 4, 0.05, backend="asymptotic")
    loose = design_nu_enum(8, 1000, 4, 0.10, backend="asymptotic")
    assert loose.nu < tight.nu


def test_design_scans_every_q():
    res = design_nu_enum(8, 1000, 4, 0.05, backend="asymptotic")
    assert [r["q"] for r in res.per_q] == [0, 1, 2, 3, 4]
    assert res.nu == max(r["nu"] for r in res.per_q)


def test_design_mc_deterministic():
    a = design_nu_enum(5, 100, 2, 0.05, backend="mc", trials=20000, seed=3)
    b = design_nu_enum(5, 100, 2, 0.05, backend="mc", trials=20000, seed=3)
    assert a.nu == b.nu
    assert a.predicted_pover == b.predicted_pover


def test_design_rejects_bad_arguments():
    with pytest.raises(ValueError):
        design_nu_enum(8, 1000, 7, 0.05)      # q_max > p-2
    with pytest.raises(ValueError):
        design_nu_enum(8, 1000, 4, 1.5)


def test_design_infeasible_target():
    # an absurdly small cap needs a threshold beyond the support of u
    with pytest.raises(DesignError):
        design_nu_enum(3, 8, 1, 1e-9, backend="mc", trials=20000)
