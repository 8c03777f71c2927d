import math

import numpy as np
import pytest
from scipy.integrate import quad

from carnotineq import (
    BallSpec,
    DegenerateSampler,
    InvalidScale,
    NonFiniteSample,
    NonIntegrableWeight,
    Point,
    SamplerConfig,
    UNWEIGHTED,
    WeightSpec,
    doubling_ratio,
    euclidean,
    haar_scaling_check,
    mc_integrate,
    sample_ball,
    weighted_lp_norm,
)
from carnotineq.operators import BallIndicator
from carnotineq.sampling import (
    BallSample,
    BoxUniform,
    DilatedBox,
    LayerRadialBox,
    Mixture,
    derive_seed,
    power_of,
    ratio_of,
)

CFG = SamplerConfig(n_samples=200_000, seed=101)

H1_BALL_VOLUME = math.pi ** 2 / 2.0  # radial oracle, verified in test_closedforms


# -- mc_integrate oracles ---------------------------------------------------------


def test_interval_length(r1):
    est = mc_integrate(r1, BallSpec(None, 1.0), lambda p: 1.0, UNWEIGHTED, CFG)
    # box == ball in R^1, so every draw contributes exactly the length
    assert est.value == pytest.approx(2.0, abs=3 * est.std_error + 1e-12)


def test_h1_ball_volume(h1):
    est = mc_integrate(h1, BallSpec(None, 1.0), lambda p: 1.0, UNWEIGHTED, CFG)
    assert abs(est.z_score(H1_BALL_VOLUME)) <= 3.0


def test_r2_singular_weight(r2):
    est = mc_integrate(
        r2, BallSpec(None, 1.0), lambda p: 1.0, WeightSpec("full_norm_power", -1.0), CFG
    )
    assert abs(est.z_score(2.0 * math.pi)) <= 3.0


def test_offcenter_translation_invariance(h1):
    shift = Point.from_flat(h1, [0.7, -0.4, 0.3])
    centered = mc_integrate(h1, BallSpec(None, 0.8), lambda p: 1.0, UNWEIGHTED, CFG.sub(1))
    moved = mc_integrate(h1, BallSpec(shift, 0.8), lambda p: 1.0, UNWEIGHTED, CFG.sub(2))
    z = abs(centered.value - moved.value) / math.hypot(centered.std_error, moved.std_error)
    assert z <= 3.0


def test_nonzero_integrand_nonzero_error(h1):
    est = mc_integrate(h1, BallSpec(None, 1.0), lambda p: p[:, 0] ** 2, UNWEIGHTED, CFG)
    assert est.std_error > 0


def test_zero_integrand_zero_error(h1):
    est = mc_integrate(h1, BallSpec(None, 1.0), lambda p: np.zeros(len(p)), UNWEIGHTED, CFG)
    assert est.value == 0.0 and est.std_error == 0.0


def test_nonfinite_integrand_raises(h1):
    with pytest.raises(NonFiniteSample):
        mc_integrate(
            h1,
            BallSpec(None, 1.0),
            lambda p: np.full(len(p), np.inf),
            UNWEIGHTED,
            SamplerConfig(n_samples=1000, seed=0),
        )


def test_bit_reproducible(h1):
    w = WeightSpec("full_norm_power", -1.5)
    a = mc_integrate(h1, BallSpec(None, 1.0), lambda p: 1.0, w, CFG)
    b = mc_integrate(h1, BallSpec(None, 1.0), lambda p: 1.0, w, CFG)
    assert a.value == b.value and a.std_error == b.std_error


def test_worker_count_does_not_change_result(h1):
    w = WeightSpec("layer_power", -1.0, 1)
    cfg1 = SamplerConfig(n_samples=150_000, seed=5, n_workers=1, chunk_size=1 << 14)
    cfg4 = SamplerConfig(n_samples=150_000, seed=5, n_workers=4, chunk_size=1 << 14)
    a = mc_integrate(h1, BallSpec(None, 1.0), lambda p: 1.0, w, cfg1)
    b = mc_integrate(h1, BallSpec(None, 1.0), lambda p: 1.0, w, cfg4)
    assert a.value == b.value and a.std_error == b.std_error


def test_low_discrepancy_scheme(h1):
    cfg = SamplerConfig(n_samples=100_000, seed=8, scheme="low_discrepancy",
                        stratify_singularity=False)
    est = mc_integrate(h1, BallSpec(None, 1.0), lambda p: 1.0, UNWEIGHTED, cfg)
    assert est.value == pytest.approx(H1_BALL_VOLUME, rel=0.01)


def test_low_discrepancy_rejects_matched_proposals(h1):
    cfg = SamplerConfig(n_samples=10_000, seed=8, scheme="low_discrepancy",
                        stratify_singularity=True)
    with pytest.raises(ValueError):
        mc_integrate(
            h1, BallSpec(None, 1.0), lambda p: 1.0, WeightSpec("full_norm_power", -2.0), cfg
        )


def test_antithetic_unbiased(h1):
    est = mc_integrate(
        h1, BallSpec(None, 1.0), lambda p: 1.0 + p[:, 0], UNWEIGHTED, CFG, antithetic=True
    )
    assert abs(est.z_score(H1_BALL_VOLUME)) <= 3.0


def test_estimate_serialization(h1):
    est = mc_integrate(h1, BallSpec(None, 1.0), lambda p: 1.0, UNWEIGHTED, CFG)
    d = est.to_dict()
    assert set(d) == {"value", "std_error", "n_samples", "seed"}
    assert d["seed"] == CFG.seed and d["n_samples"] == CFG.n_samples


# -- sample_ball -------------------------------------------------------------------


def test_sample_ball_r2_symmetry(r2):
    out = sample_ball(r2, BallSpec(None, 1.0), SamplerConfig(n_samples=100_000, seed=7))
    assert isinstance(out, BallSample)
    mean = out.points.mean(axis=0)
    se = out.points.std(axis=0) / math.sqrt(len(out.points))
    assert np.all(np.abs(mean) <= 3 * se)
    assert np.all(r2.norm(out.points) < 1.0)


def test_sample_ball_h1_volume(h1):
    out = sample_ball(h1, BallSpec(None, 1.0), SamplerConfig(n_samples=200_000, seed=9))
    box_volume = 8.0  # 2^N * R^Q with N=3, R=1
    vol = out.acceptance_rate * box_volume
    p = out.acceptance_rate
    se = box_volume * math.sqrt(p * (1 - p) / out.n_proposed)
    assert abs(vol - H1_BALL_VOLUME) <= 3 * se


def test_sample_ball_translated(h1):
    center = Point.from_flat(h1, [2.0, 1.0, -0.5])
    out = sample_ball(h1, BallSpec(center, 0.5), SamplerConfig(n_samples=20_000, seed=11))
    assert np.all(h1.distance(center.flat, out.points) < 0.5 + 1e-9)


def test_zero_radius_rejected():
    with pytest.raises(ValueError):
        BallSpec(None, 0.0)
    with pytest.raises(ValueError):
        BallSpec(None, -1.0)


def test_degenerate_sampler():
    # the unit ball of R^20 fills ~2.5e-8 of its box
    spec = euclidean(20)
    with pytest.raises(DegenerateSampler):
        sample_ball(spec, BallSpec(None, 1.0), SamplerConfig(n_samples=1000, seed=1))


# -- weighted Lp norms ---------------------------------------------------------------


def test_indicator_l2_norm(r2):
    f = BallIndicator(BallSpec(None, 1.0))
    est = weighted_lp_norm(r2, f, 2.0, UNWEIGHTED, BallSpec(None, 1.5), CFG)
    assert abs(est.z_score(math.sqrt(math.pi))) <= 3.0


def test_norm_scaling(r2):
    f = BallIndicator(BallSpec(None, 1.0), amplitude=1.0)
    g = BallIndicator(BallSpec(None, 1.0), amplitude=-7.0)
    a = weighted_lp_norm(r2, f, 3.0, UNWEIGHTED, BallSpec(None, 1.5), CFG)
    b = weighted_lp_norm(r2, g, 3.0, UNWEIGHTED, BallSpec(None, 1.5), CFG)
    assert b.value == pytest.approx(7.0 * a.value, rel=1e-12)


def test_zero_function_norm(r2):
    f = BallIndicator(BallSpec(None, 1.0), amplitude=0.0)
    est = weighted_lp_norm(r2, f, 2.0, UNWEIGHTED, BallSpec(None, 1.5), CFG)
    assert est.value == 0.0 and est.std_error == 0.0


def test_norm_requires_p_at_least_one(r2):
    with pytest.raises(ValueError):
        weighted_lp_norm(r2, lambda p: 1.0, 0.5, UNWEIGHTED, BallSpec(None, 1.0), CFG)


# -- Haar scaling and doubling --------------------------------------------------------


def test_haar_scaling_h1(h1):
    est = haar_scaling_check(h1, 2.0, CFG)
    assert abs(est.z_score(16.0)) <= 3.0


def test_haar_scaling_r3(r3):
    est = haar_scaling_check(r3, 2.0, CFG)
    assert abs(est.z_score(8.0)) <= 3.0


def test_haar_scaling_identity(h1):
    est = haar_scaling_check(h1, 1.0, CFG)
    assert abs(est.z_score(1.0)) <= 3.0


def test_haar_scaling_rejects_bad_t(h1):
    with pytest.raises(InvalidScale):
        haar_scaling_check(h1, 0.0, CFG)


def test_doubling_full_norm(h1):
    # alpha*q*tau = 2 on Q=4: ratio 2^(4-2) = 4
    est = doubling_ratio(h1, WeightSpec("full_norm_power", -2.0), 1.0, 1.0, CFG)
    assert abs(est.z_score(4.0)) <= 3.0


def test_doubling_unweighted(h1):
    est = doubling_ratio(h1, UNWEIGHTED, 1.5, 1.0, CFG)
    assert abs(est.z_score(16.0)) <= 3.0


def test_doubling_layer(h1):
    # layer weight |z_1|^-1, tau=1: 2^(Q - l*a*tau) = 2^3
    est = doubling_ratio(h1, WeightSpec("layer_power", -1.0, 1), 1.0, 1.0, CFG)
    assert abs(est.z_score(8.0)) <= 3.0


def test_doubling_rejects_nonintegrable(h1):
    with pytest.raises(NonIntegrableWeight):
        doubling_ratio(h1, WeightSpec("full_norm_power", -3.0), 2.0, 1.0, CFG)
    with pytest.raises(NonIntegrableWeight):
        doubling_ratio(h1, WeightSpec("layer_power", -1.5, 2), 1.0, 1.0, CFG)


# -- proposal densities integrate to one ----------------------------------------------


@pytest.mark.parametrize("make", [
    lambda spec: BoxUniform(spec, None, 1.3),
    lambda spec: DilatedBox(spec, None, 1.3, -2.5),
    lambda spec: LayerRadialBox(spec, None, 1.3, 1, -1.2),
    lambda spec: Mixture(
        [BoxUniform(spec, None, 1.3), DilatedBox(spec, None, 1.3, -1.0)], [0.5, 0.5]
    ),
])
def test_sampler_density_normalization(h1, make):
    # E[ box_density / p(X) ] over the box equals 1 for a normalized density p
    sampler = make(h1)
    rng = np.random.default_rng(31)
    pts = sampler.sample(rng, 200_000)
    dens = sampler.density(pts)
    box = BoxUniform(h1, None, 1.3)
    ratio = box.density(pts) / dens
    est = ratio.mean()
    se = ratio.std(ddof=1) / math.sqrt(len(ratio))
    assert abs(est - 1.0) <= 4 * se


# -- estimate helpers -------------------------------------------------------------------


def test_ratio_and_power_propagation():
    from carnotineq import IntegralEstimate

    a = IntegralEstimate(8.0, 0.2, 100, 1)
    b = IntegralEstimate(2.0, 0.1, 100, 2)
    r = ratio_of(a, b)
    assert r.value == 4.0
    assert r.std_error == pytest.approx(4.0 * math.hypot(0.2 / 8.0, 0.1 / 2.0))
    p = power_of(a, 0.5)
    assert p.value == pytest.approx(math.sqrt(8.0))
    assert p.std_error == pytest.approx(0.5 * 8.0 ** (-0.5) * 0.2)


def test_derive_seed_stability():
    assert derive_seed(1, "x", 2) == derive_seed(1, "x", 2)
    assert derive_seed(1, "x") != derive_seed(1, "y")
    assert derive_seed(1) != derive_seed(2)
