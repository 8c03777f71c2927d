import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from carnotineq import (
    DomainError,
    Lemma44Params,
    SamplerConfig,
    beta,
    euclidean,
    lemma44_closed_form,
    lemma44_oracle,
    sphere_surface,
    unit_ball_volume,
)


# -- Beta and sphere surface ------------------------------------------------------


def test_beta_one_one():
    assert beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-14)


def test_beta_half_integer():
    # B(1.5, 0.5) = Gamma(1.5)Gamma(0.5)/Gamma(2) = pi/2
    assert beta(1.5, 0.5) == pytest.approx(math.pi / 2.0, rel=1e-13)


def test_beta_large_arguments_accuracy():
    # spot-check against the defining quadrature integral
    for a, b in ((10.0, 25.0), (77.5, 100.0), (1e-3, 3.0)):
        ref, err = quad(lambda t: t ** (a - 1) * (1 - t) ** (b - 1), 0, 1)
        assert beta(a, b) == pytest.approx(ref, rel=max(1e-12, 2 * err / ref))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 80.0), st.floats(0.01, 80.0))
def test_beta_symmetry(a, b):
    assert beta(a, b) == pytest.approx(beta(b, a), rel=1e-12)


def test_beta_domain_errors():
    with pytest.raises(DomainError):
        beta(0.0, 1.0)
    with pytest.raises(DomainError):
        beta(1.0, -2.0)


def test_sphere_surface_values():
    assert sphere_surface(0) == pytest.approx(2.0, rel=1e-15)
    assert sphere_surface(1) == pytest.approx(2.0 * math.pi, rel=1e-15)
    assert sphere_surface(2) == pytest.approx(4.0 * math.pi, rel=1e-15)
    with pytest.raises(DomainError):
        sphere_surface(-1)


# -- closed form ------------------------------------------------------------------


def test_closed_form_euclidean_disk(r2):
    # gamma = 0 on R^2 is the area of the unit disk
    assert lemma44_closed_form(Lemma44Params(r2, 1, 0.0)) == pytest.approx(
        math.pi, rel=1e-12
    )


def test_closed_form_interval(r1):
    assert lemma44_closed_form(Lemma44Params(r1, 1, 0.0)) == pytest.approx(2.0, rel=1e-12)


def test_closed_form_euclidean_weighted(r2):
    # polar oracle: integral of |z|^-1 over the unit disk = 2*pi
    assert lemma44_closed_form(Lemma44Params(r2, 1, 1.0)) == pytest.approx(
        2.0 * math.pi, rel=1e-12
    )


def test_closed_form_h1_both_layers(h1):
    # radial oracle: V = 4*pi int_0^1 rho*sqrt(1-rho^4) drho = pi^2/2
    oracle, err = quad(lambda rho: 4.0 * math.pi * rho * math.sqrt(1.0 - rho ** 4), 0, 1)
    assert oracle == pytest.approx(math.pi ** 2 / 2.0, rel=1e-10)
    v1 = lemma44_closed_form(Lemma44Params(h1, 1, 0.0))
    v2 = lemma44_closed_form(Lemma44Params(h1, 2, 0.0))
    assert v1 == pytest.approx(math.pi ** 2 / 2.0, rel=1e-10)
    assert v2 == pytest.approx(math.pi ** 2 / 2.0, rel=1e-10)


def test_gamma_zero_same_for_all_layers(h1, h2, free3, engel):
    for spec in (h1, h2, free3, engel):
        vals = [
            lemma44_closed_form(Lemma44Params(spec, l, 0.0))
            for l in range(1, spec.step + 1)
        ]
        for v in vals[1:]:
            assert v == pytest.approx(vals[0], rel=1e-10)
        assert unit_ball_volume(spec) == pytest.approx(vals[0], rel=1e-12)


def test_monotone_in_gamma(h1, engel):
    for spec in (h1, engel):
        for layer in range(1, spec.step + 1):
            m = spec.layer_dim(layer)
            grid = [0.0, 0.25 * m, 0.5 * m, 0.9 * m]
            vals = [
                lemma44_closed_form(Lemma44Params(spec, layer, g)) for g in grid
            ]
            assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_divergence_at_boundary(h1):
    near = lemma44_closed_form(Lemma44Params(h1, 1, 2.0 - 1e-9))
    assert near > 1e8


def test_gamma_bound_enforced(h1):
    with pytest.raises(DomainError):
        Lemma44Params(h1, 1, 2.0)
    with pytest.raises(DomainError):
        Lemma44Params(h1, 3, 0.0)


# -- oracle cross-validation (small grid; the full grid runs in acceptance) --------


def test_oracle_matches_closed_form_h1(h1):
    cfg = SamplerConfig(n_samples=300_000, seed=90210)
    for layer, frac in ((1, 0.0), (1, 0.75), (2, 0.5)):
        gamma = frac * h1.layer_dim(layer)
        params = Lemma44Params(h1, layer, gamma)
        closed = lemma44_closed_form(params)
        est = lemma44_oracle(params, cfg.sub(layer, int(100 * frac)))
        assert abs(est.z_score(closed)) <= 3.0


def test_oracle_euclidean_weighted():
    r2 = euclidean(2)
    params = Lemma44Params(r2, 1, 1.0)
    est = lemma44_oracle(params, SamplerConfig(n_samples=200_000, seed=3))
    assert abs(est.z_score(2.0 * math.pi)) <= 3.0


def test_oracle_unstratified_still_works(h1):
    cfg = SamplerConfig(n_samples=200_000, seed=4, stratify_singularity=False)
    params = Lemma44Params(h1, 1, 1.0)
    est = lemma44_oracle(params, cfg)
    closed = lemma44_closed_form(params)
    assert abs(est.z_score(closed)) <= 4.0  # plain sampler has heavier tails
