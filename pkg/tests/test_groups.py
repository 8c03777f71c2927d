import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnotineq import (
    GroupSpec,
    InvalidGroupSpec,
    InvalidScale,
    Point,
    UnsupportedStep,
    builtin_group,
    euclidean,
    group_from_arg,
    heisenberg,
    load_group_spec,
    validate_group_spec,
)
from conftest import STEP3_FILE

RNG = np.random.default_rng(20250809)


# -- validation ----------------------------------------------------------------


def test_heisenberg_spec_is_valid(h1):
    assert validate_group_spec(h1) == []


def test_all_builtins_valid(r2, h2, free3, engel):
    for spec in (r2, h2, free3, engel):
        assert validate_group_spec(spec) == []


def test_missing_antisymmetric_partner_is_a_violation():
    spec = GroupSpec(2, (2, 1), ((1, 2, 3, 1.0),))
    violations = validate_group_spec(spec)
    assert any("antisymmetry" in v and "(1, 2, 3)" in v for v in violations)


def test_bracket_landing_in_layer_one_is_a_grading_violation():
    spec = GroupSpec(2, (2, 1), ((1, 2, 1, 1.0), (2, 1, 1, -1.0)))
    violations = validate_group_spec(spec)
    assert any("grading" in v for v in violations)


def test_bracket_beyond_step_is_a_grading_violation():
    # layer 1 x layer 2 would land in layer 3 > step
    spec = GroupSpec(2, (2, 1), ((1, 2, 3, 1.0), (2, 1, 3, -1.0), (1, 3, 3, 1.0), (3, 1, 3, -1.0)))
    assert any("grading" in v for v in validate_group_spec(spec))


def test_jacobi_violation_detected():
    # [e1,e2]=e4, [e4,e3]=e5: Jacobi on (1,2,3) leaves an uncancelled e5 term
    spec = GroupSpec(
        3,
        (3, 1, 1),
        ((1, 2, 4, 1.0), (2, 1, 4, -1.0), (4, 3, 5, 1.0), (3, 4, 5, -1.0)),
    )
    violations = validate_group_spec(spec)
    assert any("Jacobi" in v and "(1, 2, 3)" in v for v in violations)


def test_operations_refuse_invalid_spec():
    spec = GroupSpec(2, (2, 1), ((1, 2, 3, 1.0),))
    with pytest.raises(InvalidGroupSpec):
        spec.multiply([0, 0, 0], [0, 0, 0])


def test_malformed_bracket_indices_raise():
    with pytest.raises(InvalidGroupSpec):
        GroupSpec(2, (2, 1), ((1, 9, 3, 1.0),))


# -- group law -----------------------------------------------------------------


def test_h1_multiply_example(h1):
    out = h1.multiply([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    np.testing.assert_allclose(out, [1.0, 1.0, 0.5], atol=1e-15)


def test_euclidean_multiply_is_additive(r3):
    u = RNG.standard_normal(3)
    v = RNG.standard_normal(3)
    np.testing.assert_allclose(r3.multiply(u, v), u + v, atol=0)


def test_identity_and_inverse_laws(h1, free3, engel):
    for spec in (h1, free3, engel):
        u = RNG.standard_normal((100, spec.dim))
        e = spec.identity()
        np.testing.assert_allclose(spec.multiply(u, e), u, atol=1e-12)
        np.testing.assert_allclose(spec.multiply(e, u), u, atol=1e-12)
        np.testing.assert_allclose(
            spec.multiply(u, spec.inverse(u)), np.zeros_like(u), atol=1e-12
        )


def test_associativity_random_triples(h1, h2, free3, engel):
    for spec in (h1, h2, free3, engel):
        u, v, w = RNG.standard_normal((3, 500, spec.dim))
        left = spec.multiply(spec.multiply(u, v), w)
        right = spec.multiply(u, spec.multiply(v, w))
        np.testing.assert_allclose(left, right, atol=1e-10)


def test_point_in_point_out(h1):
    p = Point.from_flat(h1, [1.0, 0.0, 0.0])
    q = Point.from_flat(h1, [0.0, 1.0, 0.0])
    out = h1.multiply(p, q)
    assert isinstance(out, Point)
    np.testing.assert_allclose(out.flat, [1.0, 1.0, 0.5])
    assert isinstance(h1.inverse(p), Point)


def test_step_beyond_three_unsupported():
    spec = GroupSpec(4, (1, 1, 1, 1))
    with pytest.raises(UnsupportedStep):
        spec.multiply(np.zeros(4), np.zeros(4))


# -- dilations -----------------------------------------------------------------


def test_dilate_examples(h1):
    np.testing.assert_allclose(h1.dilate(2.0, [1.0, 0.0, 1.0]), [2.0, 0.0, 4.0])
    u = RNG.standard_normal(3)
    np.testing.assert_allclose(h1.dilate(1.0, u), u)
    np.testing.assert_allclose(h1.dilate(2.0, h1.dilate(0.5, u)), u, rtol=1e-15)


def test_dilate_rejects_nonpositive(h1):
    with pytest.raises(InvalidScale):
        h1.dilate(0.0, [1.0, 0.0, 0.0])
    with pytest.raises(InvalidScale):
        h1.dilate(-2.0, [1.0, 0.0, 0.0])


def test_dilation_is_automorphism(h1, free3, engel):
    for spec in (h1, free3, engel):
        u, v = RNG.standard_normal((2, 300, spec.dim))
        for t in (0.5, 2.0, 3.0):
            left = spec.dilate(t, spec.multiply(u, v))
            right = spec.multiply(spec.dilate(t, u), spec.dilate(t, v))
            np.testing.assert_allclose(left, right, atol=1e-10)


# -- norm and distance -----------------------------------------------------------


def test_norm_examples(r2, h1):
    assert r2.norm([3.0, 4.0]) == pytest.approx(5.0, rel=1e-15)
    assert h1.norm([1.0, 0.0, 0.0]) == pytest.approx(1.0, rel=1e-15)
    assert h1.norm([1.0, 0.0, 1.0]) == pytest.approx(2.0 ** 0.25, rel=1e-14)
    assert h1.norm(h1.dilate(2.0, [1.0, 0.0, 1.0])) == pytest.approx(
        2.0 * 2.0 ** 0.25, rel=1e-14
    )


def test_norm_homogeneity(h1, h2, free3, engel):
    for spec in (h1, h2, free3, engel):
        u = RNG.standard_normal((200, spec.dim))
        base = spec.norm(u)
        for t in (0.1, 0.5, 2.0, 10.0):
            np.testing.assert_allclose(spec.norm(spec.dilate(t, u)), t * base, rtol=1e-12)


def test_norm_zero_iff_identity(h1):
    assert h1.norm(h1.identity()) == 0.0
    u = RNG.standard_normal((50, 3))
    assert np.all(h1.norm(u) > 0)


def test_norm_symmetric_under_inverse(h1, engel):
    for spec in (h1, engel):
        u = RNG.standard_normal((100, spec.dim))
        np.testing.assert_array_equal(spec.norm(spec.inverse(u)), spec.norm(u))


def test_distance_examples(r3, h1):
    u = RNG.standard_normal(3)
    assert h1.distance(u, u) == pytest.approx(0.0, abs=1e-12)
    v = RNG.standard_normal(3)
    assert r3.distance(u, v) == pytest.approx(np.linalg.norm(v - u), rel=1e-14)
    # d((1,0,0),(0,1,0)) = |(-1,1,-1/2)| = (4.25)^(1/4)
    assert h1.distance([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]) == pytest.approx(
        4.25 ** 0.25, rel=1e-14
    )


def test_distance_left_invariance(h1, free3):
    for spec in (h1, free3):
        w, u, v = RNG.standard_normal((3, 200, spec.dim))
        d0 = spec.distance(u, v)
        d1 = spec.distance(spec.multiply(w, u), spec.multiply(w, v))
        np.testing.assert_allclose(d1, d0, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
)
def test_associativity_property_h1(a, b, c):
    h1 = heisenberg(1)
    left = h1.multiply(h1.multiply(a, b), c)
    right = h1.multiply(a, h1.multiply(b, c))
    np.testing.assert_allclose(left, right, atol=1e-10)


# -- Point invariants -------------------------------------------------------------


def test_point_rejects_nonfinite():
    with pytest.raises(ValueError):
        Point((np.array([np.inf]),))


def test_point_from_flat_checks_length(h1):
    with pytest.raises(ValueError):
        Point.from_flat(h1, [1.0, 2.0])
    p = Point.from_flat(h1, [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(p.z(1), [1.0, 2.0])
    np.testing.assert_array_equal(p.z(2), [3.0])
    assert Point.origin(h1).flat.tolist() == [0.0, 0.0, 0.0]


# -- derived quantities ------------------------------------------------------------


def test_homogeneous_dimension(r2, h1, h2, free3, engel):
    assert r2.homogeneous_dimension == 2
    assert h1.homogeneous_dimension == 4
    assert h2.homogeneous_dimension == 6
    assert free3.homogeneous_dimension == 9
    assert engel.homogeneous_dimension == 7


def test_box_gauge_bounds_norm(h1):
    # the box {gauge <= R} circumscribes the pseudo-ball {norm < R}
    u = RNG.standard_normal((500, 3))
    inside = h1.norm(u) < 1.0
    assert np.all(h1.box_gauge(u[inside]) <= 1.0 + 1e-12)


# -- file loading ------------------------------------------------------------------


def test_load_step3_file(engel):
    assert engel.step == 3
    assert engel.layer_dims == (2, 1, 1)
    assert engel.violations() == []
    # loader completed the antisymmetric partners
    assert len(engel.brackets) == 4


def test_loader_rejects_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InvalidGroupSpec):
        load_group_spec(path)


def test_loader_rejects_missing_fields(tmp_path):
    path = tmp_path / "missing.json"
    path.write_text(json.dumps({"step": 2}))
    with pytest.raises(InvalidGroupSpec):
        load_group_spec(path)


def test_builtin_names():
    assert builtin_group("R5").dim == 5
    assert builtin_group("h1").layer_dims == (2, 1)
    assert builtin_group("free3").layer_dims == (3, 3)
    with pytest.raises(KeyError):
        builtin_group("nonsense")


def test_group_from_arg(tmp_path):
    assert group_from_arg("H1").name == "H1"
    assert group_from_arg(str(STEP3_FILE)).step == 3
    with pytest.raises(InvalidGroupSpec):
        group_from_arg(str(tmp_path / "does_not_exist.json"))
