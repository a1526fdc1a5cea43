import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from algebra.multivector import (
    CONFORMAL_3D,
    EUCLIDEAN_3D,
    Multivector,
    Signature,
    Versor,
    batch_orthogonal_matrices,
    batch_sandwich,
    blade_name,
    dot,
    grade_project,
    inverse,
    lift,
    norm_squared,
    outer_product_2,
    orthogonal_matrix,
    raw_sandwich,
    reflect,
    reflect_components,
    reverse,
    row_parities,
    sandwich,
    unit,
)
from utils.errors import (
    NonUnitVersorError,
    NullVectorError,
    ParityError,
    SignatureError,
    SignatureMismatchError,
)

TRIALS = 1000


def random_mv(rng, sig):
    return Multivector(sig, 0.3 * rng.normal(size=sig.size))


def random_unit_vector(rng, sig=EUCLIDEAN_3D):
    v = rng.normal(size=sig.dimension)
    return Multivector.vector(sig, v / np.linalg.norm(v))


def random_unit_versor(rng, sig=EUCLIDEAN_3D):
    k = int(rng.integers(1, 5))
    return Versor.from_vectors(random_unit_vector(rng, sig) for _ in range(k))


def e(i, sig=EUCLIDEAN_3D):
    return Multivector.basis_vector(sig, i - 1)


# ========== BASICS ==========

def test_basis_vectors_square_by_signature():
    assert (e(1) * e(1)).is_close(Multivector.scalar(EUCLIDEAN_3D, 1.0))
    ebar = Multivector.basis_vector(CONFORMAL_3D, 4)
    assert (ebar * ebar).is_close(Multivector.scalar(CONFORMAL_3D, -1.0))


def test_distinct_basis_vectors_anticommute():
    assert (e(1) * e(2)).is_close(-(e(2) * e(1)))
    assert (e(1) * e(2))[0b011] == 1.0


def test_pseudoscalar_squares_to_minus_one_in_3d():
    i3 = Multivector.pseudoscalar(EUCLIDEAN_3D)
    assert (i3 * i3).is_close(Multivector.scalar(EUCLIDEAN_3D, -1.0))


def test_blade_names_follow_bitmask_order():
    assert [blade_name(m) for m in range(8)] == [
        "1", "e1", "e2", "e1e2", "e3", "e1e3", "e2e3", "e1e2e3"
    ]


def test_signature_limits():
    with pytest.raises(SignatureError):
        Signature(4, 2)
    with pytest.raises(SignatureError):
        Signature(-1, 0)


def test_mixed_signatures_are_rejected():
    with pytest.raises(SignatureMismatchError):
        Multivector.scalar(EUCLIDEAN_3D, 1.0) + Multivector.scalar(CONFORMAL_3D, 1.0)


def test_grade_beyond_dimension_is_zero():
    a = Multivector(EUCLIDEAN_3D, np.arange(8.0))
    assert np.all(grade_project(a, 4).coeffs == 0.0)
    assert grade_project(a, 3)[7] == 7.0


def test_serialization_omits_zeros():
    mv = Multivector.scalar(EUCLIDEAN_3D, 2.0) + e(3) * 0.5
    data = mv.to_dict()
    assert data == {"signature": [3, 0], "coeffs": {"0": 2.0, "4": 0.5}}
    assert Multivector.from_dict(data).is_close(mv)


def test_lift_into_conformal_algebra():
    lifted = lift(e(1) * e(2), CONFORMAL_3D)
    assert lifted.sig == CONFORMAL_3D
    assert lifted[0b011] == 1.0
    with pytest.raises(SignatureMismatchError):
        lift(Multivector.basis_vector(CONFORMAL_3D, 0), EUCLIDEAN_3D)


# ========== PROPERTY SUITES ==========

@pytest.mark.parametrize("sig", [EUCLIDEAN_3D, CONFORMAL_3D])
def test_geometric_product_is_associative(rng, sig):
    for _ in range(TRIALS):
        a, b, c = (random_mv(rng, sig) for _ in range(3))
        assert ((a * b) * c).is_close(a * (b * c), 1e-12)


@pytest.mark.parametrize("sig", [EUCLIDEAN_3D, CONFORMAL_3D])
def test_reverse_is_an_anti_homomorphism(rng, sig):
    for _ in range(TRIALS):
        a, b = random_mv(rng, sig), random_mv(rng, sig)
        assert reverse(a * b).is_close(reverse(b) * reverse(a), 1e-12)


def test_reflection_is_an_involution(rng):
    for _ in range(TRIALS):
        v = Multivector.vector(EUCLIDEAN_3D, rng.normal(size=3))
        alpha = random_unit_vector(rng)
        assert reflect(reflect(v, alpha), alpha).is_close(v, 1e-12)


def test_versor_reflection_matches_component_formula(rng):
    for _ in range(TRIALS):
        v = rng.normal(size=3)
        alpha = rng.normal(size=3)
        alpha /= np.linalg.norm(alpha)
        versor_form = reflect(Multivector.vector(EUCLIDEAN_3D, v),
                              Multivector.vector(EUCLIDEAN_3D, alpha)).vector_part()
        assert np.allclose(versor_form, reflect_components(v, alpha), atol=1e-12, rtol=0)


def test_sandwich_is_orthogonal(rng):
    for _ in range(TRIALS):
        a = random_unit_versor(rng)
        m = orthogonal_matrix(a)
        assert np.allclose(m.T @ m, np.eye(3), atol=1e-12, rtol=0)
        assert math.isclose(np.linalg.det(m), -1.0 if a.parity else 1.0, abs_tol=1e-12)


def test_composition_follows_right_action(rng):
    for _ in range(TRIALS):
        a, b = random_unit_versor(rng), random_unit_versor(rng)
        assert np.allclose(orthogonal_matrix(a * b),
                           orthogonal_matrix(b) @ orthogonal_matrix(a), atol=1e-12, rtol=0)


def test_odd_sandwich_of_unit_vector_is_reflection(rng):
    for _ in range(100):
        alpha = random_unit_vector(rng)
        v = Multivector.vector(EUCLIDEAN_3D, rng.normal(size=3))
        assert sandwich(v, Versor(alpha, 1)).is_close(reflect(v, alpha), 1e-12)


def test_batched_matrices_match_single(rng):
    versors = [random_unit_versor(rng) for _ in range(20)]
    coeffs = np.array([a.mv.coeffs for a in versors])
    parities = np.array([a.parity for a in versors])
    batch = batch_orthogonal_matrices(coeffs, parities, EUCLIDEAN_3D)
    for a, m in zip(versors, batch):
        assert np.allclose(m, orthogonal_matrix(a), atol=1e-12, rtol=0)


def test_batch_sandwich_matches_single(rng):
    versors = [random_unit_versor(rng) for _ in range(5)]
    points = [Multivector.vector(EUCLIDEAN_3D, rng.normal(size=3)) for _ in range(4)]
    images = batch_sandwich(np.array([a.mv.coeffs for a in versors]),
                            np.array([a.parity for a in versors]),
                            np.array([p.coeffs for p in points]), EUCLIDEAN_3D)
    for g, a in enumerate(versors):
        for k, p in enumerate(points):
            assert np.allclose(images[g, k], sandwich(p, a).coeffs, atol=1e-12, rtol=0)


@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=3))
@settings(max_examples=200)
def test_vector_square_is_its_norm(components):
    v = Multivector.vector(EUCLIDEAN_3D, components)
    expected = sum(x * x for x in components)
    assert math.isclose(norm_squared(v), expected, rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(dot(v, v), expected, rel_tol=1e-12, abs_tol=1e-12)


# ========== ERRORS ==========

def test_reflect_in_null_vector_raises():
    n = Multivector.basis_vector(CONFORMAL_3D, 3) + Multivector.basis_vector(CONFORMAL_3D, 4)
    with pytest.raises(NullVectorError):
        reflect(Multivector.basis_vector(CONFORMAL_3D, 0), n)
    with pytest.raises(NullVectorError):
        unit(n)


def test_mixed_parity_is_rejected():
    with pytest.raises(ParityError):
        Versor.from_multivector(Multivector.scalar(EUCLIDEAN_3D, 1.0) + e(1))
    with pytest.raises(ParityError):
        row_parities(np.array([[1.0, 1.0, 0, 0, 0, 0, 0, 0]]), EUCLIDEAN_3D)
    assert Versor.from_multivector(e(1) * e(2) * e(3)).parity == 1


def test_sandwich_requires_unit_versor():
    with pytest.raises(NonUnitVersorError):
        sandwich(e(1), Versor(e(1) * 2.0, 1))


def test_versor_inverse():
    a = (e(1) + e(2) * 2.0) * e(3)
    assert (a * inverse(a)).is_close(Multivector.scalar(EUCLIDEAN_3D, 1.0), 1e-12)


def test_raw_sandwich_has_no_parity_sign():
    assert raw_sandwich(e(2), e(1)).is_close(e(2) * -1.0)
    assert sandwich(e(2), Versor(e(1), 1)).is_close(e(2))


def test_reverse_examples():
    e12 = e(1) * e(2)
    assert reverse(e12).is_close(-e12)
    assert reverse(Multivector.scalar(EUCLIDEAN_3D, 3.0)).is_close(Multivector.scalar(EUCLIDEAN_3D, 3.0))
    i3 = Multivector.pseudoscalar(EUCLIDEAN_3D)
    assert reverse(i3).is_close(-i3)


def test_grade_projection_examples():
    mixed = Multivector.scalar(EUCLIDEAN_3D, 1.0) + e(1) + e(1) * e(2)
    assert grade_project(mixed, 1).is_close(e(1))
    total = sum((grade_project(mixed, k) for k in range(1, 4)), grade_project(mixed, 0))
    assert total.is_close(mixed)


def test_reflection_examples():
    assert reflect(e(1), e(1)).is_close(-e(1))
    assert reflect(e(2), e(1)).is_close(e(2))
    angle = math.pi / 5
    alpha2 = e(1) * -math.cos(angle) + e(2) * math.sin(angle)
    image = reflect(e(1), alpha2)
    assert np.allclose(image.vector_part(), [-math.cos(2 * angle), math.sin(2 * angle), 0.0], atol=1e-12)


def test_sandwich_examples():
    assert sandwich(e(1), Versor(e(1) * e(2), 0)).is_close(-e(1))
    v = e(1) * 0.3 + e(3) * 2.0
    assert sandwich(v, Versor.identity(EUCLIDEAN_3D)).is_close(v)


def test_vector_product_splits_into_dot_and_wedge(rng):
    for _ in range(100):
        u = Multivector.vector(EUCLIDEAN_3D, rng.normal(size=3))
        v = Multivector.vector(EUCLIDEAN_3D, rng.normal(size=3))
        split = Multivector.scalar(EUCLIDEAN_3D, dot(u, v)) + outer_product_2(u, v)
        assert (u * v).is_close(split, 1e-12)
        assert outer_product_2(u, v).is_close(-outer_product_2(v, u), 1e-12)
