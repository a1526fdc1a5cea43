import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from algebra.conformal import (
    ConformalContext,
    ConformalPoint,
    apply_translation,
    apply_versor,
    conformal_reflect,
    conformal_root_closure,
    embed,
    embed_points,
    extract,
    extract_points,
    translation_rotor,
)
from algebra.multivector import CONFORMAL_3D, EUCLIDEAN_3D, Multivector, Versor, dot, lift, sandwich
from coxeter.root_systems import simple_roots
from utils.errors import PointAtInfinityError, SignatureMismatchError
from utils.point_set import same_point_set

UNIT = ConformalContext(lam=1.0)


def e(i):
    return Multivector.basis_vector(CONFORMAL_3D, i - 1)


# ========== CONTEXT ==========

def test_null_basis():
    assert dot(UNIT.n, UNIT.n) == 0.0
    assert dot(UNIT.nbar, UNIT.nbar) == 0.0
    assert dot(UNIT.n, UNIT.nbar) == 2.0


def test_lambda_must_be_positive():
    with pytest.raises(ValueError):
        ConformalContext(lam=0.0)


# ========== EMBEDDING ==========

def test_origin_embeds_as_minus_nbar():
    assert embed([0, 0, 0], UNIT).X.is_close(-UNIT.nbar)


def test_unit_vector_embedding():
    assert embed([1, 0, 0], UNIT).X.is_close(UNIT.n + e(1) * 2.0 - UNIT.nbar)


def test_embedded_points_are_null(rng):
    points = rng.normal(size=(1000, 3))
    rows = embed_points(points, UNIT)
    for row in rows:
        X = Multivector(CONFORMAL_3D, row)
        assert abs((X * X).scalar_part) < 1e-12 * max(1.0, float(np.dot(row, row)))
        assert ConformalPoint(X).is_null(1e-9 * max(1.0, float(np.dot(row, row))))


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_extract_inverts_embed(rng, lam):
    ctx = ConformalContext(lam=lam)
    points = rng.normal(size=(50, 3))
    assert np.allclose(extract_points(embed_points(points, ctx), ctx), points, atol=1e-12)


def test_extract_is_homogeneous(rng):
    x = rng.normal(size=3)
    for s in (-3.0, 0.25, 7.0):
        assert np.allclose(extract(embed(x, UNIT).X * s, UNIT), x, atol=1e-12)


@pytest.mark.parametrize("s", [1e-12, 1e-3, -5.0, 1e6])
def test_extract_accepts_any_nonzero_ray_scale(s):
    x = np.array([0.3, 0.4, 0.0])
    assert np.allclose(extract(embed(x, UNIT).X * s, UNIT), x, atol=1e-9)


def test_origin_and_pentagon_vertex_round_trip():
    assert np.allclose(extract(-UNIT.nbar, UNIT), 0.0)
    vertex = [math.cos(2 * math.pi / 5), math.sin(2 * math.pi / 5), 0.0]
    assert np.allclose(extract(embed(vertex, UNIT), UNIT), vertex, atol=1e-12)


def test_point_at_infinity_raises():
    with pytest.raises(PointAtInfinityError):
        extract(UNIT.n, UNIT)


def test_wrong_algebra_is_rejected():
    with pytest.raises(SignatureMismatchError):
        extract(Multivector.scalar(EUCLIDEAN_3D, 1.0), UNIT)
    with pytest.raises(SignatureMismatchError):
        embed([1, 2, 3, 4], UNIT)


# ========== REFLECTIONS ==========

def test_reflection_examples():
    assert conformal_reflect(embed([1, 0, 0], UNIT), [1, 0, 0], UNIT).X.is_close(embed([-1, 0, 0], UNIT).X)
    assert conformal_reflect(embed([0, 1, 0], UNIT), [1, 0, 0], UNIT).X.is_close(embed([0, 1, 0], UNIT).X)


def test_reflection_commutes_with_embedding(rng):
    for _ in range(100):
        x = rng.normal(size=3)
        alpha = rng.normal(size=3)
        alpha /= np.linalg.norm(alpha)
        reflected = x - 2.0 * np.dot(alpha, x) * alpha
        image = conformal_reflect(embed(x, UNIT), alpha, UNIT)
        assert image.X.is_close(embed(reflected, UNIT).X, 1e-9)


# ========== TRANSLATIONS ==========

def test_translation_rotor_examples():
    assert translation_rotor([0, 0, 0], UNIT).mv.is_close(Multivector.scalar(CONFORMAL_3D, 1.0))
    expected = Multivector.scalar(CONFORMAL_3D, 1.0) + UNIT.n * e(1) * 0.5
    assert translation_rotor([1, 0, 0], UNIT).mv.is_close(expected)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_translation_moves_points(rng, lam):
    ctx = ConformalContext(lam=lam)
    for _ in range(200):
        x, a = rng.normal(size=3), rng.normal(size=3)
        moved = apply_translation(embed(x, ctx), a, ctx)
        assert moved.X.is_close(embed(x + a, ctx).X, 1e-9)
        assert np.allclose(extract(moved, ctx), x + a, atol=1e-9)


def test_translations_compose(rng):
    for _ in range(50):
        a, b = rng.normal(size=3), rng.normal(size=3)
        composed = translation_rotor(a, UNIT).mv * translation_rotor(b, UNIT).mv
        assert composed.is_close(translation_rotor(a + b, UNIT).mv, 1e-12)


def test_translation_rotor_is_unit(rng):
    rotor = translation_rotor(rng.normal(size=3), UNIT)
    assert (rotor.mv * ~rotor.mv).is_close(Multivector.scalar(CONFORMAL_3D, 1.0), 1e-12)


def test_mixed_chains_match_euclidean_computation(rng):
    for _ in range(200):
        x = rng.normal(size=3)
        point, expected = embed(x, UNIT), x.copy()
        for _ in range(int(rng.integers(1, 6))):
            if rng.random() < 0.5:
                alpha = rng.normal(size=3)
                alpha /= np.linalg.norm(alpha)
                point = conformal_reflect(point, alpha, UNIT)
                expected = expected - 2.0 * np.dot(alpha, expected) * alpha
            else:
                a = rng.normal(size=3)
                point = apply_translation(point, a, UNIT)
                expected = expected + a
        assert np.allclose(extract(point, UNIT), expected, atol=1e-9, rtol=0)


# ========== EUCLIDEAN VERSORS ==========

def test_euclidean_rotors_commute_with_null_vectors(spin_groups):
    for versor in spin_groups["H3"].versors():
        lifted = lift(versor.mv, CONFORMAL_3D)
        assert (lifted * UNIT.n).is_close(UNIT.n * lifted, 1e-12)
        assert (lifted * UNIT.nbar).is_close(UNIT.nbar * lifted, 1e-12)


def test_versor_action_matches_euclidean_action(pin_groups, rng):
    vg = pin_groups["B3"]
    x = rng.normal(size=3)
    for versor in vg.versors():
        expected = sandwich(Multivector.vector(EUCLIDEAN_3D, x), versor).vector_part()
        image = apply_versor(embed(x, UNIT), versor, UNIT)
        assert np.allclose(extract(image, UNIT), expected, atol=1e-9)


def test_conformal_root_closure_matches_euclidean_closure(root_systems):
    decagon = conformal_root_closure(simple_roots("I2:5"), UNIT)
    assert len(decagon) == 10
    assert np.allclose(decagon[:, 2], 0.0)
    h3 = conformal_root_closure(simple_roots("H3"), ConformalContext(lam=2.0))
    assert same_point_set(h3, root_systems["H3"].roots)


coordinate = st.floats(-50, 50, allow_nan=False)


@given(st.tuples(coordinate, coordinate, coordinate), st.sampled_from([0.5, 1.0, 2.0]))
@settings(max_examples=200)
def test_embedding_is_null_and_invertible(x, lam):
    ctx = ConformalContext(lam=lam)
    point = embed(x, ctx)
    scale = max(1.0, float(np.dot(x, x))) ** 2
    assert abs(dot(point.X, point.X)) <= 1e-12 * scale
    assert np.allclose(extract(point, ctx), x, atol=1e-9, rtol=1e-12)
