import itertools
import math

import numpy as np
import pytest

from algebra.multivector import (
    EUCLIDEAN_2D,
    EUCLIDEAN_3D,
    TAU,
    Multivector,
    grade_project,
    orthogonal_matrix,
)
from coxeter.coxeter_plane import (
    axis_roots,
    bivector_matrix,
    coxeter_number,
    coxeter_plane,
    coxeter_versor,
    describe_coxeter_element,
    exponents,
    is_axis_system_closed,
    normalize_bivector_sign,
    plane_basis,
    plane_is_invariant,
    plane_orbit_decomposition,
    project_to_plane,
    rotational_symmetry_order,
    versor_power,
)
from coxeter.root_systems import build_root_system, simple_roots
from utils.errors import CoxeterError

H_VALUES = {"A1A1A1": 2, "A3": 4, "B3": 6, "H3": 10}
EXPONENTS = {"A1A1A1": [1, 1, 1], "A3": [1, 2, 3], "B3": [1, 3, 5], "H3": [1, 5, 9]}


@pytest.fixture(scope="module")
def h3():
    return describe_coxeter_element(simple_roots("H3"))


# ========== COXETER VERSOR ==========

@pytest.mark.parametrize("n", range(3, 13))
def test_dihedral_coxeter_versor(n):
    w = coxeter_versor(simple_roots(f"I2:{n}"))
    expected = Multivector.scalar(EUCLIDEAN_2D, -math.cos(math.pi / n)) + Multivector.blade(
        EUCLIDEAN_2D, 0b11, math.sin(math.pi / n))
    assert w.mv.is_close(expected, 1e-12)
    assert coxeter_number(w) == n
    assert versor_power(w, n).is_close(Multivector.scalar(EUCLIDEAN_2D, (-1.0) ** (n + 1)), 1e-9)


def test_pentagon_versor_bivector_part():
    w = coxeter_versor(simple_roots("I2:5"))
    assert grade_project(w.mv, 2)[0b11] == pytest.approx(math.sin(math.pi / 5))


def test_h3_coxeter_versor():
    w = coxeter_versor(simple_roots("H3"))
    expected = (Multivector.basis_vector(EUCLIDEAN_3D, 1) * -TAU
                - Multivector.basis_vector(EUCLIDEAN_3D, 2)
                + Multivector.pseudoscalar(EUCLIDEAN_3D) * (TAU - 1.0))
    assert (w.mv * 2.0).is_close(expected, 1e-12)
    assert w.parity == 1


def test_orthogonal_roots_give_pseudoscalar():
    w = coxeter_versor(simple_roots("A1A1A1"))
    assert w.mv.is_close(Multivector.pseudoscalar(EUCLIDEAN_3D), 1e-12)


def test_bad_permutation_raises():
    with pytest.raises(CoxeterError):
        coxeter_versor(simple_roots("H3"), [0, 0, 1])


@pytest.mark.parametrize("name", sorted(H_VALUES))
def test_coxeter_numbers(name):
    w = coxeter_versor(simple_roots(name))
    assert coxeter_number(w) == H_VALUES[name]


@pytest.mark.parametrize("name", ["A3", "B3", "H3"])
def test_coxeter_number_ignores_root_order(name):
    roots = simple_roots(name)
    for order in itertools.permutations(range(3)):
        assert coxeter_number(coxeter_versor(roots, order)) == H_VALUES[name]


@pytest.mark.parametrize("name", sorted(H_VALUES))
def test_generic_vectors_return_exactly_at_h(name, rng):
    descriptor = describe_coxeter_element(simple_roots(name))
    m = orthogonal_matrix(descriptor.versor)
    for v in rng.normal(size=(100, 3)):
        images = [v]
        for _ in range(descriptor.h):
            images.append(m @ images[-1])
        assert np.allclose(images[-1], v, atol=1e-9)
        # a generic vector has no shorter period
        assert all(np.max(np.abs(x - v)) > 1e-9 for x in images[1:-1])


def test_bound_is_enforced():
    with pytest.raises(CoxeterError):
        coxeter_number(coxeter_versor(simple_roots("H3")), bound=5)


# ========== PLANE ==========

def test_dihedral_plane_is_the_whole_plane():
    w = coxeter_versor(simple_roots("I2:7"))
    assert coxeter_plane(w, 7).is_close(Multivector.blade(EUCLIDEAN_2D, 0b11))


def test_h3_plane_and_normal(h3):
    scale = math.sqrt(1.0 + TAU * TAU)
    expected = (Multivector.blade(EUCLIDEAN_3D, 0b011) - Multivector.blade(EUCLIDEAN_3D, 0b101) * TAU) / scale
    assert h3.plane.is_close(expected, 1e-9)
    normal = h3.normal.vector_part()
    assert np.allclose(normal, np.array([0.0, -TAU, -1.0]) / scale, atol=1e-9)


def test_sign_normalization():
    b = Multivector.blade(EUCLIDEAN_3D, 0b011, -2.0) + Multivector.blade(EUCLIDEAN_3D, 0b110, 1.0)
    flipped = normalize_bivector_sign(b)
    assert flipped[0b011] == 2.0 and flipped[0b110] == -1.0


@pytest.mark.parametrize("name", ["A3", "B3", "H3"])
def test_plane_is_rotated_by_two_pi_over_h(name):
    d = describe_coxeter_element(simple_roots(name))
    u1, u2 = plane_basis(d.plane)
    image = d.matrix @ u1
    angle = math.atan2(abs(np.dot(image, u2)), np.dot(image, u1))
    assert angle == pytest.approx(2.0 * math.pi / d.h, abs=1e-9)
    assert plane_is_invariant(d, samples=100)


def test_plane_basis_orientation(h3):
    u1, u2 = plane_basis(h3.plane)
    assert np.allclose(bivector_matrix(h3.plane), np.outer(u1, u2) - np.outer(u2, u1), atol=1e-12)


@pytest.mark.parametrize("name", sorted(EXPONENTS))
def test_exponents(name):
    d = describe_coxeter_element(simple_roots(name))
    assert d.exponents == EXPONENTS[name]
    # m and h - m come in pairs
    assert sorted(d.h - m for m in d.exponents) == d.exponents


@pytest.mark.parametrize("n", [3, 5, 8])
def test_dihedral_exponents(n):
    w = coxeter_versor(simple_roots(f"I2:{n}"))
    assert exponents(w, n) == [1, n - 1]


def test_odd_element_maps_plane_to_itself(h3, rng):
    basis = plane_basis(h3.plane)
    vectors = rng.normal(size=(100, 2)) @ basis
    images = vectors @ h3.matrix.T
    assert np.allclose(images, (images @ basis.T) @ basis, atol=1e-9)
    # the normal is sent to its negative
    b = h3.normal.vector_part()
    assert np.allclose(h3.matrix @ b, -b, atol=1e-9)


# ========== ORBITS AND PROJECTION ==========

def test_orbit_of_e1_is_a_decagon(h3):
    orbit = plane_orbit_decomposition(h3.versor, [1.0, 0.0, 0.0], h3.plane)
    assert orbit["orbit_size"] == 10
    # e1 is orthogonal to the normal -tau e2 - e3
    assert orbit["in_plane"]


def test_normal_orbit_has_two_points(h3):
    b = h3.normal.vector_part()
    orbit = plane_orbit_decomposition(h3.versor, b / np.linalg.norm(b), h3.plane)
    assert orbit["orbit_size"] == 2
    assert orbit["normal"]
    assert np.allclose(orbit["points"][1], -orbit["points"][0], atol=1e-12)


def test_in_plane_orbit_is_a_regular_decagon(h3):
    u1 = plane_basis(h3.plane)[0]
    orbit = plane_orbit_decomposition(h3.versor, u1, h3.plane)
    assert orbit["in_plane"]
    coords = project_to_plane(orbit["points"], h3.plane)
    assert rotational_symmetry_order(coords) == 10


@pytest.mark.parametrize("name, count", [("H3", 12), ("A3", 6), ("B3", 8)])
def test_axis_roots(name, count):
    d = describe_coxeter_element(simple_roots(name))
    roots = axis_roots(d)
    assert len(roots) == count
    assert is_axis_system_closed(d)


def test_h3_projection_has_tenfold_symmetry(h3):
    coords = project_to_plane(build_root_system("H3").roots, h3.plane)
    assert rotational_symmetry_order(coords) == 10


def test_projection_onto_e1e2_is_identity():
    plane = Multivector.blade(EUCLIDEAN_3D, 0b011)
    points = np.array([[0.3, -0.7, 0.0], [1.0, 2.0, 0.0]])
    assert np.allclose(project_to_plane(points, plane), points[:, :2], atol=1e-12)


def test_normal_projects_to_origin(h3):
    assert np.allclose(project_to_plane(h3.normal, h3.plane), 0.0, atol=1e-12)
