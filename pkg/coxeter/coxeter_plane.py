"""
Coxeter elements as versors: Coxeter number, Coxeter plane and exponents.

W = a_1 a_2 ... a_k is the product of the simple roots. Its sandwich action
v -> (-1)^k reverse(W) v W is the Coxeter element w. The plane and the
exponents are read from the real Schur form of the matrix of w; no complex
eigenvectors are used.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import schur

from algebra.multivector import (
    Multivector,
    Signature,
    Versor,
    geometric_product,
    grade_project,
    orthogonal_matrix,
)
from coxeter.root_systems import is_closed
from utils.errors import CoxeterError
from utils.point_set import DEFAULT_TOL, same_point_set, unique_points

logger = logging.getLogger(__name__)

ANGLE_TOL = 1e-6
DEFAULT_BOUND = 1000


@dataclass(frozen=True, eq=False)
class CoxeterDescriptor:
    versor: Versor
    h: int
    plane: Multivector
    normal: Optional[Multivector]
    exponents: List[int]
    matrix: np.ndarray = field(repr=False)
    power: Multivector = field(repr=False, default=None)
    order: tuple = ()

    @property
    def rank(self) -> int:
        return self.matrix.shape[0]


# ========== COXETER ELEMENT ==========

def coxeter_versor(simple: Sequence[Multivector], order: Optional[Sequence[int]] = None) -> Versor:
    """Product of the simple roots in catalog order, or in ``order``"""
    if not simple:
        raise CoxeterError("a Coxeter element needs at least one simple root")
    order = list(range(len(simple))) if order is None else list(order)
    if sorted(order) != list(range(len(simple))):
        raise CoxeterError(f"order {order} is not a permutation of {len(simple)} roots")
    return Versor.from_vectors(simple[i] for i in order)


def versor_power(w: Versor, k: int) -> Multivector:
    result = Multivector.scalar(w.sig, 1.0)
    for _ in range(k):
        result = geometric_product(result, w.mv)
    return result


def coxeter_number(w: Versor, bound: int = DEFAULT_BOUND, tol: float = DEFAULT_TOL) -> int:
    """
    Least h >= 1 with w^h the identity on every basis vector. In the plane
    W^h must also equal the scalar (-1)^(h+1).
    """
    m = orthogonal_matrix(w)
    d = m.shape[0]
    power = np.eye(d)
    for k in range(1, bound + 1):
        power = m @ power
        if np.max(np.abs(power - np.eye(d))) <= tol:
            if d == 2:
                expected = Multivector.scalar(w.sig, (-1.0) ** (k + 1))
                if not versor_power(w, k).is_close(expected, tol):
                    raise CoxeterError(f"W^{k} is not the scalar {(-1) ** (k + 1)}")
            logger.debug("Coxeter number %d", k)
            return k
    raise CoxeterError(f"no Coxeter number found below {bound}")


# ========== PLANE ==========

def bivector_from_vectors(u: np.ndarray, v: np.ndarray, sig: Signature) -> Multivector:
    """u ^ v as a multivector; unit when u, v are orthonormal"""
    coeffs = np.zeros(sig.size)
    d = sig.dimension
    for i in range(d):
        for j in range(i + 1, d):
            coeffs[(1 << i) | (1 << j)] = u[i] * v[j] - u[j] * v[i]
    return Multivector(sig, coeffs)


def normalize_bivector_sign(b: Multivector, tol: float = DEFAULT_TOL) -> Multivector:
    """Flip so the first nonzero coefficient in blade order is positive"""
    nonzero = np.flatnonzero(np.abs(b.coeffs) > tol)
    if len(nonzero) and b.coeffs[nonzero[0]] < 0:
        return -b
    return b


def bivector_matrix(b: Multivector) -> np.ndarray:
    """Skew matrix S with S[i, j] = coefficient of e_{i+1} e_{j+1}"""
    d = b.sig.dimension
    s = np.zeros((d, d))
    for i in range(d):
        for j in range(i + 1, d):
            s[i, j] = b.coeffs[(1 << i) | (1 << j)]
            s[j, i] = -s[i, j]
    return s


def coxeter_plane(w: Versor, h: int, tol: float = DEFAULT_TOL) -> Multivector:
    """
    Unit bivector of the invariant plane on which w rotates by 2 pi / h.
    For h = 2 the rotation is by pi and the plane is spanned by the first two
    Schur vectors with eigenvalue -1.
    """
    m = orthogonal_matrix(w)
    d = m.shape[0]
    if d == 2:
        return Multivector.blade(w.sig, 0b11)

    t, z = schur(m, output="real")
    target = 2.0 * math.pi / h
    flipped = []
    i = 0
    while i < d:
        if i + 1 < d and abs(t[i + 1, i]) > 1e-12:
            angle = math.acos(float(np.clip((t[i, i] + t[i + 1, i + 1]) / 2.0, -1.0, 1.0)))
            if abs(angle - target) <= ANGLE_TOL:
                plane = bivector_from_vectors(z[:, i], z[:, i + 1], w.sig)
                return normalize_bivector_sign(plane.cleaned(tol), tol)
            i += 2
            continue
        if abs(t[i, i] + 1.0) <= ANGLE_TOL:
            flipped.append(z[:, i])
        i += 1

    if h == 2 and len(flipped) >= 2:
        plane = bivector_from_vectors(flipped[0], flipped[1], w.sig)
        return normalize_bivector_sign(plane.cleaned(tol), tol)
    raise CoxeterError(f"no invariant plane with rotation angle 2pi/{h}")


def plane_normal(plane: Multivector, tol: float = DEFAULT_TOL) -> Optional[Multivector]:
    """b = grade-1 part of B I in three dimensions; None otherwise"""
    if plane.sig.dimension != 3:
        return None
    return grade_project(geometric_product(plane, Multivector.pseudoscalar(plane.sig)), 1).cleaned(tol)


def plane_basis(plane: Multivector, tol: float = 1e-6) -> np.ndarray:
    """
    Orthonormal (u1, u2) with u1 ^ u2 = plane. u1 is the projection of the
    first basis vector that is not orthogonal to the plane.
    """
    s = bivector_matrix(plane)
    projector = -s @ s
    for k in range(projector.shape[0]):
        column = projector[:, k]
        length = np.linalg.norm(column)
        if length > tol:
            u1 = column / length
            u2 = -s @ u1
            return np.vstack([u1, u2 / np.linalg.norm(u2)])
    raise CoxeterError("plane bivector is zero")


def project_to_plane(points, plane: Multivector) -> np.ndarray:
    """(n, d) vectors or grade-1 multivectors -> (n, 2) in-plane coordinates"""
    rows = _vector_rows(points)
    return rows @ plane_basis(plane).T


def rotational_symmetry_order(points2d, tol: float = 1e-6, max_order: int = 60) -> int:
    """Largest k <= max_order for which rotating by 2 pi / k maps the set to itself"""
    rows = np.atleast_2d(np.asarray(points2d, dtype=np.float64))
    for k in range(max_order, 0, -1):
        c, s = math.cos(2.0 * math.pi / k), math.sin(2.0 * math.pi / k)
        rotated = rows @ np.array([[c, s], [-s, c]])
        if same_point_set(rows, rotated, tol):
            return k
    return 1


# ========== EXPONENTS ==========

def exponents(w: Versor, h: int) -> List[int]:
    """
    Integers m with eigenvalues exp(2 pi i m / h) of w; -1 gives h/2 and
    the eigenvalue +1 is skipped
    """
    eigenvalues = np.linalg.eigvals(orthogonal_matrix(w))
    found = []
    for value in eigenvalues:
        if abs(value - 1.0) <= ANGLE_TOL:
            continue
        angle = float(np.angle(value))
        if angle < -ANGLE_TOL:
            angle += 2.0 * math.pi
        if abs(value + 1.0) <= ANGLE_TOL:
            angle = math.pi
        m = round(angle * h / (2.0 * math.pi))
        if abs(angle - 2.0 * math.pi * m / h) > ANGLE_TOL or not 1 <= m <= h - 1:
            raise CoxeterError(f"eigenvalue angle {angle:.9f} is not a multiple of 2pi/{h}")
        found.append(int(m))
    return sorted(found)


# ========== ORBITS ==========

def _vector_rows(points) -> np.ndarray:
    if isinstance(points, Multivector):
        return points.vector_part().reshape(1, -1)
    points = list(points) if not isinstance(points, np.ndarray) else points
    if len(points) and isinstance(points[0], Multivector):
        return np.array([p.vector_part() for p in points])
    return np.atleast_2d(np.asarray(points, dtype=np.float64))


def plane_orbit_decomposition(w: Versor, v, plane: Optional[Multivector] = None,
                              tol: float = DEFAULT_TOL, bound: int = DEFAULT_BOUND) -> Dict:
    """Orbit of v under w, and whether v lies in the Coxeter plane or along its normal"""
    m = orthogonal_matrix(w)
    start = _vector_rows(v)[0]
    if plane is None:
        plane = coxeter_plane(w, coxeter_number(w, bound, tol), tol)

    points = [start]
    current = start
    for _ in range(bound):
        current = m @ current
        if np.max(np.abs(current - start)) <= tol:
            break
        points.append(current)
    else:
        raise CoxeterError(f"orbit did not close within {bound} steps")

    basis = plane_basis(plane)
    in_plane_part = basis.T @ (basis @ start)
    return {
        "orbit_size": len(points),
        "points": np.array(points),
        "in_plane": bool(np.max(np.abs(start - in_plane_part)) <= 1e3 * tol),
        "normal": bool(np.max(np.abs(in_plane_part)) <= 1e3 * tol),
    }


def axis_roots(descriptor: CoxeterDescriptor, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    The in-plane h-gon orbit, its negatives and +-normal: for H3 the 12 roots
    of A1 x H2
    """
    u1 = plane_basis(descriptor.plane)[0]
    orbit = plane_orbit_decomposition(descriptor.versor, u1, descriptor.plane, tol)["points"]
    rows = [orbit, -orbit]
    if descriptor.normal is not None:
        b = descriptor.normal.vector_part()
        b = b / np.linalg.norm(b)
        rows.append(np.vstack([b, -b]))
    roots, _ = unique_points(np.vstack(rows), tol)
    return roots


# ========== DESCRIPTOR ==========

def describe_coxeter_element(simple: Sequence[Multivector], order: Optional[Sequence[int]] = None,
                             bound: int = DEFAULT_BOUND, tol: float = DEFAULT_TOL) -> CoxeterDescriptor:
    w = coxeter_versor(simple, order)
    h = coxeter_number(w, bound, tol)
    plane = coxeter_plane(w, h, tol)
    descriptor = CoxeterDescriptor(
        versor=w,
        h=h,
        plane=plane,
        normal=plane_normal(plane, tol),
        exponents=exponents(w, h),
        matrix=orthogonal_matrix(w),
        power=versor_power(w, h).cleaned(tol),
        order=tuple(range(len(simple))) if order is None else tuple(order),
    )
    logger.info("✅ Coxeter element: h=%d, exponents=%s", h, descriptor.exponents)
    return descriptor


def plane_is_invariant(descriptor: CoxeterDescriptor, samples: int = 100,
                       seed: int = 0, tol: float = DEFAULT_TOL) -> bool:
    """w maps random in-plane vectors back into the plane"""
    basis = plane_basis(descriptor.plane)
    rng = np.random.default_rng(seed)
    vectors = rng.normal(size=(samples, 2)) @ basis
    images = vectors @ descriptor.matrix.T
    residual = images - (images @ basis.T) @ basis
    return bool(np.max(np.abs(residual), initial=0.0) <= tol)


def is_axis_system_closed(descriptor: CoxeterDescriptor, tol: float = DEFAULT_TOL) -> bool:
    return is_closed(axis_roots(descriptor, tol), tol)
