"""
Chiral, full and binary polyhedral groups as versor groups.

Spin groups are closed from the rotors a_i a_j of all root pairs, Pin groups
from the roots themselves. Elements are kept as coefficient rows and are
deduplicated exactly in sign, so R and -R are different elements and the
double cover stays visible. Realizing a versor group as matrices collapses
+-A onto one orthogonal transformation.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from algebra.multivector import (
    Multivector,
    Signature,
    Versor,
    batch_orthogonal_matrices,
    batch_product,
    row_parities,
    rowwise_product,
)
from coxeter.root_systems import RootSystem
from utils.errors import ClosureOverflowError
from utils.point_set import (
    DEFAULT_HASH_SCALE,
    DEFAULT_TOL,
    PointIndex,
    canonical_order,
    unique_points,
)

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 10_000

EVEN = "even"
MIXED = "mixed"
ROTATION_ONLY = "rotation-only"
FULL = "full"


# ========== DOMAIN TYPES ==========

@dataclass(frozen=True, eq=False)
class VersorGroup:
    """Finite set of unit versors closed under the geometric product"""

    sig: Signature
    elements: np.ndarray = field(repr=False)
    parities: np.ndarray = field(repr=False)
    parity_class: str = EVEN
    source: str = ""

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def versor(self, index: int) -> Versor:
        return Versor(Multivector(self.sig, self.elements[index]), int(self.parities[index]))

    def versors(self) -> List[Versor]:
        return [self.versor(i) for i in range(len(self))]

    def index_of(self, coeffs, tol: float = DEFAULT_TOL) -> np.ndarray:
        return PointIndex(self.elements, tol).index_of(coeffs)

    def identity_index(self, tol: float = DEFAULT_TOL) -> int:
        one = np.zeros(self.sig.size)
        one[0] = 1.0
        return int(self.index_of(one, tol)[0])


@dataclass(frozen=True, eq=False)
class OrthogonalGroup:
    """
    Distinct orthogonal matrices realized by a versor group.
    versor_indices[k] is the first versor that produced matrices[k].
    """

    matrices: np.ndarray = field(repr=False)
    chirality: str = ROTATION_ONLY
    versor_indices: np.ndarray = field(default=None, repr=False)
    source: str = ""

    def __len__(self) -> int:
        return len(self.matrices)

    @property
    def dimension(self) -> int:
        return self.matrices.shape[1]

    @property
    def order(self) -> int:
        return len(self.matrices)


# ========== GENERATION ==========

def close_under_products(seeds: np.ndarray, sig: Signature, tol: float = DEFAULT_TOL,
                         limit: int = DEFAULT_LIMIT,
                         hash_scale: float = DEFAULT_HASH_SCALE) -> np.ndarray:
    """
    Breadth-first closure of a set of versors under the geometric product.
    Each round multiplies the frontier against the full set on both sides.
    Returns rows in canonical (lexicographic, rounded) order.
    """
    elements, _ = unique_points(seeds, tol)
    frontier = elements
    rounds = 0

    while len(frontier):
        rounds += 1
        products = np.vstack([
            batch_product(frontier, elements, sig).reshape(-1, sig.size),
            batch_product(elements, frontier, sig).reshape(-1, sig.size),
        ])
        fresh = products[~PointIndex(elements, tol).contains(products)]
        fresh, _ = unique_points(fresh, tol)

        if len(elements) + len(fresh) > limit:
            raise ClosureOverflowError(
                f"versor closure exceeded {limit} elements; generators do not form a finite group"
            )
        logger.debug("Closure round %d: %d new versors", rounds, len(fresh))
        elements = np.vstack([elements, fresh]) if len(fresh) else elements
        frontier = fresh

    return elements[canonical_order(elements, hash_scale)]


def _root_rows(rs: RootSystem) -> np.ndarray:
    return np.array([v.coeffs for v in rs.root_vectors()])


def generate_spin_group(rs: RootSystem, tol: float = DEFAULT_TOL, limit: int = DEFAULT_LIMIT,
                        hash_scale: float = DEFAULT_HASH_SCALE) -> VersorGroup:
    """Rotors a_i a_j of all root pairs, closed: the binary polyhedral group"""
    roots = _root_rows(rs)
    seeds = batch_product(roots, roots, rs.sig).reshape(-1, rs.sig.size)
    elements = close_under_products(seeds, rs.sig, tol, limit, hash_scale)
    group = VersorGroup(
        sig=rs.sig,
        elements=elements,
        parities=row_parities(elements, rs.sig, tol),
        parity_class=EVEN,
        source=rs.group,
    )
    logger.info("✅ Spin group of %s: %d rotors", rs.group or "?", len(group))
    return group


def generate_pin_group(rs: RootSystem, tol: float = DEFAULT_TOL, limit: int = DEFAULT_LIMIT,
                       hash_scale: float = DEFAULT_HASH_SCALE) -> VersorGroup:
    """Roots closed under the geometric product, odd products included"""
    elements = close_under_products(_root_rows(rs), rs.sig, tol, limit, hash_scale)
    group = VersorGroup(
        sig=rs.sig,
        elements=elements,
        parities=row_parities(elements, rs.sig, tol),
        parity_class=MIXED,
        source=rs.group,
    )
    logger.info("✅ Pin group of %s: %d versors", rs.group or "?", len(group))
    return group


# ========== REALIZATION ==========

def versor_matrices(vg: VersorGroup) -> np.ndarray:
    """Matrix of v -> (-1)^parity reverse(A) v A for every element"""
    return batch_orthogonal_matrices(vg.elements, vg.parities, vg.sig)


def realize_orthogonal(vg: VersorGroup, tol: float = DEFAULT_TOL) -> OrthogonalGroup:
    """Collapse +-A onto distinct orthogonal matrices"""
    matrices = versor_matrices(vg)
    d = vg.sig.dimension
    flat = matrices.reshape(len(matrices), -1)
    unique, cluster = unique_points(flat, tol)

    first = np.full(len(unique), len(flat), dtype=np.int64)
    np.minimum.at(first, cluster, np.arange(len(flat)))
    distinct = unique.reshape(-1, d, d)

    gram = np.einsum("nji,njk->nik", distinct, distinct)
    deviation = np.max(np.abs(gram - np.eye(d)), initial=0.0)
    if deviation > tol:
        raise ValueError(f"realized matrix is not orthogonal (deviation {deviation:.3g})")

    chirality = ROTATION_ONLY if vg.parity_class == EVEN else FULL
    if chirality == ROTATION_ONLY:
        dets = np.linalg.det(distinct)
        if np.any(np.abs(dets - 1.0) > tol):
            raise ValueError("rotor realized a matrix with det != +1")

    logger.info("✅ Realized %s as %d orthogonal matrices", vg.source or "group", len(distinct))
    return OrthogonalGroup(
        matrices=distinct,
        chirality=chirality,
        versor_indices=first,
        source=vg.source,
    )


def odd_decomposition(og: OrthogonalGroup, tol: float = DEFAULT_TOL) -> Dict[str, int]:
    """Rotations, pure reflections (det -1, trace d-2) and rotoinversions"""
    d = og.dimension
    dets = np.linalg.det(og.matrices)
    traces = np.trace(og.matrices, axis1=1, axis2=2)
    rotations = int(np.sum(dets > 0))
    reflections = int(np.sum((dets < 0) & (np.abs(traces - (d - 2)) <= 1e3 * tol)))
    return {
        "rotations": rotations,
        "reflections": reflections,
        "rotoinversions": len(og) - rotations - reflections,
    }


# ========== STRUCTURE ==========

def multiplication_table(vg: VersorGroup, tol: float = DEFAULT_TOL) -> np.ndarray:
    """table[i, j] = index of elements[i] * elements[j], -1 if not in the set"""
    products = batch_product(vg.elements, vg.elements, vg.sig).reshape(-1, vg.sig.size)
    return vg.index_of(products, tol).reshape(len(vg), len(vg))


def order_spectrum(vg: VersorGroup, tol: float = DEFAULT_TOL) -> Dict[int, int]:
    """
    Histogram of element orders: the least k >= 1 with A^k = 1 as a versor
    (so -1 has order 2 even though it acts trivially)
    """
    n = len(vg)
    if n == 0:
        return {}
    one = np.zeros(vg.sig.size)
    one[0] = 1.0

    orders = np.zeros(n, dtype=np.int64)
    power = vg.elements.copy()
    for k in range(1, n + 1):
        done = (orders == 0) & (np.max(np.abs(power - one), axis=1) <= tol)
        orders[done] = k
        if np.all(orders > 0):
            break
        power = rowwise_product(power, vg.elements, vg.sig)

    if np.any(orders == 0):
        missing = np.flatnonzero(orders == 0).tolist()
        raise ValueError(f"elements {missing} have no finite order within {n}")

    values, counts = np.unique(orders, return_counts=True)
    return {int(k): int(c) for k, c in zip(values, counts)}


def center(vg: VersorGroup, tol: float = DEFAULT_TOL) -> List[int]:
    """Indices of elements commuting with every element"""
    left = batch_product(vg.elements, vg.elements, vg.sig)
    right = np.transpose(left, (1, 0, 2))
    commutes = np.max(np.abs(left - right), axis=2) <= tol
    return np.flatnonzero(np.all(commutes, axis=1)).tolist()


def trivial_group(sig: Signature, source: str = "trivial") -> VersorGroup:
    one = np.zeros((1, sig.size))
    one[0, 0] = 1.0
    return VersorGroup(sig=sig, elements=one, parities=np.zeros(1, dtype=np.int64),
                       parity_class=EVEN, source=source)


def restrict_to(vg: VersorGroup, keep: np.ndarray, source: Optional[str] = None) -> VersorGroup:
    """Sub-collection of elements (not necessarily a group)"""
    keep = np.asarray(keep)
    return VersorGroup(sig=vg.sig, elements=vg.elements[keep], parities=vg.parities[keep],
                       parity_class=vg.parity_class, source=source or vg.source)
