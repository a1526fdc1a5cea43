import logging
import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from algebra.multivector import (
    EUCLIDEAN_2D,
    EUCLIDEAN_3D,
    TAU,
    Multivector,
    Signature,
    from_components,
    vectors_to_coefficients,
)
from utils.errors import ClosureOverflowError, NullVectorError, UnknownGroupError
from utils.point_set import DEFAULT_TOL, PointIndex, unique_points

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 10_000

RANK3_GROUPS = ("A1A1A1", "A3", "B3", "H3")

# Expected |roots| for the rank-3 catalog
ROOT_COUNTS: Dict[str, int] = {"A1A1A1": 6, "A3": 12, "B3": 18, "H3": 30}


# ========== GROUP IDS ==========

@dataclass(frozen=True)
class GroupId:
    """Catalog entry: one of A1A1A1, A3, B3, H3 or I2(n)"""

    family: str
    n: Optional[int] = None

    @property
    def label(self) -> str:
        return f"I2({self.n})" if self.family == "I2" else self.family

    @property
    def rank(self) -> int:
        return 2 if self.family == "I2" else 3

    def __str__(self) -> str:
        return self.label


_I2_PATTERN = re.compile(r"^I2\s*(?:[:(]\s*(\d+)\s*\)?)?$", re.IGNORECASE)
_ALIASES = {
    "A1A1A1": "A1A1A1",
    "A1XA1XA1": "A1A1A1",
    "A1^3": "A1A1A1",
    "A3": "A3",
    "D3": "A3",
    "B3": "B3",
    "H3": "H3",
}


def parse_group_id(text: str, n: Optional[int] = None) -> GroupId:
    """
    Parse "H3", "A1A1A1", "I2:5", "I2(7)", "H2" (= I2(5)); for a bare "I2"
    the order comes from ``n``
    """
    token = text.strip().upper().replace(" ", "")
    if token == "H2":
        return GroupId("I2", 5)
    if token in _ALIASES:
        return GroupId(_ALIASES[token])

    match = _I2_PATTERN.match(token)
    if match:
        order = int(match.group(1)) if match.group(1) else n
        if order is None:
            raise UnknownGroupError("I2 needs an order, e.g. I2:5 or --n 5")
        if order < 3:
            raise UnknownGroupError(f"I2({order}) needs n >= 3")
        return GroupId("I2", order)

    raise UnknownGroupError(f"unknown group id {text!r}")


# ========== CATALOG ==========

def _catalog(group: GroupId) -> Tuple[Signature, List[List[float]], List[float]]:
    """Raw simple roots and their conventional lengths"""
    s2 = 1.0 / math.sqrt(2.0)
    if group.family == "I2":
        angle = math.pi / group.n
        return EUCLIDEAN_2D, [[1.0, 0.0], [-math.cos(angle), math.sin(angle)]], [1.0, 1.0]
    if group.family == "A1A1A1":
        return EUCLIDEAN_3D, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], [1.0] * 3
    if group.family == "A3":
        # D3 realisation of A3
        return EUCLIDEAN_3D, [[s2, -s2, 0.0], [0.0, s2, -s2], [0.0, s2, s2]], [1.0] * 3
    if group.family == "B3":
        return (EUCLIDEAN_3D, [[s2, -s2, 0.0], [0.0, s2, -s2], [0.0, 0.0, 1.0]],
                [math.sqrt(2.0), math.sqrt(2.0), 1.0])
    if group.family == "H3":
        return (EUCLIDEAN_3D,
                [[0.0, 1.0, 0.0], [-0.5 * (TAU - 1.0), -0.5, -0.5 * TAU], [0.0, 0.0, 1.0]],
                [1.0] * 3)
    raise UnknownGroupError(f"no catalog entry for {group}")


def simple_roots(group) -> List[Multivector]:
    """Unit simple roots of a catalog group, in catalog order"""
    if isinstance(group, str):
        group = parse_group_id(group)
    sig, rows, _ = _catalog(group)
    rows = np.array(rows, dtype=np.float64)
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    return from_components(rows, sig)


def simple_root_lengths(group) -> List[float]:
    """Conventional (diagram) lengths of the simple roots; B3 has two lengths"""
    if isinstance(group, str):
        group = parse_group_id(group)
    return list(_catalog(group)[2])


# ========== ROOT SYSTEMS ==========

@dataclass(frozen=True, eq=False)
class RootSystem:
    """Deduplicated unit roots closed under mutual reflections"""

    sig: Signature
    simple_roots: List[Multivector]
    roots: np.ndarray = field(repr=False)
    lengths: np.ndarray = field(repr=False)
    simple_lengths: Tuple[float, ...] = ()
    group: str = ""

    @property
    def rank(self) -> int:
        return len(self.simple_roots)

    def __len__(self) -> int:
        return len(self.roots)

    def root_vectors(self) -> List[Multivector]:
        return from_components(self.roots, self.sig)

    def length_classes(self, decimals: int = 9) -> Dict[float, int]:
        """Number of roots per conventional length"""
        values, counts = np.unique(np.round(self.lengths, decimals), return_counts=True)
        return {float(v): int(c) for v, c in zip(values, counts)}

    def cartan_matrix(self) -> np.ndarray:
        return cartan_matrix(self.simple_roots, self.simple_lengths or None)


def _reflection_images(roots: np.ndarray, metric: np.ndarray, tol: float) -> np.ndarray:
    """images[a, b] = reflection of root b in the hyperplane orthogonal to root a"""
    squares = np.sum(roots * roots * metric, axis=1)
    if np.any(np.abs(squares) <= tol):
        raise NullVectorError("root set contains a null vector")
    dots = (roots * metric) @ roots.T
    return roots[None, :, :] - 2.0 * (dots / squares[:, None])[:, :, None] * roots[:, None, :]


def close_under_reflections(simple: Sequence[Multivector],
                            lengths: Optional[Sequence[float]] = None,
                            tol: float = DEFAULT_TOL,
                            limit: int = DEFAULT_LIMIT,
                            group: str = "") -> RootSystem:
    """
    Reflect every known root in every known root until no new root appears.
    Each root carries the conventional length of the simple root whose orbit
    it was found in.
    """
    if not simple:
        raise ValueError("need at least one simple root")
    sig = simple[0].sig
    metric = sig.metric
    roots, _ = unique_points(vectors_to_coefficients(simple), tol)
    simple_lengths = tuple(float(x) for x in (lengths or [1.0] * len(simple)))
    labels = np.arange(len(roots))

    rounds = 0
    while True:
        rounds += 1
        images = _reflection_images(roots, metric, tol)
        n = len(roots)
        candidates = images.reshape(-1, sig.dimension)
        candidate_labels = np.tile(labels, n)

        combined = np.vstack([roots, candidates])
        combined_labels = np.concatenate([labels, candidate_labels])
        unique, cluster = unique_points(combined, tol)

        if len(unique) > limit:
            raise ClosureOverflowError(
                f"root closure exceeded {limit} roots; input does not generate a finite group"
            )
        if len(unique) == n:
            break

        first = np.full(len(unique), len(combined), dtype=np.int64)
        np.minimum.at(first, cluster, np.arange(len(combined)))
        roots, labels = unique, combined_labels[first]

    logger.info("✅ Closed root system %s: %d roots after %d rounds", group or "?", len(roots), rounds)
    return RootSystem(
        sig=sig,
        simple_roots=list(simple),
        roots=roots,
        lengths=np.array([simple_lengths[i] for i in labels]),
        simple_lengths=simple_lengths,
        group=group,
    )


def build_root_system(group, tol: float = DEFAULT_TOL, limit: int = DEFAULT_LIMIT) -> RootSystem:
    """Catalog simple roots closed into the full root system"""
    if isinstance(group, str):
        group = parse_group_id(group)
    return close_under_reflections(
        simple_roots(group), simple_root_lengths(group), tol=tol, limit=limit,
        group=group.label,
    )


def is_closed(roots, tol: float = DEFAULT_TOL, metric: Optional[np.ndarray] = None) -> bool:
    """True when every reflection of a root in another root is again a root"""
    rows = np.atleast_2d(np.asarray(roots, dtype=np.float64))
    if metric is None:
        metric = np.ones(rows.shape[1])
    images = _reflection_images(rows, metric, tol).reshape(-1, rows.shape[1])
    return bool(PointIndex(rows, tol).contains(images).all())


def cartan_matrix(simple: Sequence[Multivector],
                  lengths: Optional[Sequence[float]] = None) -> np.ndarray:
    """
    A_ij = 2 a_i.a_j / a_i.a_i. ``lengths`` rescales the (unit) simple roots
    to their conventional lengths first, which matters only for B3.
    """
    rows = vectors_to_coefficients(simple)
    if lengths is not None:
        rows = rows * np.asarray(lengths, dtype=np.float64)[:, None]
    metric = simple[0].sig.metric
    gram = (rows * metric) @ rows.T
    diagonal = np.diag(gram)
    if np.any(np.abs(diagonal) == 0.0):
        raise NullVectorError("Cartan matrix needs non-null simple roots")
    matrix = 2.0 * gram / diagonal[:, None]
    np.fill_diagonal(matrix, 2.0)
    return matrix
