"""
Affine-extended point arrays: a seed polytope is translated by t and then
acted on by a finite group, G (S + t). Coinciding images are merged and every
merged point remembers which (group element, seed vertex) pairs produced it.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from algebra.conformal import (
    ConformalContext,
    embed_points,
    extract_points,
    lift_rows,
    translate_rows,
)
from algebra.multivector import CONFORMAL_3D, batch_sandwich
from coxeter.root_systems import RootSystem
from coxeter.versor_groups import OrthogonalGroup, VersorGroup, realize_orthogonal
from utils.errors import SignatureMismatchError
from utils.point_set import DEFAULT_TOL, PointIndex, unique_points

logger = logging.getLogger(__name__)

SEED_GROUP_INDEX = -1


# ========== DOMAIN TYPES ==========

@dataclass(frozen=True, eq=False)
class SeedPolytope:
    name: str
    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        rows = np.asarray(self.vertices, dtype=np.float64)
        if rows.ndim != 2:
            rows = rows.reshape(0, 2) if rows.size == 0 else np.atleast_2d(rows)
        if len(rows) and len(unique_points(rows)[0]) != len(rows):
            raise ValueError(f"seed {self.name!r} has repeated vertices")
        object.__setattr__(self, "vertices", rows)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]


class TranslationSpec(BaseModel):
    """Unit direction and a non-negative length; length 0 is the untranslated seed"""

    direction: List[float]
    length: float = Field(ge=0)

    @field_validator("direction")
    @classmethod
    def _unit_direction(cls, value: List[float]) -> List[float]:
        norm = math.sqrt(sum(x * x for x in value))
        if not value or norm == 0.0 or not math.isfinite(norm):
            raise ValueError("translation direction must be a nonzero finite vector")
        return [x / norm for x in value]

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.direction) * self.length


@dataclass(frozen=True, eq=False)
class PointArray:
    """
    Deduplicated points with provenance. A point is degenerate when more
    than one candidate landed on it.
    """

    points: np.ndarray = field(repr=False)
    provenance: List[List[Tuple[int, int]]] = field(repr=False)
    candidate_count: int = 0

    def __len__(self) -> int:
        return len(self.points)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([len(p) for p in self.provenance], dtype=np.int64)


# ========== SEEDS ==========

def regular_polygon(n: int = 5, radius: float = 1.0) -> SeedPolytope:
    """Vertices (cos 2 pi k / n, sin 2 pi k / n), k = 0 .. n-1"""
    if n < 3:
        raise ValueError("a polygon needs at least 3 vertices")
    angles = 2.0 * math.pi * np.arange(n) / n
    vertices = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    name = "pentagon" if n == 5 else f"polygon:{n}"
    return SeedPolytope(name=name, vertices=vertices)


def root_polytope(rs: RootSystem) -> SeedPolytope:
    return SeedPolytope(name=f"roots:{rs.group}", vertices=rs.roots.copy())


def _translated_seed(seed: SeedPolytope, t: TranslationSpec) -> np.ndarray:
    shift = t.vector
    if shift.shape[0] != seed.dimension:
        raise SignatureMismatchError(
            f"translation has {shift.shape[0]} components, seed has {seed.dimension}"
        )
    return seed.vertices + shift


# ========== ORBITS ==========

def _assemble(candidates: np.ndarray, sources: List[Tuple[int, int]],
              tol: float) -> PointArray:
    points, labels = unique_points(candidates, tol)
    provenance: List[List[Tuple[int, int]]] = [[] for _ in range(len(points))]
    for label, source in zip(labels, sources):
        provenance[label].append(source)
    return PointArray(points=points, provenance=provenance, candidate_count=len(candidates))


def _sources(group_order: int, seed_size: int, include_seed: bool) -> List[Tuple[int, int]]:
    pairs = [(SEED_GROUP_INDEX, k) for k in range(seed_size)] if include_seed else []
    pairs += [(g, k) for g in range(group_order) for k in range(seed_size)]
    return pairs


def affine_orbit(seed: SeedPolytope, group: OrthogonalGroup, t: TranslationSpec,
                 include_seed: bool = False, tol: float = DEFAULT_TOL) -> PointArray:
    """
    Candidates g(v + t) ordered by group element, then seed vertex; with
    include_seed the untranslated vertices come first (group index -1)
    """
    if len(seed) == 0:
        return PointArray(points=np.zeros((0, group.dimension)), provenance=[], candidate_count=0)
    if seed.dimension != group.dimension:
        raise SignatureMismatchError(
            f"seed is {seed.dimension}D but the group acts in {group.dimension}D"
        )

    shifted = _translated_seed(seed, t)
    images = np.einsum("gij,kj->gki", group.matrices, shifted).reshape(-1, seed.dimension)
    candidates = np.vstack([seed.vertices, images]) if include_seed else images

    arr = _assemble(candidates, _sources(len(group), len(seed), include_seed), tol)
    logger.info("✅ Point array: %d points from %d candidates (length %.12g)",
                len(arr), arr.candidate_count, t.length)
    return arr


def affine_orbit_conformal(seed: SeedPolytope, group_versors: VersorGroup, t: TranslationSpec,
                           ctx: ConformalContext, group: Optional[OrthogonalGroup] = None,
                           include_seed: bool = False, tol: float = DEFAULT_TOL) -> PointArray:
    """
    The same array computed in Cl(4,1): embed, translate with T_t, apply each
    distinct group versor as a sandwich, extract. Group element k is the
    versor that realizes matrix k of ``group``, so provenance matches
    affine_orbit.
    """
    if group is None:
        group = realize_orthogonal(group_versors, tol)
    if len(seed) == 0:
        return PointArray(points=np.zeros((0, seed.dimension)), provenance=[], candidate_count=0)
    if seed.dimension != group_versors.sig.dimension:
        raise SignatureMismatchError(
            f"seed is {seed.dimension}D but the versors act in {group_versors.sig.dimension}D"
        )

    d = seed.dimension
    shift = t.vector
    if shift.shape[0] != d:
        raise SignatureMismatchError(f"translation has {shift.shape[0]} components, seed has {d}")

    points = translate_rows(embed_points(seed.vertices, ctx), shift, ctx)
    chosen = group.versor_indices
    versors = lift_rows(group_versors.elements[chosen], group_versors.sig)
    images = batch_sandwich(versors, group_versors.parities[chosen], points, CONFORMAL_3D)
    extracted = extract_points(images.reshape(-1, CONFORMAL_3D.size), ctx, tol)

    if d < 3 and np.max(np.abs(extracted[:, d:]), initial=0.0) > tol:
        raise SignatureMismatchError("conformal images left the seed plane")
    candidates = extracted[:, :d]
    if include_seed:
        candidates = np.vstack([seed.vertices, candidates])

    arr = _assemble(candidates, _sources(len(group), len(seed), include_seed), tol)
    logger.info("✅ Conformal point array: %d points from %d candidates", len(arr), arr.candidate_count)
    return arr


# ========== REPORTS ==========

def radial_shells(points: np.ndarray, tol: float = 1e-6) -> List[Dict]:
    """Points grouped by distance from the origin, innermost first"""
    if len(points) == 0:
        return []
    radii = np.linalg.norm(points, axis=1)
    shells, labels = unique_points(radii.reshape(-1, 1), tol)
    order = np.argsort(shells[:, 0])
    counts = np.bincount(labels, minlength=len(shells))
    return [{"radius": float(shells[i, 0]), "count": int(counts[i])} for i in order]


def degeneracy_report(arr: PointArray) -> Dict:
    multiplicities = arr.multiplicities
    values, counts = np.unique(multiplicities, return_counts=True)
    return {
        "points": len(arr),
        "candidates": arr.candidate_count,
        "degenerate_points": int(np.sum(multiplicities > 1)),
        "multiplicities": {str(int(v)): int(c) for v, c in zip(values, counts)},
        "non_trivial": len(arr) < arr.candidate_count,
        "shells": radial_shells(arr.points),
    }


def is_group_invariant(arr: PointArray, group: OrthogonalGroup, tol: float = DEFAULT_TOL) -> bool:
    """Every group element permutes the point set"""
    if len(arr) == 0:
        return True
    index = PointIndex(arr.points, tol)
    images = np.einsum("gij,kj->gki", group.matrices, arr.points).reshape(-1, arr.points.shape[1])
    return bool(index.contains(images).all())


# ========== SWEEPS ==========

def translation_sweep(seed: SeedPolytope, group: OrthogonalGroup, direction: Sequence[float],
                      lengths: Sequence[float], include_seed: bool = False,
                      tol: float = DEFAULT_TOL, workers: int = 1) -> List[Tuple[float, int]]:
    """(length, cardinality) for each length, in input order"""
    specs = [TranslationSpec(direction=list(direction), length=length) for length in lengths]

    def cardinality(spec: TranslationSpec) -> int:
        return len(affine_orbit(seed, group, spec, include_seed, tol))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(cardinality, specs))
    else:
        counts = [cardinality(spec) for spec in specs]
    return [(float(spec.length), int(count)) for spec, count in zip(specs, counts)]


def distinguished_lengths(sweep: Sequence[Tuple[float, int]], generic: int) -> List[float]:
    """Lengths whose cardinality falls below the generic count |G| |S|"""
    return [length for length, count in sweep if count < generic]
