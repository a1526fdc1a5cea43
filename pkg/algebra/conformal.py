"""
Conformal layer over Cl(4,1).

Basis order is e1, e2, e3, e, ebar with e^2 = +1 and ebar^2 = -1, so e is
bit 3 and ebar is bit 4 of a blade mask. n = e + ebar and nbar = e - ebar
are null with n . nbar = 2. A Euclidean point x embeds as

    F(x) = x^2 n + 2 lam x - lam^2 nbar

and is recovered from any nonzero multiple of F(x).
"""
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from algebra.multivector import (
    CONFORMAL_3D,
    DEFAULT_TOL,
    Multivector,
    Versor,
    batch_product,
    batch_sandwich,
    cayley_tensor,
    dot,
    geometric_product,
    lift,
    raw_sandwich,
    reflect,
)
from utils.errors import (
    ClosureOverflowError,
    NullVectorError,
    PointAtInfinityError,
    SignatureMismatchError,
)
from utils.point_set import PointIndex, unique_points

logger = logging.getLogger(__name__)

E_INDEX = 1 << 3
EBAR_INDEX = 1 << 4
EUCLIDEAN_INDICES = [1, 2, 4]


class ConformalContext(BaseModel):
    """Fundamental length scale and the null basis of Cl(4,1)"""

    model_config = ConfigDict(frozen=True)

    lam: float = Field(default=1.0, gt=0)

    @property
    def sig(self):
        return CONFORMAL_3D

    @property
    def e(self) -> Multivector:
        return Multivector.basis_vector(CONFORMAL_3D, 3)

    @property
    def ebar(self) -> Multivector:
        return Multivector.basis_vector(CONFORMAL_3D, 4)

    @property
    def n(self) -> Multivector:
        return self.e + self.ebar

    @property
    def nbar(self) -> Multivector:
        return self.e - self.ebar


@dataclass(frozen=True, eq=False)
class ConformalPoint:
    """Grade-1 null vector of Cl(4,1) representing a Euclidean point"""

    X: Multivector

    def is_null(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(dot(self.X, self.X)) <= tol

    def to_dict(self) -> dict:
        return self.X.to_dict()


def _euclidean(x) -> np.ndarray:
    comps = np.asarray(x, dtype=np.float64).reshape(-1)
    if comps.shape[0] > 3:
        raise SignatureMismatchError(f"{comps.shape[0]} components do not fit a 3D point")
    return np.pad(comps, (0, 3 - comps.shape[0]))


def _coefficients(point) -> Multivector:
    mv = point.X if isinstance(point, ConformalPoint) else point
    if mv.sig != CONFORMAL_3D:
        raise SignatureMismatchError(f"Cl({mv.sig.p},{mv.sig.q}) is not the conformal algebra")
    return mv


# ========== EMBEDDING ==========

def embed_points(points, ctx: ConformalContext) -> np.ndarray:
    """(k, <=3) Euclidean rows -> (k, 32) coefficient rows of F(x)"""
    rows = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if rows.shape[1] > 3:
        raise SignatureMismatchError(f"{rows.shape[1]} components do not fit a 3D point")
    rows = np.pad(rows, ((0, 0), (0, 3 - rows.shape[1])))
    squares = np.sum(rows * rows, axis=1)
    lam = ctx.lam
    out = np.zeros((len(rows), CONFORMAL_3D.size))
    out[:, EUCLIDEAN_INDICES] = 2.0 * lam * rows
    out[:, E_INDEX] = squares - lam * lam
    out[:, EBAR_INDEX] = squares + lam * lam
    return out


def embed(x, ctx: ConformalContext) -> ConformalPoint:
    return ConformalPoint(Multivector(CONFORMAL_3D, embed_points(_euclidean(x), ctx)[0]))


def extract_points(coeffs: np.ndarray, ctx: ConformalContext, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    (k, 32) null rows -> (k, 3) Euclidean rows. Each ray is rescaled so its
    nbar coefficient is -lam^2. A row counts as the point at infinity when
    its nbar coefficient is below ``tol`` relative to its largest coefficient.
    """
    rows = np.atleast_2d(coeffs)
    nbar_part = (rows[:, E_INDEX] - rows[:, EBAR_INDEX]) / 2.0
    magnitude = np.max(np.abs(rows), axis=1)
    at_infinity = np.flatnonzero(np.abs(nbar_part) <= tol * magnitude)
    if len(at_infinity):
        raise PointAtInfinityError(
            f"rows {at_infinity.tolist()} have X . n = 0", witnesses=at_infinity.tolist()
        )
    scale = -ctx.lam ** 2 / nbar_part
    return rows[:, EUCLIDEAN_INDICES] * (scale / (2.0 * ctx.lam))[:, None]


def extract(point, ctx: ConformalContext, tol: float = DEFAULT_TOL) -> np.ndarray:
    return extract_points(_coefficients(point).coeffs, ctx, tol)[0]


# ========== TRANSFORMATIONS ==========

def mirror(alpha) -> Multivector:
    """A 3D mirror vector as a grade-1 element of Cl(4,1) with no e, ebar part"""
    if isinstance(alpha, Multivector):
        return lift(alpha, CONFORMAL_3D)
    return Multivector.vector(CONFORMAL_3D, _euclidean(alpha))


def conformal_reflect(point, alpha, ctx: ConformalContext, tol: float = DEFAULT_TOL) -> ConformalPoint:
    """-alpha^-1 X alpha"""
    return ConformalPoint(reflect(_coefficients(point), mirror(alpha), tol))


def translation_rotor(a, ctx: ConformalContext) -> Versor:
    """T_a = 1 + n a / (2 lam); the series stops because (n a)^2 = 0"""
    na = geometric_product(ctx.n, Multivector.vector(CONFORMAL_3D, _euclidean(a)))
    return Versor(na / (2.0 * ctx.lam) + 1.0, 0)


def apply_translation(point, a, ctx: ConformalContext) -> ConformalPoint:
    """T_a X reverse(T_a), which sends F(x) to F(x + a)"""
    rotor = translation_rotor(a, ctx)
    return ConformalPoint(raw_sandwich(_coefficients(point), ~rotor.mv))


def apply_versor(point, versor: Versor, ctx: ConformalContext) -> ConformalPoint:
    """(-1)^parity reverse(A) X A for a Euclidean versor A lifted into Cl(4,1)"""
    lifted = lift(versor.mv, CONFORMAL_3D)
    return ConformalPoint(raw_sandwich(_coefficients(point), lifted) * versor.sign)


def lift_rows(coeffs: np.ndarray, sig) -> np.ndarray:
    """Coefficient rows of a Euclidean subalgebra padded into Cl(4,1)"""
    rows = np.atleast_2d(coeffs)
    if sig.q or sig.dimension > 3:
        raise SignatureMismatchError(f"Cl({sig.p},{sig.q}) does not embed as a Euclidean subalgebra")
    out = np.zeros((len(rows), CONFORMAL_3D.size))
    out[:, : sig.size] = rows
    return out


def translate_rows(coeffs: np.ndarray, a, ctx: ConformalContext) -> np.ndarray:
    """Batched T_a X reverse(T_a)"""
    rotor = translation_rotor(a, ctx).mv
    return batch_sandwich((~rotor).coeffs, np.zeros(1, dtype=np.int64), coeffs, CONFORMAL_3D)[0]


def vector_rows(points) -> np.ndarray:
    """(k, <=3) Euclidean rows as grade-1 coefficient rows of Cl(4,1)"""
    rows = np.atleast_2d(np.asarray(points, dtype=np.float64))
    out = np.zeros((len(rows), CONFORMAL_3D.size))
    out[:, EUCLIDEAN_INDICES[: rows.shape[1]]] = rows
    return out


def conformal_root_closure(simple: Sequence, ctx: ConformalContext, tol: float = DEFAULT_TOL,
                           limit: int = 10_000) -> np.ndarray:
    """
    Close Euclidean simple roots under reflection with every step done in
    Cl(4,1): roots are embedded as points F(a), reflected in the roots found
    so far as mirrors, and extracted again
    """
    roots = np.array([
        _euclidean(s.vector_part() if isinstance(s, Multivector) else s) for s in simple
    ])
    table = cayley_tensor(CONFORMAL_3D)

    while True:
        squares = np.sum(roots * roots, axis=1)
        if np.any(squares <= tol):
            raise NullVectorError("root set contains a null vector")
        mirrors = vector_rows(roots)
        left = batch_product(mirrors, embed_points(roots, ctx), CONFORMAL_3D)
        images = -np.einsum("mki,mj,ijl->mkl", left, mirrors, table, optimize=True)
        images = images / squares[:, None, None]
        found = extract_points(images.reshape(-1, CONFORMAL_3D.size), ctx, tol)

        fresh = found[~PointIndex(roots, tol).contains(found)]
        if len(fresh) == 0:
            break
        fresh, _ = unique_points(fresh, tol)
        roots = np.vstack([roots, fresh])
        if len(roots) > limit:
            raise ClosureOverflowError(f"conformal root closure exceeded {limit} roots")

    logger.info("✅ Conformal root closure: %d roots", len(roots))
    return roots
