"""
Discrete spinor groups read as point sets in 4D Euclidean space.

An even Cl(3,0) multivector psi = w + x e2e3 + y e3e1 + z e1e2 is the vector
(w, x, y, z); psi * reverse(psi) is then its squared length. The binary
polyhedral groups Q, 2T, 2O and 2I become the root systems A1^4, D4, F4 and H4.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from algebra.multivector import EUCLIDEAN_2D, EUCLIDEAN_3D, Multivector, Versor, odd_mask
from coxeter.versor_groups import EVEN, VersorGroup
from utils.errors import InductionError, ParityError, SignatureMismatchError
from utils.point_set import DEFAULT_TOL, PointIndex

logger = logging.getLogger(__name__)

# Coefficient index and sign for (1, e2e3, e3e1, e1e2); e3e1 is stored as -e1e3
SPINOR_AXES: Tuple[Tuple[int, float], ...] = ((0, 1.0), (6, 1.0), (5, -1.0), (3, 1.0))

INDUCED_LABELS: Dict[int, str] = {8: "A1^4", 24: "D4", 48: "F4", 120: "H4"}


@dataclass(frozen=True, eq=False)
class RootSystem4:
    """
    Root system read off a spinor group. Rows have 4 components, or 2 for
    the experimental planar construction.
    """

    label: str
    roots: np.ndarray = field(repr=False)
    source: str = ""

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def dimension(self) -> int:
        return self.roots.shape[1]


# ========== SPINORS AS VECTORS ==========

def _even_rows(coeffs: np.ndarray, sig, tol: float) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(coeffs, dtype=np.float64))
    odd = np.flatnonzero(np.any(np.abs(rows[:, odd_mask(sig)]) > tol, axis=1))
    if len(odd):
        raise ParityError(f"spinors {odd.tolist()} carry odd-grade content",
                          witnesses=odd.tolist())
    return rows


def spinors_to_4d(coeffs: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """(n, 8) even Cl(3,0) coefficient rows -> (n, 4) vectors (w, x, y, z)"""
    rows = _even_rows(coeffs, EUCLIDEAN_3D, tol)
    return np.column_stack([sign * rows[:, index] for index, sign in SPINOR_AXES])


def spinor_to_4d(psi, tol: float = DEFAULT_TOL) -> np.ndarray:
    if isinstance(psi, Versor):
        psi = psi.mv
    if psi.sig != EUCLIDEAN_3D:
        raise SignatureMismatchError(
            f"spinor lives in Cl({psi.sig.p},{psi.sig.q}); expected Cl(3,0)"
        )
    return spinors_to_4d(psi.coeffs, tol)[0]


def vector4_to_spinor(v) -> Multivector:
    """Inverse of spinor_to_4d"""
    coeffs = np.zeros(EUCLIDEAN_3D.size)
    for value, (index, sign) in zip(np.asarray(v, dtype=np.float64), SPINOR_AXES):
        coeffs[index] = sign * value
    return Multivector(EUCLIDEAN_3D, coeffs)


def reflect4(v, alpha) -> np.ndarray:
    """v - 2 (alpha.v) alpha for a unit 4D alpha"""
    v = np.asarray(v, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    return v - 2.0 * np.dot(alpha, v) * alpha


# ========== CLOSURE ==========

def closure_failures(roots: np.ndarray, tol: float = DEFAULT_TOL,
                     max_witnesses: int = 10) -> List[Tuple[int, int]]:
    """
    Ordered pairs (a, b) whose reflection of root b in root a leaves the set.
    Every pair is checked.
    """
    rows = np.atleast_2d(np.asarray(roots, dtype=np.float64))
    n, d = rows.shape
    dots = rows @ rows.T
    squares = np.diag(dots)
    images = rows[None, :, :] - 2.0 * (dots / squares[:, None])[:, :, None] * rows[:, None, :]
    found = PointIndex(rows, tol).index_of(images.reshape(-1, d)).reshape(n, n)
    return [(int(a), int(b)) for a, b in np.argwhere(found < 0)[:max_witnesses]]


def is_root_system4(roots: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Unit rows, closed under negation and under every mutual reflection"""
    rows = np.atleast_2d(np.asarray(roots, dtype=np.float64))
    if len(rows) == 0:
        return False
    if np.max(np.abs(np.linalg.norm(rows, axis=1) - 1.0)) > tol:
        return False
    if not PointIndex(rows, tol).contains(-rows).all():
        return False
    return not closure_failures(rows, tol, max_witnesses=1)


def induce_root_system(vg: VersorGroup, tol: float = DEFAULT_TOL) -> RootSystem4:
    """Map every spinor of a binary polyhedral group to 4D and verify closure"""
    if vg.parity_class != EVEN:
        raise InductionError("induction needs an even (spin) group")
    if vg.sig != EUCLIDEAN_3D:
        raise InductionError(f"induction needs Cl(3,0) spinors, got Cl({vg.sig.p},{vg.sig.q})")

    label = INDUCED_LABELS.get(len(vg))
    if label is None:
        raise InductionError(f"no rank-4 root system has {len(vg)} roots in this family")

    roots = spinors_to_4d(vg.elements, tol)
    failures = closure_failures(roots, tol)
    if failures:
        raise InductionError(
            f"induced {label} set is not closed under reflection", witnesses=failures
        )

    logger.info("✅ Induced %s from %d spinors of %s", label, len(roots), vg.source or "?")
    return RootSystem4(label=label, roots=roots, source=vg.source)


def induce_planar_root_system(vg: VersorGroup, experimental: bool = False,
                              tol: float = DEFAULT_TOL) -> RootSystem4:
    """
    Planar analogue for I2(n) spin groups: w + x e1e2 -> (w, x).
    The normalization of this construction is not settled, so it stays
    behind an explicit flag.
    """
    if not experimental:
        raise InductionError("planar induction is experimental; pass experimental=True")
    if vg.parity_class != EVEN or vg.sig != EUCLIDEAN_2D:
        raise InductionError("planar induction needs an even Cl(2,0) group")

    rows = _even_rows(vg.elements, EUCLIDEAN_2D, tol)
    roots = np.column_stack([rows[:, 0], rows[:, 3]])
    failures = closure_failures(roots, tol)
    if failures:
        raise InductionError("planar induced set is not closed under reflection",
                             witnesses=failures)

    # 2n unit vectors spaced by pi/n are the roots of I2(n)
    label = f"I2({len(roots) // 2})"
    logger.warning("⚠️ Experimental planar induction: %s from %d spinors", label, len(roots))
    return RootSystem4(label=label, roots=roots, source=vg.source)
