"""
Dense multivector arithmetic for real Clifford algebras Cl(p, q), p + q <= 5.

Blade convention: a basis blade is a bitmask, bit i set <=> e_{i+1} is a
factor, factors in ascending index order. Coefficient arrays are indexed by
that bitmask, so a Cl(3,0) multivector is stored as

    index: 0  1   2   3    4   5    6    7
    blade: 1  e1  e2  e1e2 e3  e1e3 e2e3 e1e2e3

Basis vector i squares to +1 for i < p and to -1 otherwise.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Union

import numpy as np

from utils.errors import (
    NonUnitVersorError,
    NullVectorError,
    ParityError,
    SignatureError,
    SignatureMismatchError,
)
from utils.point_set import DEFAULT_TOL

logger = logging.getLogger(__name__)

TAU = (1.0 + math.sqrt(5.0)) / 2.0
MAX_DIMENSION = 5

Number = Union[int, float]


# ========== SIGNATURE ==========

@dataclass(frozen=True)
class Signature:
    """Metric signature (p, q) of a real Clifford algebra"""

    p: int
    q: int = 0

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise SignatureError(f"signature ({self.p},{self.q}) has a negative count")
        if self.p + self.q > MAX_DIMENSION:
            raise SignatureError(
                f"signature ({self.p},{self.q}) exceeds dimension {MAX_DIMENSION}"
            )

    @property
    def dimension(self) -> int:
        return self.p + self.q

    @property
    def size(self) -> int:
        """Number of basis blades, 2^(p+q)"""
        return 1 << self.dimension

    @property
    def metric(self) -> np.ndarray:
        return np.array([1.0] * self.p + [-1.0] * self.q)

    def as_list(self) -> List[int]:
        return [self.p, self.q]


EUCLIDEAN_2D = Signature(2, 0)
EUCLIDEAN_3D = Signature(3, 0)
CONFORMAL_3D = Signature(4, 1)


def blade_grade(mask: int) -> int:
    return bin(mask).count("1")


def blade_name(mask: int) -> str:
    if mask == 0:
        return "1"
    return "".join(f"e{i + 1}" for i in range(MAX_DIMENSION) if (mask >> i) & 1)


def blade_product_sign(a: int, b: int, sig: Signature) -> float:
    """
    Sign of the product of blades a and b: (-1)^swaps times the squares of
    the shared basis vectors
    """
    swaps = 0
    shifted = a >> 1
    while shifted:
        swaps += blade_grade(shifted & b)
        shifted >>= 1
    sign = -1.0 if swaps & 1 else 1.0

    common = a & b
    for i in range(sig.dimension):
        if (common >> i) & 1 and i >= sig.p:
            sign = -sign
    return sign


_CAYLEY_CACHE: Dict[Signature, np.ndarray] = {}


def cayley_tensor(sig: Signature) -> np.ndarray:
    """T[i, j, k] = sign when blade_i * blade_j = sign * blade_k, else 0"""
    table = _CAYLEY_CACHE.get(sig)
    if table is None:
        size = sig.size
        table = np.zeros((size, size, size))
        for a in range(size):
            for b in range(size):
                table[a, b, a ^ b] = blade_product_sign(a, b, sig)
        table.setflags(write=False)
        _CAYLEY_CACHE[sig] = table
        logger.debug("Built Cayley table for Cl(%d,%d)", sig.p, sig.q)
    return table


def blade_grades(sig: Signature) -> np.ndarray:
    return np.array([blade_grade(m) for m in range(sig.size)])


def reverse_signs(sig: Signature) -> np.ndarray:
    grades = blade_grades(sig)
    return np.where((grades * (grades - 1) // 2) % 2 == 0, 1.0, -1.0)


def vector_indices(sig: Signature) -> List[int]:
    return [1 << i for i in range(sig.dimension)]


# ========== MULTIVECTOR ==========

@dataclass(frozen=True, eq=False)
class Multivector:
    """Immutable dense multivector over all 2^(p+q) blades"""

    sig: Signature
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.coeffs, dtype=np.float64).reshape(-1)
        if values.shape[0] != self.sig.size:
            raise ValueError(
                f"Cl({self.sig.p},{self.sig.q}) needs {self.sig.size} coefficients, "
                f"got {values.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("multivector coefficients must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "coeffs", values)

    # ----- constructors -----

    @classmethod
    def zero(cls, sig: Signature) -> "Multivector":
        return cls(sig, np.zeros(sig.size))

    @classmethod
    def scalar(cls, sig: Signature, value: Number) -> "Multivector":
        coeffs = np.zeros(sig.size)
        coeffs[0] = value
        return cls(sig, coeffs)

    @classmethod
    def blade(cls, sig: Signature, mask: int, value: Number = 1.0) -> "Multivector":
        coeffs = np.zeros(sig.size)
        coeffs[mask] = value
        return cls(sig, coeffs)

    @classmethod
    def basis_vector(cls, sig: Signature, i: int) -> "Multivector":
        """Basis vector with zero-based index i"""
        if not 0 <= i < sig.dimension:
            raise IndexError(f"basis vector {i} outside Cl({sig.p},{sig.q})")
        return cls.blade(sig, 1 << i)

    @classmethod
    def vector(cls, sig: Signature, components: Sequence[Number]) -> "Multivector":
        comps = np.asarray(components, dtype=np.float64).reshape(-1)
        if comps.shape[0] > sig.dimension:
            raise ValueError(
                f"{comps.shape[0]} components do not fit Cl({sig.p},{sig.q})"
            )
        coeffs = np.zeros(sig.size)
        for i, value in enumerate(comps):
            coeffs[1 << i] = value
        return cls(sig, coeffs)

    @classmethod
    def pseudoscalar(cls, sig: Signature) -> "Multivector":
        return cls.blade(sig, sig.size - 1)

    # ----- arithmetic -----

    def _check(self, other: "Multivector"):
        if self.sig != other.sig:
            raise SignatureMismatchError(
                f"Cl({self.sig.p},{self.sig.q}) vs Cl({other.sig.p},{other.sig.q})"
            )

    def __add__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return Multivector(self.sig, self.coeffs + other.coeffs)
        if isinstance(other, (int, float)):
            return self + Multivector.scalar(self.sig, other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return Multivector(self.sig, self.coeffs - other.coeffs)
        if isinstance(other, (int, float)):
            return self - Multivector.scalar(self.sig, other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float)):
            return Multivector.scalar(self.sig, other) - self
        return NotImplemented

    def __neg__(self):
        return Multivector(self.sig, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        if isinstance(other, (int, float, np.floating)):
            return Multivector(self.sig, self.coeffs * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Multivector(self.sig, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating)):
            if other == 0:
                raise ZeroDivisionError("multivector divided by zero")
            return Multivector(self.sig, self.coeffs / float(other))
        return NotImplemented

    def __invert__(self):
        return reverse(self)

    # ----- inspection -----

    def __getitem__(self, mask: int) -> float:
        return float(self.coeffs[mask])

    @property
    def scalar_part(self) -> float:
        return float(self.coeffs[0])

    def vector_part(self) -> np.ndarray:
        """Grade-1 coefficients as a plain array, e1 first"""
        return self.coeffs[vector_indices(self.sig)].copy()

    def grades(self, tol: float = DEFAULT_TOL) -> List[int]:
        """Grades carrying a coefficient above tol"""
        present = np.abs(self.coeffs) > tol
        return sorted(set(blade_grades(self.sig)[present].tolist()))

    def is_close(self, other: "Multivector", tol: float = DEFAULT_TOL) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)

    def cleaned(self, tol: float = DEFAULT_TOL) -> "Multivector":
        """Zero out coefficients below tol"""
        values = np.where(np.abs(self.coeffs) <= tol, 0.0, self.coeffs)
        return Multivector(self.sig, values + 0.0)

    def __repr__(self) -> str:
        terms = [
            f"{c:+.6g}*{blade_name(m)}" if m else f"{c:+.6g}"
            for m, c in enumerate(self.coeffs) if c != 0.0
        ]
        return f"Multivector(Cl({self.sig.p},{self.sig.q}): {' '.join(terms) or '0'})"

    # ----- serialization -----

    def to_dict(self) -> Dict:
        return {
            "signature": self.sig.as_list(),
            "coeffs": {str(m): float(c) for m, c in enumerate(self.coeffs) if c != 0.0},
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Multivector":
        p, q = data["signature"]
        sig = Signature(int(p), int(q))
        coeffs = np.zeros(sig.size)
        for mask, value in data.get("coeffs", {}).items():
            coeffs[int(mask)] = float(value)
        return cls(sig, coeffs)


# ========== CORE OPERATIONS ==========

def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    a._check(b)
    table = cayley_tensor(a.sig)
    return Multivector(a.sig, np.einsum("i,j,ijk->k", a.coeffs, b.coeffs, table))


def reverse(a: Multivector) -> Multivector:
    return Multivector(a.sig, a.coeffs * reverse_signs(a.sig))


def grade_project(a: Multivector, k: int) -> Multivector:
    """Grade-k part; grades beyond the algebra give zero"""
    return Multivector(a.sig, np.where(blade_grades(a.sig) == k, a.coeffs, 0.0))


def dot(a: Multivector, b: Multivector) -> float:
    """Metric inner product of the grade-1 parts"""
    a._check(b)
    return float(np.sum(a.sig.metric * a.vector_part() * b.vector_part()))


def norm_squared(a: Multivector) -> float:
    """Scalar part of a * reverse(a)"""
    return geometric_product(a, reverse(a)).scalar_part


def inverse(a: Multivector, tol: float = DEFAULT_TOL) -> Multivector:
    """Versor inverse reverse(a) / (a reverse(a)); a must be a versor"""
    product = geometric_product(a, reverse(a))
    s = product.scalar_part
    if abs(s) <= tol:
        raise NullVectorError(f"{a!r} has a null norm and no inverse")
    if np.max(np.abs(product.coeffs[1:]), initial=0.0) > tol * max(1.0, abs(s)):
        raise ValueError(f"{a!r} is not a versor")
    return reverse(a) / s


def reflect(v: Multivector, alpha: Multivector, tol: float = DEFAULT_TOL) -> Multivector:
    """
    Reflect v in the hyperplane orthogonal to alpha: -alpha v alpha^-1.
    For unit alpha this is -alpha v alpha.
    """
    square = dot(alpha, alpha)
    if abs(square) <= tol:
        raise NullVectorError(f"cannot reflect in null vector {alpha!r}")
    return -geometric_product(geometric_product(alpha, v), alpha) / square


def reflect_components(v: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Component form v - 2 (alpha.v)/(alpha.alpha) alpha (Euclidean)"""
    v = np.asarray(v, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    return v - 2.0 * np.dot(alpha, v) / np.dot(alpha, alpha) * alpha


def raw_sandwich(x: Multivector, a: Multivector) -> Multivector:
    """reverse(a) x a, no parity sign; callers choose the sign for non-vectors"""
    return geometric_product(geometric_product(reverse(a), x), a)


def lift(a: Multivector, target: Signature) -> Multivector:
    """
    Embed a multivector into a larger algebra whose leading basis vectors
    square the same way (e.g. Cl(3,0) into Cl(4,1))
    """
    source = a.sig
    if source == target:
        return a
    if source.dimension > target.dimension or not np.array_equal(
        source.metric, target.metric[: source.dimension]
    ):
        raise SignatureMismatchError(
            f"Cl({source.p},{source.q}) does not embed in Cl({target.p},{target.q})"
        )
    coeffs = np.zeros(target.size)
    coeffs[: source.size] = a.coeffs
    return Multivector(target, coeffs)


# ========== VERSORS ==========

@dataclass(frozen=True, eq=False)
class Versor:
    """A product of invertible vectors together with its parity (0 even, 1 odd)"""

    mv: Multivector
    parity: int

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ParityError(f"parity must be 0 or 1, got {self.parity}")

    @classmethod
    def from_multivector(cls, mv: Multivector, tol: float = DEFAULT_TOL) -> "Versor":
        odd = blade_grades(mv.sig) % 2 == 1
        has_odd = bool(np.any(np.abs(mv.coeffs[odd]) > tol))
        has_even = bool(np.any(np.abs(mv.coeffs[~odd]) > tol))
        if has_odd and has_even:
            raise ParityError(f"{mv!r} mixes even and odd grades")
        return cls(mv, 1 if has_odd else 0)

    @classmethod
    def from_vectors(cls, vectors: Iterable[Multivector]) -> "Versor":
        vectors = list(vectors)
        if not vectors:
            raise ValueError("a versor needs at least one vector")
        product = vectors[0]
        for v in vectors[1:]:
            product = geometric_product(product, v)
        return cls(product, len(vectors) % 2)

    @classmethod
    def identity(cls, sig: Signature) -> "Versor":
        return cls(Multivector.scalar(sig, 1.0), 0)

    @property
    def sig(self) -> Signature:
        return self.mv.sig

    @property
    def sign(self) -> float:
        return -1.0 if self.parity else 1.0

    def is_unit(self, tol: float = DEFAULT_TOL) -> bool:
        product = geometric_product(self.mv, reverse(self.mv))
        residual = product.coeffs.copy()
        residual[0] = abs(residual[0]) - 1.0
        return bool(np.max(np.abs(residual)) <= tol)

    def __mul__(self, other: "Versor") -> "Versor":
        if not isinstance(other, Versor):
            return NotImplemented
        return Versor(geometric_product(self.mv, other.mv), (self.parity + other.parity) % 2)


def sandwich(v: Multivector, a: Versor, tol: float = DEFAULT_TOL) -> Multivector:
    """
    Orthogonal action v -> (-1)^parity reverse(A) v A of a unit versor.
    The parity sign is the vector convention; for other grades use raw_sandwich.
    """
    if not a.is_unit(tol):
        raise NonUnitVersorError(f"{a.mv!r} is not a unit versor")
    return raw_sandwich(v, a.mv) * a.sign


def orthogonal_matrix(a: Versor) -> np.ndarray:
    """
    Matrix of the sandwich action on grade-1 coefficients: column i holds
    the image of e_{i+1}
    """
    sig = a.sig
    columns = [
        raw_sandwich(Multivector.basis_vector(sig, i), a.mv).vector_part() * a.sign
        for i in range(sig.dimension)
    ]
    return np.column_stack(columns)


# ========== BATCHED COEFFICIENT ARITHMETIC ==========

def batch_product(left: np.ndarray, right: np.ndarray, sig: Signature) -> np.ndarray:
    """All pairwise products: out[i, j] = left[i] * right[j]"""
    return np.einsum("ni,mj,ijk->nmk", left, right, cayley_tensor(sig), optimize=True)


def rowwise_product(left: np.ndarray, right: np.ndarray, sig: Signature) -> np.ndarray:
    """Row-by-row products: out[i] = left[i] * right[i]"""
    return np.einsum("ni,nj,ijk->nk", left, right, cayley_tensor(sig), optimize=True)


def batch_reverse(coeffs: np.ndarray, sig: Signature) -> np.ndarray:
    return np.asarray(coeffs) * reverse_signs(sig)


def odd_mask(sig: Signature) -> np.ndarray:
    return blade_grades(sig) % 2 == 1


def row_parities(coeffs: np.ndarray, sig: Signature, tol: float = DEFAULT_TOL) -> np.ndarray:
    """0 for rows with only even blades, 1 for rows with only odd blades"""
    odd = odd_mask(sig)
    rows = np.atleast_2d(coeffs)
    has_odd = np.any(np.abs(rows[:, odd]) > tol, axis=1)
    has_even = np.any(np.abs(rows[:, ~odd]) > tol, axis=1)
    mixed = np.flatnonzero(has_odd & has_even)
    if len(mixed):
        raise ParityError(f"rows {mixed.tolist()} mix even and odd grades", witnesses=mixed.tolist())
    return has_odd.astype(np.int64)


def batch_orthogonal_matrices(coeffs: np.ndarray, parities: np.ndarray,
                              sig: Signature) -> np.ndarray:
    """Stack of sandwich-action matrices, shape (n, d, d)"""
    rows = np.atleast_2d(coeffs)
    d = sig.dimension
    table = cayley_tensor(sig)
    reversed_rows = batch_reverse(rows, sig)
    basis = np.zeros((d, sig.size))
    for i in range(d):
        basis[i, 1 << i] = 1.0
    # reverse(A) e_i A for every A and i -> (n, d, size)
    left = np.einsum("ni,bj,ijk->nbk", reversed_rows, basis, table, optimize=True)
    images = np.einsum("nbi,nj,ijk->nbk", left, rows, table, optimize=True)
    vectors = images[:, :, vector_indices(sig)]
    signs = np.where(np.asarray(parities) == 1, -1.0, 1.0)
    # vectors[n, i, :] is the image of e_i; transpose so it becomes column i
    return np.transpose(vectors, (0, 2, 1)) * signs[:, None, None]


def as_multivectors(coeffs: np.ndarray, sig: Signature) -> List[Multivector]:
    return [Multivector(sig, row) for row in np.atleast_2d(coeffs)]


def vectors_to_coefficients(vectors: Sequence[Multivector]) -> np.ndarray:
    """Stack grade-1 parts of multivectors into an (n, d) array"""
    return np.array([v.vector_part() for v in vectors])


def from_components(rows: np.ndarray, sig: Signature) -> List[Multivector]:
    return [Multivector.vector(sig, row) for row in np.atleast_2d(rows)]


def batch_sandwich(versors: np.ndarray, parities: np.ndarray, points: np.ndarray,
                   sig: Signature) -> np.ndarray:
    """out[g, k] = (-1)^parity_g reverse(A_g) X_k A_g for every versor and point"""
    table = cayley_tensor(sig)
    rows = np.atleast_2d(versors)
    left = np.einsum("gi,kj,ijl->gkl", batch_reverse(rows, sig), np.atleast_2d(points),
                     table, optimize=True)
    images = np.einsum("gki,gj,ijl->gkl", left, rows, table, optimize=True)
    signs = np.where(np.asarray(parities) == 1, -1.0, 1.0)
    return images * signs[:, None, None]


def unit(v: Multivector, tol: float = DEFAULT_TOL) -> Multivector:
    """Normalize a vector with nonzero metric square"""
    square = dot(v, v)
    if abs(square) <= tol:
        raise NullVectorError(f"cannot normalize null vector {v!r}")
    return v / math.sqrt(abs(square))


def outer_product_2(u: Multivector, v: Multivector) -> Multivector:
    """u ^ v for vectors u, v"""
    return grade_project(geometric_product(u, v), 2)
