"""
Integral Lattice Module
Gram-matrix lattices, Smith normal form, discriminant groups,
orthogonal complements and isotropic-vector searches
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix

import config
from errors import InvariantViolation

logger = logging.getLogger(__name__)

EULER_WEIGHT = 0   # Euler pairing chi, Hodge structure of weight 0
MUKAI_WEIGHT = 2   # opposite sign, weight 2


def _as_int_rows(matrix) -> Tuple[Tuple[int, ...], ...]:
    rows = []
    for row in matrix:
        converted = []
        for entry in row:
            if isinstance(entry, (bool, float)) or int(entry) != entry:
                raise ValueError(f"lattice entries must be integers, got {entry!r}")
            converted.append(int(entry))
        rows.append(tuple(converted))
    return tuple(rows)


def _object_array(rows) -> np.ndarray:
    # dtype=object keeps Python ints: no overflow, exact products
    array = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            array[i, j] = int(entry)
    return array


# ===== LATTICES AND VECTORS =====

@dataclass(frozen=True)
class LatticeVector:
    """Integer coordinates in a lattice's distinguished basis"""
    coefficients: Tuple[int, ...]

    @classmethod
    def of(cls, values: Iterable[int]) -> "LatticeVector":
        return cls(tuple(int(c) for c in values))

    def __len__(self):
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(tuple(a - b for a, b in zip(self, other)))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coefficients)

    def to_list(self) -> List[int]:
        return list(self.coefficients)


def _vector(v) -> LatticeVector:
    if isinstance(v, LatticeVector):
        return v
    return LatticeVector.of(v)


class IntegralLattice:
    """
    Finite-rank free Z-module with a symmetric integer Gram matrix

    Args:
        gram: square symmetric integer matrix (Euler pairing values)
        weight: EULER_WEIGHT keeps the Gram as given, MUKAI_WEIGHT negates it
    """

    def __init__(self, gram: Sequence[Sequence[int]], weight: int = EULER_WEIGHT):
        rows = _as_int_rows(gram)
        rank = len(rows)
        if any(len(row) != rank for row in rows):
            raise ValueError(f"Gram matrix must be square, got row lengths {[len(r) for r in rows]}")
        for i in range(rank):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"Gram matrix is not symmetric at ({i}, {j})")
        if weight not in (EULER_WEIGHT, MUKAI_WEIGHT):
            raise ValueError(f"weight must be {EULER_WEIGHT} or {MUKAI_WEIGHT}, got {weight}")
        if weight == MUKAI_WEIGHT:
            rows = tuple(tuple(-x for x in row) for row in rows)
        self._gram = rows
        self.weight = weight

    @property
    def rank(self) -> int:
        return len(self._gram)

    @property
    def gram(self) -> Tuple[Tuple[int, ...], ...]:
        return self._gram

    def matrix(self) -> np.ndarray:
        return _object_array(self._gram)

    def basis_vector(self, i: int) -> LatticeVector:
        return LatticeVector(tuple(1 if j == i else 0 for j in range(self.rank)))

    def to_dict(self) -> dict:
        return {"rank": self.rank, "gram": [list(row) for row in self._gram]}

    @classmethod
    def from_dict(cls, data: dict) -> "IntegralLattice":
        lattice = cls(data["gram"])
        if "rank" in data and int(data["rank"]) != lattice.rank:
            raise ValueError(f"declared rank {data['rank']} does not match Gram size {lattice.rank}")
        return lattice

    def __eq__(self, other):
        return isinstance(other, IntegralLattice) and self._gram == other._gram

    def __hash__(self):
        return hash(self._gram)

    def __repr__(self):
        return f"IntegralLattice(rank={self.rank}, gram={[list(r) for r in self._gram]})"


# Named Gram families

def hyperbolic_plane(weight: int = EULER_WEIGHT) -> IntegralLattice:
    return IntegralLattice([[0, 1], [1, 0]], weight=weight)


def a2_lattice() -> IntegralLattice:
    """The A2 root lattice"""
    return IntegralLattice([[2, -1], [-1, 2]])


def lambda_lattice(weight: int = EULER_WEIGHT) -> IntegralLattice:
    """Euler pairing on the span of lambda_1, lambda_2"""
    return IntegralLattice([[-2, 1], [1, -2]], weight=weight)


def witness_gram(n: int, weight: int = EULER_WEIGHT) -> IntegralLattice:
    """Euler pairing on <lambda_1, lambda_2, w> with n = chi(w, lambda_1), chi(w, w) = 0"""
    return IntegralLattice([[-2, 1, n], [1, -2, n + 1], [n, n + 1, 0]], weight=weight)


def tau_gram(k: int, weight: int = EULER_WEIGHT) -> IntegralLattice:
    """Euler pairing on the primitive sublattice <lambda_1, lambda_2, tau> for d = 6k + 2"""
    return IntegralLattice([[-2, 1, 0], [1, -2, 1], [0, 1, 2 * k]], weight=weight)


# ===== PAIRINGS AND DETERMINANTS =====

def pairing(L: IntegralLattice, u, v) -> int:
    """
    Evaluate u^T G v

    Args:
        L: lattice
        u, v: coordinate vectors of length rank

    Returns:
        integer pairing value
    """
    u, v = _vector(u), _vector(v)
    if len(u) != L.rank or len(v) != L.rank:
        raise ValueError(f"vector lengths {len(u)}, {len(v)} do not match lattice rank {L.rank}")
    if L.rank == 0:
        return 0
    G = L.matrix()
    return int(np.array(u.coefficients, dtype=object) @ G @ np.array(v.coefficients, dtype=object))


def gram_det(L: IntegralLattice) -> int:
    """Exact determinant of the Gram matrix (fraction-free Bareiss elimination)"""
    if L.rank == 0:
        return 1
    return int(Matrix(L.gram).det(method="bareiss"))


def is_definite(L: IntegralLattice) -> Optional[str]:
    """
    Sylvester's criterion on leading principal minors

    Returns:
        "positive", "negative" or None
    """
    if L.rank == 0:
        return None
    minors = [int(Matrix([row[:k] for row in L.gram[:k]]).det(method="bareiss"))
              for k in range(1, L.rank + 1)]
    if all(m > 0 for m in minors):
        return "positive"
    if all((-1) ** k * m > 0 for k, m in enumerate(minors, start=1)):
        return "negative"
    return None


# ===== SMITH NORMAL FORM =====

class SmithNormalForm:
    """
    Smith normal form of an integer matrix with unimodular transforms

    The m x n integer matrix M is brought to diagonal form

        D = U M V

    with det U, det V = +-1 and nonnegative diagonal entries, each dividing
    the next.

    Usage
    -----
    snf = SmithNormalForm(M)
    snf.run()
    snf.diagonal, snf.U, snf.V
    """

    def __init__(self, M: Sequence[Sequence[int]]):
        self._M = [list(row) for row in _as_int_rows(M)]
        self._rows = len(self._M)
        self._cols = len(self._M[0]) if self._M else 0
        self._A = [row[:] for row in self._M]
        self._U = [[int(i == j) for j in range(self._rows)] for i in range(self._rows)]
        self._V = [[int(i == j) for j in range(self._cols)] for i in range(self._cols)]
        self._done = False

    def run(self) -> "SmithNormalForm":
        """Calculate SNF and check U M V = D"""
        for t in range(min(self._rows, self._cols)):
            if not self._place_pivot(t):
                break
            self._clear_cross(t)
            if self._A[t][t] < 0:
                self._negate_row(t)
        self._done = True

        D = _object_array(self._U) @ _object_array(self._M) @ _object_array(self._V) \
            if self._rows and self._cols else None
        if D is not None and [[int(x) for x in row] for row in D.tolist()] != self._A:
            raise InvariantViolation("Smith transforms do not reproduce the diagonal form")
        return self

    @property
    def diagonal(self) -> Tuple[int, ...]:
        return tuple(self._A[i][i] for i in range(min(self._rows, self._cols)))

    @property
    def U(self) -> List[List[int]]:
        return [row[:] for row in self._U]

    @property
    def V(self) -> List[List[int]]:
        return [row[:] for row in self._V]

    @property
    def D(self) -> List[List[int]]:
        return [row[:] for row in self._A]

    def _place_pivot(self, t: int) -> bool:
        """Move the smallest nonzero entry of the trailing block to (t, t)"""
        best = None
        for i in range(t, self._rows):
            for j in range(t, self._cols):
                a = self._A[i][j]
                if a != 0 and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
        if best is None:
            return False
        _, i, j = best
        self._swap_rows(t, i)
        self._swap_cols(t, j)
        return True

    def _clear_cross(self, t: int):
        A = self._A
        while True:
            pivot = A[t][t]
            for i in range(t + 1, self._rows):
                q = A[i][t] // pivot
                if q:
                    self._add_row(i, t, -q)
            for j in range(t + 1, self._cols):
                q = A[t][j] // pivot
                if q:
                    self._add_col(j, t, -q)

            # remainders are smaller than the pivot: swap one in and repeat
            row_rest = next((i for i in range(t + 1, self._rows) if A[i][t] != 0), None)
            if row_rest is not None:
                self._swap_rows(t, row_rest)
                continue
            col_rest = next((j for j in range(t + 1, self._cols) if A[t][j] != 0), None)
            if col_rest is not None:
                self._swap_cols(t, col_rest)
                continue

            bad = next(((i, j) for i in range(t + 1, self._rows) for j in range(t + 1, self._cols)
                        if A[i][j] % pivot != 0), None)
            if bad is None:
                return
            self._add_row(t, bad[0], 1)

    def _swap_rows(self, i: int, j: int):
        if i != j:
            self._A[i], self._A[j] = self._A[j], self._A[i]
            self._U[i], self._U[j] = self._U[j], self._U[i]

    def _swap_cols(self, i: int, j: int):
        if i != j:
            for row in self._A:
                row[i], row[j] = row[j], row[i]
            for row in self._V:
                row[i], row[j] = row[j], row[i]

    def _add_row(self, target: int, source: int, factor: int):
        """row_target += factor * row_source"""
        self._A[target] = [a + factor * b for a, b in zip(self._A[target], self._A[source])]
        self._U[target] = [a + factor * b for a, b in zip(self._U[target], self._U[source])]

    def _add_col(self, target: int, source: int, factor: int):
        """col_target += factor * col_source"""
        for row in self._A:
            row[target] += factor * row[source]
        for row in self._V:
            row[target] += factor * row[source]

    def _negate_row(self, i: int):
        self._A[i] = [-a for a in self._A[i]]
        self._U[i] = [-a for a in self._U[i]]


def smith_normal_form(M: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], List[List[int]], List[List[int]]]:
    """
    Smith normal form of an integer matrix

    Returns:
        (diagonal entries, left transform U, right transform V) with U M V diagonal
    """
    snf = SmithNormalForm(M).run()
    return snf.diagonal, snf.U, snf.V


# ===== DISCRIMINANT GROUPS =====

@dataclass(frozen=True)
class DiscriminantGroup:
    """Finite abelian group Z/d1 x ... x Z/dk with d1 | d2 | ... and every di >= 2"""
    divisors: Tuple[int, ...]

    def __post_init__(self):
        for a, b in zip(self.divisors, self.divisors[1:]):
            if b % a:
                raise InvariantViolation(f"elementary divisors {self.divisors} do not form a chain")
        if any(d < 2 for d in self.divisors):
            raise InvariantViolation(f"elementary divisors must be >= 2, got {self.divisors}")

    @property
    def order(self) -> int:
        return math.prod(self.divisors)

    def is_cyclic(self) -> bool:
        return len(self.divisors) <= 1

    def __str__(self):
        if not self.divisors:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.divisors)


def discriminant_group(L: IntegralLattice) -> DiscriminantGroup:
    """Cokernel of the Gram map, read off the Smith normal form"""
    det = gram_det(L)
    if det == 0:
        raise ValueError("discriminant group of a degenerate lattice is not finite")
    diagonal, _, _ = smith_normal_form(L.gram)
    group = DiscriminantGroup(tuple(d for d in diagonal if d > 1))
    if group.order != abs(det):
        raise InvariantViolation(f"|disc group| = {group.order} but |det| = {abs(det)}")
    return group


@dataclass(frozen=True)
class DiscriminantForm:
    """Cyclic discriminant form: generator, its square mod 2Z, and its isometries"""
    order: int
    generator: Tuple[Fraction, ...]
    square: Fraction
    isometries: Tuple[int, ...]

    def is_plus_minus_one(self) -> bool:
        return set(self.isometries) == {1, self.order - 1} or (self.order <= 2 and self.isometries == (1,))


def discriminant_form_isometries(L: IntegralLattice) -> DiscriminantForm:
    """
    Isometries of the discriminant form of an even lattice with cyclic
    discriminant group Z/N

    With U G V = D, the dual lattice is V D^-1 Z^r, so the column of V at the
    nontrivial divisor, divided by N, generates L^dual / L. Multiplication by
    a unit c mod N is an isometry iff (c^2 - 1) q(g) lies in 2Z.
    """
    if any(L.gram[i][i] % 2 for i in range(L.rank)):
        raise ValueError("discriminant forms are only defined here for even lattices")
    group = discriminant_group(L)
    if not group.is_cyclic():
        raise ValueError(f"discriminant group {group} is not cyclic")
    if not group.divisors:
        return DiscriminantForm(1, tuple(Fraction(0) for _ in range(L.rank)), Fraction(0), (1,))

    N = group.divisors[0]
    diagonal, _, V = smith_normal_form(L.gram)
    index = list(diagonal).index(N)
    g = tuple(Fraction(V[row][index], N) for row in range(L.rank))
    q = sum(g[i] * L.gram[i][j] * g[j] for i in range(L.rank) for j in range(L.rank))
    q = q - 2 * (q // 2)
    units = tuple(c for c in range(1, N) if math.gcd(c, N) == 1
                  and ((c * c - 1) * q).denominator == 1 and ((c * c - 1) * q).numerator % 2 == 0)
    return DiscriminantForm(N, g, q, units)


# ===== SUBLATTICES =====

@dataclass(frozen=True)
class Sublattice:
    """A sublattice given by ambient coordinates of its basis"""
    lattice: IntegralLattice
    basis: Tuple[LatticeVector, ...]

    def to_dict(self) -> dict:
        data = self.lattice.to_dict()
        data["basis"] = [v.to_list() for v in self.basis]
        return data


def _induced_gram(L: IntegralLattice, vectors: Sequence[LatticeVector]) -> List[List[int]]:
    return [[pairing(L, u, v) for v in vectors] for u in vectors]


def orthogonal_complement(L: IntegralLattice, v) -> Sublattice:
    """
    Saturated sublattice {u : <u, v> = 0}

    The functional u -> <u, v> is the row (G v)^T; with U (G v)^T V in Smith
    form, the columns of V past the rank span its integral kernel, and they
    are part of a unimodular basis, hence primitive.
    """
    v = _vector(v)
    if len(v) != L.rank:
        raise ValueError(f"vector length {len(v)} does not match lattice rank {L.rank}")
    if v.is_zero():
        raise ValueError("orthogonal complement of the zero vector is not taken")

    functional = [[pairing(L, L.basis_vector(i), v) for i in range(L.rank)]]
    diagonal, _, V = smith_normal_form(functional)
    rank = sum(1 for d in diagonal if d != 0)
    basis = tuple(LatticeVector(tuple(V[row][col] for row in range(L.rank)))
                  for col in range(rank, L.rank))
    for b in basis:
        if pairing(L, b, v) != 0:
            raise InvariantViolation(f"complement basis vector {b.to_list()} pairs nontrivially with v")
    return Sublattice(IntegralLattice(_induced_gram(L, basis)), basis)


@dataclass(frozen=True)
class SublatticeReport:
    gram: Tuple[Tuple[int, ...], ...]
    disc: int
    index: Optional[int] = None
    saturation_disc: Optional[int] = None
    index_relation_holds: Optional[bool] = None


def _euclidean_gram_det(vectors: Sequence[LatticeVector]) -> int:
    B = Matrix([list(v) for v in vectors])
    return int((B * B.T).det(method="bareiss"))


def sublattice_disc(L: IntegralLattice, vectors: Sequence, saturation: Optional[Sequence] = None) -> SublatticeReport:
    """
    Gram matrix and discriminant of the span of vectors

    When saturation (a basis of the saturation) is supplied, the index a is
    measured independently of the form, from Euclidean covolumes, and the
    relation disc(span) = a^2 disc(saturation) is checked.
    """
    vectors = [_vector(v) for v in vectors]
    if any(len(v) != L.rank for v in vectors):
        raise ValueError("vector lengths must match the lattice rank")
    if vectors and Matrix([list(v) for v in vectors]).rank() != len(vectors):
        raise ValueError("input vectors are linearly dependent")

    gram = _induced_gram(L, vectors)
    disc = gram_det(IntegralLattice(gram))
    if saturation is None:
        return SublatticeReport(tuple(tuple(r) for r in gram), disc)

    saturation = [_vector(v) for v in saturation]
    if len(saturation) != len(vectors):
        raise ValueError("saturation must have the same rank as the span")
    ratio = Fraction(_euclidean_gram_det(vectors), _euclidean_gram_det(saturation))
    if ratio.denominator != 1 or math.isqrt(ratio.numerator) ** 2 != ratio.numerator:
        raise ValueError("supplied saturation does not contain the span with finite index")
    index = math.isqrt(ratio.numerator)
    saturation_disc = gram_det(IntegralLattice(_induced_gram(L, saturation)))
    holds = disc == index * index * saturation_disc
    return SublatticeReport(tuple(tuple(r) for r in gram), disc, index, saturation_disc, holds)


# ===== ISOTROPIC SEARCH =====

@dataclass(frozen=True)
class IsotropicSearch:
    """
    Result of looking for w with <w, w> = 0 and <w, v> = 1

    vector is None when nothing was found; certificate then says whether
    absence is proven ("positive-definite", "negative-definite") or only
    observed inside the search box ("bound").
    """
    vector: Optional[LatticeVector]
    certificate: str
    bound: int

    @property
    def found(self) -> bool:
        return self.vector is not None


def _shell(rank: int, radius: int):
    """Integer vectors with sup-norm exactly radius, lexicographic"""
    if radius == 0:
        yield (0,) * rank
        return
    for w in itertools.product(range(-radius, radius + 1), repeat=rank):
        if max(abs(c) for c in w) == radius:
            yield w


def find_isotropic_partner(L: IntegralLattice, v, bound: Optional[int] = None) -> IsotropicSearch:
    """
    Exhaustive search for w with <w, w> = 0 and <w, v> = 1

    Candidates are visited by increasing sup-norm, lexicographically inside
    each shell, so the returned vector is the first such w in that order.
    Definite lattices have no nonzero isotropic vector; the search is then
    skipped and the definiteness is returned as certificate.
    """
    v = _vector(v)
    if len(v) != L.rank:
        raise ValueError(f"vector length {len(v)} does not match lattice rank {L.rank}")
    if bound is None:
        bound = config.ISOTROPIC_BOUND

    definiteness = is_definite(L)
    if definiteness is not None:
        return IsotropicSearch(None, f"{definiteness}-definite", bound)

    functional = [pairing(L, L.basis_vector(i), v) for i in range(L.rank)]
    G = L.gram
    for radius in range(bound + 1):
        for w in _shell(L.rank, radius):
            if sum(c * f for c, f in zip(w, functional)) != 1:
                continue
            norm = sum(w[i] * G[i][j] * w[j] for i in range(L.rank) for j in range(L.rank))
            if norm == 0:
                found = LatticeVector(w)
                if pairing(L, found, found) != 0 or pairing(L, found, v) != 1:
                    raise InvariantViolation(f"isotropic partner {w} failed re-verification")
                logger.debug(f"Isotropic partner {w} found at radius {radius}")
                return IsotropicSearch(found, "found", bound)
    return IsotropicSearch(None, "bound", bound)
