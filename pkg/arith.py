"""
Exact Arithmetic Module
Rationals, factorization, continued fractions and Pell-type equations
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple, Union

from sympy import factorint, isprime
from sympy.ntheory.continued_fraction import continued_fraction_periodic
from sympy.ntheory.primetest import is_square as _sympy_is_square
from sympy.solvers.diophantine.diophantine import diop_DN

import config
from errors import InvariantViolation, UndecidedError

logger = logging.getLogger(__name__)

SCREEN_MODULI = (3, 4, 8)


def format_rational(value: Union[int, Fraction]) -> str:
    """Render an exact rational as "p/q", or "p" when q = 1"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Inverse of format_rational"""
    return Fraction(text.strip())


def is_square(n: int) -> bool:
    """Exact perfect-square test; negative numbers are never squares"""
    if n < 0:
        return False
    return bool(_sympy_is_square(n))


def _require_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return value


# ===== FACTORIZATION =====

@dataclass(frozen=True)
class Factorization:
    """Prime factorization as sorted (prime, exponent) pairs"""
    n: int
    primes: Tuple[Tuple[int, int], ...]

    def exponent(self, p: int) -> int:
        for prime, e in self.primes:
            if prime == p:
                return e
        return 0

    def value(self) -> int:
        return math.prod(p ** e for p, e in self.primes)

    def __iter__(self):
        return iter(self.primes)


def factorize(n: int) -> Factorization:
    """
    Exact prime factorization

    Args:
        n: positive integer

    Returns:
        Factorization (empty for n = 1)
    """
    n = _require_int("n", n)
    if n <= 0:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    pairs = tuple(sorted((int(p), int(e)) for p, e in factorint(n).items()))
    result = Factorization(n, pairs)
    if result.value() != n:
        raise InvariantViolation(f"factorization of {n} does not multiply back: {pairs}")
    return result


# ===== CONTINUED FRACTIONS =====

@lru_cache(maxsize=None)
def continued_fraction_sqrt(D: int) -> Tuple[int, Tuple[int, ...]]:
    """
    Periodic continued fraction of sqrt(D)

    Returns:
        (a0, period) with sqrt(D) = [a0; period, period, ...]
    """
    D = _require_int("D", D)
    if D < 2 or is_square(D):
        raise ValueError(f"sqrt({D}) has no periodic expansion: D must be a positive non-square")
    cf = continued_fraction_periodic(0, 1, D)
    a0 = int(cf[0])
    period = tuple(int(a) for a in cf[-1])
    return a0, period


def convergents(D: int, count: int) -> Iterator[Tuple[int, int, int]]:
    """
    Yield the first count convergents p/q of sqrt(D) together with p^2 - D q^2
    """
    a0, period = continued_fraction_sqrt(D)
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    for k in range(count):
        yield p, q, p * p - D * q * q
        a = period[k % len(period)]
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev


# ===== PELL EQUATIONS =====

@dataclass(frozen=True)
class PellSolution:
    """A verified solution of x^2 - D y^2 = N"""
    D: int
    N: int
    x: int
    y: int
    minimal: bool = False

    def __post_init__(self):
        if self.x * self.x - self.D * self.y * self.y != self.N:
            raise InvariantViolation(
                f"({self.x}, {self.y}) does not solve x^2 - {self.D}y^2 = {self.N}"
            )

    def as_tuple(self) -> Tuple[int, int]:
        return self.x, self.y


@lru_cache(maxsize=None)
def pell_fundamental(D: int) -> PellSolution:
    """
    Minimal positive solution of x^2 - D y^2 = 1

    sympy's diop_DN reads it off the integer PQa form of the continued
    fraction of sqrt(D), one period in or two when the period is odd.

    Args:
        D: positive non-square integer

    Returns:
        PellSolution marked minimal
    """
    D = _require_int("D", D)
    if D < 2 or is_square(D):
        raise ValueError(f"pell_fundamental needs a positive non-square D, got {D}")
    solutions = diop_DN(D, 1)
    if not solutions:
        logger.error(f"No unit found for D={D}")
        raise InvariantViolation(f"continued fraction of sqrt({D}) produced no unit")
    x, y = (int(v) for v in solutions[0])
    return PellSolution(D, 1, x, y, minimal=True)


def pell_orbit(solution: PellSolution, count: int) -> List[PellSolution]:
    """
    Successive solutions of x^2 - D y^2 = N obtained from solution by
    repeated multiplication with the fundamental unit
    """
    unit = pell_fundamental(solution.D)
    orbit = [PellSolution(solution.D, solution.N, solution.x, solution.y)]
    x, y = solution.x, solution.y
    for _ in range(count - 1):
        x, y = x * unit.x + solution.D * y * unit.y, x * unit.y + y * unit.x
        orbit.append(PellSolution(solution.D, solution.N, x, y))
    return orbit


@dataclass(frozen=True)
class PellLikeResult:
    """
    Outcome of deciding A x^2 - B y^2 = N

    status is "solvable" or "unsolvable"; obstruction holds the modulus of a
    local obstruction when one was found.
    """
    A: int
    B: int
    N: int
    status: str
    solution: Optional[Tuple[int, int]] = None
    obstruction: Optional[int] = None
    method: str = ""
    moduli_checked: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def solvable(self) -> bool:
        return self.status == "solvable"

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "N": self.N,
            "status": self.status,
            "solution": list(self.solution) if self.solution else None,
            "obstruction_modulus": self.obstruction,
            "method": self.method,
        }


def _screen_moduli(A: int, B: int, N: int) -> List[int]:
    moduli = set(SCREEN_MODULI)
    for value in (A, B, N):
        if value != 0:
            moduli.update(int(p) for p in factorint(abs(value)))
    return sorted(moduli)


def locally_solvable(A: int, B: int, N: int, m: int) -> bool:
    """Does A x^2 - B y^2 = N have a solution modulo m?"""
    if m > 8 and isprime(m):
        return _locally_solvable_prime(A, B, N, m)
    squares = {(x * x) % m for x in range(m)}
    left = {(A * s - N) % m for s in squares}
    right = {(B * t) % m for t in squares}
    return not left.isdisjoint(right)


def _is_residue(value: int, p: int) -> bool:
    """value is a square mod the odd prime p (0 included)"""
    value %= p
    return value == 0 or pow(value, (p - 1) // 2, p) == 1


def _locally_solvable_prime(A: int, B: int, N: int, p: int) -> bool:
    # a nondegenerate binary form over F_p represents every residue
    a, b = A % p, B % p
    if a and b:
        return True
    if not a and not b:
        return N % p == 0
    if b == 0:
        return _is_residue(N * pow(a, -1, p), p)
    return _is_residue(-N * pow(b, -1, p), p)


def _check_solution(A: int, B: int, N: int, x: int, y: int) -> Tuple[int, int]:
    if A * x * x - B * y * y != N:
        raise InvariantViolation(f"({x}, {y}) does not solve {A}x^2 - {B}y^2 = {N}")
    return x, y


def _orbit_walk(X: int, y: int, A: int, unit: PellSolution,
                orbit_bound: int) -> Tuple[Optional[Tuple[int, int]], bool]:
    """
    Walk X + y*sqrt(D) forward along its unit orbit

    Keeps elements with A | X and y != 0. |y| falls then rises along the orbit,
    so once it grows it keeps growing. Residues mod A repeat with a period
    below A^4.

    Returns:
        (least kept (y, X // A) or None, whether the walk settled the class)
    """
    D = unit.D
    start = (X % A, y % A)
    best = None
    residue_hit = False
    previous = None
    step = 0
    while True:
        if X % A == 0:
            residue_hit = True
            if y != 0:
                candidate = (abs(y), abs(X) // A)
                if best is None or candidate < best:
                    best = candidate
        growing = previous is not None and abs(y) > previous
        if growing and best is not None and best[0] <= abs(y):
            return best, True
        if step > 0 and not residue_hit and (X % A, y % A) == start:
            # residues mod A are periodic on the orbit and none was divisible
            return None, True
        if growing and step > orbit_bound:
            return best, False
        previous = abs(y)
        X, y = X * unit.x + D * y * unit.y, X * unit.y + y * unit.x
        step += 1


def _least_class_solution(A: int, B: int, N: int,
                          orbit_bound: int) -> Tuple[Optional[Tuple[int, int]], bool]:
    # X = A x turns A x^2 - B y^2 = N into X^2 - AB y^2 = AN
    D = A * B
    M = A * N
    classes = [(int(X), int(y)) for X, y in diop_DN(D, M)]
    logger.debug(f"X^2 - {D}y^2 = {M}: {len(classes)} solution classes")
    if is_square(D):
        # finitely many solutions, all listed
        kept = [(abs(y), abs(X) // A) for X, y in classes if y != 0 and X % A == 0]
        return (min(kept) if kept else None), True

    unit = pell_fundamental(D)
    best = None
    settled = True
    for X, y in classes:
        # both walks together cover the orbit in both directions
        for start_y in (y, -y):
            found, done = _orbit_walk(X, start_y, A, unit, orbit_bound)
            settled = settled and done
            if found is not None and (best is None or found < best):
                best = found
    if not settled:
        return None, False
    return best, True


def pell_like_solve(A: int, B: int, N: int, orbit_bound: Optional[int] = None) -> PellLikeResult:
    """
    Decide A x^2 - B y^2 = N over the integers

    Modular screening runs first (moduli 3, 4, 8 and every prime dividing
    A, B or N). Without an obstruction the equation is rewritten as
    X^2 - AB y^2 = AN with X = Ax; sympy's diop_DN lists one solution per
    class, and each class is walked along its unit orbit for elements with
    A | X. A walk still unsettled after orbit_bound unit steps raises
    UndecidedError.

    Args:
        A: positive integer
        B: positive integer
        N: nonzero integer
        orbit_bound: most unit steps along one orbit (default config.ORBIT_BOUND)

    Returns:
        PellLikeResult with the solution of least positive y when solvable
    """
    A = _require_int("A", A)
    B = _require_int("B", B)
    N = _require_int("N", N)
    if A <= 0 or B <= 0:
        raise ValueError(f"A and B must be positive, got A={A}, B={B}")
    if N == 0:
        raise ValueError("N must be nonzero")
    if orbit_bound is None:
        orbit_bound = config.ORBIT_BOUND

    moduli = _screen_moduli(A, B, N)
    for m in moduli:
        if not locally_solvable(A, B, N, m):
            logger.debug(f"{A}x^2 - {B}y^2 = {N}: obstructed mod {m}")
            return PellLikeResult(A, B, N, "unsolvable", obstruction=m,
                                  method="modular", moduli_checked=tuple(moduli))

    best, settled = _least_class_solution(A, B, N, orbit_bound)
    if not settled:
        logger.error(f"{A}x^2 - {B}y^2 = {N} undecided after {orbit_bound} orbit steps")
        raise UndecidedError(A, B, N, orbit_bound)
    if best is None:
        return PellLikeResult(A, B, N, "unsolvable", method="diop_DN", moduli_checked=tuple(moduli))
    y, x = best
    x, y = _check_solution(A, B, N, x, y)
    return PellLikeResult(A, B, N, "solvable", solution=(x, y), method="diop_DN",
                          moduli_checked=tuple(moduli))
