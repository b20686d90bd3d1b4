"""
Hassett Divisibility Module
Conditions (*), (**), (**'), (***), (***') on the discriminant d of a special
cubic fourfold, their witnesses, enumerators, and the isotropic witness w
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy.ntheory.residue_ntheory import sqrt_mod

import config
from arith import factorize, is_square, pell_like_solve
from errors import InvariantViolation
from lattice import (
    LatticeVector,
    a2_lattice,
    gram_det,
    pairing,
    sublattice_disc,
    tau_gram,
    witness_gram,
)

logger = logging.getLogger(__name__)

CONDITIONS = ("star", "star2", "star2p", "star3", "star3p")

# Coordinates over (lambda_1, lambda_2, tau)
LAMBDA_1 = LatticeVector((1, 0, 0))
LAMBDA_2 = LatticeVector((0, 1, 0))
LAMBDA_DIFF = LAMBDA_2 - LAMBDA_1

# Quadratic residue masks screening the search oracle before the exact root
_SQUARE_MASKS = tuple((m, np.isin(np.arange(m), np.arange(m) ** 2 % m)) for m in (64, 63, 65, 11))


@dataclass(frozen=True)
class Verdict:
    """
    Verdict of one divisibility condition

    witness_n / witness_a carry the witness of a positive verdict;
    obstruction carries the offending prime power of a failed (**)/(**').
    """
    holds: bool
    witness_n: Optional[int] = None
    witness_a: Optional[int] = None
    obstruction: Optional[str] = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "witness_n": self.witness_n,
            "witness_a": self.witness_a,
            "obstruction": self.obstruction,
            "reason": self.reason,
        }


def _require_integer(d: int) -> int:
    if isinstance(d, bool) or not isinstance(d, int):
        raise ValueError(f"d must be an integer, got {d!r}")
    return d


def _require_positive(d: int) -> int:
    d = _require_integer(d)
    if d <= 0:
        raise ValueError(f"d must be positive, got {d}")
    return d


# ===== CONDITION (*) =====

def check_star(d: int) -> bool:
    """d > 6 and d = 0 or 2 (mod 6)"""
    return d > 6 and d % 6 in (0, 2)


# ===== CONDITION (**) =====

def _star2_least_root(d: int) -> Optional[int]:
    """Least n in [0, d) with 2n^2 + 2n + 2 = 0 (mod d), d even"""
    # with d = 2h: n^2 + n + 1 = 0 (mod h), i.e. (2n + 1)^2 = -3 (mod 4h)
    h = d // 2
    roots = sqrt_mod(-3 % (4 * h), 4 * h, all_roots=True) or []
    witnesses = [((int(x) - 1) // 2) % h for x in roots]
    return min(witnesses) if witnesses else None


def _star2_offending_factor(half: int) -> Optional[Tuple[int, int]]:
    """Smallest prime p = 2 (mod 3) dividing d/2, or (3, e) when 9 | d/2"""
    for p, e in factorize(half):
        if p % 3 == 2 or (p == 3 and e >= 2):
            return p, e
    return None


def _format_prime_power(p: int, e: int) -> str:
    return f"{p}^{e}" if e > 1 else str(p)


def check_star2(d: int) -> Verdict:
    """
    Condition (**): d divides 2n^2 + 2n + 2 for some n

    Both displayed forms are evaluated: the least root n in [0, d) of the
    congruence, read off the square roots of -3 mod 2d, and the
    factorization screen on d/2 (no 9, no prime p = 2 (mod 3)). They must
    agree.

    Args:
        d: positive integer

    Returns:
        Verdict with the least witness n, or the offending prime power of d/2
    """
    d = _require_positive(d)
    if d % 2:
        return Verdict(False, reason="d is odd, so d/2 is not an integer")

    witness = _star2_least_root(d)
    offending = _star2_offending_factor(d // 2)
    if (witness is not None) != (offending is None):
        logger.error(f"Forms of (**) disagree at d={d}: n={witness}, offending={offending}")
        raise InvariantViolation(f"residue form and factorization form of (**) disagree at d={d}")

    if witness is not None:
        if (2 * witness * witness + 2 * witness + 2) % d:
            raise InvariantViolation(f"(**) witness n={witness} does not satisfy d={d}")
        return Verdict(True, witness_n=witness, reason=f"{d} divides 2*{witness}^2 + 2*{witness} + 2")
    p, e = offending
    label = _format_prime_power(p, e)
    return Verdict(False, obstruction=label, reason=f"d/2 = {d // 2} is divisible by {label}")


def check_star2_prime(d: int) -> Verdict:
    """
    Condition (**'): in d/2 every prime p = 2 (mod 3) has even exponent

    The prime 3 is unconstrained.
    """
    d = _require_positive(d)
    if d % 2:
        return Verdict(False, reason="d is odd, so d/2 is not an integer")
    for p, e in factorize(d // 2):
        if p % 3 == 2 and e % 2:
            label = _format_prime_power(p, e)
            return Verdict(False, obstruction=label,
                           reason=f"{label} exactly divides d/2 = {d // 2} with odd exponent")
    return Verdict(True, reason=f"primes 2 (mod 3) appear in d/2 = {d // 2} with even exponents")


# ===== CONDITIONS (***) AND (***') =====

def _pell_witness(d: int, coefficient: int, offset: int, divisor: int) -> Optional[Tuple[int, int]]:
    # d a^2 = c n^2 + c n + 2 becomes x^2 - c d a^2 = -3 with x = divisor*n + offset
    result = pell_like_solve(1, coefficient * d, -3)
    if not result.solvable:
        return None
    x, a = result.solution
    if (x - offset) % divisor:
        logger.error(f"Pell solution x={x} for d={d} has the wrong residue")
        raise InvariantViolation(f"x={x} is not {offset} mod {divisor}")
    return (x - offset) // divisor, a


def _search_witness(d: int, coefficient: int, n_max: int) -> Optional[Tuple[int, int]]:
    """
    Least a with coefficient*d*a^2 - 3 a perfect square x^2, within the
    cutoff n <= n_max (a^2 <= (c n_max^2 + c n_max + 2) / d)
    """
    offset = 1 if coefficient == 2 else 3
    divisor = 2 if coefficient == 2 else 6
    a_max = math.isqrt((coefficient * n_max * n_max + coefficient * n_max + 2) // d)
    if a_max < 1:
        return None

    if coefficient * d * a_max * a_max < 2**62:
        a = np.arange(1, a_max + 1, dtype=np.int64)
        t = coefficient * d * a * a - 3
        keep = np.ones(a.size, dtype=bool)
        for m, mask in _SQUARE_MASKS:
            keep &= mask[t % m]
        candidates = (int(v) for v in a[keep])
    else:
        candidates = iter(range(1, a_max + 1))

    for a in candidates:
        t = coefficient * d * a * a - 3
        if not is_square(t):
            continue
        x = math.isqrt(t)
        if (x - offset) % divisor:
            continue
        n = (x - offset) // divisor
        if n <= n_max:
            return n, a
    return None


def search_star3(d: int, n_max: Optional[int] = None) -> Optional[Tuple[int, int]]:
    """Search oracle for (***): (n, a) with d a^2 = 2n^2 + 2n + 2 and n <= n_max, or None"""
    d = _require_positive(d)
    return _search_witness(d, 2, config.SEARCH_N0 if n_max is None else n_max)


def search_star3_prime(d: int, n_max: Optional[int] = None) -> Optional[Tuple[int, int]]:
    """Search oracle for (***'): (n, a) with d a^2 = 6n^2 + 6n + 2 and n <= n_max, or None"""
    d = _require_positive(d)
    return _search_witness(d, 6, config.SEARCH_N0 if n_max is None else n_max)


def check_star3(d: int) -> Verdict:
    """
    Condition (***): d = (2n^2 + 2n + 2) / a^2

    Decided through x^2 - 2d y^2 = -3 with x = 2n + 1, y = a. The witness
    has least a, then least n >= 0.
    """
    d = _require_integer(d)
    if d <= 0:
        return Verdict(False, reason=f"d = {d} is not positive")
    witness = _pell_witness(d, 2, 1, 2)
    if witness is None:
        return Verdict(False, reason=f"x^2 - {2 * d}y^2 = -3 has no integer solution")
    n, a = witness
    if d * a * a != 2 * n * n + 2 * n + 2:
        raise InvariantViolation(f"(***) witness ({n}, {a}) fails for d={d}")
    return Verdict(True, witness_n=n, witness_a=a, reason=f"{d}*{a}^2 = 2*{n}^2 + 2*{n} + 2")


def a2_norm(n: int) -> int:
    """Norm of (n, -n-1) in the A2 root lattice; equals 6n^2 + 6n + 2"""
    return pairing(a2_lattice(), (n, -n - 1), (n, -n - 1))


def check_star3_prime(d: int) -> Verdict:
    """
    Condition (***'): d = (6n^2 + 6n + 2) / a^2

    Decided through x^2 - 6d y^2 = -3 with x = 6n + 3, y = a. The witness
    is cross-checked against the A2 norm of the primitive vector (n, -n-1).
    """
    d = _require_integer(d)
    if d <= 0:
        return Verdict(False, reason=f"d = {d} is not positive")
    witness = _pell_witness(d, 6, 3, 6)
    if witness is None:
        return Verdict(False, reason=f"x^2 - {6 * d}y^2 = -3 has no integer solution")
    n, a = witness
    if d * a * a != 6 * n * n + 6 * n + 2 or d * a * a != a2_norm(n) or math.gcd(n, n + 1) != 1:
        raise InvariantViolation(f"(***') witness ({n}, {a}) fails for d={d}")
    return Verdict(True, witness_n=n, witness_a=a, reason=f"{d}*{a}^2 = 6*{n}^2 + 6*{n} + 2")


_CHECKERS = {
    "star2": check_star2,
    "star2p": check_star2_prime,
    "star3": check_star3,
    "star3p": check_star3_prime,
}


def _holds(condition: str, d: int) -> bool:
    if condition == "star":
        return check_star(d)
    return check_star(d) and _CHECKERS[condition](d).holds


# ===== REPORTS =====

@dataclass(frozen=True)
class BirationalityReport:
    """
    Birational models of the eightfold Z and the Fano variety F for Y in C_d

    moduli_of_sheaves: (**), twisted_moduli: (**'), hilb4: (***'),
    hilb2: (***) as the comparison datum for F
    """
    moduli_of_sheaves: bool
    twisted_moduli: bool
    hilb4: bool
    hilb2: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "moduli_of_sheaves": self.moduli_of_sheaves,
            "twisted_moduli": self.twisted_moduli,
            "hilb4": self.hilb4,
            "hilb2": self.hilb2,
            "note": self.note,
        }


@dataclass(frozen=True)
class ConditionReport:
    d: int
    star: bool
    star2: Verdict
    star2p: Verdict
    star3: Verdict
    star3p: Verdict
    c8_flag: bool = False

    def birationality(self) -> BirationalityReport:
        note = "Y must not contain a plane, i.e. not lie in C_8" if self.c8_flag else ""
        return BirationalityReport(self.star2.holds, self.star2p.holds, self.star3p.holds,
                              self.star3.holds, note)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "conditions": {
                "star": self.star,
                "star2": self.star2.to_dict(),
                "star2p": self.star2p.to_dict(),
                "star3": self.star3.to_dict(),
                "star3p": self.star3p.to_dict(),
            },
            "theorem3": self.birationality().to_dict(),
            "c8": self.c8_flag,
        }


def condition_report(d: int) -> ConditionReport:
    """
    Evaluate every condition for d and re-verify the chain
    (***') => (**) => (**')
    """
    d = _require_positive(d)
    report = ConditionReport(
        d=d,
        star=check_star(d),
        star2=check_star2(d),
        star2p=check_star2_prime(d),
        star3=check_star3(d),
        star3p=check_star3_prime(d),
        c8_flag=(d == 8),
    )
    if report.star3p.holds and not report.star2.holds:
        raise InvariantViolation(f"(***') holds but (**) fails at d={d}")
    if report.star2.holds and not report.star2p.holds:
        raise InvariantViolation(f"(**) holds but (**') fails at d={d}")
    return report


def z_birationality_report(d: int) -> BirationalityReport:
    """Birationality verdicts for Y in C_d, with the C_8 annotation at d = 8"""
    return condition_report(d).birationality()


# ===== ENUMERATION =====

def _enumerate_chunk(condition: str, start: int, end: int) -> List[int]:
    return [d for d in range(start, end) if _holds(condition, d)]


def enumerate_condition(condition: str, max_d: int, threads: Optional[int] = None) -> List[int]:
    """
    All d <= max_d satisfying (*) and the requested condition

    Args:
        condition: one of "star", "star2", "star2p", "star3", "star3p"
        max_d: upper bound, at least 8
        threads: worker processes (default config.THREADS); chunks merge sorted

    Returns:
        sorted list of d
    """
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}, expected one of {', '.join(CONDITIONS)}")
    if max_d < 8:
        raise ValueError(f"max_d must be at least 8, got {max_d}")
    threads = config.THREADS if threads is None else threads
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")

    if threads == 1:
        found = []
        total = max_d - 6
        for i, d in enumerate(range(7, max_d + 1)):
            if i and i % 1000 == 0:
                logger.info(f"Processing d {i}/{total} ({i / total * 100:.1f}%)")
            if _holds(condition, d):
                found.append(d)
        logger.info(f"✓ {condition}: {len(found)} values of d <= {max_d}")
        return found

    chunk = max(1, (max_d - 6 + threads - 1) // threads)
    found = []
    with ProcessPoolExecutor(max_workers=threads) as executor:
        futures = [executor.submit(_enumerate_chunk, condition, start, min(start + chunk, max_d + 1))
                   for start in range(7, max_d + 1, chunk)]
        for future in as_completed(futures):
            found.extend(future.result())
    found.sort()
    logger.info(f"✓ {condition}: {len(found)} values of d <= {max_d} ({threads} workers)")
    return found


def incomparability_witnesses(max_d: int) -> Dict[str, List[int]]:
    """
    Values of d <= max_d separating the conditions: (***) without (***'),
    (***') without (***), and (**) without (***')
    """
    admissible = [d for d in range(7, max_d + 1) if check_star(d)]
    star2 = {d for d in admissible if check_star2(d).holds}
    star3 = {d for d in admissible if check_star3(d).holds}
    star3p = {d for d in admissible if check_star3_prime(d).holds}
    return {
        "star3_not_star3p": sorted(star3 - star3p),
        "star3p_not_star3": sorted(star3p - star3),
        "star2_not_star3p": sorted(star2 - star3p),
    }


# ===== THE ISOTROPIC WITNESS =====

@dataclass(frozen=True)
class WWitness:
    """
    w = (m - n) lambda_1 + (2m - n) lambda_2 + a tau for d = 6k + 2, a = 3m + 1
    """
    d: int
    k: int
    n: int
    a: int
    m: int
    w: Tuple[int, int, int]

    def to_dict(self) -> dict:
        return {"d": self.d, "k": self.k, "n": self.n, "a": self.a, "m": self.m, "w": list(self.w)}


def construct_w(d: int) -> WWitness:
    """
    Build the class w with chi(w, w) = 0 and chi(w, lambda_2 - lambda_1) = 1

    Args:
        d: discriminant satisfying (***')

    Returns:
        WWitness, verified in the lattice <lambda_1, lambda_2, tau>
    """
    verdict = check_star3_prime(d)
    if not verdict.holds:
        raise ValueError(f"d={d} does not satisfy (***'): {verdict.reason}")
    n, a = verdict.witness_n, verdict.witness_a
    if a % 6 != 1:
        logger.error(f"(***') witness a={a} for d={d} is not 1 mod 6")
        raise InvariantViolation(f"a={a} is not 1 (mod 6)")
    if (d - 2) % 6:
        raise InvariantViolation(f"d={d} satisfies (***') but is not 2 (mod 6)")

    k = (d - 2) // 6
    m = (a - 1) // 3
    w = LatticeVector((m - n, 2 * m - n, a))
    L = tau_gram(k)
    if pairing(L, w, w) != 0 or pairing(L, w, LAMBDA_DIFF) != 1:
        logger.error(f"w={w.to_list()} fails its pairing identities for d={d}")
        raise InvariantViolation(f"w={w.to_list()} is not an isotropic partner of lambda_2 - lambda_1")
    return WWitness(d, k, n, a, m, w.coefficients)


@dataclass(frozen=True)
class SaturationCheck:
    d: int
    n: int
    a: int
    gram: Tuple[Tuple[int, ...], ...]
    disc: int
    holds: bool

    def to_dict(self) -> dict:
        return {"d": self.d, "n": self.n, "a": self.a, "gram": [list(r) for r in self.gram],
                "disc": self.disc, "holds": self.holds}


def saturation_check(d: int) -> SaturationCheck:
    """
    For a (***') witness (n, a): the lattice <lambda_1, lambda_2, w> with
    chi(w, lambda_1) = n has disc 6n^2 + 6n + 2, and its saturation of
    index a has disc d, so a^2 d = disc
    """
    verdict = check_star3_prime(d)
    if not verdict.holds:
        raise ValueError(f"d={d} does not satisfy (***')")
    n, a = verdict.witness_n, verdict.witness_a
    L = witness_gram(n)
    disc = gram_det(L)
    if disc != 6 * n * n + 6 * n + 2:
        raise InvariantViolation(f"disc of the rank-3 Gram at n={n} is {disc}")

    # the same span inside <lambda_1, lambda_2, tau> has index a
    w = construct_w(d)
    report = sublattice_disc(tau_gram(w.k), [LAMBDA_1, LAMBDA_2, LatticeVector(w.w)],
                             saturation=[LAMBDA_1, LAMBDA_2, LatticeVector((0, 0, 1))])
    holds = a * a * d == disc and report.index_relation_holds
    return SaturationCheck(d, n, a, L.gram, disc, holds)
