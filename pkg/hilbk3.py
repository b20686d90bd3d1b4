"""
Hilbert Scheme Module
Picard lattice of the Hilbert scheme of n points on a K3 surface of degree 2d:
BBF pairing, movable cone case analysis and the effective-divisor obstruction
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from arith import PellLikeResult, is_square, pell_fundamental, pell_like_solve
from errors import InstanceUnsupported, InvariantViolation
from lattice import IntegralLattice, pairing

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HilbContext:
    """
    Hilbert scheme of n points on a K3 with q(H, H) = 2d

    Args:
        n: number of points, at least 2
        d: half-degree of the K3, at least 1
    """
    n: int
    d: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if self.d < 1:
            raise ValueError(f"d must be at least 1, got {self.d}")

    @property
    def gram(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return (2 * self.d, 0), (0, -2 * (self.n - 1))


@dataclass(frozen=True)
class HilbPicClass:
    """x H + y B in the (H, B) basis of Pic"""
    x: int
    y: int

    def __neg__(self) -> "HilbPicClass":
        return HilbPicClass(-self.x, -self.y)

    def __rmul__(self, k: int) -> "HilbPicClass":
        return HilbPicClass(k * self.x, k * self.y)

    def to_list(self):
        return [self.x, self.y]

    def __str__(self):
        def term(c: int, name: str) -> str:
            return name if c == 1 else ("-" + name if c == -1 else f"{c}{name}")

        if self.y == 0:
            return term(self.x, "H") if self.x else "0"
        if self.x == 0:
            return term(self.y, "B")
        sign = "-" if self.y < 0 else "+"
        return f"{term(self.x, 'H')} {sign} {term(abs(self.y), 'B')}"


H = HilbPicClass(1, 0)
B = HilbPicClass(0, 1)


def bbf_gram(ctx: HilbContext) -> IntegralLattice:
    """Rank-2 Picard lattice with Gram [[2d, 0], [0, -2(n-1)]]"""
    return IntegralLattice(ctx.gram)


def bbf_pairing(ctx: HilbContext, u: HilbPicClass, v: HilbPicClass) -> int:
    """q(u, v) = 2d u_x v_x - 2(n-1) u_y v_y"""
    return pairing(bbf_gram(ctx), (u.x, u.y), (v.x, v.y))


# ===== MOVABLE CONE =====

@dataclass(frozen=True)
class MovableConeResult:
    """
    Case analysis of the movable cone

    walls is set only in case c; in cases a and b the classification and
    diagnostics are reported and wall_status is "instance-unsupported".
    """
    ctx: HilbContext
    case: str
    square_value: int
    is_square: bool
    intermediate: Optional[PellLikeResult] = None
    pell: Optional[Tuple[int, int]] = None
    walls: Optional[Tuple[HilbPicClass, HilbPicClass]] = None
    congruence_residue: Optional[int] = None
    congruence_note: str = ""

    @property
    def wall_status(self) -> str:
        return "computed" if self.walls else "instance-unsupported"

    def require_walls(self) -> Tuple[HilbPicClass, HilbPicClass]:
        if self.walls is None:
            raise InstanceUnsupported(
                f"movable cone walls for n={self.ctx.n}, d={self.ctx.d} (case {self.case}) are not computed"
            )
        return self.walls

    def to_dict(self) -> dict:
        return {
            "n": self.ctx.n,
            "d": self.ctx.d,
            "case": self.case,
            "square_test": {"value": self.square_value, "is_square": self.is_square},
            "intermediate": self.intermediate.to_dict() if self.intermediate else None,
            "pell": list(self.pell) if self.pell else None,
            "walls": [w.to_list() for w in self.walls] if self.walls else None,
            "wall_status": self.wall_status,
            "congruence_mod_nminus1": self.congruence_residue,
            "congruence_note": self.congruence_note,
        }


def movable_cone(ctx: HilbContext) -> MovableConeResult:
    """
    Movable cone of the Hilbert scheme

    (a) d(n-1) is a perfect square; (b) (n-1)X^2 - dY^2 = 1 is solvable;
    (c) otherwise the cone is spanned by H and X H - d Y B, where (X, Y)
    is the minimal positive solution of X^2 - d(n-1)Y^2 = 1.

    Args:
        ctx: HilbContext

    Returns:
        MovableConeResult
    """
    e = ctx.n - 1
    value = ctx.d * e
    if is_square(value):
        logger.debug(f"n={ctx.n}, d={ctx.d}: d(n-1) = {value} is a square")
        return MovableConeResult(ctx, "a", value, True)

    intermediate = pell_like_solve(e, ctx.d, 1)
    if intermediate.solvable:
        logger.debug(f"n={ctx.n}, d={ctx.d}: {e}X^2 - {ctx.d}Y^2 = 1 solved by {intermediate.solution}")
        return MovableConeResult(ctx, "b", value, False, intermediate)

    unit = pell_fundamental(value)
    wall = HilbPicClass(unit.x, -ctx.d * unit.y)
    if bbf_pairing(ctx, wall, wall) != 2 * ctx.d:
        logger.error(f"Wall {wall} has square {bbf_pairing(ctx, wall, wall)}, expected {2 * ctx.d}")
        raise InvariantViolation(f"movable cone wall {wall} fails q(W, W) = 2d")

    residue = unit.x % e if e > 1 else None
    if residue is None:
        note = "n - 1 = 1: no congruence condition"
    elif residue in (1, e - 1):
        note = f"X = {unit.x} is {'1' if residue == 1 else '-1'} mod {e}; solutions are not filtered by it"
    else:
        note = f"X = {unit.x} is {residue} mod {e}, not +-1"
    return MovableConeResult(ctx, "c", value, False, intermediate, unit.as_tuple(),
                             (H, wall), residue, note)


# ===== EFFECTIVE DIVISORS MISSING THE CUBIC =====

def pullback_kernel(pullback_H: int, pullback_B: int) -> HilbPicClass:
    """
    Primitive class K = pB H - pH B, spanning the classes with zero pullback
    when j*H = pH h and j*B = pB h
    """
    if pullback_H == 0 and pullback_B == 0:
        raise ValueError("pullback coefficients must not both vanish")
    g = math.gcd(pullback_H, pullback_B)
    return HilbPicClass(pullback_B // g, -pullback_H // g)


@dataclass(frozen=True)
class AvoidanceResult:
    """
    Pairings of the zero-pullback class K (and -K) with both movable walls

    contradiction is True when neither K nor -K pairs non-negatively with
    both walls: no effective divisor is disjoint from j(Y).
    """
    kernel: HilbPicClass
    pairings: Tuple[int, int]
    negated_pairings: Tuple[int, int]
    contradiction: bool

    @property
    def verdict(self) -> str:
        if self.contradiction:
            return "no effective divisor avoids j(Y)"
        return "avoidance not excluded"

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_list(),
            "pairings": list(self.pairings),
            "negated_pairings": list(self.negated_pairings),
            "contradiction": self.contradiction,
            "verdict": self.verdict,
        }


def effective_avoidance(ctx: HilbContext, pullback_H: int, pullback_B: int) -> AvoidanceResult:
    """
    Can an effective divisor with zero pullback exist?

    Such a divisor is a multiple of K = pB H - pH B; a movable class pairs
    non-negatively with both walls of the movable cone.

    Raises:
        InstanceUnsupported: outside case c
    """
    walls = movable_cone(ctx).require_walls()
    K = pullback_kernel(pullback_H, pullback_B)
    pairings = tuple(bbf_pairing(ctx, K, w) for w in walls)
    negated = tuple(-p for p in pairings)
    nonnegative = any(all(p >= 0 for p in side) for side in (pairings, negated))
    logger.info(f"K = {K}: pairings {pairings} with walls {walls[0]}, {walls[1]}")
    return AvoidanceResult(K, pairings, negated, not nonnegative)
