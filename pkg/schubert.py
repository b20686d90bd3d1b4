"""
Schubert Calculus Module
Chow ring of Gr(2,6) x P^5, tautological bundles, Chern characters and the
Grothendieck-Riemann-Roch pushforward of the degeneracy locus Gamma
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple, Union

from sympy import bernoulli

import config
from arith import format_rational
from errors import InvariantViolation

logger = logging.getLogger(__name__)

ROWS = 2
COLS = 4            # Gr(2,6): partitions in a 2 x 4 box
GR_DIM = ROWS * COLS
MAX_H = 5           # h^6 = 0 on P^5
K3_CODIM = 6        # [X] = sigma_1^6

Number = Union[int, Fraction]


@dataclass(frozen=True, order=True)
class Partition2:
    """Schubert index (a, b) with 4 >= a >= b >= 0"""
    a: int
    b: int = 0

    def __post_init__(self):
        if not (COLS >= self.a >= self.b >= 0):
            raise ValueError(f"({self.a}, {self.b}) is not a partition in the {ROWS} x {COLS} box")

    @property
    def degree(self) -> int:
        return self.a + self.b

    def dual(self) -> "Partition2":
        """Poincare dual index"""
        return Partition2(COLS - self.b, COLS - self.a)

    def __str__(self):
        if self.b == 0:
            return f"s{self.a}"
        return f"s{self.a}{self.b}"


def _partitions() -> List[Tuple[int, int]]:
    return [(a, b) for a in range(COLS + 1) for b in range(a + 1)]


# ===== RING STRUCTURE =====

@lru_cache(maxsize=None)
def _pieri(lam: Tuple[int, int], j: int) -> Tuple[Tuple[int, int], ...]:
    """sigma_lam * sigma_j: nu_1 >= lam_1 >= nu_2 >= lam_2, nu_1 <= 4"""
    if j < 0 or j > COLS:
        return ()
    l1, l2 = lam
    total = l1 + l2 + j
    out = []
    for n2 in range(l2, l1 + 1):
        n1 = total - n2
        if l1 <= n1 <= COLS:
            out.append((n1, n2))
    return tuple(out)


@lru_cache(maxsize=None)
def _basis_product(lam: Tuple[int, int], mu: Tuple[int, int]) -> Tuple[Tuple[Tuple[int, int], int], ...]:
    """sigma_lam * sigma_mu via sigma_{m1,m2} = sigma_m1 sigma_m2 - sigma_{m1+1} sigma_{m2-1}"""
    m1, m2 = mu
    result: Dict[Tuple[int, int], int] = {}
    for nu in _pieri(lam, m2):
        for rho in _pieri(nu, m1):
            result[rho] = result.get(rho, 0) + 1
    for nu in _pieri(lam, m2 - 1):
        for rho in _pieri(nu, m1 + 1):
            result[rho] = result.get(rho, 0) - 1
    return tuple(sorted((k, v) for k, v in result.items() if v))


class AmbientClass:
    """
    Exact class on Gr(2,6) x P^5: a finitely supported map
    (Partition2, e) -> rational, e the power of h

    Classes on the K3 surface X are represented by ambient classes; the
    factor [X] = sigma_1^6 is applied only when integrating.
    """
    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Dict] = None):
        cleaned: Dict[Tuple[int, int, int], Fraction] = {}
        for key, coeff in (terms or {}).items():
            if len(key) == 2:
                part, e = key
                key = (part.a, part.b, e)
            a, b, e = key
            Partition2(a, b)
            if e < 0:
                raise ValueError(f"negative power of h: {e}")
            if e > MAX_H:
                continue
            coeff = Fraction(coeff)
            if coeff:
                cleaned[(a, b, e)] = cleaned.get((a, b, e), 0) + coeff
        self._terms = {k: v for k, v in cleaned.items() if v}

    # constructors

    @classmethod
    def scalar(cls, value: Number) -> "AmbientClass":
        return cls({(0, 0, 0): value})

    @classmethod
    def one(cls) -> "AmbientClass":
        return cls.scalar(1)

    @classmethod
    def sigma(cls, a: int, b: int = 0) -> "AmbientClass":
        if a > COLS:
            return cls()
        return cls({(a, b, 0): 1})

    @classmethod
    def h(cls, power: int = 1) -> "AmbientClass":
        return cls({(0, 0, power): 1})

    # inspection

    def terms(self) -> Iterator[Tuple[Partition2, int, Fraction]]:
        for (a, b, e), coeff in sorted(self._terms.items()):
            yield Partition2(a, b), e, coeff

    def coefficient(self, a: int, b: int = 0, e: int = 0) -> Fraction:
        return self._terms.get((a, b, e), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def graded(self, k: int) -> "AmbientClass":
        """Piece of total degree a + b + e = k"""
        return AmbientClass({key: c for key, c in self._terms.items() if sum(key) == k})

    def truncate(self, k: int) -> "AmbientClass":
        return AmbientClass({key: c for key, c in self._terms.items() if sum(key) <= k})

    def constant(self) -> Fraction:
        return self.coefficient(0, 0, 0)

    def is_homogeneous(self, k: int) -> bool:
        return all(sum(key) == k for key in self._terms)

    def max_degree(self) -> int:
        return max((sum(key) for key in self._terms), default=0)

    # arithmetic

    def __add__(self, other) -> "AmbientClass":
        other = _coerce(other)
        terms = dict(self._terms)
        for key, c in other._terms.items():
            terms[key] = terms.get(key, 0) + c
        return AmbientClass(terms)

    __radd__ = __add__

    def __neg__(self) -> "AmbientClass":
        return AmbientClass({key: -c for key, c in self._terms.items()})

    def __sub__(self, other) -> "AmbientClass":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "AmbientClass":
        return _coerce(other) - self

    def __mul__(self, other) -> "AmbientClass":
        if isinstance(other, (int, Fraction)):
            return AmbientClass({key: c * other for key, c in self._terms.items()})
        return multiply(self, other)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> "AmbientClass":
        return self * (Fraction(1) / Fraction(scalar))

    def __pow__(self, k: int) -> "AmbientClass":
        result = AmbientClass.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AmbientClass.scalar(other)
        return isinstance(other, AmbientClass) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for part, e, coeff in self.terms():
            factors = []
            if part.degree:
                factors.append(str(part))
            if e:
                factors.append("h" if e == 1 else f"h^{e}")
            monomial = "*".join(factors)
            if not monomial:
                parts.append(format_rational(coeff))
            elif coeff == 1:
                parts.append(monomial)
            else:
                parts.append(f"{format_rational(coeff)}*{monomial}")
        return " + ".join(parts)


def _coerce(value) -> AmbientClass:
    if isinstance(value, AmbientClass):
        return value
    if isinstance(value, (int, Fraction)):
        return AmbientClass.scalar(value)
    raise TypeError(f"cannot combine AmbientClass with {type(value).__name__}")


def multiply(u: AmbientClass, v: AmbientClass, max_degree: Optional[int] = None) -> AmbientClass:
    """
    Product in the Chow ring of Gr(2,6) x P^5, optionally dropping every
    term of total degree above max_degree
    """
    terms: Dict[Tuple[int, int, int], Fraction] = {}
    for (a1, b1, e1), c1 in u._terms.items():
        d1 = a1 + b1 + e1
        for (a2, b2, e2), c2 in v._terms.items():
            e = e1 + e2
            if e > MAX_H or a1 + b1 + a2 + b2 > GR_DIM:
                continue
            if max_degree is not None and d1 + a2 + b2 + e2 > max_degree:
                continue
            c = c1 * c2
            for (n1, n2), mult in _basis_product((a1, b1), (a2, b2)):
                key = (n1, n2, e)
                terms[key] = terms.get(key, 0) + mult * c
    return AmbientClass(terms)


def gr_product(u: AmbientClass, v: AmbientClass) -> AmbientClass:
    """Pieri/Giambelli product with h^6 = 0"""
    return multiply(u, v)


def gr_pushforward(u: AmbientClass) -> Dict[int, Fraction]:
    """Integrate the Grassmannian factor: coefficient of sigma_{4,4} h^e for each e"""
    return {e: c for (a, b, e), c in sorted(u._terms.items()) if (a, b) == (COLS, COLS)}


def gr_integrate(u: AmbientClass) -> Fraction:
    """Degree of a class on Gr(2,6): the coefficient of sigma_{4,4}"""
    if any(e for (_, _, e) in u._terms):
        raise ValueError("gr_integrate takes a class on the Grassmannian factor only")
    return u.coefficient(COLS, COLS, 0)


@lru_cache(maxsize=1)
def _k3_class() -> AmbientClass:
    return AmbientClass.sigma(1) ** K3_CODIM


def x_integrate(u: AmbientClass) -> Dict[int, Fraction]:
    """
    Integrate over the K3 surface X = Gr(2,6) cut by six Plucker hyperplanes,
    coefficient-wise in h

    Returns:
        {e: integral of the h^e coefficient over X}, zero entries dropped
    """
    surface_part = AmbientClass({k: c for k, c in u._terms.items() if k[0] + k[1] == GR_DIM - K3_CODIM})
    return {e: c for e, c in gr_pushforward(multiply(surface_part, _k3_class())).items() if c}


def x_degree(u: AmbientClass) -> Fraction:
    """Integral over X of the h^0 part"""
    return x_integrate(u).get(0, Fraction(0))


# ===== CHARACTERISTIC CLASSES =====

def _series_degree() -> int:
    return config.SERIES_DEGREE


def exp_class(x: AmbientClass, degree: Optional[int] = None) -> AmbientClass:
    """exp(x) for x without constant term, truncated at total degree"""
    if x.constant():
        raise ValueError("exp_class needs a class without constant term")
    degree = _series_degree() if degree is None else degree
    result = AmbientClass.one()
    power = AmbientClass.one()
    for k in range(1, degree + 1):
        power = multiply(power, x, degree)
        if power.is_zero():
            break
        result = result + power / math.factorial(k)
    return result


@lru_cache(maxsize=None)
def todd_series_coefficients(degree: int) -> Tuple[Fraction, ...]:
    """
    Coefficients a_1..a_degree with log(x / (1 - e^-x)) = sum a_j x^j

    a_1 = 1/2, a_2m = -B_2m / (2m (2m)!), odd a_j = 0 for j > 1.
    """
    coeffs = []
    for j in range(1, degree + 1):
        if j == 1:
            coeffs.append(Fraction(1, 2))
        elif j % 2:
            coeffs.append(Fraction(0))
        else:
            b = bernoulli(j)
            coeffs.append(-Fraction(int(b.p), int(b.q)) / (j * math.factorial(j)))
    return tuple(coeffs)


def _chern_from_ch(ch: AmbientClass, degree: int) -> AmbientClass:
    """Newton's identities: k e_k = sum (-1)^(i-1) e_(k-i) p_i with p_i = i! ch_i"""
    power_sums = [None] + [ch.graded(i) * math.factorial(i) for i in range(1, degree + 1)]
    elementary = [AmbientClass.one()]
    for k in range(1, degree + 1):
        total = AmbientClass()
        for i in range(1, k + 1):
            term = multiply(elementary[k - i], power_sums[i], degree)
            total = total + term if i % 2 else total - term
        elementary.append(total / k)
    result = AmbientClass()
    for e_k in elementary:
        result = result + e_k
    return result.truncate(degree)


def _ch_from_chern(c: AmbientClass, rank: int, degree: int) -> AmbientClass:
    """p_k = sum_{i<k} (-1)^(i-1) e_i p_(k-i) + (-1)^(k-1) k e_k, ch_k = p_k / k!"""
    elementary = [c.graded(k) for k in range(degree + 1)]
    power_sums = [AmbientClass.scalar(rank)]
    for k in range(1, degree + 1):
        total = elementary[k] * k if k % 2 else -(elementary[k] * k)
        for i in range(1, k):
            term = multiply(elementary[i], power_sums[k - i], degree)
            total = total + term if i % 2 else total - term
        power_sums.append(total)
    result = AmbientClass.scalar(rank)
    for k in range(1, degree + 1):
        result = result + power_sums[k] / math.factorial(k)
    return result


class Bundle:
    """
    (Virtual) bundle on Gr(2,6) x P^5, carried by its Chern character

    Direct sum, difference and tensor product act on ch directly; dual and
    the Adams operations act degree-wise, and exterior/symmetric powers come
    from the Adams operations through Newton's identities.

    Args:
        ch: Chern character, truncated at config.SERIES_DEGREE
        name: formal expression, for reports
    """

    def __init__(self, ch: AmbientClass, name: str = "E"):
        self.ch = ch.truncate(_series_degree())
        self.name = name

    @classmethod
    def trivial(cls, rank: int) -> "Bundle":
        return cls(AmbientClass.scalar(rank), f"O^{rank}" if rank != 1 else "O")

    @classmethod
    def line(cls, c1: AmbientClass, name: str = "L") -> "Bundle":
        return cls(exp_class(c1), name)

    @classmethod
    def from_chern(cls, c: AmbientClass, rank: int, name: str = "E") -> "Bundle":
        return cls(_ch_from_chern(c, rank, _series_degree()), name)

    @property
    def rank(self) -> Fraction:
        return self.ch.constant()

    def __add__(self, other: "Bundle") -> "Bundle":
        return Bundle(self.ch + other.ch, f"({self.name} + {other.name})")

    def __sub__(self, other: "Bundle") -> "Bundle":
        return Bundle(self.ch - other.ch, f"({self.name} - {other.name})")

    def __mul__(self, other) -> "Bundle":
        if isinstance(other, int):
            return Bundle(self.ch * other, f"{other}{self.name}")
        return Bundle(multiply(self.ch, other.ch, _series_degree()), f"{self.name} (x) {other.name}")

    __rmul__ = __mul__

    def twist(self, line: "Bundle") -> "Bundle":
        return Bundle(multiply(self.ch, line.ch, _series_degree()), f"{self.name}({line.name})")

    def adams(self, k: int) -> "Bundle":
        return Bundle(AmbientClass({key: c * k ** sum(key) for key, c in self.ch._terms.items()}),
                      f"psi^{k}({self.name})")

    def dual(self) -> "Bundle":
        return Bundle(AmbientClass({key: -c if sum(key) % 2 else c for key, c in self.ch._terms.items()}),
                      f"{self.name}^v")

    def wedge(self, k: int) -> "Bundle":
        """Lambda^k = (1/k) sum (-1)^(i-1) psi^i Lambda^(k-i)"""
        powers = [AmbientClass.one()]
        for j in range(1, k + 1):
            total = AmbientClass()
            for i in range(1, j + 1):
                term = multiply(self.adams(i).ch, powers[j - i], _series_degree())
                total = total + term if i % 2 else total - term
            powers.append(total / j)
        return Bundle(powers[k], f"L^{k}({self.name})")

    def sym(self, k: int) -> "Bundle":
        """Sym^k = (1/k) sum psi^i Sym^(k-i)"""
        powers = [AmbientClass.one()]
        for j in range(1, k + 1):
            total = AmbientClass()
            for i in range(1, j + 1):
                total = total + multiply(self.adams(i).ch, powers[j - i], _series_degree())
            powers.append(total / j)
        return Bundle(powers[k], f"S^{k}({self.name})")

    def det(self) -> "Bundle":
        return Bundle(exp_class(self.ch.graded(1)), f"det({self.name})")

    def chern(self) -> AmbientClass:
        """Total Chern class"""
        return _chern_from_ch(self.ch, _series_degree())

    def chern_class(self, k: int) -> AmbientClass:
        return self.chern().graded(k)

    def todd(self) -> AmbientClass:
        """td = exp(sum a_j j! ch_j), multiplicative on virtual bundles"""
        degree = _series_degree()
        coeffs = todd_series_coefficients(degree)
        exponent = AmbientClass()
        for j in range(1, degree + 1):
            if coeffs[j - 1]:
                exponent = exponent + self.ch.graded(j) * (coeffs[j - 1] * math.factorial(j))
        return exp_class(exponent, degree)

    def __repr__(self):
        return f"Bundle({self.name}, rank={format_rational(self.rank)})"


# ===== TAUTOLOGICAL BUNDLES =====

@lru_cache(maxsize=1)
def quotient_bundle() -> Bundle:
    """Q, rank 4, c(Q) = 1 + s1 + s2 + s3 + s4"""
    c = AmbientClass.one()
    for j in range(1, COLS + 1):
        c = c + AmbientClass.sigma(j)
    return Bundle.from_chern(c, COLS, "Q")


@lru_cache(maxsize=1)
def sub_bundle() -> Bundle:
    """P, rank 2, from 0 -> P -> O^6 -> Q -> 0"""
    return Bundle((Bundle.trivial(ROWS + COLS) - quotient_bundle()).ch, "P")


@lru_cache(maxsize=1)
def hyperplane_line() -> Bundle:
    """O(h) pulled back from P^5"""
    return Bundle.line(AmbientClass.h(), "O(h)")


@lru_cache(maxsize=1)
def plucker_line() -> Bundle:
    """O(s1) on Gr(2,6)"""
    return Bundle.line(AmbientClass.sigma(1), "O(s1)")


GENERATORS = {
    "P": sub_bundle,
    "Q": quotient_bundle,
    "O(h)": hyperplane_line,
    "O(sigma1)": plucker_line,
}


def chern_and_ch(expr: Union[Bundle, str]) -> Tuple[AmbientClass, AmbientClass, AmbientClass]:
    """
    Total Chern class, Chern character and Todd class of a bundle expression

    Args:
        expr: a Bundle, or one of the generator names in GENERATORS
    """
    if isinstance(expr, str):
        if expr not in GENERATORS:
            raise ValueError(f"unknown bundle generator {expr!r}, expected one of {sorted(GENERATORS)}")
        expr = GENERATORS[expr]()
    if not isinstance(expr, Bundle):
        raise ValueError(f"malformed bundle expression: {expr!r}")
    return expr.chern(), expr.ch, expr.todd()


@lru_cache(maxsize=1)
def tangent_bundle_k3() -> Bundle:
    """T_X = T_Gr|_X - N with T_Gr = Hom(P, Q) and N = O(s1)^6"""
    T_gr = sub_bundle().dual() * quotient_bundle()
    normal = K3_CODIM * plucker_line()
    return Bundle((T_gr - normal).ch, "T_X")


# ===== THE DEGENERACY LOCUS GAMMA =====

def _target_bundle() -> Bundle:
    """Q^v(h): the map P -> Q^v(h) drops rank along Gamma"""
    return quotient_bundle().dual().twist(hyperplane_line())


@lru_cache(maxsize=1)
def porteous_gamma() -> AmbientClass:
    """[Gamma] = c_3(Q^v(h) - P), the rank <= 1 locus of P -> Q^v(h)"""
    return (_target_bundle() - sub_bundle()).chern_class(3)


@lru_cache(maxsize=2)
def en_ch_gamma(twist_by_hyperplane: bool = False) -> AmbientClass:
    """
    ch(O_Gamma) from the Eagon-Northcott complex of the dual map F -> P^v,
    F = Q(-h) of rank 4:

        0 -> L^4 F (x) S^2 P (x) L^2 P -> L^3 F (x) P (x) L^2 P
          -> L^2 F (x) L^2 P -> O -> O_Gamma -> 0

    With twist_by_hyperplane, returns ch(O_Gamma) * (1 - ch O(-s1)), the
    restriction to a hyperplane section of X.
    """
    P = sub_bundle()
    F = quotient_bundle().twist(hyperplane_line().dual())
    det_P = P.wedge(2)
    complex_terms = [
        Bundle.trivial(1),
        F.wedge(2) * det_P,
        F.wedge(3) * P * det_P,
        F.wedge(4) * P.sym(2) * det_P,
    ]
    ch = AmbientClass()
    for i, term in enumerate(complex_terms):
        ch = ch + term.ch if i % 2 == 0 else ch - term.ch
    if twist_by_hyperplane:
        ch = multiply(ch, 1 - plucker_line().dual().ch, _series_degree())
    return ch


def grr_pushforward(chF: AmbientClass) -> AmbientClass:
    """
    ch(i_* Rp_* F) on P^5 from ch(F) on X x P^5:
    pi_*(ch(F) td(T_X)), multiplied by td(O(3h)) of the cubic's normal bundle
    """
    integrand = multiply(chF, tangent_bundle_k3().todd(), _series_degree())
    pushed = AmbientClass({(0, 0, e): c for e, c in x_integrate(integrand).items()})
    cubic_normal = Bundle.line(AmbientClass.h() * 3, "O(3h)")
    return multiply(pushed, cubic_normal.todd())


def h_polynomial(cls: AmbientClass) -> Dict[int, Fraction]:
    """{power: coefficient} of a class pulled back from P^5"""
    out = {}
    for part, e, coeff in cls.terms():
        if part.degree:
            raise ValueError(f"class has Grassmannian component {part}")
        out[e] = coeff
    return out


def h_polynomial_to_json(poly: Dict[int, Fraction]) -> Dict[str, str]:
    return {f"h^{e}": format_rational(c) for e, c in sorted(poly.items()) if c}


def format_h_polynomial(poly: Dict[int, Fraction]) -> str:
    """12h - 27h^2 + 65/2h^3 style rendering"""
    pieces = []
    for e, c in sorted(poly.items()):
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        magnitude = abs(c)
        coeff = "" if magnitude == 1 and e else format_rational(magnitude)
        if magnitude.denominator != 1:
            coeff = f"({coeff})"
        monomial = "" if e == 0 else ("h" if e == 1 else f"h^{e}")
        pieces.append((sign, f"{coeff}{monomial}"))
    if not pieces:
        return "0"
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


# ===== PULLBACK COEFFICIENTS =====

UNTWISTED_EXPECTED = {1: Fraction(12), 2: Fraction(-27), 3: Fraction(65, 2),
                      4: Fraction(-33, 2), 5: Fraction(19, 8)}
TWISTED_EXPECTED = {2: Fraction(42), 3: Fraction(-91), 4: Fraction(56), 5: Fraction(-35, 4)}
CUBIC_DEGREE = 3    # i_*(h^k) = 3 h^(k+1)


@dataclass(frozen=True)
class GammaInvariants:
    """
    rank and c_1 of p_* O_Gamma on the cubic Y, and the pullback coefficients
    j*B = jB h, j*H = jH h
    """
    rank: int
    c1_coefficient: int
    jB: int
    jH: int
    untwisted: Tuple[Tuple[int, Fraction], ...]
    twisted: Tuple[Tuple[int, Fraction], ...]

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "c1_coefficient": self.c1_coefficient,
            "jB": self.jB,
            "jH": self.jH,
            "untwisted": h_polynomial_to_json(dict(self.untwisted)),
            "twisted": h_polynomial_to_json(dict(self.twisted)),
        }


def _exact_third(value: Fraction, label: str) -> int:
    quotient = value / CUBIC_DEGREE
    if quotient.denominator != 1:
        logger.error(f"{label} = {value} is not divisible by {CUBIC_DEGREE}")
        raise InvariantViolation(f"{label} = {format_rational(value)} does not divide by {CUBIC_DEGREE}")
    return int(quotient)


@lru_cache(maxsize=1)
def pullback_polynomials() -> Tuple[Dict[int, Fraction], Dict[int, Fraction]]:
    """i_* ch(p_* O_Gamma) and i_* ch(p_* O_Gamma|_H) as polynomials in h"""
    logger.info("Pushing forward ch(O_Gamma)...")
    untwisted = h_polynomial(grr_pushforward(en_ch_gamma(False)))
    logger.info("Pushing forward ch(O_Gamma|_H)...")
    twisted = h_polynomial(grr_pushforward(en_ch_gamma(True)))
    return untwisted, twisted


def gamma_invariants() -> GammaInvariants:
    """
    Read off rank = [h]/3, c_1 = [h^2]/3 from the untwisted pushforward,
    jB = -c_1, and jH = [h^2]/3 from the twisted pushforward
    """
    untwisted, twisted = pullback_polynomials()
    rank = _exact_third(untwisted.get(1, Fraction(0)), "h coefficient")
    c1 = _exact_third(untwisted.get(2, Fraction(0)), "h^2 coefficient")
    jH = _exact_third(twisted.get(2, Fraction(0)), "twisted h^2 coefficient")
    logger.info(f"✓ rank {rank}, j*B = {-c1}h, j*H = {jH}h")
    return GammaInvariants(rank, c1, -c1, jH, tuple(sorted(untwisted.items())), tuple(sorted(twisted.items())))


# ===== VERIFICATION =====

@dataclass(frozen=True)
class Check:
    name: str
    expected: str
    observed: str
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected, "observed": self.observed, "passed": self.passed}


def _check(name: str, expected, observed) -> Check:
    return Check(name, str(expected), str(observed), expected == observed)


def _line_todd_series(degree: int) -> List[Fraction]:
    """x / (1 - e^-x) by inverting (1 - e^-x)/x = sum (-1)^k x^k / (k+1)!"""
    denominator = [Fraction((-1) ** k, math.factorial(k + 1)) for k in range(degree + 1)]
    inverse = [Fraction(1)]
    for k in range(1, degree + 1):
        inverse.append(-sum(denominator[i] * inverse[k - i] for i in range(1, k + 1)))
    return inverse


def verify_pipeline(strict: bool = False) -> List[Check]:
    """
    Recompute every identity the pullback computation rests on

    Args:
        strict: raise InvariantViolation on the first failed check

    Returns:
        ordered list of Check records
    """
    s1 = AmbientClass.sigma(1)
    P, Q = sub_bundle(), quotient_bundle()
    checks = [
        _check("integral of s1^8 over Gr(2,6)", Fraction(14), gr_integrate(s1 ** 8)),
        _check("integral of s2^4 over Gr(2,6)", Fraction(3), gr_integrate(AmbientClass.sigma(2) ** 4)),
    ]

    duality = all(
        gr_integrate(AmbientClass.sigma(*lam) * AmbientClass.sigma(*mu))
        == (1 if Partition2(*mu) == Partition2(*lam).dual() else 0)
        for lam in _partitions() for mu in _partitions()
    )
    checks.append(_check("Poincare duality on the Schubert basis", True, duality))

    whitney = multiply(P.chern().truncate(ROWS), Q.chern())
    checks.append(_check("c(P) c(Q)", AmbientClass.one(), whitney))
    checks.append(_check("c_1(P)", -s1, P.chern_class(1)))
    checks.append(_check("c_2(P)", AmbientClass.sigma(1, 1), P.chern_class(2)))

    x = AmbientClass.h()
    degree = _series_degree()
    series = _line_todd_series(degree)
    expected_td = AmbientClass({(0, 0, k): series[k] for k in range(min(degree, MAX_H) + 1)})
    checks.append(_check("td(O(h)) = h / (1 - e^-h)", expected_td, hyperplane_line().todd()))
    checks.append(_check("rank of ch(Q)", Fraction(COLS), Q.rank))

    TX = tangent_bundle_k3()
    checks.append(_check("degree of X", Fraction(14), x_degree(s1 ** 2)))
    checks.append(_check("integral of td(T_X)", Fraction(2), x_degree(TX.todd())))
    checks.append(_check("integral of c_2(T_X)", Fraction(24), x_degree(TX.chern_class(2))))

    gamma = porteous_gamma()
    ch_gamma = en_ch_gamma(False)
    low_degrees = [ch_gamma.graded(k) for k in range(3)]
    checks.append(_check("ch_0..ch_2 of O_Gamma vanish", True, all(c.is_zero() for c in low_degrees)))
    checks.append(_check("ch_3(O_Gamma) = Porteous class", gamma, ch_gamma.graded(3)))
    checks.append(_check("[Gamma] is homogeneous of degree 3", True, gamma.is_homogeneous(3)))
    pushed = x_integrate(gamma)
    checks.append(_check("pi_*[Gamma]", "12h", format_h_polynomial(pushed)))

    twisted_gamma = en_ch_gamma(True)
    checks.append(_check("twisted ch_4 = [Gamma] s1", multiply(gamma, s1), twisted_gamma.graded(4)))

    untwisted, twisted = pullback_polynomials()
    checks.append(_check("i_* ch(p_* O_Gamma)", format_h_polynomial(UNTWISTED_EXPECTED),
                         format_h_polynomial(untwisted)))
    checks.append(_check("i_* ch(p_* O_Gamma|_H)", format_h_polynomial(TWISTED_EXPECTED),
                         format_h_polynomial(twisted)))
    invariants = gamma_invariants()
    checks.append(_check("(rank, j*B, j*H)", (4, 9, 14), (invariants.rank, invariants.jB, invariants.jH)))

    failed = [c for c in checks if not c.passed]
    for c in checks:
        logger.info(f"{'✓' if c.passed else '✗'} {c.name}: {c.observed}")
    if failed and strict:
        logger.error(f"{len(failed)} pipeline checks failed")
        raise InvariantViolation(f"pipeline check failed: {failed[0].name} "
                                 f"(expected {failed[0].expected}, got {failed[0].observed})")
    return checks
