"""Ceiling continued fractions and the sum-by-pairs unit fraction identity.

Everything here is exact: integers are Python ints and rational values are
:class:`fractions.Fraction`, which is always normalized (positive denominator,
lowest terms).
"""

from dataclasses import dataclass
from fractions import Fraction

# Expansions relevant to p/4k have at most 3 terms; anything past this is
# treated as malformed input.
MAX_TERMS = 64

Rational = Fraction


class ExpansionError(ValueError):
    """Raised for inputs with no (or an unreasonably long) ceiling expansion."""


@dataclass(frozen=True)
class CeilingCF:
    coefficients: tuple
    conv_num: tuple
    conv_den: tuple

    def __len__(self):
        return len(self.coefficients)

    @property
    def value(self):
        return Fraction(self.conv_num[-1], self.conv_den[-1])


@dataclass(frozen=True)
class UnitFractionSum:
    terms: tuple
    value: Fraction

    def total(self):
        return sum((Fraction(1, d) for d in self.terms), Fraction(0))


def ceil_div(a, b):
    return -(-a // b)


def convergents(coefficients):
    """Numerators and denominators from p_i = c_i p_{i-1} - p_{i-2}.

    Seeds are (p_-1, p_-2) = (1, 0) and (q_-1, q_-2) = (0, -1), giving q_0 = 1.
    """
    p_prev, p_prev2 = 1, 0
    q_prev, q_prev2 = 0, -1
    nums, dens = [], []
    for c in coefficients:
        p_prev, p_prev2 = c * p_prev - p_prev2, p_prev
        q_prev, q_prev2 = c * q_prev - q_prev2, q_prev
        nums.append(p_prev)
        dens.append(q_prev)
    return nums, dens


def fct_expand(num, den, max_terms=MAX_TERMS):
    """Ceiling Euclidean expansion of num/den.

    At each step ``c = ceil(a/b)`` and ``r = c*b - a``; the pair (b, r) is
    expanded next until the remainder vanishes.

    >>> fct_expand(13, 8).coefficients
    (2, 3, 3)
    """
    if num <= 0 or den <= 0:
        raise ExpansionError(f"expansion undefined for {num}/{den}")
    a, b = num, den
    coefficients = []
    while True:
        c = ceil_div(a, b)
        coefficients.append(c)
        if len(coefficients) > max_terms:
            raise ExpansionError(f"{num}/{den} exceeds {max_terms} coefficients")
        r = c * b - a
        if r == 0:
            break
        a, b = b, r
    nums, dens = convergents(coefficients)
    return CeilingCF(tuple(coefficients), tuple(nums), tuple(dens))


def sum_by_pairs(cf):
    """Write the reciprocal of ``cf.value`` as a sum of unit fractions.

    The denominators are p_0, p_0 p_1, p_1 p_2, ... built from the convergent
    numerators. The expanded fraction must have numerator >= 2 in lowest terms.
    """
    nums = cf.conv_num
    if cf.value.numerator < 2:
        raise ExpansionError("sum by pairs needs a numerator of at least 2")
    terms = [nums[0]]
    terms.extend(a * b for a, b in zip(nums, nums[1:]))
    return UnitFractionSum(tuple(terms), 1 / cf.value)


def three_term_check(p, fourk):
    """Coefficients (c0, c1, c2) if p/fourk expands to exactly three terms.

    Equivalent to the inner congruence ``(fourk + 1) % r0 == 0`` with
    ``r0 = ceil(p/fourk)*fourk - p`` and ``r0 >= 2``.
    """
    c0 = ceil_div(p, fourk)
    r0 = c0 * fourk - p
    if r0 < 2 or (fourk + 1) % r0:
        return None
    cf = fct_expand(p, fourk, max_terms=3)
    if len(cf) != 3 or cf.conv_num[-1] != p:
        return None
    return cf.coefficients


def two_term_solution(p):
    """4/p = 1/a + 1/b for p = 3 (mod 4), from the expansion of p/(p+1)."""
    if p % 4 != 3:
        raise ValueError(f"{p} is not 3 mod 4")
    cf = fct_expand(p, p + 1)
    if len(cf) != 2:
        raise ExpansionError(f"expected two coefficients for {p}/{p + 1}, got {cf.coefficients}")
    k = (p + 1) // 4
    a, b = (k * t for t in sum_by_pairs(cf).terms)
    return a, b
