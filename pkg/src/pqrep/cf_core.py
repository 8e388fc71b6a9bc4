"""Exact continued-fraction arithmetic for rationals in [0, 1).

Values are plain ``fractions.Fraction`` objects (always stored reduced, with
a positive denominator).  Expansions are tuples of partial quotients in
canonical form: every quotient is >= 1 and the last one is >= 2, so each
rational in [0, 1) has exactly one expansion and the empty tuple encodes 0.
All arithmetic is exact integer arithmetic; floats appear only in callers
that report ratios.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

CFExpansion = tuple[int, ...]


def reduce(num: int, den: int) -> Fraction:
    """Reduced fraction with positive denominator; the sign rides on the numerator."""
    return Fraction(num, den)


def _quotients(num: int, den: int) -> list[int]:
    # Euclid with floor division on 0 <= num < den.  The final quotient is
    # automatically >= 2 because the running numerator strictly decreases.
    out = []
    while num:
        a, r = divmod(den, num)
        out.append(a)
        den, num = num, r
    return out


def _evaluate_raw(quotients) -> tuple[int, int]:
    num, den = 0, 1
    for a in reversed(quotients):
        num, den = den, a * den + num
    return num, den


def _max_quotient_exceeds(num: int, den: int, bound: int) -> bool:
    # Early-abort membership test: stops at the first quotient above bound.
    while num:
        a, r = divmod(den, num)
        if a > bound:
            return True
        den, num = num, r
    return False


def _check_expansion(e) -> None:
    if any(a < 1 for a in e):
        raise ValueError(f"partial quotients must be >= 1, got {list(e)}")
    if e and e[-1] < 2:
        raise ValueError(f"not canonical: trailing quotient {e[-1]} < 2")


def expand(x: Fraction) -> CFExpansion:
    """Canonical partial quotients of x in [0, 1); empty tuple for 0."""
    if not 0 <= x < 1:
        raise ValueError(f"expand needs a value in [0, 1), got {x}")
    return tuple(_quotients(x.numerator, x.denominator))


def evaluate(e) -> Fraction:
    """Exact value 1/(a1 + 1/(a2 + ...)) of a canonical expansion."""
    _check_expansion(e)
    return Fraction(*_evaluate_raw(e))


def cost(x: Fraction) -> int:
    """Sum of the partial quotients of the fractional part of |x|; cost(0) = 0."""
    y = abs(Fraction(x)) % 1
    return sum(_quotients(y.numerator, y.denominator))


@dataclass(frozen=True)
class ContinuantMatrix:
    """2x2 integer matrix arising as an ordered product of generators (0 1; 1 a).

    The right column carries the numerator/denominator pair of the fraction
    named by the generating word; the determinant is always +1 or -1.
    """

    g11: int
    g12: int
    g21: int
    g22: int

    def det(self) -> int:
        return self.g11 * self.g22 - self.g12 * self.g21

    def norm(self) -> int:
        """Max-entry norm (entries are non-negative by construction)."""
        return max(self.g11, self.g12, self.g21, self.g22)

    @property
    def value(self) -> Fraction:
        """Fraction carried in the right column (num = g12, den = g22)."""
        return Fraction(self.g12, self.g22)

    def times_generator(self, a: int) -> "ContinuantMatrix":
        """Right-multiply by the generator (0 1; 1 a)."""
        return ContinuantMatrix(
            self.g12, self.g11 + a * self.g12, self.g22, self.g21 + a * self.g22
        )


IDENTITY = ContinuantMatrix(1, 0, 0, 1)


def generator(a: int) -> ContinuantMatrix:
    """The generator matrix (0 1; 1 a), a >= 1."""
    if a < 1:
        raise ValueError(f"generator index must be >= 1, got {a}")
    return ContinuantMatrix(0, 1, 1, a)


def continuant_product(e) -> ContinuantMatrix:
    """Ordered product of generators for a non-empty quotient sequence."""
    if not e:
        raise ValueError("empty expansion has no continuant matrix")
    m = IDENTITY
    for a in e:
        if a < 1:
            raise ValueError(f"partial quotients must be >= 1, got {a}")
        m = m.times_generator(a)
    return m
