"""Shared helpers for the test suite."""

from fractions import Fraction
from math import factorial

from qheis.liealg import f_coefficient
from qheis.scalar import Scalar, ZERO


def falling_binom(n: int, k: int) -> int:
    """Binomial n over k for integer n of either sign and k >= 0."""
    num = 1
    for i in range(k):
        num *= n - i
    return num // factorial(k)


def bhatq_closed_form(m: int, n: int, r: int, s: int) -> Scalar:
    """Independent closed form for the deformed bracket constants.

    Derived once by hand from the generating-function bracket: the
    derivative-delta part contributes (d(r-s) - d(r-s-1)) m at m + n = 0,
    and for m <= -1 the exponential tail contributes
    (-1)^(n+1) C(-m-n-2, -m-1) times the z^(-m-n-2) coefficient of F_{r-s},
    with C the falling-factorial binomial.  Used as an oracle against the
    table-extraction route.
    """
    total = ZERO
    if m + n == 0:
        total = Scalar.from_int(((r == s) - (r == s + 1)) * m)
    if m <= -1:
        j = -m - n - 2
        if j >= -2:
            g = falling_binom(j, -m - 1)
            if g:
                sign = 1 if n % 2 else -1
                total = total + (Scalar.from_fraction(Fraction(sign * g))
                                 * f_coefficient(r - s, j))
    return total
