"""Independent reference computations used by the tests.

Nothing here imports the package: factorization is naive trial division,
units come from an exhaustive coordinate search and logs are evaluated with
mpmath at 50 digits.
"""

from fractions import Fraction

import mpmath

mpmath.mp.dps = 50


def naive_factor(n: int) -> dict:
    n = abs(n)
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def naive_primes(n: int) -> list:
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, int(p**0.5) + 1))]


def naive_omega(q: Fraction) -> int:
    q = Fraction(q)
    return sum(naive_factor(q.numerator).values()) - sum(naive_factor(q.denominator).values())


def naive_psi(q: Fraction) -> int:
    q = Fraction(q)
    return sum(p * e for p, e in naive_factor(q.numerator).items()) - sum(
        p * e for p, e in naive_factor(q.denominator).items()
    )


def least_unit(d: int, bound: int = 1000):
    """Least unit > 1 of the maximal order of Q(sqrt d), by exhaustive search.

    Units are (x + y sqrt d)/2 with x**2 - d y**2 = +-4 (x, y same parity when
    d = 1 mod 4, both even otherwise); the least one > 1 has the least y >= 1.
    Returns (a, b) as Fractions.
    """
    for y in range(1, bound + 1):
        for s in (-4, 4):
            x2 = d * y * y + s
            if x2 <= 0:
                continue
            x = int(round(x2**0.5))
            for xx in (x - 1, x, x + 1):
                if xx > 0 and xx * xx == x2:
                    if d % 4 == 1 and (xx - y) % 2 == 0:
                        return Fraction(xx, 2), Fraction(y, 2)
                    if d % 4 != 1 and xx % 2 == 0 and y % 2 == 0:
                        return Fraction(xx, 2), Fraction(y, 2)
    raise ValueError("no unit in range")


def splitting_by_roots(d: int, p: int) -> str:
    """split / inert / ram from the roots of the minimal polynomial of omega mod p."""
    if d % 4 == 1:
        # x^2 - x - (d-1)/4
        c = (d - 1) // 4
        roots = [x for x in range(p) if (x * x - x - c) % p == 0]
        disc_zero = d % p == 0
    else:
        roots = [x for x in range(p) if (x * x - d) % p == 0]
        disc_zero = (4 * d) % p == 0
    if disc_zero or len(roots) == 1:
        return "ram"
    return "split" if len(roots) == 2 else "inert"


def hp_log_abs(a, b, d):
    """ln|a + b sqrt d| at 50 digits."""
    return mpmath.log(abs(mpmath.mpf(Fraction(a).numerator) / Fraction(a).denominator
                          + mpmath.mpf(Fraction(b).numerator) / Fraction(b).denominator * mpmath.sqrt(d)))


def hp_sqrt2_table_value(a, b, p):
    """(ln|a + b sqrt2| - ln|a - b sqrt2|) / (ln p * ln(1 + sqrt 2)) at 50 digits."""
    num = hp_log_abs(a, b, 2) - hp_log_abs(a, -b, 2)
    return float(num / (mpmath.log(p) * mpmath.log(1 + mpmath.sqrt(2))))


def hp_inv_log_unit_sqrt2():
    return float(1 / mpmath.log(1 + mpmath.sqrt(2)))
