"""Scalar arithmetic mod an odd prime p.

Field elements are plain ints kept in canonical form 0 <= c < p; the prime
travels alongside the values (polynomials carry it, free functions take it
as an argument).
"""

import math


def is_odd_prime(p) -> bool:
    if not isinstance(p, int) or isinstance(p, bool) or p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def validate_odd_prime(p: int) -> int:
    """Return p unchanged, raising ValueError unless p is an odd prime."""
    if not is_odd_prime(p):
        raise ValueError(f"p must be an odd prime, got {p!r}")
    return p


def inverse_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 is not invertible mod {p}")
    return pow(a, -1, p)


def binom_mod_p(k: int, r: int, p: int) -> int:
    """Binomial coefficient C(k, r) mod p via Lucas' theorem.

    Works digit by digit in base p; returns 0 when r > k.  Both arguments
    must be nonnegative.
    """
    if k < 0 or r < 0:
        raise ValueError(f"binom_mod_p needs nonnegative arguments, got ({k}, {r})")
    if r > k:
        return 0
    acc = 1
    while r:
        kd, k = k % p, k // p
        rd, r = r % p, r // p
        if rd > kd:
            return 0
        acc = acc * math.comb(kd, rd) % p
    return acc


def centered(c: int, p: int) -> int:
    """Representative of c mod p in the symmetric window (-p/2, p/2]."""
    c %= p
    return c - p if c > p // 2 else c


def _prime_factors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group of F_p."""
    validate_odd_prime(p)
    qs = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError(f"no primitive root found mod {p}")
