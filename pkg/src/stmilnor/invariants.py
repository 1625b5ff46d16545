"""Bracket determinants and the Dickson invariants they generate.

bracket(k, (e_{k+1}, ..., e_n)) is (1/k!) times the n x n determinant whose
first k rows are (x_1, ..., x_n) and whose remaining rows are
(y_1^{p^{e_j}}, ..., y_n^{p^{e_j}}), expanded as a permutation sum with
graded signs.  l_poly(n, s) drops exponent s from (0, 1, ..., n);
dickson(n, s) is the exact quotient l_poly(n, s) / l_poly(n, n).
"""

from __future__ import annotations

import functools
import itertools

from .field import inverse_mod, primitive_root, validate_odd_prime
from .poly import LinearMap, Monomial, Polynomial, mono_mul, mono_one


def _perm_sign(perm: tuple[int, ...]) -> int:
    inv = sum(
        1
        for a in range(len(perm))
        for b in range(a + 1, len(perm))
        if perm[a] > perm[b]
    )
    return -1 if inv & 1 else 1


def bracket(k: int, exps, n: int, p: int) -> Polynomial:
    """Graded bracket determinant [k; e_{k+1}, ..., e_n]: k exterior rows,
    then one Frobenius-twisted polynomial row per exponent, over 1/k!."""
    validate_odd_prime(p)
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k >= p:
        raise ValueError(f"k! must be invertible mod p, got k={k}, p={p}")
    exps = tuple(exps)
    if len(exps) != n - k:
        raise ValueError(f"expected {n - k} exponents, got {len(exps)}")
    if any(not isinstance(e, int) or e < 0 for e in exps):
        raise ValueError(f"exponents must be nonnegative ints, got {exps}")

    rows: list[list[Monomial]] = []
    for _ in range(k):
        rows.append([Monomial((j,), (0,) * n) for j in range(1, n + 1)])
    for e in exps:
        q = p**e
        rows.append([
            Monomial((), tuple(q if t == j else 0 for t in range(n)))
            for j in range(n)
        ])

    data: dict[Monomial, int] = {}
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        m = mono_one(n)
        for t in range(n):
            s, m = mono_mul(m, rows[t][perm[t]])
            if s == 0:
                m = None
                break
            sign *= s
        if m is None:
            continue
        v = (data.get(m, 0) + sign) % p
        if v:
            data[m] = v
        else:
            data.pop(m, None)
    out = Polynomial(n, p, data)
    if k > 1:
        kfact = 1
        for t in range(2, k + 1):
            kfact = kfact * t % p
        out = out.scale(inverse_mod(kfact, p))
    return out


@functools.lru_cache(maxsize=None)
def l_poly(n: int, s: int, p: int) -> Polynomial:
    """L_{n,s} = [0; 0, 1, ..., s-hat, ..., n]; L_n is the case s = n."""
    if not 0 <= s <= n:
        raise ValueError(f"need 0 <= s <= n, got s={s}, n={n}")
    exps = tuple(e for e in range(n + 1) if e != s)
    return bracket(0, exps, n, p)


class NotDivisibleError(ValueError):
    """Raised by exact_div; carries the nonzero remainder."""

    def __init__(self, message: str, remainder: Polynomial):
        super().__init__(message)
        self.remainder = remainder


def exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact quotient f / g by long division.

    Monomials are ordered graded lex with y1 > y2 > ...; a division step
    needs the divisor's leading exterior part to sit inside the remainder's
    (the invariant quotients handled here are y-only, so in practice the
    exterior parts match exactly).  A nonzero remainder raises
    NotDivisibleError with the remainder attached.
    """
    f._compat(g)
    if not g.terms:
        raise ZeroDivisionError("division by the zero polynomial")
    n, p = f.n, f.p
    gm, gc = g.leading()
    gc_inv = inverse_mod(gc, p)
    quo: dict[Monomial, int] = {}
    rem = f
    while rem.terms:
        rm, rc = rem.leading()
        ext_ok = set(gm.ext) <= set(rm.ext)
        exps_ok = all(a >= b for a, b in zip(rm.exps, gm.exps))
        if not (ext_ok and exps_ok):
            raise NotDivisibleError(
                f"leading term {rm} not divisible by {gm}; remainder {rem}", rem
            )
        q_ext = tuple(i for i in rm.ext if i not in gm.ext)
        q_mono = Monomial(q_ext, tuple(a - b for a, b in zip(rm.exps, gm.exps)))
        sgn, prod = mono_mul(q_mono, gm)
        if sgn == 0 or prod != rm:
            raise NotDivisibleError(
                f"leading term {rm} not divisible by {gm}; remainder {rem}", rem
            )
        qc = rc * gc_inv * sgn % p
        quo[q_mono] = qc
        rem = rem - Polynomial(n, p, {q_mono: qc}) * g
    return Polynomial(n, p, quo)


@functools.lru_cache(maxsize=None)
def dickson(n: int, s: int, p: int) -> Polynomial:
    """Dickson invariant Q_{n,s} = L_{n,s} / L_n (exact)."""
    if not 0 <= s < n:
        raise ValueError(f"need 0 <= s < n, got s={s}, n={n}")
    return exact_div(l_poly(n, s, p), l_poly(n, n, p))


def sl_generators(n: int, p: int) -> list[LinearMap]:
    """Elementary transvections, generating SL_n(F_p)."""
    return [
        LinearMap.transvection(n, p, i, j)
        for i in range(n)
        for j in range(n)
        if i != j
    ]


def gl_generators(n: int, p: int) -> list[LinearMap]:
    """SL generators plus one diagonal primitive-root twist: all of GL_n(F_p)."""
    g = primitive_root(p)
    return sl_generators(n, p) + [LinearMap.diagonal((g,) + (1,) * (n - 1), p)]


def check_invariance(f: Polynomial, group: str = "GL") -> bool:
    """Whether f is fixed by every generator of SL_n or GL_n over F_p."""
    if group not in ("SL", "GL"):
        raise ValueError(f"group must be 'SL' or 'GL', got {group!r}")
    gens = sl_generators(f.n, f.p) if group == "SL" else gl_generators(f.n, f.p)
    return all(f.substitute(g) == f for g in gens)


def dickson_decompose(f: Polynomial) -> dict[tuple[int, int], int]:
    """Write a y-only GL_2-invariant as a polynomial in Q_{2,0}, Q_{2,1}.

    Returns {(a, b): c} meaning sum of c * Q_{2,0}^a * Q_{2,1}^b.  Uses
    leading-monomial elimination: lead(Q_{2,0}^a Q_{2,1}^b) determines
    (a, b) uniquely.  Raises ValueError when f is not in that subring.
    """
    if f.n != 2:
        raise ValueError("dickson_decompose only handles n = 2")
    if any(m.ext for m in f.terms):
        raise ValueError("dickson_decompose needs a y-only polynomial")
    p = f.p
    q0, q1 = dickson(2, 0, p), dickson(2, 1, p)
    pow_cache: dict[tuple[int, int], Polynomial] = {}
    out: dict[tuple[int, int], int] = {}
    rem = f
    while rem.terms:
        (m, c) = rem.leading()
        e1, e2 = m.exps
        # lead(Q_{2,0}) = y1^{p(p-1)} y2^{p-1}, lead(Q_{2,1}) = y1^{p^2-p}
        a, ra = divmod(e2, p - 1)
        ab, rb = divmod(e1, p * p - p)
        b = ab - a
        if ra or rb or b < 0:
            raise ValueError(f"not a polynomial in the Dickson generators: stuck at {m}")
        key = (a, b)
        pw = pow_cache.get(key)
        if pw is None:
            pw = q0**a * q1**b
            pow_cache[key] = pw
        out[key] = c
        rem = rem - pw.scale(c)
    return out
