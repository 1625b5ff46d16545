"""Shared generators and property suites for the test modules.

Randomized tests use seeded random.Random instances so every run sees the
same sequence; the five suite_* functions are the property checks that the
acceptance gate runs at full instance counts.
"""

import random

from stmilnor import (
    LinearMap,
    MilnorOp,
    Monomial,
    Polynomial,
    act,
    cartan_product,
    engine_for,
)


def rand_monomial(rng: random.Random, n: int, max_exp: int = 4) -> Monomial:
    ext = tuple(sorted(rng.sample(range(1, n + 1), rng.randint(0, n))))
    exps = tuple(rng.randint(0, max_exp) for _ in range(n))
    return Monomial(ext, exps)


def rand_poly(rng: random.Random, n: int, p: int, terms: int = 3,
              max_exp: int = 4) -> Polynomial:
    data = {}
    for _ in range(terms):
        data[rand_monomial(rng, n, max_exp)] = rng.randint(1, p - 1)
    return Polynomial(n, p, data)


def rand_homogeneous(rng: random.Random, n: int, p: int, terms: int = 3,
                     max_exp: int = 4) -> Polynomial:
    """Nonzero homogeneous polynomial (retries until the degree has >= 1 monomial)."""
    while True:
        seed_mono = rand_monomial(rng, n, max_exp)
        target = seed_mono.degree
        data = {seed_mono: rng.randint(1, p - 1)}
        for _ in range(terms * 4):
            if len(data) >= terms:
                break
            m = rand_monomial(rng, n, max_exp)
            if m.degree == target:
                data.setdefault(m, rng.randint(1, p - 1))
        f = Polynomial(n, p, data)
        if f:
            return f


def rand_op(rng: random.Random, smax: int = 2, rlen: int = 2,
            rmax: int = 2) -> MilnorOp:
    s = tuple(sorted(rng.sample(range(smax + 1), rng.randint(0, 2))))
    r = tuple(rng.randint(0, rmax) for _ in range(rng.randint(0, rlen)))
    return MilnorOp(s, r)


def rand_invertible(rng: random.Random, n: int, p: int) -> LinearMap:
    while True:
        rows = tuple(tuple(rng.randrange(p) for _ in range(n)) for _ in range(n))
        m = LinearMap(rows, p)
        if m.is_invertible():
            return m


# -- property suites (acceptance runs these at >= 200 instances) ------------


def suite_graded_ring(seed: int, count: int, n: int = 2, p: int = 3) -> None:
    """Graded commutativity on homogeneous pairs, associativity in general."""
    rng = random.Random(seed)
    for _ in range(count):
        f = rand_homogeneous(rng, n, p)
        g = rand_homogeneous(rng, n, p)
        sign = -1 if (f.degree() * g.degree()) % 2 else 1
        assert f * g == (g * f).scale(sign)
        a, b, c = (rand_poly(rng, n, p) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def suite_derivation(seed: int, count: int, n: int = 2, p: int = 3) -> None:
    """St_u is a derivation twisted by the degree of the left factor."""
    rng = random.Random(seed)
    for _ in range(count):
        u = rng.randint(0, 1)
        op = MilnorOp((u,), ())
        f = rand_homogeneous(rng, n, p, max_exp=3)
        g = rand_poly(rng, n, p, max_exp=3)
        sign = -1 if f.degree() % 2 else 1
        assert act(op, f * g) == act(op, f) * g + (f * act(op, g)).scale(sign)


def suite_cartan(seed: int, count: int, n: int = 2, p: int = 3) -> None:
    """Engine action on a product equals the full signed split sum."""
    rng = random.Random(seed)
    for _ in range(count):
        op = rand_op(rng)
        f = rand_poly(rng, n, p, terms=2, max_exp=3)
        g = rand_poly(rng, n, p, terms=2, max_exp=3)
        assert act(op, f * g) == cartan_product(op, f, g)


def suite_equivariance(seed: int, count: int, n: int = 2, p: int = 3) -> None:
    """The action commutes with linear substitution."""
    rng = random.Random(seed)
    for _ in range(count):
        op = rand_op(rng)
        f = rand_poly(rng, n, p, terms=2, max_exp=3)
        m = rand_invertible(rng, n, p)
        assert act(op, f.substitute(m)) == act(op, f).substitute(m)


def suite_degree(seed: int, count: int, n: int = 2, p: int = 3) -> None:
    """act(op, f) is zero or homogeneous of degree deg f + deg op."""
    rng = random.Random(seed)
    engine = engine_for(n, p)
    for _ in range(count):
        op = rand_op(rng, smax=2, rlen=2, rmax=3)
        f = rand_homogeneous(rng, n, p, max_exp=4)
        out = engine(op, f)
        if out:
            assert out.is_homogeneous()
            assert out.degree() == f.degree() + op.degree(p)
