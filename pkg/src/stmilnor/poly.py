"""Sparse arithmetic in the graded-commutative algebra
E(x_1..x_n) tensor F_p[y_1..y_n] for odd p.

deg x_i = 1 with x_i^2 = 0 and x_i x_j = -x_j x_i; deg y_i = 2 and the y's
are central.  A Monomial stores the exterior part as a strictly increasing
tuple of 1-based indices and the polynomial part as a dense exponent vector
of length n.  A Polynomial maps monomials to nonzero coefficients in
[0, p).  All values are immutable once built (by convention: no method
mutates terms), so they are safe to share across threads and to memoize.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, NamedTuple

from .field import centered, inverse_mod, validate_odd_prime


class Monomial(NamedTuple):
    ext: tuple[int, ...]
    exps: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.ext) + 2 * sum(self.exps)

    def sort_key(self):
        return (self.degree, self.ext, self.exps)


def mono_one(n: int) -> Monomial:
    return Monomial((), (0,) * n)


def mono_mul(a: Monomial, b: Monomial) -> tuple[int, Monomial | None]:
    """Graded product of two monomials: (sign, product), sign 0 if it dies.

    The sign counts the transpositions needed to interleave the two
    exterior parts; a repeated x-index kills the product.
    """
    if not b.ext:
        merged, sign = a.ext, 1
    elif not a.ext:
        merged, sign = b.ext, 1
    else:
        out: list[int] = []
        i = j = 0
        inv = 0
        la, lb = len(a.ext), len(b.ext)
        while i < la and j < lb:
            ai, bj = a.ext[i], b.ext[j]
            if ai == bj:
                return 0, None
            if ai < bj:
                out.append(ai)
                i += 1
            else:
                out.append(bj)
                inv += la - i
                j += 1
        out.extend(a.ext[i:])
        out.extend(b.ext[j:])
        merged, sign = tuple(out), (-1 if inv & 1 else 1)
    exps = tuple(u + v for u, v in zip(a.exps, b.exps, strict=True))
    return sign, Monomial(merged, exps)


def _check_monomial(m: Monomial, n: int) -> None:
    if not isinstance(m, Monomial):
        raise TypeError(f"expected Monomial, got {type(m).__name__}")
    if len(m.exps) != n:
        raise ValueError(f"monomial has {len(m.exps)} y-exponents, expected {n}")
    if any(e < 0 for e in m.exps):
        raise ValueError(f"negative y-exponent in {m}")
    if any(not 1 <= i <= n for i in m.ext):
        raise ValueError(f"x-index out of [1, {n}] in {m}")
    if any(m.ext[t] >= m.ext[t + 1] for t in range(len(m.ext) - 1)):
        raise ValueError(f"exterior part not strictly increasing in {m}")


class Polynomial:
    """Immutable sparse element of E(x_1..x_n) tensor F_p[y_1..y_n]."""

    __slots__ = ("n", "p", "terms")

    def __init__(self, n: int, p: int, terms: Mapping | Iterable = ()):
        validate_odd_prime(p)
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"n must be a positive int, got {n!r}")
        data: dict[Monomial, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for m, c in items:
            _check_monomial(m, n)
            c = (data.get(m, 0) + c) % p
            if c:
                data[m] = c
            else:
                data.pop(m, None)
        self.n = n
        self.p = p
        self.terms = data

    @classmethod
    def _raw(cls, n: int, p: int, data: dict[Monomial, int]) -> "Polynomial":
        # fast path: caller guarantees reduced coefficients, no zeros
        self = object.__new__(cls)
        self.n = n
        self.p = p
        self.terms = data
        return self

    @classmethod
    def zero(cls, n: int, p: int) -> "Polynomial":
        return cls(n, p)

    @classmethod
    def one(cls, n: int, p: int) -> "Polynomial":
        return cls(n, p, {mono_one(n): 1})

    @classmethod
    def constant(cls, c: int, n: int, p: int) -> "Polynomial":
        return cls(n, p, {mono_one(n): c})

    # -- ring operations ------------------------------------------------

    def _compat(self, other: "Polynomial") -> None:
        if self.n != other.n or self.p != other.p:
            raise ValueError(
                f"mixed ambient algebras: (n={self.n}, p={self.p}) vs"
                f" (n={other.n}, p={other.p})"
            )

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._compat(other)
        data = dict(self.terms)
        p = self.p
        for m, c in other.terms.items():
            v = (data.get(m, 0) + c) % p
            if v:
                data[m] = v
            else:
                data.pop(m, None)
        return Polynomial._raw(self.n, p, data)

    def __neg__(self):
        p = self.p
        return Polynomial._raw(self.n, p, {m: p - c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def scale(self, c: int) -> "Polynomial":
        p = self.p
        c %= p
        if c == 0:
            return Polynomial._raw(self.n, p, {})
        if c == 1:
            return self
        return Polynomial._raw(self.n, p, {m: (k * c) % p for m, k in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._compat(other)
        p = self.p
        data: dict[Monomial, int] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                sgn, m = mono_mul(ma, mb)
                if sgn == 0:
                    continue
                v = (data.get(m, 0) + sgn * ca * cb) % p
                if v:
                    data[m] = v
                else:
                    del data[m]
        return Polynomial._raw(self.n, p, data)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError(f"exponent must be a nonnegative int, got {e!r}")
        acc = Polynomial.one(self.n, self.p)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            e >>= 1
            if e:
                base = base * base
        return acc

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.p == other.p and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    # -- structure ------------------------------------------------------

    def degree(self) -> int | None:
        """Top degree, or None for the zero polynomial."""
        if not self.terms:
            return None
        return max(m.degree for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {m.degree for m in self.terms}
        return len(degs) <= 1

    def canonical_terms(self) -> list[tuple[Monomial, int]]:
        """Terms sorted ascending by (degree, ext, exps)."""
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def leading(self) -> tuple[Monomial, int]:
        """Largest term under graded lex with y1 > y2 > ... (x-part ties last)."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=lambda t: (t.degree, t.exps, t.ext))
        return m, self.terms[m]

    def substitute(self, g: "LinearMap") -> "Polynomial":
        """Apply the variable substitution x_i -> sum_j g[i][j] x_j (same on y)."""
        if not isinstance(g, LinearMap):
            raise TypeError("substitute expects a LinearMap")
        if g.n != self.n or g.p != self.p:
            raise ValueError(f"map is {g.n}x{g.n} mod {g.p}, polynomial needs n={self.n}, p={self.p}")
        n, p = self.n, self.p
        xrows = [
            Polynomial(n, p, {Monomial((j + 1,), (0,) * n): g.rows[i][j] for j in range(n)})
            for i in range(n)
        ]
        yrows = [
            Polynomial(n, p, {
                Monomial((), tuple(1 if t == j else 0 for t in range(n))): g.rows[i][j]
                for j in range(n)
            })
            for i in range(n)
        ]
        pow_cache: dict[tuple[int, int], Polynomial] = {}
        acc = Polynomial.zero(n, p)
        for m, c in self.terms.items():
            t = Polynomial.constant(c, n, p)
            for i in m.ext:
                t = t * xrows[i - 1]
            for i, e in enumerate(m.exps):
                if e:
                    pw = pow_cache.get((i, e))
                    if pw is None:
                        pw = yrows[i] ** e
                        pow_cache[(i, e)] = pw
                    t = t * pw
            acc = acc + t
        return acc

    # -- serialization --------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "terms": [
                {"ext": list(m.ext), "exps": list(m.exps), "c": c}
                for m, c in self.canonical_terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Polynomial":
        n, p = d["n"], d["p"]
        return cls(n, p, [
            (Monomial(tuple(t["ext"]), tuple(t["exps"])), t["c"]) for t in d["terms"]
        ])

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"<Polynomial n={self.n} p={self.p}: {format_poly(self)}>"


def x_var(k: int, n: int, p: int) -> Polynomial:
    if not 1 <= k <= n:
        raise ValueError(f"x-index {k} out of [1, {n}]")
    return Polynomial(n, p, {Monomial((k,), (0,) * n): 1})


def y_var(k: int, n: int, p: int, e: int = 1) -> Polynomial:
    if not 1 <= k <= n:
        raise ValueError(f"y-index {k} out of [1, {n}]")
    if e < 0:
        raise ValueError(f"negative exponent {e}")
    return Polynomial(n, p, {Monomial((), tuple(e if t == k - 1 else 0 for t in range(n))): 1})


class LinearMap:
    """n x n matrix over F_p, acting on variables by x_i -> sum_j g[i][j] x_j
    (and identically on the y's)."""

    __slots__ = ("n", "p", "rows")

    def __init__(self, rows, p: int):
        validate_odd_prime(p)
        rows = tuple(tuple(int(v) % p for v in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise ValueError("rows must form a nonempty square matrix")
        self.n = n
        self.p = p
        self.rows = rows

    @classmethod
    def identity(cls, n: int, p: int) -> "LinearMap":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), p)

    @classmethod
    def diagonal(cls, diag, p: int) -> "LinearMap":
        n = len(diag)
        return cls(tuple(tuple(diag[i] if i == j else 0 for j in range(n)) for i in range(n)), p)

    @classmethod
    def transvection(cls, n: int, p: int, i: int, j: int, c: int = 1) -> "LinearMap":
        """Identity plus c in row i, column j (0-based, i != j)."""
        if i == j:
            raise ValueError("transvection needs i != j")
        rows = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        rows[i][j] = c % p
        return cls(rows, p)

    def __matmul__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        if self.n != other.n or self.p != other.p:
            raise ValueError("matrix size or prime mismatch")
        n, p = self.n, self.p
        return LinearMap(
            tuple(
                tuple(sum(self.rows[i][k] * other.rows[k][j] for k in range(n)) % p
                      for j in range(n))
                for i in range(n)
            ),
            p,
        )

    def det(self) -> int:
        # Gaussian elimination over F_p
        n, p = self.n, self.p
        m = [list(row) for row in self.rows]
        det = 1
        for col in range(n):
            pivot = next((r for r in range(col, n) if m[r][col]), None)
            if pivot is None:
                return 0
            if pivot != col:
                m[col], m[pivot] = m[pivot], m[col]
                det = -det
            det = det * m[col][col] % p
            inv = inverse_mod(m[col][col], p)
            for r in range(col + 1, n):
                if m[r][col]:
                    f = m[r][col] * inv % p
                    for c in range(col, n):
                        m[r][c] = (m[r][c] - f * m[col][c]) % p
        return det % p

    def is_invertible(self) -> bool:
        return self.det() != 0

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.n == other.n and self.p == other.p and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.p, self.rows))

    def __repr__(self):
        return f"<LinearMap mod {self.p}: {self.rows}>"


# -- text format ---------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN = re.compile(
    r"(?P<num>\d+)"
    r"|(?P<var>[xy])(?P<idx>\d+)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9]*)"
    r"|(?P<op>[-+*^])"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "num":
            out.append(("num", int(m.group("num")), pos))
        elif m.lastgroup == "op":
            out.append(("op", m.group("op"), pos))
        elif m.lastgroup == "name":
            out.append(("name", m.group("name"), pos))
        else:
            out.append((m.group("var"), int(m.group("idx")), pos))
        pos = m.end()
    return out


def parse(text: str, *, n: int, p: int,
          names: Mapping[str, Polynomial] | None = None) -> Polynomial:
    """Parse a polynomial expression.

    Grammar: terms joined by + or -, each term a * -joined product of
    integer coefficients, x<i> factors, y<i>[^<e>] factors, and optional
    named constants (resolved through `names`).  A repeated x-index within
    one term is an error rather than a silent zero; out-of-order exterior
    factors pick up the usual sign.
    """
    text = text.replace("−", "-")  # tolerate a typeset minus
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty expression", 0)
    result = Polynomial.zero(n, p)
    t = 0

    def peek():
        return toks[t] if t < len(toks) else (None, None, len(text))

    while t < len(toks):
        sign = 1
        kind, val, pos = peek()
        while kind == "op" and val in "+-":
            if val == "-":
                sign = -sign
            t += 1
            kind, val, pos = peek()
        if kind is None:
            raise ParseError("dangling sign", pos)
        term = Polynomial.constant(sign, n, p)
        seen_x: set[int] = set()
        expect_factor = True
        while True:
            kind, val, pos = peek()
            if expect_factor:
                if kind == "num":
                    term = term.scale(val)
                    t += 1
                elif kind == "x":
                    if not 1 <= val <= n:
                        raise ParseError(f"index x{val} out of [1, {n}]", pos)
                    if val in seen_x:
                        raise ParseError(f"repeated exterior factor x{val}", pos)
                    seen_x.add(val)
                    term = term * x_var(val, n, p)
                    t += 1
                    if peek()[:2] == ("op", "^"):
                        raise ParseError("x factors carry no exponent", peek()[2])
                elif kind == "y":
                    if not 1 <= val <= n:
                        raise ParseError(f"index y{val} out of [1, {n}]", pos)
                    t += 1
                    e = 1
                    if peek()[:2] == ("op", "^"):
                        t += 1
                        ek, ev, epos = peek()
                        if ek != "num":
                            raise ParseError("expected integer exponent", epos)
                        e = ev
                        t += 1
                    term = term * y_var(val, n, p, e)
                elif kind == "name":
                    if not names or val not in names:
                        raise ParseError(f"unknown name {val!r}", pos)
                    base = names[val]
                    if base.n != n or base.p != p:
                        raise ParseError(f"constant {val} lives in a different algebra", pos)
                    t += 1
                    e = 1
                    if peek()[:2] == ("op", "^"):
                        t += 1
                        ek, ev, epos = peek()
                        if ek != "num":
                            raise ParseError("expected integer exponent", epos)
                        e = ev
                        t += 1
                    term = term * base ** e
                else:
                    raise ParseError("expected a factor", pos)
                expect_factor = False
            else:
                if kind == "op" and val == "*":
                    t += 1
                    expect_factor = True
                else:
                    break
        result = result + term
    return result


def _mono_str(m: Monomial) -> str:
    parts = [f"x{i}" for i in m.ext]
    for i, e in enumerate(m.exps):
        if e == 1:
            parts.append(f"y{i + 1}")
        elif e:
            parts.append(f"y{i + 1}^{e}")
    return "*".join(parts) if parts else "1"


def format_poly(f: Polynomial) -> str:
    """Render with leading term first; coefficients shown in (-p/2, p/2]."""
    if not f.terms:
        return "0"
    out = []
    for m, c in reversed(f.canonical_terms()):
        cc = centered(c, f.p)
        mag, neg = abs(cc), cc < 0
        mono = _mono_str(m)
        if mono == "1":
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"{'-' if neg else '+'} {body}")
    return " ".join(out)
