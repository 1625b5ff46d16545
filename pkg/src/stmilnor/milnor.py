"""Steenrod operations in the Milnor basis, St^{S,R}, acting on
E(x_1..x_n) tensor F_p[y_1..y_n].

S is a strictly increasing tuple of exterior indices, R a tuple of
nonnegative xi-exponents with trailing zeros stripped (so the identity is
S=(), R=()).  On a single generator the action is

    x_k:  ((), ())   -> x_k        ((u,), ()) -> y_k^{p^u}     else 0
    y_k:  ((), ())   -> y_k        ((), D_i)  -> y_k^{p^i}     else 0

where D_i has a single 1 in slot i.  Products are covered by the Cartan
rule: sum over all splittings (S1,R1), (S2,R2) with S1 and S2 disjoint,
S1 u S2 = S and R1 + R2 = R, each summand weighted by the graded sign
(-1)^{|S2| * deg(u)} for the left factor u.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .poly import Monomial, Polynomial, mono_mul, mono_one

_DIM_X = 1  # odd generator degree; y's sit in degree 2


def _strip(r) -> tuple[int, ...]:
    r = tuple(r)
    while r and r[-1] == 0:
        r = r[:-1]
    return r


@dataclass(frozen=True)
class MilnorOp:
    """The operation dual to tau_{S} xi^{R} in the Milnor basis."""

    S: tuple[int, ...] = ()
    R: tuple[int, ...] = ()

    def __post_init__(self):
        S = tuple(self.S)
        R = _strip(self.R)
        if any(not isinstance(v, int) or v < 0 for v in S + R):
            raise ValueError(f"indices must be nonnegative ints: S={S}, R={R}")
        if any(S[t] >= S[t + 1] for t in range(len(S) - 1)):
            raise ValueError(f"S must be strictly increasing, got {S}")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "R", R)

    @classmethod
    def identity(cls) -> "MilnorOp":
        return cls((), ())

    @property
    def is_identity(self) -> bool:
        return not self.S and not self.R

    @property
    def parity(self) -> int:
        return len(self.S) & 1

    @property
    def atoms(self) -> int:
        # one generator factor can absorb at most one tau or one Delta
        return len(self.S) + sum(self.R)

    def degree(self, p: int) -> int:
        return sum(2 * p**s - 1 for s in self.S) + sum(
            r * (2 * p**(i + 1) - 2) for i, r in enumerate(self.R)
        )

    def to_json_dict(self) -> dict:
        return {"S": list(self.S), "R": list(self.R)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "MilnorOp":
        return cls(tuple(d["S"]), tuple(d["R"]))

    def __str__(self):
        return op_text(self)


def st_ij(i: int, j: int) -> MilnorOp:
    """Operation dual to xi_1^i xi_2^j, i.e. S = (), R = (i, j)."""
    if i < 0 or j < 0:
        raise ValueError(f"exponents must be nonnegative, got ({i}, {j})")
    return MilnorOp((), (i, j))


def power_op(r: int) -> MilnorOp:
    """The classical power operation P^r: S = (), R = (r)."""
    return MilnorOp((), (r,))


def delta_op(i: int) -> MilnorOp:
    """St^{D_i}: S = (), R with a single 1 in slot i (1-based)."""
    if i < 1:
        raise ValueError(f"slot must be >= 1, got {i}")
    return MilnorOp((), (0,) * (i - 1) + (1,))


def op_text(op: MilnorOp) -> str:
    s = ",".join(map(str, op.S))
    r = ",".join(map(str, op.R))
    return f"St{{S=({s});R=({r})}}"


_OP_PAIR = re.compile(r"^St\((\d+)\s*,\s*(\d+)\)$")
_OP_FULL = re.compile(r"^St\{S=\(([\d,\s]*)\);R=\(([\d,\s]*)\)\}$")


def op_from_text(text: str) -> MilnorOp:
    """Parse 'St(i,j)' shorthand or the full 'St{S=(...);R=(...)}' form."""
    text = text.strip()
    m = _OP_PAIR.match(text)
    if m:
        return st_ij(int(m.group(1)), int(m.group(2)))
    m = _OP_FULL.match(text)
    if m:
        def ints(s: str) -> tuple[int, ...]:
            s = s.strip()
            return tuple(int(v) for v in s.split(",")) if s else ()
        return MilnorOp(ints(m.group(1)), ints(m.group(2)))
    raise ValueError(f"cannot parse operation {text!r}")


def splits(op: MilnorOp) -> list[tuple[MilnorOp, MilnorOp]]:
    """All Cartan splittings of op; 2^|S| * prod(R_i + 1) of them."""
    out = []
    s_len = len(op.S)
    ranges = [range(r + 1) for r in op.R]
    for mask in range(1 << s_len):
        s1 = tuple(op.S[t] for t in range(s_len) if mask >> t & 1)
        s2 = tuple(op.S[t] for t in range(s_len) if not mask >> t & 1)
        for r1 in itertools.product(*ranges):
            r2 = tuple(a - b for a, b in zip(op.R, r1))
            out.append((MilnorOp(s1, r1), MilnorOp(s2, r2)))
    return out


def unshuffle_sign(s1: tuple[int, ...], s2: tuple[int, ...]) -> int:
    """Sign of the permutation sorting s1 + s2 into one increasing run.

    The tau generators are odd, so splitting S across a product picks up
    this sign alongside the usual Koszul sign.
    """
    inv = sum(1 for a in s1 for b in s2 if a > b)
    return -1 if inv & 1 else 1


def _is_delta(r: tuple[int, ...]) -> int:
    # slot index if r is some D_i, else 0
    if r and r[-1] == 1 and not any(r[:-1]):
        return len(r)
    return 0


class MilnorAction:
    """Action engine for fixed (n, p) with a memo on (op, monomial) pairs.

    The memo is a plain dict; entries are immutable and the computation is
    deterministic, so concurrent duplicate inserts are harmless.  Pass
    koszul_signs=False to get the (wrong) unsigned Cartan fold for
    diagnosing sign conventions.
    """

    def __init__(self, n: int, p: int, koszul_signs: bool = True):
        from .field import validate_odd_prime

        validate_odd_prime(p)
        self.n = n
        self.p = p
        self.koszul_signs = koszul_signs
        self._zero = Polynomial.zero(n, p)
        self._cache: dict[tuple[MilnorOp, Monomial], Polynomial] = {}

    def _mono(self, m: Monomial, c: int = 1) -> Polynomial:
        c %= self.p
        if not c:
            return self._zero
        return Polynomial._raw(self.n, self.p, {m: c})

    def on_generator(self, op: MilnorOp, kind: str, k: int) -> Polynomial:
        """Action on a single generator x_k or y_k, straight from the relations."""
        if kind not in ("x", "y"):
            raise ValueError(f"kind must be 'x' or 'y', got {kind!r}")
        if not 1 <= k <= self.n:
            raise ValueError(f"index {k} out of [1, {self.n}]")
        n = self.n
        if kind == "x":
            if op.R:
                return self._zero
            if not op.S:
                return self._mono(Monomial((k,), (0,) * n))
            if len(op.S) == 1:
                u = op.S[0]
                return self._mono(Monomial((), tuple(
                    self.p**u if t == k - 1 else 0 for t in range(n))))
            return self._zero
        if op.S:
            return self._zero
        if not op.R:
            return self._mono(Monomial((), tuple(1 if t == k - 1 else 0 for t in range(n))))
        slot = _is_delta(op.R)
        if slot:
            return self._mono(Monomial((), tuple(
                self.p**slot if t == k - 1 else 0 for t in range(n))))
        return self._zero

    def on_monomial(self, op: MilnorOp, m: Monomial) -> Polynomial:
        """Cartan fold over the factorization of m into single generators.

        Factors are peeled in the canonical order x_1 < ... < x_n < y_1 <
        ... < y_n, with y_k^e as e repeated factors.  Only the splittings
        whose left part acts nonzero on the leading factor are walked (an x
        absorbs the identity or one tau from S, a y the identity or one
        Delta from R); the full-split expansion is recovered by recursion.
        """
        if op.is_identity:
            return self._mono(m)
        if op.atoms > len(m.ext) + sum(m.exps) or len(op.S) > len(m.ext):
            return self._zero
        key = (op, m)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        p = self.p
        acc: dict[Monomial, int] = {}

        def add(gen_value: Polynomial, rest_value: Polynomial, sign: int) -> None:
            if not gen_value.terms or not rest_value.terms:
                return
            ((gm, gc),) = gen_value.terms.items()
            gc = gc if sign > 0 else p - gc
            for rm, rc in rest_value.terms.items():
                sgn, prod = mono_mul(gm, rm)
                if sgn == 0:
                    continue
                v = (acc.get(prod, 0) + sgn * gc * rc) % p
                if v:
                    acc[prod] = v
                else:
                    del acc[prod]

        if m.ext:
            k = m.ext[0]
            rest = Monomial(m.ext[1:], m.exps)
            # identity on x_k, all of op goes right; x_k is odd, so the
            # sign is (-1)^{|S of the right part|}
            sign = -1 if self.koszul_signs and (len(op.S) & 1) else 1
            add(self.on_generator(MilnorOp.identity(), "x", k),
                self.on_monomial(op, rest), sign)
            for t, u in enumerate(op.S):
                op1 = MilnorOp((u,), ())
                op2 = MilnorOp(op.S[:t] + op.S[t + 1:], op.R)
                # Koszul sign for moving op2 past x_k, times the unshuffle
                # sign (-1)^t for pulling the t-th tau out front; without the
                # latter the fold would depend on the peel order
                sgn2 = -1 if self.koszul_signs and ((len(op2.S) + t) & 1) else 1
                add(self.on_generator(op1, "x", k), self.on_monomial(op2, rest), sgn2)
        else:
            k = next(t + 1 for t, e in enumerate(m.exps) if e)
            rest = Monomial((), tuple(e - 1 if t == k - 1 else e for t, e in enumerate(m.exps)))
            # y_k is even, no signs on this block
            add(self.on_generator(MilnorOp.identity(), "y", k),
                self.on_monomial(op, rest), 1)
            for i, r in enumerate(op.R):
                if r:
                    op2 = MilnorOp(op.S, op.R[:i] + (r - 1,) + op.R[i + 1:])
                    add(self.on_generator(delta_op(i + 1), "y", k),
                        self.on_monomial(op2, rest), 1)
        result = self._zero if not acc else Polynomial._raw(self.n, p, acc)
        self._cache[key] = result
        return result

    def __call__(self, op: MilnorOp, f: Polynomial) -> Polynomial:
        if f.n != self.n or f.p != self.p:
            raise ValueError(f"polynomial lives in (n={f.n}, p={f.p}), engine is (n={self.n}, p={self.p})")
        if op.is_identity:
            return f
        acc: dict[Monomial, int] = {}
        p = self.p
        for m, c in f.terms.items():
            part = self.on_monomial(op, m)
            for pm, pc in part.terms.items():
                v = (acc.get(pm, 0) + c * pc) % p
                if v:
                    acc[pm] = v
                else:
                    del acc[pm]
        return Polynomial._raw(self.n, p, acc)


_engines: dict[tuple[int, int], MilnorAction] = {}


def engine_for(n: int, p: int) -> MilnorAction:
    """Shared signed engine per (n, p); caches survive across calls."""
    key = (n, p)
    eng = _engines.get(key)
    if eng is None:
        eng = _engines.setdefault(key, MilnorAction(n, p))
    return eng


def act(op: MilnorOp, f: Polynomial) -> Polynomial:
    """Apply St^{S,R} to a polynomial, memoized per (n, p)."""
    return engine_for(f.n, f.p)(op, f)


def cartan_product(op: MilnorOp, f: Polynomial, g: Polynomial) -> Polynomial:
    """Reference expansion of op over the product f*g using the full split
    enumeration.  Each summand carries the Koszul sign for moving the right
    factor of the operation past f, times the unshuffle sign of the S split.

    Agreement of act(op, f*g) with this sum is the Cartan-formula contract.
    """
    f._compat(g)
    eng = engine_for(f.n, f.p)
    acc = Polynomial.zero(f.n, f.p)
    for op1, op2 in splits(op):
        right = eng(op2, g)
        if not right.terms:
            continue
        eps = unshuffle_sign(op1.S, op2.S)
        for m, c in f.terms.items():
            sign = eps * (-1 if (op2.parity and m.degree & 1) else 1)
            left = eng(op1, Polynomial._raw(f.n, f.p, {m: c}))
            acc = acc + (left * right).scale(sign)
    return acc
