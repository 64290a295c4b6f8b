"""Exact arithmetic in small finite fields GF(p^z).

Elements are canonical indices 0..q-1 with 0 the additive identity and
1 the multiplicative identity.  For extension fields (z > 1) an index
encodes a polynomial over GF(p) in base p, least-significant digit =
constant term, and arithmetic is polynomial arithmetic modulo a fixed
irreducible: the lexicographically smallest monic irreducible of degree
z, coefficient vectors compared from the highest power down.  Fixing
the modulus makes every table, and everything built on them,
bit-reproducible.

Irreducible polynomials chosen by this rule:
    GF(4)  : x^2 + x + 1
    GF(8)  : x^3 + x + 1
    GF(9)  : x^2 + 1
    GF(16) : x^4 + x + 1

Orders are capped at FIELD_ORDER_CAP = 16: every downstream search is
exponential in q and nothing here needs more.  Raise the constant if
you do.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .errors import FieldConstructionError

FIELD_ORDER_CAP = 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, z) with q = p**z, or raise if q is not a prime power."""
    if q < 2:
        raise FieldConstructionError(f"order {q} is not a prime power")
    for p in range(2, q + 1):
        if not is_prime(p):
            continue
        if q % p == 0:
            z = 0
            m = q
            while m % p == 0:
                m //= p
                z += 1
            if m != 1:
                raise FieldConstructionError(f"order {q} is not a prime power")
            return p, z
    raise FieldConstructionError(f"order {q} is not a prime power")


def is_prime_power(q: int) -> bool:
    try:
        factor_prime_power(q)
        return True
    except FieldConstructionError:
        return False


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p); coefficient lists in ascending powers
# ---------------------------------------------------------------------------

def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m."""
    a = list(a)
    dm = len(m) - 1
    while len(a) > dm:
        lead = a[-1]
        if lead != 0:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    while len(a) < dm:
        a.append(0)
    return a


def _divides(d: list[int], a: list[int], p: int) -> bool:
    return all(c == 0 for c in _poly_mod(a, d, p))


def _monic_polys(p: int, degree: int):
    """All monic polynomials of the given degree, ascending-power lists,
    in lexicographic order of the written-out coefficient vector
    (highest power first)."""
    for tail in itertools.product(range(p), repeat=degree):
        # tail is (c_{degree-1}, ..., c_0); store ascending + leading 1
        yield list(reversed(tail)) + [1]


def _find_irreducible(p: int, z: int) -> list[int]:
    """Lexicographically smallest monic irreducible of degree z over GF(p)."""
    divisors = [d for deg in range(1, z // 2 + 1) for d in _monic_polys(p, deg)]
    for cand in _monic_polys(p, z):
        if not any(_divides(d, cand, p) for d in divisors):
            return cand
    raise FieldConstructionError(
        f"no irreducible polynomial of degree {z} over GF({p}); "
        "this indicates a construction bug")


class FiniteField:
    """Arithmetic tables for GF(p^z), q = p^z <= FIELD_ORDER_CAP.

    All operations are pure table lookups; the instance is immutable
    after construction and safe to share across threads.  Construction
    runs the exhaustive field-axiom check (cheap for q <= 16), so a
    successfully built field is guaranteed consistent.
    """

    def __init__(self, p: int, z: int):
        if not is_prime(p):
            raise FieldConstructionError(f"p={p} is not prime")
        if z < 1:
            raise FieldConstructionError(f"degree z={z} must be >= 1")
        q = p ** z
        if q > FIELD_ORDER_CAP:
            raise FieldConstructionError(
                f"order {q} exceeds FIELD_ORDER_CAP={FIELD_ORDER_CAP}")
        self.p = p
        self.z = z
        self.q = q
        self.modulus = _find_irreducible(p, z) if z > 1 else None

        if z == 1:
            idx = np.arange(q)
            add = (idx[:, None] + idx[None, :]) % p
            mul = (idx[:, None] * idx[None, :]) % p
        else:
            coeffs = [self._index_to_coeffs(e) for e in range(q)]
            add = np.zeros((q, q), dtype=np.int64)
            mul = np.zeros((q, q), dtype=np.int64)
            for a in range(q):
                for b in range(q):
                    s = [(x + y) % p for x, y in zip(coeffs[a], coeffs[b])]
                    add[a, b] = self._coeffs_to_index(s)
                    m = _poly_mod(_poly_mul(coeffs[a], coeffs[b], p),
                                  self.modulus, p)
                    mul[a, b] = self._coeffs_to_index(m)
        self.add_table = np.ascontiguousarray(add, dtype=np.int64)
        self.mul_table = np.ascontiguousarray(mul, dtype=np.int64)
        self.neg_table = np.argmin(self.add_table, axis=1).astype(np.int64)
        # row a of mul_table hits 1 exactly once for a != 0
        self.inv_table = np.argmax(self.mul_table == 1, axis=1).astype(np.int64)
        for t in (self.add_table, self.mul_table, self.neg_table,
                  self.inv_table):
            t.setflags(write=False)
        self.verify_axioms()

    def _index_to_coeffs(self, e: int) -> list[int]:
        out = []
        for _ in range(self.z):
            out.append(e % self.p)
            e //= self.p
        return out

    def _coeffs_to_index(self, coeffs: list[int]) -> int:
        out = 0
        for c in reversed(coeffs):
            out = out * self.p + c
        return out

    # -- scalar operations --------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return int(self.inv_table[a])

    def elements(self) -> range:
        return range(self.q)

    # -- consistency --------------------------------------------------------

    def verify_axioms(self) -> None:
        """Exhaustively check all field axioms; raises on any violation."""
        q = self.q
        idx = np.arange(q)
        A, M = self.add_table, self.mul_table
        checks = {
            "add commutativity": np.array_equal(A, A.T),
            "mul commutativity": np.array_equal(M, M.T),
            "additive identity": np.array_equal(A[:, 0], idx),
            "multiplicative identity": np.array_equal(M[:, 1], idx),
            "additive inverses": bool((A[idx, self.neg_table] == 0).all()),
            "multiplicative inverses":
                bool((M[idx[1:], self.inv_table[1:]] == 1).all()),
            "add associativity": np.array_equal(
                A[A[:, :, None], idx[None, None, :]],
                A[idx[:, None, None], A[None, :, :]]),
            "mul associativity": np.array_equal(
                M[M[:, :, None], idx[None, None, :]],
                M[idx[:, None, None], M[None, :, :]]),
            "distributivity": np.array_equal(
                M[idx[:, None, None], A[None, :, :]],
                A[M[:, :, None], M[:, None, :]]),
        }
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            raise FieldConstructionError(
                f"GF({self.p}^{self.z}) tables violate: {', '.join(failed)}")

    def __repr__(self) -> str:
        if self.z == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.z})"


@functools.lru_cache(maxsize=None)
def make_field(p: int, z: int = 1) -> FiniteField:
    """Construct (and cache) GF(p^z).  Cached instances are immutable."""
    return FiniteField(p, z)


def field_for_order(q: int) -> FiniteField:
    """GF(q) for a prime-power order q."""
    p, z = factor_prime_power(q)
    return make_field(p, z)


# ---------------------------------------------------------------------------
# vectors over a field
# ---------------------------------------------------------------------------

class FieldVec:
    """An immutable row vector of field-element indices."""

    __slots__ = ("field", "symbols")

    def __init__(self, field: FiniteField, symbols):
        arr = np.asarray(symbols, dtype=np.int64).reshape(-1).copy()
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ValueError(
                f"symbol indices must lie in [0, {field.q}) for {field}")
        arr.setflags(write=False)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "symbols", arr)

    def __setattr__(self, *_):
        raise AttributeError("FieldVec is immutable")

    def __len__(self) -> int:
        return int(self.symbols.size)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FieldVec)
                and self.field is other.field
                and np.array_equal(self.symbols, other.symbols))

    def __hash__(self):
        return hash((id(self.field), self.symbols.tobytes()))

    def __repr__(self) -> str:
        return f"FieldVec({self.field}, {self.symbols.tolist()})"


def _check_same(a: FieldVec, b: FieldVec) -> None:
    if a.field is not b.field:
        raise ValueError("vectors belong to different fields")
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")


def vec_add(a: FieldVec, b: FieldVec) -> FieldVec:
    """Element-wise a ⊕ b."""
    _check_same(a, b)
    return FieldVec(a.field, a.field.add_table[a.symbols, b.symbols])


def vec_neg(a: FieldVec) -> FieldVec:
    """Element-wise additive inverse."""
    return FieldVec(a.field, a.field.neg_table[a.symbols])


def vec_sub(a: FieldVec, b: FieldVec) -> FieldVec:
    """Element-wise a ⊕ (−b)."""
    _check_same(a, b)
    return vec_add(a, vec_neg(b))


def validate_matrix(field: FiniteField, G) -> np.ndarray:
    G = np.asarray(G, dtype=np.int64)
    if G.ndim != 2:
        raise ValueError("generator must be a 2-D matrix")
    if G.size and (G.min() < 0 or G.max() >= field.q):
        raise ValueError(f"matrix entries must lie in [0, {field.q})")
    return G


def mat_vec(s: FieldVec, G) -> FieldVec:
    """Row-vector/matrix product s ⊙ G over the field of s.

    s has length k and G is k×n; the result has length n.
    """
    f = s.field
    G = validate_matrix(f, G)
    if G.shape[0] != len(s):
        raise ValueError(
            f"dimension mismatch: len(s)={len(s)} vs G rows={G.shape[0]}")
    acc = np.zeros(G.shape[1], dtype=np.int64)
    for i, si in enumerate(s.symbols):
        acc = f.add_table[acc, f.mul_table[si, G[i]]]
    return FieldVec(f, acc)
