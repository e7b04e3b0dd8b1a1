"""Finite fields GF(p^k) with integer-encoded elements.

An element is the integer ``sum(c_i * p**i)`` of its coefficient vector over
the prime field, so ``0..q-1`` is the canonical element order.  For ``k >= 2``
the field is built on the lexicographically smallest monic irreducible
polynomial of degree ``k``, comparing coefficients from the constant term up.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from .errors import PreconditionError

MAX_ORDER = 2**16


def prime_power(q: int) -> Tuple[int, int]:
    """Return ``(p, k)`` with ``q = p**k``; raise if ``q`` is not a prime power."""
    if q < 2:
        raise PreconditionError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    if rest != 1:
        raise PreconditionError(f"{q} is not a prime power")
    return p, k


def _poly_mod(a: List[int], m: List[int], p: int) -> List[int]:
    """Remainder of ``a`` modulo monic ``m`` (coefficient lists, low degree first)."""
    a = a[:]
    dm = len(m) - 1
    while len(a) - 1 >= dm and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1]
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _irreducible(coeffs: List[int], p: int) -> bool:
    """Test a monic polynomial for irreducibility by trial division."""
    k = len(coeffs) - 1
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not _poly_mod(coeffs, divisor, p):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree ``k`` (low to high)."""
    for low in itertools.product(range(p), repeat=k):
        coeffs = list(low) + [1]
        if coeffs[0] == 0:
            continue
        if _irreducible(coeffs, p):
            return tuple(coeffs)
    raise PreconditionError(f"no irreducible polynomial of degree {k} over GF({p})")


class FiniteField:
    """The field GF(q) with exp/log tables over a fixed primitive element."""

    def __init__(self, q: int):
        if q > MAX_ORDER:
            raise PreconditionError(f"field order {q} exceeds {MAX_ORDER}")
        self.p, self.k = prime_power(q)
        self.q = q
        self.modulus = smallest_irreducible(self.p, self.k) if self.k > 1 else (0, 1)
        self._digits = np.array(
            [[(x // self.p**i) % self.p for i in range(self.k)] for x in range(q)], dtype=np.int64
        )
        self._weights = np.array([self.p**i for i in range(self.k)], dtype=np.int64)
        self.generator = self._find_generator()
        exp = np.zeros(q - 1, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            x = self._slow_mul(x, self.generator)
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        self.exp = exp
        self.log = log
        if len(set(exp.tolist())) != q - 1:
            raise PreconditionError("multiplicative group generator check failed")

    # arithmetic on integer codes

    def _slow_mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        da = self._digits[a].tolist()
        db = self._digits[b].tolist()
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        rem = _poly_mod(prod, list(self.modulus), self.p)
        return sum(c * self.p**i for i, c in enumerate(rem))

    def _order(self, a: int) -> int:
        x, n = a, 1
        while x != 1:
            x = self._slow_mul(x, a)
            n += 1
        return n

    def _find_generator(self) -> int:
        if self.q == 2:
            return 1
        for a in range(2, self.q):
            if self._order(a) == self.q - 1:
                return a
        raise PreconditionError("no primitive element found")

    def add(self, a, b):
        da = self._digits[np.asarray(a)]
        db = self._digits[np.asarray(b)]
        return ((da + db) % self.p) @ self._weights

    def neg(self, a):
        return ((-self._digits[np.asarray(a)]) % self.p) @ self._weights

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        zero = (a == 0) | (b == 0)
        la = self.log[np.where(zero, 1, a)]
        lb = self.log[np.where(zero, 1, b)]
        out = self.exp[(la + lb) % (self.q - 1)]
        return np.where(zero, 0, out)

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power_of_generator(self, e: int) -> int:
        return int(self.exp[e % (self.q - 1)])

    def elements(self) -> range:
        return range(self.q)

    def __repr__(self):
        return f"FiniteField({self.q})"


@lru_cache(maxsize=32)
def field(q: int) -> FiniteField:
    return FiniteField(q)
