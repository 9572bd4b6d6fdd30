"""Arithmetic in GF(p^e).

Elements are integers in ``[0, q)``.  The integer ``a`` encodes the
polynomial ``sum(d_i * g**i)`` where ``d_i`` is the i-th base-``p`` digit of
``a`` and ``g`` is the class of ``x`` modulo the field modulus.  Index 0 is
zero, index 1 is one and (for ``e > 1``) index ``p`` is ``g``.

All arithmetic methods accept Python ints or integer numpy arrays and
broadcast like numpy ufuncs.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np
import sympy

MAX_ORDER = 2**20
TABLE_LIMIT = 1024


class FieldError(ValueError):
    pass


def _polymod(num, den, p):
    """Remainder of ``num`` by monic ``den`` over F_p (low-to-high lists)."""
    num = list(num)
    d = len(den) - 1
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i] % p
        if c:
            for j in range(d + 1):
                num[i - d + j] = (num[i - d + j] - c * den[j]) % p
    return [c % p for c in num[:d]]


def is_irreducible(coeffs, p):
    """Trial division by every monic polynomial of degree <= deg/2."""
    e = len(coeffs) - 1
    if e < 1:
        return False
    for deg in range(1, e // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not any(_polymod(coeffs, list(low) + [1], p)):
                return False
    return True


def default_modulus(p, e):
    """Smallest monic irreducible of degree e, ordered by sum(c_i * p**i)."""
    if e == 1:
        return (0, 1)
    for idx in range(p**e):
        low = [(idx // p**i) % p for i in range(e)]
        if low[0] == 0:
            continue
        coeffs = low + [1]
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise FieldError(f"no irreducible polynomial of degree {e} over F_{p}")


class FieldCtx:
    """The finite field GF(p^e) with polynomial-basis encoding."""

    def __init__(self, p, e=1, modulus=None):
        p, e = int(p), int(e)
        if p < 2 or not sympy.isprime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if e < 1:
            raise FieldError("extension degree must be positive")
        if p**e > MAX_ORDER:
            raise FieldError(f"q = {p}^{e} exceeds {MAX_ORDER}")
        if modulus is None:
            modulus = default_modulus(p, e)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree e (low-to-high coefficients)")
        if e > 1 and not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over F_{p}")
        self.p, self.e, self.q = p, e, p**e
        self.modulus = modulus
        self.is_prime = e == 1
        self._pows = p ** np.arange(e, dtype=np.int64)
        if not self.is_prime and self.q <= TABLE_LIMIT:
            a = np.arange(self.q, dtype=np.int64)
            self._add_t = self._raw_add(a[:, None], a[None, :])
            self._mul_t = self._raw_mul(a[:, None], a[None, :])
            self._neg_t = self._raw_neg(a)
        else:
            self._add_t = self._mul_t = self._neg_t = None
        for t in (self._add_t, self._mul_t, self._neg_t):
            if t is not None:
                t.setflags(write=False)

    def __repr__(self):
        return f"FieldCtx(p={self.p}, e={self.e}, modulus={self.modulus})"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.e, self.modulus) == (
            other.p,
            other.e,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    # digit-level helpers -------------------------------------------------

    def to_digits(self, a):
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._pows) % self.p

    def from_digits(self, d):
        return np.asarray(d, dtype=np.int64) @ self._pows

    def _raw_add(self, a, b):
        return self.from_digits((self.to_digits(a) + self.to_digits(b)) % self.p)

    def _raw_neg(self, a):
        return self.from_digits((-self.to_digits(a)) % self.p)

    def _raw_mul(self, a, b):
        p, e = self.p, self.e
        da, db = self.to_digits(a), self.to_digits(b)
        shape = np.broadcast_shapes(da.shape, db.shape)[:-1]
        prod = np.zeros(shape + (2 * e - 1,), dtype=np.int64)
        for i in range(e):
            prod[..., i : i + e] += da[..., i : i + 1] * db
        prod %= p
        mod = np.array(self.modulus, dtype=np.int64)
        for i in range(2 * e - 2, e - 1, -1):
            c = prod[..., i : i + 1].copy()
            prod[..., i - e : i + 1] -= c * mod
            prod %= p
        return self.from_digits(prod[..., :e])

    # arithmetic ----------------------------------------------------------

    def _out(self, r):
        return int(r) if np.ndim(r) == 0 else r

    def add(self, a, b):
        if self.is_prime:
            return self._out((np.asarray(a, dtype=np.int64) + b) % self.p)
        if self._add_t is not None:
            return self._out(self._add_t[a, b])
        return self._out(self._raw_add(a, b))

    def neg(self, a):
        if self.is_prime:
            return self._out((-np.asarray(a, dtype=np.int64)) % self.p)
        if self._neg_t is not None:
            return self._out(self._neg_t[a])
        return self._out(self._raw_neg(a))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.is_prime:
            return self._out((np.asarray(a, dtype=np.int64) * b) % self.p)
        if self._mul_t is not None:
            return self._out(self._mul_t[a, b])
        return self._out(self._raw_mul(a, b))

    def pow(self, a, k):
        k = int(k)
        if k < 0:
            raise FieldError("negative exponent")
        result = np.ones_like(np.asarray(a, dtype=np.int64))
        base = np.asarray(a, dtype=np.int64)
        while k:
            if k & 1:
                result = np.asarray(self.mul(result, base))
            base = np.asarray(self.mul(base, base))
            k >>= 1
        return self._out(result)

    @cached_property
    def _inv_t(self):
        a = np.arange(self.q, dtype=np.int64)
        t = np.asarray(self.pow(a, self.q - 2), dtype=np.int64)
        t[0] = -1
        t.setflags(write=False)
        return t

    def inv(self, a):
        arr = np.asarray(a, dtype=np.int64)
        if np.any(arr == 0):
            raise ZeroDivisionError("inverse of 0 in GF(%d)" % self.q)
        if self.q <= TABLE_LIMIT:
            return self._out(self._inv_t[arr])
        return self.pow(arr, self.q - 2)

    def sum(self, a, axis=-1):
        """Field sum along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.is_prime:
            return self._out(a.sum(axis=axis) % self.p)
        ax = axis if axis >= 0 else a.ndim + axis
        return self._out(self.from_digits(self.to_digits(a).sum(axis=ax) % self.p))

    def reduceat(self, a, starts, axis=-1):
        """Field sums over contiguous segments of ``axis`` beginning at ``starts``."""
        a = np.asarray(a, dtype=np.int64)
        if self.is_prime:
            return np.add.reduceat(a, starts, axis=axis) % self.p
        ax = axis if axis >= 0 else a.ndim + axis
        d = np.add.reduceat(self.to_digits(a), starts, axis=ax) % self.p
        return self.from_digits(d)

    def matmul(self, A, B):
        """Matrix product over the field; ``A`` is (..., r, k), ``B`` is (k, c) or (..., k, c)."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if self.is_prime:
            return (A @ B) % self.p
        prods = np.asarray(self.mul(A[..., :, :, None], B[..., None, :, :]))
        return self.sum(prods, axis=-2)

    # queries -------------------------------------------------------------

    def elements(self):
        return np.arange(self.q, dtype=np.int64)

    def trace(self, a):
        """Absolute trace to F_p; values are integers in [0, p)."""
        a = np.asarray(a, dtype=np.int64)
        acc = np.zeros_like(a)
        cur = a
        for _ in range(self.e):
            acc = np.asarray(self.add(acc, cur))
            cur = np.asarray(self.pow(cur, self.p))
        if np.any(acc >= self.p):
            raise AssertionError("trace left the prime subfield")
        return self._out(acc)

    @cached_property
    def trace_table(self):
        t = np.asarray(self.trace(self.elements()), dtype=np.int64)
        t.setflags(write=False)
        return t

    @cached_property
    def primitive_element(self):
        if self.q == 2:
            return 1
        primes = sympy.factorint(self.q - 1)
        for a in range(2, self.q):
            if all(self.pow(a, (self.q - 1) // r) != 1 for r in primes):
                return a
        raise AssertionError("no primitive element found")

    def element_order(self, a):
        if a == 0:
            raise FieldError("0 has no multiplicative order")
        n = self.q - 1
        for r, k in sympy.factorint(n).items():
            for _ in range(k):
                if self.pow(a, n // r) == 1:
                    n //= r
                else:
                    break
        return n


def field_make(p, e=1, modulus=None):
    return FieldCtx(p, e, modulus)


def arith(ctx, op, a, b=None):
    """Dispatch one of add/sub/mul/inv/pow."""
    if op == "add":
        return ctx.add(a, b)
    if op == "sub":
        return ctx.sub(a, b)
    if op == "mul":
        return ctx.mul(a, b)
    if op == "inv":
        return ctx.inv(a)
    if op == "pow":
        return ctx.pow(a, b)
    raise ValueError(f"unknown field operation {op!r}")


def field_queries(ctx):
    return {
        "enumerate": list(range(ctx.q)),
        "trace": ctx.trace,
        "primitive_element": ctx.primitive_element,
    }


def prime_power(q):
    """Return (p, e) with p**e == q, or raise FieldError."""
    f = sympy.factorint(int(q))
    if len(f) != 1:
        raise FieldError(f"{q} is not a prime power")
    (p, e), = f.items()
    return int(p), int(e)


def gf(q):
    """Field of order q with the default modulus."""
    p, e = prime_power(q)
    return _cached_field(p, e)


_FIELDS: dict = {}


def _cached_field(p, e):
    key = (p, e)
    if key not in _FIELDS:
        _FIELDS[key] = FieldCtx(p, e)
    return _FIELDS[key]
