"""Truncated quotient rings F_q[x_1..x_v] / <monomials of total degree n>.

The basis is every exponent tuple of total degree < n in graded-lex
order, so each homogeneous component is a contiguous slice.  Elements are
coefficient vectors over that basis; whole batches of elements are
``(N, dim)`` arrays.  An element's integer index is its coefficient
vector read as little-endian base-q digits.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np

from . import linalg
from .ff import FieldCtx

ENUM_LIMIT = 2**24


class RingError(ValueError):
    pass


def monomials_of_degree(v, k):
    """Exponent tuples of total degree k, lex-descending."""
    if v == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        for rest in monomials_of_degree(v - 1, k - first):
            out.append((first,) + rest)
    return out


class QuotRing:
    def __init__(self, ctx: FieldCtx, v: int, n: int):
        if v < 1 or n < 1:
            raise RingError("need v >= 1 and n >= 1")
        self.ctx, self.v, self.n = ctx, int(v), int(n)
        self.q = ctx.q
        self.basis = []
        self.deg_slices = []
        for k in range(n):
            start = len(self.basis)
            self.basis.extend(monomials_of_degree(v, k))
            self.deg_slices.append(slice(start, len(self.basis)))
        self.dim = len(self.basis)
        assert self.dim == comb(n - 1 + v, v)
        self.index_of = {t: i for i, t in enumerate(self.basis)}
        self.degrees = np.array([sum(t) for t in self.basis], dtype=np.int64)

        prod = np.full((self.dim, self.dim), -1, dtype=np.int64)
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                prod[i, j] = self.index_of.get(tuple(x + y for x, y in zip(a, b)), -1)
        self.prod_index = prod
        self.prod_index.setflags(write=False)
        ii, jj = np.nonzero(prod >= 0)
        kk = prod[ii, jj]
        order = np.argsort(kk, kind="stable")
        self._pi, self._pj, kk = ii[order], jj[order], kk[order]
        self._starts = np.searchsorted(kk, np.arange(self.dim))

        self.var_mult = []
        for l in range(v):
            X = np.zeros((self.dim, self.dim), dtype=np.int64)
            e_l = tuple(int(i == l) for i in range(v))
            if n >= 2:
                for j, b in enumerate(self.basis):
                    k = self.index_of.get(tuple(x + y for x, y in zip(b, e_l)))
                    if k is not None:
                        X[k, j] = 1
            self.var_mult.append(X)

    def __repr__(self):
        return f"QuotRing(q={self.q}, v={self.v}, n={self.n}, dim={self.dim})"

    def __eq__(self, other):
        return isinstance(other, QuotRing) and (self.ctx, self.v, self.n) == (
            other.ctx,
            other.v,
            other.n,
        )

    def __hash__(self):
        return hash((self.ctx, self.v, self.n))

    @property
    def size(self):
        return self.q**self.dim

    @property
    def unit_count(self):
        return (self.q - 1) * self.q ** (self.dim - 1)

    def check_enumerable(self, limit=ENUM_LIMIT):
        if self.size > limit:
            raise RingError(f"|R| = {self.q}^{self.dim} exceeds enumeration bound {limit}")

    # elements ------------------------------------------------------------

    def zero(self):
        return RingElement(self, np.zeros(self.dim, dtype=np.int64))

    def one(self):
        c = np.zeros(self.dim, dtype=np.int64)
        c[0] = 1
        return RingElement(self, c)

    def monomial(self, exps, coeff=1):
        c = np.zeros(self.dim, dtype=np.int64)
        exps = tuple(exps)
        if exps in self.index_of:
            c[self.index_of[exps]] = coeff
        return RingElement(self, c)

    def variable(self, l):
        return self.monomial(tuple(int(i == l) for i in range(self.v)))

    def element(self, coeffs):
        if isinstance(coeffs, dict):
            c = np.zeros(self.dim, dtype=np.int64)
            for exps, a in coeffs.items():
                if tuple(exps) in self.index_of:
                    c[self.index_of[tuple(exps)]] = self.ctx.add(int(c[self.index_of[tuple(exps)]]), a)
            return RingElement(self, c)
        return RingElement(self, np.asarray(coeffs, dtype=np.int64))

    def scalar(self, a):
        c = np.zeros(self.dim, dtype=np.int64)
        c[0] = a
        return RingElement(self, c)

    @property
    def _powers(self):
        return self.q ** np.arange(self.dim, dtype=np.int64)

    def index(self, coeffs):
        return np.asarray(coeffs, dtype=np.int64) @ self._powers

    def from_index(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self._powers) % self.q

    def all_elements(self):
        self.check_enumerable()
        return self.from_index(np.arange(self.size, dtype=np.int64))

    def unit_mask(self, coeffs):
        return np.asarray(coeffs)[..., 0] != 0

    def all_units(self):
        E = self.all_elements()
        return E[self.unit_mask(E)]

    # batch arithmetic ----------------------------------------------------

    def add(self, A, B):
        return np.asarray(self.ctx.add(np.asarray(A), np.asarray(B)))

    def neg(self, A):
        return np.asarray(self.ctx.neg(np.asarray(A)))

    def sub(self, A, B):
        return np.asarray(self.ctx.sub(np.asarray(A), np.asarray(B)))

    def mul(self, A, B):
        """Truncated product of broadcastable (..., dim) coefficient arrays."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        terms = np.asarray(self.ctx.mul(A[..., self._pi], B[..., self._pj]))
        return self.ctx.reduceat(terms, self._starts, axis=-1)

    def scale(self, a, A):
        return np.asarray(self.ctx.mul(np.asarray(a)[..., None], np.asarray(A)))

    def power(self, A, k):
        A = np.asarray(A, dtype=np.int64)
        result = np.zeros_like(A)
        result[..., 0] = 1
        base = A
        k = int(k)
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def invert_batch(self, U):
        """Inverse of unit(s) via the geometric series in the nilpotent part."""
        U = np.asarray(U, dtype=np.int64)
        if not np.all(self.unit_mask(U)):
            raise RingError("element is not a unit")
        c0 = U[..., :1]
        c0inv = np.asarray(self.ctx.inv(c0))
        t = np.asarray(self.ctx.mul(U, c0inv))
        t[..., 0] = 0
        minus_t = self.neg(t)
        acc = np.zeros_like(U)
        acc[..., 0] = 1
        term = acc.copy()
        for _ in range(self.n - 1):
            term = self.mul(term, minus_t)
            acc = self.add(acc, term)
        return np.asarray(self.ctx.mul(acc, c0inv))

    def homogeneous_part(self, A, k):
        out = np.zeros_like(np.asarray(A))
        out[..., self.deg_slices[k]] = np.asarray(A)[..., self.deg_slices[k]]
        return out


class RingElement:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: QuotRing, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if coeffs.shape != (ring.dim,):
            raise RingError(f"expected {ring.dim} coefficients, got shape {coeffs.shape}")
        coeffs.setflags(write=False)
        self.ring = ring
        self.coeffs = coeffs

    def _check(self, other):
        if not isinstance(other, RingElement) or other.ring != self.ring:
            raise RingError("ring mismatch")

    def __add__(self, other):
        self._check(other)
        return RingElement(self.ring, self.ring.add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        self._check(other)
        return RingElement(self.ring, self.ring.sub(self.coeffs, other.coeffs))

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return RingElement(self.ring, self.ring.scale(int(other), self.coeffs))
        self._check(other)
        return RingElement(self.ring, self.ring.mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k):
        return RingElement(self.ring, self.ring.power(self.coeffs, k))

    def __eq__(self, other):
        return (
            isinstance(other, RingElement)
            and other.ring == self.ring
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.ring, self.coeffs.tobytes()))

    def __repr__(self):
        terms = []
        for c, t in zip(self.coeffs, self.ring.basis):
            if c:
                mono = "*".join(
                    f"x{i + 1}" + (f"^{d}" if d > 1 else "") for i, d in enumerate(t) if d
                )
                terms.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(terms) if terms else "0"

    @property
    def index(self):
        return int(self.ring.index(self.coeffs))

    def is_zero(self):
        return not self.coeffs.any()

    def is_unit(self):
        return bool(self.coeffs[0] != 0)

    def support(self):
        return [self.ring.basis[i] for i in np.flatnonzero(self.coeffs)]


def ring_make(ctx, v, n):
    return _ring_cached(ctx, int(v), int(n))


@lru_cache(maxsize=None)
def _ring_cached(ctx, v, n):
    return QuotRing(ctx, v, n)


def ring_arith(a: RingElement, b: RingElement, op):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown ring operation {op!r}")


def invert(u: RingElement) -> RingElement:
    if not u.is_unit():
        raise RingError("element is not a unit")
    return RingElement(u.ring, u.ring.invert_batch(u.coeffs))


def s_and_red(c: RingElement):
    """Split c into its support-gcd monomial S and the shifted cofactor.

    Returns (S exponent tuple, Red).  S * Red == c always holds; Red is a
    unit exactly when S itself lies in the support of c.
    """
    if c.is_zero():
        raise RingError("S and Red are undefined for 0")
    ring = c.ring
    supp = c.support()
    S = tuple(min(t[i] for t in supp) for i in range(ring.v))
    red = np.zeros(ring.dim, dtype=np.int64)
    for i in np.flatnonzero(c.coeffs):
        t = ring.basis[i]
        red[ring.index_of[tuple(a - b for a, b in zip(t, S))]] = c.coeffs[i]
    return S, RingElement(ring, red)


# ideals and subspaces -----------------------------------------------------


class Ideal:
    """An x_i-closed F_q-subspace of a QuotRing, stored as RREF rows."""

    __slots__ = ("ring", "basis", "_key")

    def __init__(self, ring: QuotRing, rows, check=True):
        B, _ = linalg.rref(ring.ctx, rows, ring.dim)
        B.setflags(write=False)
        self.ring = ring
        self.basis = B
        self._key = B.tobytes()
        if check and not self.is_closed():
            raise RingError("subspace is not closed under multiplication by the variables")

    @classmethod
    def subspace(cls, ring, rows):
        return cls(ring, rows, check=False)

    def is_closed(self):
        if self.dim == 0:
            return True
        for X in self.ring.var_mult:
            images = self.ring.ctx.matmul(self.basis, X.T)
            if not linalg.in_rowspace(self.ring.ctx, self.basis, images, self.ring.dim):
                return False
        return True

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def codim(self):
        return self.ring.dim - self.dim

    @property
    def size(self):
        return self.ring.q**self.dim

    def __eq__(self, other):
        return isinstance(other, Ideal) and other.ring == self.ring and other._key == self._key

    def __hash__(self):
        return hash((self.ring, self._key))

    def __repr__(self):
        return f"Ideal(dim={self.dim}, codim={self.codim}, ring={self.ring!r})"

    def sort_key(self):
        return (self.dim, tuple(self.basis.ravel()))

    def contains(self, x):
        x = x.coeffs if isinstance(x, RingElement) else np.asarray(x)
        return linalg.in_rowspace(self.ring.ctx, self.basis, x, self.ring.dim)

    def contains_ideal(self, other):
        return linalg.in_rowspace(self.ring.ctx, self.basis, other.basis, self.ring.dim)

    def intersect(self, other):
        _check_same(self, other)
        rows = linalg.intersect(self.ring.ctx, self.basis, other.basis, self.ring.dim)
        return Ideal(self.ring, rows, check=False)

    def component(self, k):
        """I(k) = I intersected with the degree-k homogeneous component."""
        return self.intersect(homogeneous_component(self.ring, k))

    def elements(self):
        """All elements of the subspace as an (|I|, dim) array."""
        q, d = self.ring.q, self.dim
        coords = (np.arange(q**d)[:, None] // q ** np.arange(d)) % q
        if d == 0:
            return np.zeros((1, self.ring.dim), dtype=np.int64)
        return self.ring.ctx.matmul(coords, self.basis)

    def annihilator_rows(self):
        """Rows h with <h, w> = 0 for every w in the subspace."""
        return linalg.nullspace(self.ring.ctx, self.basis, self.ring.dim)


def _check_same(a, b):
    if a.ring != b.ring:
        raise RingError("ring mismatch")


def zero_ideal(ring):
    return Ideal(ring, np.zeros((0, ring.dim), dtype=np.int64))


def whole_ring(ring):
    return Ideal(ring, np.eye(ring.dim, dtype=np.int64))


def homogeneous_component(ring, k):
    """V(k) as a subspace (an ideal only for k = n-1)."""
    rows = np.eye(ring.dim, dtype=np.int64)[ring.deg_slices[k]] if 0 <= k < ring.n else np.zeros((0, ring.dim), dtype=np.int64)
    return Ideal(ring, rows, check=False)


def ideal_contains(I: Ideal, x):
    return I.contains(x)


def ideal_span(ring, generators):
    """Smallest ideal containing the generators (closure to a fixed point)."""
    ctx = ring.ctx
    rows = [np.asarray(g.coeffs if isinstance(g, RingElement) else g, dtype=np.int64) for g in generators]
    B, _ = linalg.rref(ctx, np.array(rows, dtype=np.int64).reshape(-1, ring.dim), ring.dim)
    while True:
        imgs = [ctx.matmul(B, X.T) for X in ring.var_mult]
        B2, _ = linalg.rref(ctx, np.concatenate([B] + imgs).reshape(-1, ring.dim), ring.dim)
        if B2.shape[0] == B.shape[0]:
            return Ideal(ring, B2)
        B = B2


def subspace_ops(A: Ideal, B: Ideal, op):
    _check_same(A, B)
    if op == "intersect":
        return A.intersect(B)
    if op == "contains":
        return A.contains_ideal(B)
    if op == "codim":
        return A.codim
    raise ValueError(f"unknown subspace operation {op!r}")


def socle(ring, I: Ideal):
    """Soc(R/I): returns (rows of J where J/I is the socle, dim of the socle).

    J = {f : x_i f in I for all i}, computed as a kernel.
    """
    ctx = ring.ctx
    ann = I.annihilator_rows()
    if ann.shape[0] == 0:
        return np.zeros((0, ring.dim), dtype=np.int64), 0
    eqs = np.concatenate([ctx.matmul(ann, X) for X in ring.var_mult]).reshape(-1, ring.dim)
    J = linalg.nullspace(ctx, eqs, ring.dim)
    return J, J.shape[0] - I.dim


def socle_dim(ring, I):
    return socle(ring, I)[1]
