"""Box polynomials: every variable of degree at most q-1.

Coefficients and evaluation values share one row-major layout: an array of
shape ``(q,) * v`` whose axis ``j`` is the exponent (or the coordinate) of
variable ``x_{j+1}``.  Batch kernels accept extra leading axes.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from . import linalg
from .ff import FieldCtx
from .quotring import RingElement, ring_make


class BoxPolynomial:
    __slots__ = ("ctx", "v", "coeffs")

    def __init__(self, ctx: FieldCtx, v: int, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.int64)
        shape = (ctx.q,) * v
        if coeffs.size != ctx.q**v:
            raise ValueError(f"box polynomial needs {ctx.q**v} coefficients")
        self.ctx, self.v = ctx, v
        self.coeffs = coeffs.reshape(shape)

    @classmethod
    def zero(cls, ctx, v):
        return cls(ctx, v, np.zeros((ctx.q,) * v, dtype=np.int64))

    @classmethod
    def from_terms(cls, ctx, v, terms):
        """terms: mapping exponent tuple -> coefficient."""
        c = np.zeros((ctx.q,) * v, dtype=np.int64)
        for exps, a in terms.items():
            c[tuple(exps)] = ctx.add(int(c[tuple(exps)]), a)
        return cls(ctx, v, c)

    def __add__(self, other):
        return BoxPolynomial(self.ctx, self.v, self.ctx.add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return BoxPolynomial(self.ctx, self.v, self.ctx.sub(self.coeffs, other.coeffs))

    def __eq__(self, other):
        return (
            isinstance(other, BoxPolynomial)
            and self.ctx == other.ctx
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.ctx, self.v, self.coeffs.tobytes()))

    def __repr__(self):
        terms = []
        for idx in zip(*np.nonzero(self.coeffs)):
            c = self.coeffs[idx]
            mono = "*".join(f"x{i + 1}" + (f"^{d}" if d > 1 else "") for i, d in enumerate(idx) if d)
            terms.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(terms) if terms else "0"

    def is_zero(self):
        return not self.coeffs.any()

    def total_degree(self):
        nz = np.argwhere(self.coeffs)
        return int(nz.sum(axis=1).max()) if nz.size else -1


class EvalTable:
    __slots__ = ("ctx", "v", "values")

    def __init__(self, ctx, v, values):
        self.ctx, self.v = ctx, v
        self.values = np.asarray(values, dtype=np.int64).reshape((ctx.q,) * v)

    def __eq__(self, other):
        return isinstance(other, EvalTable) and np.array_equal(self.values, other.values)


@lru_cache(maxsize=None)
def vandermonde(ctx):
    """V[w, i] = w**i with 0**0 = 1."""
    q = ctx.q
    V = np.zeros((q, q), dtype=np.int64)
    for w in range(q):
        for i in range(q):
            V[w, i] = ctx.pow(w, i)
    V.setflags(write=False)
    return V


@lru_cache(maxsize=None)
def vandermonde_inv(ctx):
    Vi = linalg.inverse(ctx, vandermonde(ctx))
    Vi.setflags(write=False)
    return Vi


def axis_transform(ctx, arr, M, v):
    """Apply the q x q matrix M along each of the last v axes of arr."""
    out = np.asarray(arr, dtype=np.int64)[None]
    lead = out.ndim - v
    for ax in range(lead, out.ndim):
        moved = np.moveaxis(out, ax, -1)
        res = ctx.matmul(moved, np.ascontiguousarray(M.T))
        out = np.moveaxis(np.asarray(res), -1, ax)
    return np.ascontiguousarray(out[0])


def eval_batch(ctx, coeffs, v):
    return axis_transform(ctx, coeffs, vandermonde(ctx), v)


def interpolate_batch(ctx, values, v):
    return axis_transform(ctx, values, vandermonde_inv(ctx), v)


def eval_all(f: BoxPolynomial) -> EvalTable:
    return EvalTable(f.ctx, f.v, eval_batch(f.ctx, f.coeffs, f.v))


def interpolate(t: EvalTable) -> BoxPolynomial:
    return BoxPolynomial(t.ctx, t.v, interpolate_batch(t.ctx, t.values, t.v))


def count_zeroes(f: BoxPolynomial, include_origin=True):
    vals = eval_batch(f.ctx, f.coeffs, f.v).ravel()
    z = int(np.count_nonzero(vals == 0))
    if not include_origin and vals[0] == 0:
        z -= 1
    return z


def count_zeroes_batch(ctx, coeffs, v, include_origin=True):
    vals = eval_batch(ctx, coeffs, v)
    flat = vals.reshape(vals.shape[: vals.ndim - v] + (-1,))
    z = np.count_nonzero(flat == 0, axis=-1)
    if not include_origin:
        z = z - (flat[..., 0] == 0)
    return z


def reversal(f: BoxPolynomial) -> BoxPolynomial:
    return BoxPolynomial(f.ctx, f.v, reversal_batch(f.coeffs, f.v))


def reversal_batch(coeffs, v):
    c = np.asarray(coeffs)
    return np.ascontiguousarray(c[(Ellipsis,) + (slice(None, None, -1),) * v])


def _upoly_mul(ctx, a, b):
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i, ai in enumerate(a):
        if ai:
            out[i : i + len(b)] = ctx.add(out[i : i + len(b)], ctx.mul(int(ai), b))
    return out


def _upoly_box_reduce(ctx, a):
    """Reduce a univariate coefficient list using x**q = x (as functions)."""
    q = ctx.q
    out = np.zeros(q, dtype=np.int64)
    for i, ai in enumerate(a):
        j = i if i < q else 1 + (i - 1) % (q - 1)
        out[j] = ctx.add(int(out[j]), int(ai))
    return out


def lagrange_factor(ctx, c):
    """Coefficients of 1 - (x - c)**(q-1)."""
    lin = np.array([ctx.neg(c), 1], dtype=np.int64)
    acc = np.array([1], dtype=np.int64)
    for _ in range(ctx.q - 1):
        acc = _upoly_mul(ctx, acc, lin)
    out = np.asarray(ctx.neg(acc), dtype=np.int64)
    out[0] = ctx.add(int(out[0]), 1)
    return _upoly_box_reduce(ctx, out)


def lagrange_basis(ctx, c) -> BoxPolynomial:
    """P_c = prod_i (1 - (x_i - c_i)**(q-1)), expanded as a box polynomial."""
    c = tuple(c)
    acc = np.array(1, dtype=np.int64)
    for ci in c:
        fac = lagrange_factor(ctx, ci)
        acc = np.asarray(ctx.mul(acc[..., None], fac))
    return BoxPolynomial(ctx, len(c), acc)


def points(q, v):
    """All points of F_q^v in row-major order."""
    return list(product(range(q), repeat=v))


def degree_grid(q, v):
    """Total degree of each exponent tuple, shaped (q,)*v."""
    g = np.zeros((q,) * v, dtype=np.int64)
    for ax in range(v):
        shape = [1] * v
        shape[ax] = q
        g = g + np.arange(q).reshape(shape)
    return g


def prefix_truncate(f: BoxPolynomial, ell) -> RingElement:
    """Reduction of f in R_{q,v,ell}: keep terms of total degree <= ell-1."""
    E = ring_make(f.ctx, f.v, ell)
    c = np.zeros(E.dim, dtype=np.int64)
    q = f.ctx.q
    for i, t in enumerate(E.basis):
        if max(t) < q:
            c[i] = f.coeffs[t]
    return RingElement(E, c)


def prefix_vectors(ctx, coeffs, v, ell):
    """Batch version of prefix_truncate returning (..., dim E) arrays."""
    E = ring_make(ctx, v, ell)
    coeffs = np.asarray(coeffs)
    lead = coeffs.shape[: coeffs.ndim - v]
    out = np.zeros(lead + (E.dim,), dtype=np.int64)
    for i, t in enumerate(E.basis):
        if max(t) < ctx.q:
            out[..., i] = coeffs[(Ellipsis,) + t]
    return out


def low_degree_zero_check(f: BoxPolynomial, ell) -> bool:
    return prefix_truncate(f, ell).is_zero()
