"""Dense linear algebra over a FieldCtx.

Matrices are int64 numpy arrays of field indices.  Row-reduced echelon
form is the canonical representative of a row space throughout the
package.
"""

from __future__ import annotations

import numpy as np


def _as_matrix(M, ncols=None):
    A = np.array(M, dtype=np.int64, copy=True)
    if A.ndim == 1:
        A = A.reshape(0 if A.size == 0 else 1, -1) if ncols is None else A.reshape(-1, ncols)
    if A.size == 0 and ncols is not None:
        A = A.reshape(0, ncols)
    return A


def rref(ctx, M, ncols=None):
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    A = _as_matrix(M, ncols)
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = ctx.mul(A[r], ctx.inv(int(A[r, c])))
        f = A[:, c].copy()
        f[r] = 0
        hit = np.flatnonzero(f)
        if hit.size:
            A[hit] = ctx.sub(A[hit], ctx.mul(f[hit, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(ctx, M, ncols=None):
    return len(rref(ctx, M, ncols)[1])


def nullspace(ctx, M, ncols=None):
    """Basis (as rows, in RREF) of {x : M x = 0}."""
    A = _as_matrix(M, ncols)
    n = A.shape[1]
    R, piv = rref(ctx, A)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for row, f in enumerate(free):
        basis[row, f] = 1
        for i, pc in enumerate(piv):
            basis[row, pc] = ctx.neg(int(R[i, f]))
    return rref(ctx, basis, n)[0]


def inverse(ctx, M):
    A = _as_matrix(M)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = rref(ctx, aug)
    if len(piv) < n or piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


def intersect(ctx, A, B, ncols):
    """Intersection of two row spaces, as RREF rows."""
    nA = nullspace(ctx, A, ncols)
    nB = nullspace(ctx, B, ncols)
    return nullspace(ctx, np.concatenate([nA, nB]).reshape(-1, ncols), ncols)


def in_rowspace(ctx, basis, vec, ncols):
    basis = _as_matrix(basis, ncols)
    vec = np.asarray(vec, dtype=np.int64).reshape(-1, ncols)
    return rank(ctx, np.concatenate([basis, vec]), ncols) == rank(ctx, basis, ncols)


def rref_batch(ctx, Ms):
    """Row-reduce a stack of matrices (B, r, c) in one pass.

    Returns the stacked RREF matrices (zero rows at the bottom) and the
    rank of each.  Equal row spaces give byte-identical outputs.
    """
    A = np.array(Ms, dtype=np.int64, copy=True)
    nb, R, C = A.shape
    r = np.zeros(nb, dtype=np.int64)
    rows = np.arange(R)
    for c in range(C):
        cand = (A[:, :, c] != 0) & (rows[None, :] >= r[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.flatnonzero(has)
        i = np.argmax(cand[b], axis=1)
        rb = r[b]
        top = A[b, rb].copy()
        A[b, rb] = A[b, i]
        A[b, i] = top
        piv = A[b, rb, c]
        A[b, rb] = ctx.mul(A[b, rb], np.asarray(ctx.inv(piv))[:, None])
        f = A[b, :, c].copy()
        f[np.arange(b.size), rb] = 0
        A[b] = ctx.sub(A[b], ctx.mul(f[:, :, None], A[b, rb][:, None, :]))
        r[b] += 1
    return A, r
