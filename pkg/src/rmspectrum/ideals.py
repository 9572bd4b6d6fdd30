"""Socle-1 ideals of truncated quotient rings and their codimension enumerators.

Every ideal I with a one-dimensional socle in R/I is homogeneous and is
pinned down, up to scaling, by a single linear form S on the degree-n0
component: I(k) is the kernel of the (n0, k) Hankel matrix of S for
k <= n0, and I(k) = V(k) above n0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import ceil, comb

import numpy as np

from . import linalg
from .quotring import (
    Ideal,
    QuotRing,
    RingError,
    monomials_of_degree,
    ring_make,
    socle,
    zero_ideal,
)

SOCLE1_LIMIT = 2**20


def binom(n, k):
    """C(n, k) with C(n, k) = 0 outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def hom_dim(v, k):
    return binom(k + v - 1, v - 1) if k >= 0 else 0


# Hankel matrices ----------------------------------------------------------


@dataclass
class HankelMatrix:
    v: int
    m: int
    j: int
    rows: list
    cols: list
    matrix: np.ndarray

    def rank(self, ctx):
        return linalg.rank(ctx, self.matrix, len(self.cols))


def hankel(S, j, v=None, m=None):
    """M(S, j): rows indexed by degree m-j tuples s, columns by degree j tuples t.

    ``S`` is either a mapping from degree-m exponent tuples to field elements
    or a sequence aligned with ``monomials_of_degree(v, m)``.
    """
    if isinstance(S, dict):
        keys = list(S)
        if not keys:
            raise ValueError("empty sequence")
        v = len(keys[0]) if v is None else v
        m = sum(keys[0]) if m is None else m
        if any(len(t) != v or sum(t) != m for t in keys):
            raise ValueError("sequence keys must all be exponent tuples of one degree")
        seq = dict(S)
    else:
        if v is None or m is None:
            raise ValueError("v and m are required for a positional sequence")
        mons = monomials_of_degree(v, m)
        S = list(S)
        if len(S) != len(mons):
            raise ValueError(f"expected {len(mons)} entries for degree {m}, got {len(S)}")
        seq = dict(zip(mons, S))
    if not 0 <= j <= m:
        raise ValueError(f"split degree {j} outside [0, {m}]")
    rows = monomials_of_degree(v, m - j)
    cols = monomials_of_degree(v, j)
    M = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for a, s in enumerate(rows):
        for b, t in enumerate(cols):
            M[a, b] = seq.get(tuple(x + y for x, y in zip(s, t)), 0)
    return HankelMatrix(v, m, j, rows, cols, M)


# socle-1 ideals -----------------------------------------------------------


@dataclass
class Socle1Ideal:
    ideal: Ideal
    n0: int
    S: tuple
    ranks: list

    @property
    def codim(self):
        return self.ideal.codim


def _embed(ring, k, rows):
    out = np.zeros((rows.shape[0], ring.dim), dtype=np.int64)
    out[:, ring.deg_slices[k]] = rows
    return out


def ideal_from_sequence(ring: QuotRing, S, n0, check=True) -> Socle1Ideal:
    ctx = ring.ctx
    if not 0 <= n0 <= ring.n - 1:
        raise RingError(f"n0 = {n0} outside [0, {ring.n - 1}]")
    S = tuple(int(a) for a in S)
    if len(S) != hom_dim(ring.v, n0):
        raise RingError("sequence length does not match dim V(n0)")
    if not any(S):
        raise RingError("the sequence S must be nonzero")
    blocks, ranks = [], []
    for k in range(n0 + 1):
        H = hankel(S, k, ring.v, n0)
        ker = linalg.nullspace(ctx, H.matrix, len(H.cols))
        ranks.append(len(H.cols) - ker.shape[0])
        blocks.append(_embed(ring, k, ker))
    for k in range(n0 + 1, ring.n):
        blocks.append(_embed(ring, k, np.eye(hom_dim(ring.v, k), dtype=np.int64)))
    rows = np.concatenate(blocks).reshape(-1, ring.dim)
    I = Ideal(ring, rows, check=check)
    if check:
        if I.codim != sum(ranks):
            raise AssertionError("codim differs from the Hankel rank sum")
        if socle(ring, I)[1] != 1:
            raise AssertionError("constructed ideal does not have a one-dimensional socle")
    return Socle1Ideal(I, n0, S, ranks)


def projective_points(q, d):
    """Representatives of the lines of F_q^d: first nonzero coordinate is 1."""
    for lead in range(d):
        for tail in product(range(q), repeat=d - lead - 1):
            yield (0,) * lead + (1,) + tail


def socle1_count(ring):
    q = ring.q
    return sum((q ** hom_dim(ring.v, k) - 1) // (q - 1) for k in range(ring.n))


def enumerate_socle1(ring: QuotRing, limit=SOCLE1_LIMIT, check=True):
    """Yield every socle-1 ideal once, by n0 and then by projective S."""
    total = socle1_count(ring)
    if total > limit:
        raise RingError(f"{total} socle-1 ideals exceed the enumeration bound {limit}")
    for n0 in range(ring.n):
        for S in projective_points(ring.q, hom_dim(ring.v, n0)):
            yield ideal_from_sequence(ring, S, n0, check=check)


def recover_n0(ring, I: Ideal):
    """Largest k with I(k) != V(k), or None when I is the whole ring."""
    for k in range(ring.n - 1, -1, -1):
        if I.component(k).dim < hom_dim(ring.v, k):
            return k
    return None


def check_socle1_bullets(ring, I: Ideal, n0=None):
    """The four structural properties of a socle-1 ideal, as a dict of booleans."""
    ctx = ring.ctx
    if n0 is None:
        n0 = recover_n0(ring, I)
    if n0 is None:
        return {"n0": None, "hyperplane": False, "full_above": True, "saturated_below": True, "homogeneous": True}
    comps = [I.component(k) for k in range(ring.n)]
    hyper = comps[n0].dim == hom_dim(ring.v, n0) - 1
    above = all(comps[k].dim == hom_dim(ring.v, k) for k in range(n0 + 1, ring.n))
    below = True
    for k in range(n0):
        Vk = np.eye(ring.dim, dtype=np.int64)[ring.deg_slices[k]]
        # f in V(k) with x_i f in I(k+1) for all i
        ann = comps[k + 1].annihilator_rows()
        eqs = [ctx.matmul(ann, X)[:, ring.deg_slices[k]] for X in ring.var_mult]
        eqs = np.concatenate(eqs).reshape(-1, hom_dim(ring.v, k))
        sat = linalg.nullspace(ctx, eqs, hom_dim(ring.v, k))
        sat_full = ctx.matmul(sat, Vk) if sat.shape[0] else np.zeros((0, ring.dim), dtype=np.int64)
        if Ideal.subspace(ring, sat_full) != comps[k]:
            below = False
    hom = sum(c.dim for c in comps) == I.dim
    return {"n0": n0, "hyperplane": hyper, "full_above": above, "saturated_below": below, "homogeneous": hom}


def rank_bound(k, n0, v):
    """Bound on rank M(S, k) checked here; it uses min(k, n0-k)."""
    return binom(min(k, n0 - k) + v - 1, v - 1)


def rank_bound_stated(k, n0, v):
    """The min(k, n0-1-k) variant, which is negative at k = n0."""
    return binom(min(k, n0 - 1 - k) + v - 1, v - 1)


# codimension enumerators --------------------------------------------------


@dataclass
class CodimEnumerator:
    coeffs: dict = field(default_factory=dict)

    def __call__(self, z):
        return sum(c * z**e for e, c in self.coeffs.items())

    def add(self, codim, count=1):
        self.coeffs[codim] = self.coeffs.get(codim, 0) + count

    def at_one(self):
        return sum(self.coeffs.values())

    def as_list(self):
        top = max(self.coeffs, default=-1)
        return [self.coeffs.get(e, 0) for e in range(top + 1)]

    def __eq__(self, other):
        strip = lambda d: {k: v for k, v in d.items() if v}
        return isinstance(other, CodimEnumerator) and strip(self.coeffs) == strip(other.coeffs)

    def __repr__(self):
        terms = [f"{c}*z^{e}" for e, c in sorted(self.coeffs.items()) if c]
        return " + ".join(terms) if terms else "0"


def z_grid(q):
    return [2.0, q**0.5, float(q), q**1.5]


def codim_bound(q, v, n, z):
    return z ** (2 * binom(ceil(n / 2) + v, v)) * q ** binom(n + v - 2, v - 1) * q / (q - 1) ** 2


def tight_codim_sum(n, v):
    """Sum over k of C(min(k, n-1-k)+v-1, v-1), the pre-simplification codim bound."""
    return sum(binom(min(k, n - 1 - k) + v - 1, v - 1) for k in range(n))


def codim_enumerator(ring, ideals=None):
    """Exact F_n(z) plus the bound report on the standard z grid."""
    if ideals is None:
        ideals = list(enumerate_socle1(ring))
    F = CodimEnumerator()
    for s1 in ideals:
        F.add(s1.codim if isinstance(s1, Socle1Ideal) else s1.codim)
    q, v, n = ring.q, ring.v, ring.n
    rows = []
    for z in z_grid(q):
        val, bnd = F(z), codim_bound(q, v, n, z)
        rows.append({"z": z, "value": val, "bound": bnd, "holds": val <= bnd})
    max_codim = max(F.coeffs, default=0)
    report = {
        "bounds": rows,
        "max_codim": max_codim,
        "stated_codim_bound": 2 * binom(ceil(n / 2) + v, v),
        "tight_codim_bound": tight_codim_sum(n, v),
        "count": F.at_one(),
        "count_formula": socle1_count(ring),
    }
    return F, report


def codim_enumerator_brute(ring, size_limit=2**12):
    """F_n(z) over the brute-force filter dim Soc(R/I) = 1, non-homogeneous ideals included."""
    F = CodimEnumerator()
    for I in brute_all_ideals(ring, size_limit=size_limit):
        if socle(ring, I)[1] == 1:
            F.add(I.codim)
    rows = []
    for z in z_grid(ring.q):
        val, bnd = F(z), codim_bound(ring.q, ring.v, ring.n, z)
        rows.append({"z": z, "value": val, "bound": bnd, "holds": val <= bnd})
    return F, {"bounds": rows, "count": F.at_one()}


def x_T_ideal(ring, T):
    """x_T R: span of the basis monomials divisible by prod_{i in T} x_i."""
    T = sorted(set(T))
    rows = [
        np.eye(ring.dim, dtype=np.int64)[i]
        for i, t in enumerate(ring.basis)
        if all(t[l] >= 1 for l in T)
    ]
    return Ideal(ring, np.array(rows, dtype=np.int64).reshape(-1, ring.dim))


def codim_xT_bound(q, v, n, T_size, F_small, z):
    head = q / (q - 1) ** 2 * q ** (binom(n + v - 2, v - 1) - binom(n - T_size + v - 2, v - 1))
    return head + (F_small(z) if F_small is not None else 0)


def codim_enumerator_xT(ring, T, mode="relative", ideals=None):
    """Sum of z^codim(I cap x_T R) over socle-1 ideals, with its bound report.

    mode="relative" measures the codimension inside x_T R, mode="ring"
    inside the whole ring.
    """
    T = sorted(set(T))
    if not T or any(not 0 <= l < ring.v for l in T):
        raise RingError("T must be a nonempty set of variable indices")
    if mode not in ("relative", "ring"):
        raise ValueError(f"unknown codim mode {mode!r}")
    if ideals is None:
        ideals = list(enumerate_socle1(ring))
    xT = x_T_ideal(ring, T)
    F, F_pos = CodimEnumerator(), CodimEnumerator()
    for s1 in ideals:
        I = s1.ideal if isinstance(s1, Socle1Ideal) else s1
        n0 = s1.n0 if isinstance(s1, Socle1Ideal) else recover_n0(ring, I)
        cap = I.intersect(xT)
        c = (xT.dim if mode == "relative" else ring.dim) - cap.dim
        F.add(c)
        if n0:
            F_pos.add(c)
    n_small = ring.n - len(T)
    small_empty = n_small <= 0
    F_small = None if small_empty else codim_enumerator(ring_make(ring.ctx, ring.v, n_small))[0]
    rows = []
    for z in z_grid(ring.q):
        val = F(z)
        bnd = codim_xT_bound(ring.q, ring.v, ring.n, len(T), F_small, z)
        # the sum without the maximal ideal (n0 = 0), for comparison only
        rows.append({"z": z, "value": val, "bound": bnd, "holds": val <= bnd, "value_n0_ge1": F_pos(z), "n0_ge1_within_bound": F_pos(z) <= bnd})
    report = {
        "T": T,
        "mode": mode,
        "bounds": rows,
        "smaller_ring_empty": small_empty,
        "F_small": None if F_small is None else dict(F_small.coeffs),
    }
    return F, report


# brute-force ideal lattice ------------------------------------------------


def _quotient_reps(ctx, J, I_basis, ncols):
    """Rows of J that extend a basis of I to a basis of J."""
    reps = []
    cur = I_basis
    r = cur.shape[0]
    for row in J:
        trial = np.concatenate([cur, row[None, :]]).reshape(-1, ncols)
        rk = linalg.rank(ctx, trial, ncols)
        if rk > r:
            reps.append(row)
            cur, r = trial, rk
    return np.array(reps, dtype=np.int64).reshape(-1, ncols)


def brute_all_ideals(ring: QuotRing, size_limit=2**12, max_ideals=200_000):
    """Every ideal of the ring, found by walking the lattice upward by covers.

    The covers of I are I + F_q f for the lines F_q f of Soc(R/I); every
    proper inclusion of ideals passes through one, so a breadth-first walk
    from {0} reaches all ideals.
    """
    if ring.size > size_limit:
        raise RingError(f"|R| = {ring.size} exceeds the brute-force bound {size_limit}")
    ctx = ring.ctx
    start = zero_ideal(ring)
    seen = {start._key: start}
    frontier = [start]
    while frontier:
        nxt = []
        for I in frontier:
            J, s = socle(ring, I)
            if s == 0:
                continue
            reps = _quotient_reps(ctx, J, I.basis, ring.dim)
            for coef in projective_points(ring.q, s):
                f = ctx.sum(ctx.mul(np.array(coef)[:, None], reps), axis=0)
                new = Ideal(ring, np.concatenate([I.basis, np.asarray(f)[None, :]]), check=False)
                if new._key not in seen:
                    seen[new._key] = new
                    nxt.append(new)
                    if len(seen) > max_ideals:
                        raise RingError(f"more than {max_ideals} ideals")
        frontier = nxt
    return sorted(seen.values(), key=Ideal.sort_key)


def all_ideals_or_socle_le1(ring, size_limit=2**12):
    """All ideals when the brute force is feasible, else {R} plus the socle-1 ideals.

    Returns (ideals, complete flag).
    """
    from .quotring import whole_ring

    try:
        return brute_all_ideals(ring, size_limit=size_limit), True
    except RingError:
        ideals = [whole_ring(ring)] + [s.ideal for s in enumerate_socle1(ring)]
        return ideals, False
