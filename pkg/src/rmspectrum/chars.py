"""Additive and multiplicative characters of truncated quotient rings.

An additive character is indexed by a vector lam over F_q with
psi(r) = zeta_p ** Tr(sum_k lam_k r_k); every character of R_+ arises
exactly once this way because the trace form is nondegenerate.  A
multiplicative character is an exponent vector against a cyclic
decomposition of the unit group.  Phases are kept as exact integers and
only turned into complex numbers when summed.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb, gcd, lcm, sqrt

import numpy as np

from . import linalg
from .quotring import Ideal, QuotRing, RingElement, RingError, socle

ADDITIVE_LIMIT = 2**20
UNIT_LIMIT = 2**20


def _coeffs(x):
    return x.coeffs if isinstance(x, RingElement) else np.asarray(x, dtype=np.int64)


def root_of_unity(phase, order):
    return np.exp(2j * np.pi * np.asarray(phase) / order)


# additive characters -------------------------------------------------------


class AdditiveChar:
    __slots__ = ("ring", "lam")

    def __init__(self, ring: QuotRing, lam):
        lam = np.asarray(lam, dtype=np.int64)
        if lam.shape != (ring.dim,):
            raise RingError("lam must have one entry per basis monomial")
        lam.setflags(write=False)
        self.ring, self.lam = ring, lam

    def __repr__(self):
        return f"AdditiveChar(lam={self.lam.tolist()})"

    def __eq__(self, other):
        return isinstance(other, AdditiveChar) and other.ring == self.ring and np.array_equal(other.lam, self.lam)

    def __hash__(self):
        return hash((self.ring, self.lam.tobytes()))

    @property
    def index(self):
        return int(self.ring.index(self.lam))

    def is_trivial(self):
        return not self.lam.any()

    @property
    def functional(self):
        """The underlying F_p-linear functional on the F_p-coordinates of R.

        Entry [k * e + i] is the value on p**i times the k-th basis monomial.
        """
        ctx = self.ring.ctx
        digits = ctx.p ** np.arange(ctx.e, dtype=np.int64)
        vals = ctx.trace_table[np.asarray(ctx.mul(self.lam[:, None], digits[None, :]))]
        return vals.reshape(-1)

    def phase(self, R):
        """Tr(lam . r) in Z_p for r of shape (..., dim)."""
        ctx = self.ring.ctx
        return ctx.trace_table[np.asarray(ctx.sum(ctx.mul(_coeffs(R), self.lam), axis=-1))]

    def __call__(self, r):
        return root_of_unity(self.phase(r), self.ring.ctx.p)

    def shift(self, c):
        """psi_c: a -> psi(a c)."""
        return AdditiveChar(self.ring, _shift_lam(self.ring, self.lam, _coeffs(c)))


def _mult_matrix(ring, c):
    """Matrix Mc with (c * r) = Mc @ r on coefficient vectors ([k, i] = coeff of b_k in c*b_i)."""
    M = np.zeros((ring.dim, ring.dim), dtype=np.int64)
    pi = ring.prod_index
    for j in np.flatnonzero(c):
        for i in range(ring.dim):
            k = pi[j, i]
            if k >= 0:
                M[k, i] = ring.ctx.add(int(M[k, i]), int(c[j]))
    return M


def _shift_lam(ring, lam, c):
    M = _mult_matrix(ring, c)
    return np.asarray(ring.ctx.matmul(lam[None, :], M))[0]


def additive_chars(ring: QuotRing, limit=ADDITIVE_LIMIT):
    if ring.size > limit:
        raise RingError(f"|R| = {ring.size} exceeds the character bound {limit}")
    return [AdditiveChar(ring, lam) for lam in ring.from_index(np.arange(ring.size))]


def additive_phases(ring, lams, R):
    """Tr(lam . r) for every lam row and r row: shape (len(lams), len(R))."""
    ctx = ring.ctx
    lams = np.asarray(lams, dtype=np.int64).reshape(-1, ring.dim)
    R = np.asarray(R, dtype=np.int64).reshape(-1, ring.dim)
    return ctx.trace_table[np.asarray(ctx.matmul(lams, R.T))]


def kernel_matrix(ring, lam):
    """A[i, j] = lam[b_i * b_j]; c is in K_psi iff A c = 0."""
    lam = np.asarray(lam, dtype=np.int64)
    ext = np.concatenate([lam, [0]])
    return ext[ring.prod_index]


def kernel_matrices(ring, lams):
    lams = np.asarray(lams, dtype=np.int64).reshape(-1, ring.dim)
    ext = np.concatenate([lams, np.zeros((lams.shape[0], 1), dtype=np.int64)], axis=1)
    return ext[:, ring.prod_index]


def k_psi(psi: AdditiveChar) -> Ideal:
    ring = psi.ring
    rows = linalg.nullspace(ring.ctx, kernel_matrix(ring, psi.lam), ring.dim)
    return Ideal(ring, rows)


def k_psi_brute(psi: AdditiveChar) -> Ideal:
    """K_psi by scanning every c and every r; tiny rings only."""
    ring = psi.ring
    E = ring.all_elements()
    P = ring.mul(E[:, None, :], E[None, :, :])
    ok = np.all(psi.phase(P) == 0, axis=1)
    members = E[ok]
    return Ideal(ring, members)


def kernel_keys(ring, lams):
    """Canonical RREF bytes of K_psi for many characters at once.

    Returns (list of byte keys, ranks) where the key is the RREF of the
    kernel matrix (equal row spaces give equal kernels).
    """
    A = kernel_matrices(ring, lams)
    R, r = linalg.rref_batch(ring.ctx, A)
    return [m.tobytes() for m in R], r


def in_kernel_mask(ring, lam, C):
    """Boolean mask of the rows of C that lie in K_psi."""
    A = kernel_matrix(ring, lam)
    return ~np.any(np.asarray(ring.ctx.matmul(np.asarray(C).reshape(-1, ring.dim), A.T)) != 0, axis=1)


def g_value(psi: AdditiveChar, c) -> int:
    """#{d in R_x : psi(d c) = 1}."""
    ring = psi.ring
    U = ring.all_units()
    return int(np.count_nonzero(psi.phase(ring.mul(U, _coeffs(c))) == 0))


def g_table(ring, lams, C):
    """g(psi, c) for all lam rows and all c rows: shape (len(lams), len(C))."""
    U = ring.all_units()
    C = np.asarray(C, dtype=np.int64).reshape(-1, ring.dim)
    out = np.zeros((len(lams), len(C)), dtype=np.int64)
    for j, c in enumerate(C):
        prods = ring.mul(U, c)
        out[:, j] = np.count_nonzero(additive_phases(ring, lams, prods) == 0, axis=1)
    return out


def verify_kernel_lemma(ring):
    """g(psi, c) against ((p-1)|R|/p) [c in K_psi] over three domains of c.

    Domains: every c in R; c - 1 for units c; and c in the maximal ideal.
    """
    ctx = ring.ctx
    E = ring.all_elements()
    lams = E[1:]
    predicted_scale = (ctx.p - 1) * ring.size // ctx.p
    one = np.zeros(ring.dim, dtype=np.int64)
    one[0] = 1
    units = E[ring.unit_mask(E)]
    domains = {
        "all": E,
        "unit_shift": ring.sub(units, one),
        "maximal_ideal": E[~ring.unit_mask(E)],
    }
    report = {}
    for name, C in domains.items():
        G = g_table(ring, lams, C)
        examples, failures = [], 0
        for a, lam in enumerate(lams):
            pred = predicted_scale * in_kernel_mask(ring, lam, C)
            bad = np.flatnonzero(G[a] != pred)
            failures += int(bad.size)
            for b in bad[: max(0, 8 - len(examples))]:
                examples.append({"lam": lam.tolist(), "c": C[b].tolist(), "g": int(G[a, b]), "predicted": int(pred[b])})
        report[name] = {"checked": int(len(lams) * len(C)), "failures": failures, "examples": examples}
    return report


# unit group ----------------------------------------------------------------


class UnitGroup:
    """Cyclic decomposition of R_x with a full discrete-log table."""

    def __init__(self, ring, units, gens, orders, dlog):
        self.ring = ring
        self.units = units
        self.idx = ring.index(units)
        self.gens = gens
        self.orders = tuple(int(o) for o in orders)
        self.dlog = dlog
        self.L = lcm(*self.orders) if self.orders else 1
        self.weights = np.array([self.L // o for o in self.orders], dtype=np.int64)

    @property
    def size(self):
        return len(self.units)

    def positions(self, C):
        C = np.asarray(_coeffs(C), dtype=np.int64)
        keys = self.ring.index(C)
        pos = np.searchsorted(self.idx, keys)
        pos = np.minimum(pos, len(self.idx) - 1)
        if np.any(self.idx[pos] != keys):
            raise RingError("element is not a unit")
        return pos

    def log(self, u):
        return tuple(int(x) for x in self.dlog[self.positions(u)])

    def element(self, exps):
        ring = self.ring
        acc = ring.one().coeffs
        for g, e in zip(self.gens, exps):
            acc = ring.mul(acc, ring.power(g, int(e)))
        return acc

    def scalar_positions(self):
        ring = self.ring
        S = np.zeros((ring.q - 1, ring.dim), dtype=np.int64)
        S[:, 0] = np.arange(1, ring.q)
        return self.positions(S)

    def one_plus_positions(self, I: Ideal):
        if I.contains(self.ring.one()):
            raise RingError("1 + I is not a subgroup of units when I = R")
        els = I.elements().copy()
        els[:, 0] = self.ring.ctx.add(els[:, 0], 1)
        return self.positions(els)

    def subgroup_generated(self, gens):
        """Positions of the subgroup generated by the given units."""
        ring = self.ring
        cur = {int(self.positions(ring.one().coeffs))}
        frontier = list(cur)
        gpos = [np.asarray(_coeffs(g)) for g in gens]
        while frontier:
            C = self.units[frontier]
            new = []
            for g in gpos:
                for p in self.positions(ring.mul(C, g)).tolist():
                    if p not in cur:
                        cur.add(p)
                        new.append(p)
            frontier = new
        return np.array(sorted(cur), dtype=np.int64)

    def element_order(self, u):
        e = self.dlog[self.positions(u)]
        o = 1
        for x, oi in zip(e, self.orders):
            o = lcm(o, oi // gcd(int(x), oi))
        return o


def _solve_congruence(a, b, m):
    """Some t with a t = b (mod m), or None."""
    g = gcd(a, m)
    if b % g:
        return None
    a, b, m = a // g, b // g, m // g
    if m == 1:
        return 0
    return (b * pow(a, -1, m)) % m


@lru_cache(maxsize=64)
def unit_group_decompose(ring: QuotRing, limit=UNIT_LIMIT) -> UnitGroup:
    if ring.unit_count > limit:
        raise RingError(f"|R_x| = {ring.unit_count} exceeds the bound {limit}")
    U = ring.all_units()
    N = len(U)
    idx = ring.index(U)

    def pos(C):
        return np.searchsorted(idx, ring.index(C))

    one = ring.one().coeffs
    in_H = np.zeros(N, dtype=bool)
    dlog = np.zeros((N, 0), dtype=np.int64)
    in_H[pos(one)] = True
    gens, orders = [], []
    while not in_H.all():
        # quotient order of every unit modulo the current subgroup H
        qord = np.zeros(N, dtype=np.int64)
        cur = U.copy()
        t = 1
        while True:
            hit = in_H[pos(cur)] & (qord == 0)
            qord[hit] = t
            if (qord > 0).all():
                break
            cur = ring.mul(cur, U)
            t += 1
        order = np.lexsort((np.arange(N), -qord))
        chosen = None
        for cand in order:
            o = int(qord[cand])
            if chosen is not None or o < qord[order[0]]:
                break
            h = U[cand]
            s = dlog[pos(ring.power(h, o))]
            ts = []
            for sj, oj in zip(s.tolist(), orders):
                tj = _solve_congruence(o % oj, (-sj) % oj, oj)
                if tj is None:
                    break
                ts.append(tj)
            else:
                adj = h
                for g, tj in zip(gens, ts):
                    adj = ring.mul(adj, ring.power(g, tj))
                chosen = (adj, o)
        if chosen is None:
            raise AssertionError("no liftable element of maximal quotient order")
        g, o = chosen
        Hpos = np.flatnonzero(in_H)
        new_dlog = np.full((N, dlog.shape[1] + 1), -1, dtype=np.int64)
        base = U[Hpos]
        step = one
        for i in range(o):
            P = pos(ring.mul(base, step))
            if in_H[P].any() and i > 0:
                raise AssertionError("cyclic factor meets the current subgroup")
            new_dlog[P, :-1] = dlog[Hpos]
            new_dlog[P, -1] = i
            in_H[P] = True
            step = ring.mul(step, g)
        dlog = new_dlog
        gens.append(g)
        orders.append(o)
    if int(np.prod(orders, dtype=object)) != N:
        raise AssertionError("orders do not multiply to |R_x|")
    if len(np.unique(dlog, axis=0)) != N or (dlog < 0).any():
        raise AssertionError("discrete-log table is not a bijection")
    return UnitGroup(ring, U, gens, orders, dlog)


# multiplicative characters -------------------------------------------------


class MultChar:
    __slots__ = ("group", "exps")

    def __init__(self, group: UnitGroup, exps):
        exps = tuple(int(k) % o for k, o in zip(exps, group.orders))
        if len(exps) != len(group.orders):
            raise RingError("one exponent per cyclic factor is required")
        self.group, self.exps = group, exps

    def __repr__(self):
        return f"MultChar(exps={self.exps}, orders={self.group.orders})"

    def __eq__(self, other):
        return isinstance(other, MultChar) and other.group is self.group and other.exps == self.exps

    def __hash__(self):
        return hash((id(self.group), self.exps))

    def is_trivial(self):
        return not any(self.exps)

    def _vec(self):
        return np.array(self.exps, dtype=np.int64) * self.group.weights

    def phases(self, positions=None):
        """Exact phases in Z_L at the given unit positions (all units by default)."""
        D = self.group.dlog if positions is None else self.group.dlog[positions]
        return (D @ self._vec()) % self.group.L

    def __call__(self, u):
        pos = self.group.positions(u)
        return root_of_unity(self.phases(pos), self.group.L)

    def conj(self):
        return MultChar(self.group, tuple(-k for k in self.exps))

    def __mul__(self, other):
        return MultChar(self.group, tuple(a + b for a, b in zip(self.exps, other.exps)))


def mult_phase_table(group, chars):
    if not chars:
        return np.zeros((0, group.size), dtype=np.int64)
    K = np.array([c.exps for c in chars], dtype=np.int64).reshape(len(chars), -1) * group.weights
    return (K @ group.dlog.T) % group.L


def mult_chars(ring_or_group, trivial_on_scalars=False, trivial_on_one_plus=None):
    group = ring_or_group if isinstance(ring_or_group, UnitGroup) else unit_group_decompose(ring_or_group)
    chars = [MultChar(group, e) for e in product(*[range(o) for o in group.orders])]
    constraint = []
    if trivial_on_scalars:
        constraint.append(group.scalar_positions())
    if trivial_on_one_plus is not None:
        constraint.append(group.one_plus_positions(trivial_on_one_plus))
    if not constraint:
        return chars
    sub = np.unique(np.concatenate(constraint))
    ph = mult_phase_table(group, chars)[:, sub]
    keep = ~np.any(ph != 0, axis=1)
    return [c for c, k in zip(chars, keep) if k]


# Gauss sums ----------------------------------------------------------------


def gauss_sum(chi: MultChar, psi: AdditiveChar) -> complex:
    group = chi.group
    vals = root_of_unity(chi.phases(), group.L) * psi(group.units)
    return complex(vals.sum())


def gauss_matrix(group, chars, lams):
    """G[a, b] = G(chars[a], psi_{lams[b]})."""
    ring = group.ring
    chi = root_of_unity(mult_phase_table(group, chars), group.L)
    psi = root_of_unity(additive_phases(ring, lams, group.units), ring.ctx.p)
    return chi @ psi.T


def verify_gauss_formula(ring, tol=1e-6, all_rows=False):
    """Compare |G(chi, psi)|^2 with |R||K_psi| [chi(1 + K_psi) = 1] for nontrivial pairs.

    Rows list the failing pairs (at most 32), or every pair with all_rows.
    """
    group = unit_group_decompose(ring)
    chars = mult_chars(group)[1:]
    lams = ring.all_elements()[1:]
    G2 = np.abs(gauss_matrix(group, chars, lams)) ** 2
    phase = mult_phase_table(group, chars)
    size = ring.size
    tol_abs = tol * size**2
    rows, fails, max_err = [], 0, 0.0
    for b, lam in enumerate(lams):
        K = Ideal(ring, linalg.nullspace(ring.ctx, kernel_matrix(ring, lam), ring.dim))
        onep = group.one_plus_positions(K)
        trivial = ~np.any(phase[:, onep] != 0, axis=1)
        pred = size * K.size * trivial
        err = np.abs(G2[:, b] - pred)
        max_err = max(max_err, float(err.max(initial=0.0)))
        bad = err > tol_abs
        fails += int(bad.sum())
        for a in range(len(chars)) if all_rows else np.flatnonzero(bad):
            if all_rows or len(rows) < 32:
                rows.append(
                    {
                        "chi": list(chars[a].exps),
                        "lam": lam.tolist(),
                        "K_dim": K.dim,
                        "G2": float(G2[a, b]),
                        "predicted": int(pred[a]),
                        "holds": not bool(bad[a]),
                    }
                )
    return {
        "ring": [ring.q, ring.v, ring.n],
        "pairs": len(chars) * len(lams),
        "failures": fails,
        "max_abs_error": max_err,
        "tolerance": tol_abs,
        "failed_pairs": rows,
        "holds": fails == 0,
    }


def verify_additive_count(ring, ideals=None, complete=None):
    """Group all |R| additive characters by K_psi and compare with the socle formula.

    ``ideals`` defaults to every ideal (brute force) or, for larger rings,
    to R plus the socle-1 ideals, which carry every nonzero prediction.
    """
    from fractions import Fraction

    from .ideals import all_ideals_or_socle_le1

    if ideals is None:
        ideals, complete = all_ideals_or_socle_le1(ring)
    lams = ring.all_elements()
    qctx = ring.ctx
    A = kernel_matrices(ring, lams)
    observed = {}
    # chunk to keep memory flat on the larger rings
    for start in range(0, len(lams), 4096):
        chunk = A[start : start + 4096]
        for lam_mat in chunk:
            K = Ideal(ring, linalg.nullspace(qctx, lam_mat, ring.dim), check=False)
            observed[K._key] = observed.get(K._key, 0) + 1
    rows, ok = [], True
    predicted_total = 0
    listed = set()
    for I in ideals:
        s = socle(ring, I)[1]
        factor = {0: Fraction(1), 1: 1 - Fraction(1, ring.q)}.get(s, Fraction(0))
        pred = Fraction(ring.size, I.size) * factor
        predicted_total += pred
        obs = observed.get(I._key, 0)
        listed.add(I._key)
        good = pred == obs
        ok &= good
        rows.append({"dim": I.dim, "codim": I.codim, "socle_dim": s, "predicted": str(pred), "observed": obs, "holds": good})
    unlisted = sum(c for k, c in observed.items() if k not in listed)
    ok &= unlisted == 0 and predicted_total == ring.size
    return {
        "ring": [ring.q, ring.v, ring.n],
        "ideals": len(ideals),
        "complete_ideal_list": bool(complete),
        "characters": int(len(lams)),
        "unlisted_kernels": int(unlisted),
        "predicted_total": str(predicted_total),
        "rows": rows,
        "holds": bool(ok),
    }


# abelian groups and character tuples ---------------------------------------


class AbelianGroup:
    """Z_{o_1} x ... x Z_{o_m}; elements are exponent tuples."""

    def __init__(self, orders):
        self.orders = tuple(int(o) for o in orders)
        self.L = lcm(*self.orders) if self.orders else 1
        self.weights = np.array([self.L // o for o in self.orders], dtype=np.int64)
        self.size = int(np.prod(self.orders, dtype=np.int64)) if self.orders else 1

    def elements(self):
        return np.array(list(product(*[range(o) for o in self.orders])), dtype=np.int64).reshape(self.size, -1)

    def subgroup(self, gens):
        """All elements of the subgroup generated by gens, as a sorted array of rows."""
        o = np.array(self.orders, dtype=np.int64)
        cur = {tuple([0] * len(o))}
        frontier = list(cur)
        gens = [np.asarray(g, dtype=np.int64) % o for g in gens]
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = tuple(((np.array(x) + g) % o).tolist())
                    if y not in cur:
                        cur.add(y)
                        new.append(y)
            frontier = new
        return np.array(sorted(cur), dtype=np.int64).reshape(len(cur), len(o))

    def pairing(self, chars, elems):
        """Phase table in Z_L of characters (rows) against elements (rows)."""
        chars = np.asarray(chars, dtype=np.int64).reshape(-1, len(self.orders))
        elems = np.asarray(elems, dtype=np.int64).reshape(-1, len(self.orders))
        return ((chars * self.weights) @ elems.T) % self.L


def _rows_set(A):
    return {tuple(r) for r in np.asarray(A).tolist()}


def char_tuple_count(G: AbelianGroup, subgroups, H, chi):
    """Tuples (chi_1..chi_n) with chi_i(G_i) = 1 and prod chi_i = chi on H.

    ``subgroups`` and ``H`` are element arrays; ``chi`` is an exponent
    tuple.  Returns a dict with the enumerated count and the closed form.
    """
    from fractions import Fraction

    o = np.array(G.orders, dtype=np.int64)
    chars = G.elements()
    allowed = []
    for Gi in subgroups:
        ph = G.pairing(chars, Gi)
        allowed.append(chars[~np.any(ph != 0, axis=1)])
    # dynamic programme over the running product character
    counts = {tuple([0] * len(o)): 1}
    for A in allowed:
        nxt = {}
        for x, c in counts.items():
            ys = (np.array(x) + A) % o
            for y in map(tuple, ys.tolist()):
                nxt[y] = nxt.get(y, 0) + c
        counts = nxt
    target = G.pairing(np.asarray(chi)[None, :], H)[0]
    keys = np.array(list(counts), dtype=np.int64).reshape(len(counts), len(o))
    match = ~np.any(G.pairing(keys, H) != target[None, :], axis=1)
    brute = int(sum(c for k, c, m in zip(counts, counts.values(), match) if m))

    K = _rows_set(G.elements())
    for Gi in subgroups:
        K &= _rows_set(Gi)
    HK = np.array(sorted(_rows_set(H) & K), dtype=np.int64).reshape(-1, len(o))
    chi_on_HK = not np.any(G.pairing(np.asarray(chi)[None, :], HK) != 0)
    formula = Fraction(len(HK), len(H))
    for Gi in subgroups:
        formula *= Fraction(G.size, len(Gi))
    formula *= int(chi_on_HK)
    return {"count": brute, "formula": formula, "holds": formula == brute}


def char_tuple_count_literal(G: AbelianGroup, subgroups, H, chi):
    """Same count by iterating over every tuple of characters; tiny groups only."""
    chars = G.elements()
    o = np.array(G.orders, dtype=np.int64)
    target = G.pairing(np.asarray(chi)[None, :], H)[0]
    triv = [~np.any(G.pairing(chars, Gi) != 0, axis=1) for Gi in subgroups]
    count = 0
    for tup in product(range(len(chars)), repeat=len(subgroups)):
        if not all(triv[i][t] for i, t in enumerate(tup)):
            continue
        prod_chi = chars[list(tup)].sum(axis=0) % o
        if np.array_equal(G.pairing(prod_chi[None, :], H)[0], target):
            count += 1
    return count


def random_tuple_instance(rng, max_size=2**10):
    """A random (G, [G_i], H, chi) with |G| <= max_size."""
    while True:
        m = int(rng.integers(1, 4))
        orders = [int(rng.integers(1, 9)) for _ in range(m)]
        if int(np.prod(orders)) <= max_size:
            break
    G = AbelianGroup(orders)
    o = np.array(orders)

    def rand_sub():
        k = int(rng.integers(0, 3))
        return G.subgroup([rng.integers(0, o) for _ in range(k)])

    n = int(rng.integers(1, 4))
    subs = [rand_sub() for _ in range(n)]
    H = rand_sub()
    if rng.random() < 0.5:
        chi = tuple(int(x) for x in rng.integers(0, o))
    else:
        # a character trivial on H cap K so the count is nonzero
        K = _rows_set(G.elements())
        for Gi in subs:
            K &= _rows_set(Gi)
        HK = np.array(sorted(_rows_set(H) & K), dtype=np.int64).reshape(-1, m)
        ok = G.elements()[~np.any(G.pairing(G.elements(), HK) != 0, axis=1)]
        chi = tuple(int(x) for x in ok[rng.integers(0, len(ok))])
    return G, subs, H, chi


# unit statistics ----------------------------------------------------------


def ceil_log(p, n):
    """Smallest j >= 0 with p**j >= n."""
    j = 0
    while p**j < n:
        j += 1
    return j


def _ring_order(ring, u):
    one = ring.one().coeffs
    cur, k = np.asarray(u), 1
    while not np.array_equal(cur, one):
        cur = ring.mul(cur, u)
        k += 1
    return k


def _projective_order(ring, u):
    cur, k = np.asarray(u), 1
    while np.any(cur[1:]):
        cur = ring.mul(cur, u)
        k += 1
    return k


def unit_statistics(ring, l=0, chars=None):
    """Orders of x_l - a, the mean character-sum magnitude, and the curve-sum ratio."""
    ctx = ring.ctx
    q, p, n = ring.q, ctx.p, ring.n
    group = unit_group_decompose(ring)
    if chars is None:
        chars = mult_chars(group)
    claim = p ** ceil_log(p, n)
    xl = ring.variable(l).coeffs
    orders, proj, one_minus = {}, {}, {}
    lin, lin2 = [], []
    for a in range(1, q):
        u = ring.sub(xl, ring.scalar(a).coeffs)
        w = ring.sub(ring.one().coeffs, ring.scale(a, xl))
        orders[a] = _ring_order(ring, u)
        proj[a] = _projective_order(ring, u)
        one_minus[a] = _ring_order(ring, w)
        lin.append(u)
        lin2.append(w)
    phase = mult_phase_table(group, chars)
    vals = root_of_unity(phase[:, group.positions(np.array(lin))], group.L)
    sums = np.abs(vals.sum(axis=1))
    mean_abs = float(sums.mean())
    mean_bound = (q - 1) / sqrt(p - 1) if p > 1 else float("inf")
    constrained = [i for i, c in enumerate(chars) if not np.any(phase[i, group.scalar_positions()] != 0)]
    mean_constrained = float(sums[constrained].mean()) if constrained else None
    vals2 = root_of_unity(phase[:, group.positions(np.array(lin2))], group.L)
    sums2 = np.abs(vals2.sum(axis=1))
    weil = min(n - 1, (q - 1) / sqrt(q * (p - 1))) * sqrt(q)
    nontriv = [i for i, c in enumerate(chars) if not c.is_trivial()]
    max_ratio = float(max((sums2[i] / weil for i in nontriv), default=0.0)) if weil > 0 else None
    return {
        "ring": [q, ring.v, n],
        "l": l,
        "claimed_order": claim,
        "orders": orders,
        "orders_match": all(o == claim for o in orders.values()),
        "projective_orders": proj,
        "projective_match": all(o == claim for o in proj.values()),
        "one_minus_orders": one_minus,
        "one_minus_match": all(o == claim for o in one_minus.values()),
        "mean_abs": mean_abs,
        "mean_bound": mean_bound,
        "mean_holds": mean_abs <= mean_bound + 1e-9,
        "mean_abs_constrained": mean_constrained,
        "weil_bound": weil,
        "weil_max_ratio": max_ratio,
        "characters": len(chars),
    }


def p_independence_check(ring, kmax=None):
    """Products prod (1 + a_i x_1)^{n_i} != 1 for distinct a_i, k <= kmax, 1 <= n_i < p^ceil(log_p n)."""
    from itertools import combinations

    ctx = ring.ctx
    p, q = ctx.p, ring.q
    kmax = p - 1 if kmax is None else kmax
    top = p ** ceil_log(p, ring.n)
    one = ring.one().coeffs
    x1 = ring.variable(0).coeffs
    base = {a: ring.add(one, ring.scale(a, x1)) for a in range(1, q)}
    powers = {a: [None] + [ring.power(base[a], e) for e in range(1, top)] for a in base}
    checked, violations = 0, []
    for k in range(1, kmax + 1):
        for As in combinations(range(1, q), k):
            for ns in product(range(1, top), repeat=k):
                acc = one
                for a, e in zip(As, ns):
                    acc = ring.mul(acc, powers[a][e])
                checked += 1
                if np.array_equal(acc, one):
                    violations.append({"a": list(As), "n": list(ns)})
    return {"checked": checked, "violations": violations[:16], "holds": not violations}


def tuple_probability_bound(q, p, n, t0):
    s = sum(comb(q, k) * (n / p) ** k for k in range(1, p // 2 + 1))
    return s ** (-t0)


def tuple_probability_fraction(ring, I: Ideal, T0, chi: MultChar, k):
    """Exact fraction of k-tuples (chi_i trivial on F_q^* and 1+I) whose product matches chi on x_l - a."""
    from fractions import Fraction

    group = chi.group
    A = mult_chars(group, trivial_on_scalars=True, trivial_on_one_plus=I)
    pts = []
    for l in T0:
        xl = ring.variable(l).coeffs
        for a in range(1, ring.q):
            pts.append(ring.sub(xl, ring.scalar(a).coeffs))
    pos = group.positions(np.array(pts))
    o = np.array(group.orders, dtype=np.int64)
    counts = {tuple([0] * len(o)): 1}
    Aexp = np.array([c.exps for c in A], dtype=np.int64).reshape(len(A), len(o))
    for _ in range(k):
        nxt = {}
        for x, c in counts.items():
            for y in map(tuple, ((np.array(x) + Aexp) % o).tolist()):
                nxt[y] = nxt.get(y, 0) + c
        counts = nxt
    target = chi.phases(pos)
    hits = 0
    for x, c in counts.items():
        if np.array_equal(MultChar(group, x).phases(pos), target):
            hits += c
    return Fraction(hits, len(A) ** k)


def verify_tuple_probability(ring, k=2, max_ideals=8):
    """Max empirical fraction over chi, socle-1 I and T0 against the stated bound."""
    from itertools import combinations

    from .ideals import enumerate_socle1

    group = unit_group_decompose(ring)
    chars = mult_chars(group)
    p = ring.ctx.p
    rows = []
    for s1 in list(enumerate_socle1(ring))[:max_ideals]:
        for size in range(1, ring.v + 1):
            for T0 in combinations(range(ring.v), size):
                frac = max(tuple_probability_fraction(ring, s1.ideal, T0, chi, k) for chi in chars)
                bnd = tuple_probability_bound(ring.q, p, ring.n, len(T0))
                rows.append(
                    {
                        "n0": s1.n0,
                        "S": list(s1.S),
                        "T0": list(T0),
                        "max_fraction": str(frac),
                        "bound": bnd,
                        "holds": float(frac) <= bnd + 1e-12,
                    }
                )
    return {"ring": [ring.q, ring.v, ring.n], "k": k, "p_equals_2": p == 2, "rows": rows, "holds": all(r["holds"] for r in rows)}
