"""Exact oracles for zero-count distributions and the main error bound.

Two views of one count are kept side by side.  Polynomial side: box
polynomials h whose terms all have degree >= ell, bucketed by how many
nonzero points the reversal of h vanishes on.  Code side: evaluations on
D = F_q^v minus the origin of polynomials of degree <= d-1, bucketed by
distance from a received word.  Reversal maps one set onto the other when
d - 1 = v(q-1) - ell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, comb

import mpmath
import numpy as np

from . import chars as ch
from . import mpoly
from .ff import FieldCtx, gf
from .quotring import RingElement, ring_make, s_and_red

ENUM_LIMIT = 10**7
mpmath.mp.prec = 128


class BoundExceeded(ValueError):
    """An enumeration would exceed its configured size bound."""


def gen_binom_int(n, k):
    """Polynomial binomial C(n, k) for integer n of any sign and k >= 0."""
    if k < 0:
        return 0
    num = 1
    for i in range(k):
        num *= n - i
    den = 1
    for i in range(2, k + 1):
        den *= i
    return num // den


@dataclass(frozen=True)
class CodeParams:
    q: int
    v: int
    ell: int

    def __post_init__(self):
        if self.v < 1:
            raise ValueError("v must be positive")
        gf(self.q)
        if not 1 <= self.ell <= self.v * (self.q - 1):
            raise ValueError(f"ell = {self.ell} outside [1, v(q-1)] = [1, {self.v * (self.q - 1)}]")

    @classmethod
    def from_d(cls, q, v, d):
        return cls(q, v, v * (q - 1) - d + 1)

    @property
    def d(self):
        return self.v * (self.q - 1) - self.ell + 1

    @property
    def n_len(self):
        return self.q**self.v - 1

    @property
    def ctx(self) -> FieldCtx:
        return gf(self.q)

    @property
    def p(self):
        return self.ctx.p

    @property
    def E(self):
        return coeff_count(self.q, self.v, self.ell)

    @property
    def eps_ring(self):
        return ring_make(self.ctx, self.v, self.ell)


@dataclass
class BoundParams:
    E: int
    q1: object
    q2: object
    q1_mode: str
    negative_factor: bool
    denominator: object


# counts ---------------------------------------------------------------------


def coeff_count(q, v, ell):
    """#{t in [0, q-1]^v : sum t <= ell - 1}."""
    if ell < 1:
        return 0
    return int(np.count_nonzero(mpoly.degree_grid(q, v) <= ell - 1))


def _check(count, limit, what):
    if count > limit:
        raise BoundExceeded(f"enumeration bound exceeded: {what} = {count} > {limit}")


def _points(q, v):
    return mpoly.points(q, v)


def _point_index(q, pt):
    i = 0
    for c in pt:
        i = i * q + int(c)
    return i


def lagrange_prefix_table(params: CodeParams):
    """Reduction in the prefix ring of every P_w, one row per point w (row-major)."""
    ctx = params.ctx
    rows = []
    for w in _points(params.q, params.v):
        P = mpoly.lagrange_basis(ctx, w)
        rows.append(mpoly.prefix_truncate(P, params.ell).coeffs)
    return np.array(rows, dtype=np.int64)


def _normalise_Z(params, Z):
    pts = set()
    for z in Z:
        z = tuple(int(c) for c in z)
        if len(z) != params.v or any(not 0 <= c < params.q for c in z):
            raise ValueError(f"{z} is not a point of F_{params.q}^{params.v}")
        if not any(z):
            raise ValueError("Z must avoid the origin")
        pts.add(z)
    return pts


def nz_distribution(params: CodeParams, Z, table=None):
    """Histogram over the prefix ring of sum_{w not in Z} a_w P_w, a_w in F_q^*.

    Entry [idx] counts the tuples whose sum reduces to the element with
    index idx; the histogram is built by convolving one point at a time.
    """
    Z = _normalise_Z(params, Z)
    E = params.eps_ring
    _check(E.size, ENUM_LIMIT, "|prefix ring|")
    ctx = params.ctx
    if table is None:
        table = lagrange_prefix_table(params)
    els = E.from_index(np.arange(E.size))
    big = (params.q - 1) ** (params.q**params.v) >= 2**62
    hist = np.zeros(E.size, dtype=object if big else np.int64)
    hist[0] = 1
    for i, w in enumerate(_points(params.q, params.v)):
        if w in Z:
            continue
        new = np.zeros_like(hist)
        for a in range(1, params.q):
            shift = np.asarray(ctx.mul(a, table[i]))
            perm = E.index(E.add(els, shift))
            np.add.at(new, perm, hist)
        hist = new
    return hist


def nz_exact(params: CodeParams, Z, eps0, table=None):
    eps = eps0.coeffs if isinstance(eps0, RingElement) else np.asarray(eps0, dtype=np.int64)
    return int(nz_distribution(params, Z, table)[int(params.eps_ring.index(eps))])


def nz_exact_brute(params: CodeParams, Z, eps0, limit=2**16):
    """Same count by listing every tuple (a_w); small cases only."""
    Z = _normalise_Z(params, Z)
    ctx = params.ctx
    pts = [w for w in _points(params.q, params.v) if w not in Z]
    _check((params.q - 1) ** len(pts), limit, "(q-1)^(q^v-|Z|)")
    table = lagrange_prefix_table(params)
    rows = np.array([table[_point_index(params.q, w)] for w in pts]).reshape(len(pts), -1)
    eps = eps0.coeffs if isinstance(eps0, RingElement) else np.asarray(eps0, dtype=np.int64)
    m = len(pts)
    N = (params.q - 1) ** m
    idx = np.arange(N)
    tuples = 1 + (idx[:, None] // (params.q - 1) ** np.arange(m)) % (params.q - 1)
    sums = np.asarray(ctx.matmul(tuples, rows)) if m else np.zeros((1, rows.shape[1]), dtype=np.int64)
    return int(np.count_nonzero(np.all(sums == eps, axis=1)))


def _subsets(params, s):
    nonzero = [w for w in _points(params.q, params.v) if any(w)]
    return combinations(nonzero, s)


def z_sweep_total(params, s):
    """Sum over |Z| = s and over all reductions of nz (the Z-sweep oracle)."""
    _check(comb(params.q**params.v - 1, s), ENUM_LIMIT, "C(q^v-1, s)")
    table = lagrange_prefix_table(params)
    return sum(int(nz_distribution(params, Z, table).sum()) for Z in _subsets(params, s))


# zero histograms ---------------------------------------------------------


def m_v_closed_form(q, v, s):
    """|M_v(s)|: box polynomials with nonzero constant term and exactly s zeroes."""
    N = q**v
    if not 0 <= s <= N - 1:
        return 0
    return comb(N - 1, s) * (q - 1) ** (N - s)


def _phi_coeffs(q, v):
    """Coefficients of ((q - 1 + t)/q)^{(q-1) q^{v-1}} as Fractions."""
    m = (q - 1) * q ** (v - 1)
    return [Fraction(comb(m, s) * (q - 1) ** (m - s), q**m) for s in range(m + 1)]


def zero_histogram(q, v, limit=ENUM_LIMIT):
    """Exhaustive |M_v(s)| for s = 0..q^v - 1, with the closed-form comparisons."""
    ctx = gf(q)
    N = q**v
    total = (q - 1) * q ** (N - 1)
    _check(total, limit, "(q-1) q^(q^v-1)")
    counts = np.zeros(N + 1, dtype=np.int64)
    chunk = 1 << 15
    powers = q ** np.arange(N - 1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        c0 = 1 + idx % (q - 1)
        rest = idx // (q - 1)
        C = np.zeros((idx.size, N), dtype=np.int64)
        C[:, 0] = c0
        if N > 1:
            C[:, 1:] = (rest[:, None] // powers) % q
        z = mpoly.count_zeroes_batch(ctx, C.reshape((-1,) + (q,) * v), v)
        counts += np.bincount(z, minlength=N + 1)
    counts = [int(c) for c in counts[:N]]
    closed = [m_v_closed_form(q, v, s) for s in range(N)]
    phi = _phi_coeffs(q, v)
    predicted_phi = [total * (phi[s] if s < len(phi) else 0) for s in range(N)]
    m = (q - 1) * q ** (v - 1)
    predicted_closed = [comb(m, s) * q ** (m - s) if s <= m else 0 for s in range(N)]
    return {
        "q": q,
        "v": v,
        "counts": counts,
        "closed_form": closed,
        "closed_form_agrees": closed == counts,
        "predicted_phi": [str(x) for x in predicted_phi],
        "predicted_phi_agrees": [Fraction(c) == x for c, x in zip(counts, predicted_phi)],
        "predicted_closed": predicted_closed,
        "predicted_closed_agrees": [c == x for c, x in zip(counts, predicted_closed)],
    }


# centres -----------------------------------------------------------------


def center_eq1(params, s):
    q, v = params.q, params.v
    m = (q - 1) * q ** (v - 1)
    if s < 0 or s > m:
        return Fraction(0)
    return Fraction(comb(m, s) * q ** (m - s), params.eps_ring.size)


def center_thm1(params, k):
    q, v = params.q, params.v
    m = (q - 1) * q ** (v - 1)
    if k < 0 or k > m:
        return Fraction(0)
    return comb(m, k) * Fraction(q) ** (k - params.E - q ** (v - 1) + 1)


def center_oracle(params, s, mode="closed"):
    """(1/q^E) sum_eps sum_{|Z|=s} N_Z(eps), exactly.

    mode "sweep" runs the Z-sweep, "histogram" the exhaustive zero
    histogram and "closed" the closed form for |M_v(s)|.
    """
    if mode == "sweep":
        total = z_sweep_total(params, s)
    elif mode == "histogram":
        total = zero_histogram(params.q, params.v)["counts"][s] if 0 <= s < params.q**params.v else 0
    elif mode == "closed":
        total = m_v_closed_form(params.q, params.v, s)
    else:
        raise ValueError(f"unknown oracle mode {mode!r}")
    return Fraction(total, params.q**params.E)


def centers(params, s, oracle_mode="sweep"):
    k = params.q**params.v - 1 - s
    return {
        "s": s,
        "k": k,
        "eq1": center_eq1(params, s),
        "thm1": center_thm1(params, k),
        "oracle": center_oracle(params, s, oracle_mode),
    }


# N_k histograms ------------------------------------------------------------


def _free_mask(params):
    return mpoly.degree_grid(params.q, params.v) >= params.ell


def _enumerate_on_mask(q, v, mask, chunk=1 << 14):
    """Yield coefficient batches ranging over all arrays supported on mask."""
    where = np.flatnonzero(mask.ravel())
    F = where.size
    total = q**F
    powers = q ** np.arange(F, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        C = np.zeros((idx.size, q**v), dtype=np.int64)
        if F:
            C[:, where] = (idx[:, None] // powers) % q
        yield C.reshape((-1,) + (q,) * v)


def _as_box(params, g):
    if g is None:
        return np.zeros((params.q,) * params.v, dtype=np.int64)
    if isinstance(g, mpoly.BoxPolynomial):
        return g.coeffs
    return np.asarray(g, dtype=np.int64).reshape((params.q,) * params.v)


def nk_exact(params: CodeParams, g=None, side="poly"):
    """Histogram over k = 0..q^v - 1.

    side="poly": f = g + h over all h with no terms of degree < ell; k is
    |D| minus the number of nonzero zeroes of reversal(f - g).
    side="code": distances on D from the received word
    eval_D(reversal(g - prefix(g))) to every codeword of RM_q(d, v).
    """
    q, v = params.q, params.v
    ctx = params.ctx
    N = q**v
    g = _as_box(params, g)
    hist = np.zeros(N, dtype=np.int64)
    if side == "poly":
        mask = _free_mask(params)
        _check(q ** int(mask.sum()), ENUM_LIMIT, "q^(q^v-E)")
        for H in _enumerate_on_mask(q, v, mask):
            F = np.asarray(ctx.add(H, g[None]))
            diff = np.asarray(ctx.sub(F, g[None]))
            z = mpoly.count_zeroes_batch(ctx, mpoly.reversal_batch(diff, v), v, include_origin=False)
            np.add.at(hist, N - 1 - z, 1)
        return hist
    if side == "code":
        mask = mpoly.degree_grid(q, v) <= params.d - 1
        _check(q ** int(mask.sum()), ENUM_LIMIT, "|RM_q(d, v)|")
        high = np.where(_free_mask(params), g, 0)
        u = mpoly.eval_batch(ctx, mpoly.reversal_batch(high, v), v).ravel()[1:]
        for C in _enumerate_on_mask(q, v, mask):
            vals = mpoly.eval_batch(ctx, C, v).reshape(C.shape[0], -1)[:, 1:]
            dist = np.count_nonzero(vals != u[None, :], axis=1)
            np.add.at(hist, dist, 1)
        return hist
    raise ValueError(f"unknown side {side!r}")


def nk_exact_literal(params: CodeParams, g=None, limit=2**16):
    """The poly-side histogram by scanning every f in the box; tiny cases only."""
    q, v = params.q, params.v
    ctx = params.ctx
    N = q**v
    _check(q**N, limit, "q^(q^v)")
    g = _as_box(params, g)
    hist = np.zeros(N, dtype=np.int64)
    for F in _enumerate_on_mask(q, v, np.ones((q,) * v, dtype=bool)):
        diff = np.asarray(ctx.sub(F, g[None]))
        keep = ~np.any(mpoly.prefix_vectors(ctx, diff, v, params.ell) != 0, axis=-1)
        z = mpoly.count_zeroes_batch(ctx, mpoly.reversal_batch(diff[keep], v), v, include_origin=False)
        np.add.at(hist, N - 1 - z, 1)
    return hist


def g_sweep(params, source, n_random=5):
    """Resolve a g source: 'zero', 'random:SEED' or 'all'."""
    q, v = params.q, params.v
    shape = (q,) * v
    if source == "zero":
        return [("zero", np.zeros(shape, dtype=np.int64))]
    if source.startswith("random:"):
        seed = int(source.split(":", 1)[1])
        rng = np.random.default_rng(seed)
        return [(f"random:{seed}:{i}", rng.integers(0, q, size=shape)) for i in range(n_random)]
    if source == "all":
        _check(q ** (q**v), 256, "q^(q^v) for g=all")
        out = []
        for C in _enumerate_on_mask(q, v, np.ones(shape, dtype=bool)):
            for c in C:
                out.append((f"all:{len(out)}", c))
        return out
    raise ValueError(f"unknown g source {source!r}")


# character-sum error check -------------------------------------------------


def charsum_factors(params: CodeParams):
    """Per point alpha and nontrivial psi: the character expansion and the direct factor.

    Returns (points, lams, Q, direct, flags): Q[i, b] is
    sum_{chi(F_q^*) = 1} Q_alpha(chi, psi_b) and direct[i, b] is
    sum_{a in F_q^*} psi_b(a Pbar_alpha).
    """
    E = params.eps_ring
    ctx = params.ctx
    q = params.q
    _check(E.size, 2**14, "|prefix ring| for characters")
    pts = _points(q, params.v)
    table = lagrange_prefix_table(params)
    lams = E.all_elements()[1:]
    group = ch.unit_group_decompose(E)
    chars_f = ch.mult_chars(group, trivial_on_scalars=True)
    conj = [c.conj() for c in chars_f]
    Q = np.zeros((len(pts), len(lams)), dtype=complex)
    direct = np.zeros((len(pts), len(lams)), dtype=complex)
    flags = {"zero_reduction": [], "non_unit_red": []}
    scale = q / E.size
    for i, w in enumerate(pts):
        red_vec = table[i]
        for a in range(1, q):
            direct[i] += np.exp(2j * np.pi * ch.additive_phases(E, lams, np.asarray(ctx.mul(a, red_vec)))[:, 0] / ctx.p)
        if not red_vec.any():
            flags["zero_reduction"].append(list(w))
            Q[i] = q - 1
            continue
        S, Red = s_and_red(RingElement(E, red_vec))
        if not Red.is_unit():
            flags["non_unit_red"].append(list(w))
            Q[i] = direct[i]
            continue
        S_el = E.monomial(S).coeffs
        shifted = np.array([ch._shift_lam(E, lam, S_el) for lam in lams])
        G = ch.gauss_matrix(group, conj, shifted)
        chi_red = np.array([c(Red.coeffs) for c in chars_f]).reshape(-1)
        Q[i] = scale * (chi_red[:, None] * G).sum(axis=0)
    return pts, lams, Q, direct, flags


def charsum_error_check(params: CodeParams, s, eps0, factors=None, tol=1e-6):
    E = params.eps_ring
    q = params.q
    eps = eps0.coeffs if isinstance(eps0, RingElement) else np.asarray(eps0, dtype=np.int64)
    eidx = int(E.index(eps))
    pts, lams, Q, direct, flags = factors if factors is not None else charsum_factors(params)
    table = lagrange_prefix_table(params)
    _check(comb(q**params.v - 1, s), 10**5, "C(q^v-1, s)")
    target, everything = 0, 0
    sums = np.zeros(len(lams), dtype=complex)
    for Z in _subsets(params, s):
        dist = nz_distribution(params, Z, table)
        target += int(dist[eidx])
        everything += int(dist.sum())
        keep = [i for i, w in enumerate(pts) if w not in set(Z)]
        sums += np.prod(Q[keep], axis=0)
    signed = Fraction(target) - Fraction(everything, E.size)
    lhs = abs(signed)
    rhs = float(np.abs(sums).sum() / E.size)
    psi_eps = np.exp(2j * np.pi * ch.additive_phases(E, lams, eps)[:, 0] / params.p)
    identity = complex((np.conj(psi_eps) * sums).sum() / E.size)
    return {
        "s": s,
        "eps0": eps.tolist(),
        "lhs": lhs,
        "signed": signed,
        "rhs": rhs,
        "holds": float(lhs) <= rhs + tol,
        "identity_residual": abs(identity - float(signed)),
        "expansion_deviation": float(np.abs(Q - direct).max(initial=0.0)),
        "alpha_zero_included": True,
        "flags": flags,
    }


def charsum_sweep(params: CodeParams, s):
    """charsum_error_check for every eps0 in the prefix ring."""
    factors = charsum_factors(params)
    E = params.eps_ring
    rows = [charsum_error_check(params, s, e, factors) for e in E.all_elements()]
    return {"rows": rows, "signed_total": sum(r["signed"] for r in rows)}


# the bound -----------------------------------------------------------------


Q1_MODES = ("proof_min_sqrt", "thm_max")


def bound_params(params: CodeParams, q1_mode="proof_min_sqrt") -> BoundParams:
    mp = mpmath.mpf
    q, p, ell = params.q, params.p, params.ell
    base = mp(q - 1) / mpmath.sqrt(mp(q) * (p - 1))
    if q1_mode == "thm_max":
        q1 = max(mp(ell - 1), base)
    elif q1_mode == "proof_min_sqrt":
        q1 = min(mp(ell - 1), base) * mpmath.sqrt(q)
    else:
        raise ValueError(f"unknown q1 mode {q1_mode!r}")
    den = sum(comb(q, k) * (mp(ell) / p) ** k for k in range(1, p // 2 + 1))
    top = mp(q - 1) / mpmath.sqrt(p - 1)
    q2 = q1 + (top - q1) / den
    return BoundParams(params.E, q1, q2, q1_mode, bool(top - q1 < 0), den)


def gen_binomial(x, k):
    """C(x + k - 1, k - 1) = prod_{j=1}^{k-1} (x + j) / j; returns (value, degenerate flag)."""
    if k <= 0:
        return mpmath.mpf(1), True
    val = mpmath.mpf(1)
    for j in range(1, k):
        val *= (x + j) / j
    return val, False


def theorem1_bound(params: CodeParams, k, q1_mode="proof_min_sqrt", form="statement"):
    """Right-hand side of the bound at distance k.  form="proof" divides the top by (q-1)^2."""
    bp = bound_params(params, q1_mode)
    q, v, ell = params.q, params.v, params.ell
    x = v * bp.q2 * mpmath.mpf(q) ** gen_binom_int(ell + v - 3, v - 1)
    if form == "proof":
        x = x / (q - 1) ** 2
    elif form != "statement":
        raise ValueError(f"unknown bound form {form!r}")
    gb, degenerate = gen_binomial(x, k)
    expo = k * (comb(ceil(ell / 2) + v, v) + 1) - bp.E
    return gb * mpmath.mpf(q) ** expo, degenerate


def _frac_le(x: Fraction, bound):
    return mpmath.mpf(x.numerator) / x.denominator <= bound


@dataclass
class SpectrumReport:
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return sum(1 for _, ok in self.checks if ok)

    @property
    def failed(self):
        return sum(1 for _, ok in self.checks if not ok)


def verify_theorem1(params: CodeParams, q1_modes=Q1_MODES, g_list=None, oracle_mode="histogram"):
    """Per-k rows of exact counts, both centres, the oracle centre and the bound."""
    q, v = params.q, params.v
    N = q**v
    if g_list is None:
        g_list = g_sweep(params, "zero")
    if isinstance(q1_modes, str):
        q1_modes = (q1_modes,)
    hist_counts = None
    if oracle_mode == "histogram":
        hist_counts = zero_histogram(q, v)["counts"]
    oracle = {}
    for k in range(N):
        s = N - 1 - k
        total = hist_counts[s] if hist_counts is not None else m_v_closed_form(q, v, s)
        oracle[k] = Fraction(total, q**params.E)
    report = SpectrumReport()
    report.meta = {
        "zero_convention": "k = |D| - #{w != 0 : reversal(f - g)(w) = 0}",
        "oracle_mode": oracle_mode,
        "E": params.E,
        "eps_size": params.eps_ring.size,
    }
    # the oracle centre computed two ways, and its total mass
    closed_total = sum(oracle.values()) * q**params.E
    report.checks.append(("oracle_mass", closed_total == (q - 1) * q ** (N - 1)))
    report.checks.append(
        ("oracle_two_ways", all(oracle[k] == center_oracle(params, N - 1 - k, "closed") for k in range(N)))
    )
    bounds = {}
    for mode in q1_modes:
        for k in range(N):
            bounds[mode, k] = (
                theorem1_bound(params, k, mode, "statement"),
                theorem1_bound(params, k, mode, "proof"),
            )
    for label, g in g_list:
        poly = nk_exact(params, g, "poly")
        code = nk_exact(params, g, "code")
        report.checks.append((f"bridge[{label}]", bool(np.array_equal(poly, code))))
        report.checks.append((f"mass[{label}]", int(poly.sum()) == q ** (N - params.E)))
        for mode in q1_modes:
            for k in range(N):
                s = N - 1 - k
                exact = int(poly[k])
                c_thm, c_eq1, c_or = center_thm1(params, k), center_eq1(params, s), oracle[k]
                (b, deg), (bp, _) = bounds[mode, k]
                report.rows.append(
                    {
                        "q": q,
                        "v": v,
                        "d": params.d,
                        "ell": params.ell,
                        "k": k,
                        "s": s,
                        "exact_count": exact,
                        "center_thm1": c_thm,
                        "center_eq1": c_eq1,
                        "center_oracle": c_or,
                        "bound": b,
                        "holds_thm1": _frac_le(abs(exact - c_thm), b),
                        "holds_eq1": _frac_le(abs(exact - c_eq1), b),
                        "q1_mode": mode,
                        "g": label,
                        "code_count": int(code[k]),
                        "holds_oracle": _frac_le(abs(exact - c_or), b),
                        "bound_proof": bp,
                        "holds_oracle_proof": _frac_le(abs(exact - c_or), bp),
                        "degenerate_k": deg,
                    }
                )
    return report
