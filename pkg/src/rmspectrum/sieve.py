"""Distinct-coordinate sums via the signed permutation sieve.

For X in D^n and f on X, the sum of f over tuples with pairwise distinct
coordinates equals sum over tau in S_n of sgn(tau) * F_tau, where F_tau
sums f over the tuples of X fixed by tau.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import factorial, prod
from typing import Callable, Optional, Sequence

from sympy.utilities.iterables import partitions

DIRECT_LIMIT = 10**7


@dataclass
class SieveInstance:
    D: Sequence
    n: int
    f: Callable
    X: Optional[Callable] = None

    def in_X(self, x):
        return True if self.X is None else bool(self.X(x))

    def check_size(self, limit=DIRECT_LIMIT):
        cost = factorial(self.n) * len(self.D) ** self.n
        if cost > limit:
            raise ValueError(f"n! |D|^n = {cost} exceeds the direct bound {limit}")


def cycles_of(perm):
    seen, out = [False] * len(perm), []
    for i in range(len(perm)):
        if not seen[i]:
            c, j = [], i
            while not seen[j]:
                seen[j] = True
                c.append(j)
                j = perm[j]
            out.append(c)
    return out


def sign_of(perm):
    return (-1) ** (len(perm) - len(cycles_of(perm)))


def distinct_sum_direct(inst: SieveInstance):
    inst.check_size()
    total = 0
    for x in product(inst.D, repeat=inst.n):
        if len(set(x)) == inst.n and inst.in_X(x):
            total += inst.f(x)
    return total


def fixed_sum(inst: SieveInstance, perm):
    """F_tau: tuples constant on every cycle of tau, restricted to X."""
    cyc = cycles_of(perm)
    total = 0
    for vals in product(inst.D, repeat=len(cyc)):
        x = [None] * inst.n
        for c, a in zip(cyc, vals):
            for i in c:
                x[i] = a
        x = tuple(x)
        if inst.in_X(x):
            total += inst.f(x)
    return total


def sieve_terms(inst: SieveInstance):
    """(perm, sign, F_tau) for every tau in S_n."""
    inst.check_size()
    return [(perm, sign_of(perm), fixed_sum(inst, perm)) for perm in permutations(range(inst.n))]


def cycle_type_classes(n):
    """(cycle type as {length: multiplicity}, class size, sign) in a fixed order."""
    out = []
    for part in partitions(n):
        part = dict(part)
        size = factorial(n)
        for length, mult in part.items():
            size //= factorial(mult) * length**mult
        ncyc = sum(part.values())
        out.append((dict(sorted(part.items())), size, (-1) ** (n - ncyc)))
    out.sort(key=lambda t: sorted(t[0].items()))
    return out


def distinct_sum_sieve(inst: SieveInstance, symmetric_product: Optional[Callable] = None):
    """Signed permutation sum.

    With ``symmetric_product = h`` the instance is taken to be
    f(x) = prod h(x_i) on all of D^n, and the sum is aggregated by cycle
    type: F_tau = prod over cycles C of sum_x h(x)^{|C|}.
    """
    if symmetric_product is None:
        return sum(s * F for _, s, F in sieve_terms(inst))
    h = symmetric_product
    power_sums = {}
    total = 0
    for ctype, size, sgn in cycle_type_classes(inst.n):
        F = 1
        for length, mult in ctype.items():
            if length not in power_sums:
                power_sums[length] = sum(h(x) ** length for x in inst.D)
            F *= power_sums[length] ** mult
        total += sgn * size * F
    return total


def triangle_bound(inst: SieveInstance):
    return sum(abs(F) for _, _, F in sieve_terms(inst))


def egf_distinct_sum(power_sums, n):
    """n! e_n from the power sums p_1..p_n via Newton's identities.

    Equals n! [t^n] exp(sum_j (-1)^{j-1} p_j t^j / j), the cycle-index form
    of the signed sieve in product mode.  Works over Fraction or complex.
    """
    exact = all(isinstance(power_sums[i], (int, Fraction)) for i in range(1, n + 1))
    e = [Fraction(1) if exact else 1.0]
    for k in range(1, n + 1):
        acc = sum((-1) ** (i - 1) * e[k - i] * power_sums[i] for i in range(1, k + 1))
        e.append(Fraction(acc) / k if exact else acc / k)
    return factorial(n) * e[n]


def random_instance(rng, product_mode=False, max_D=5, max_n=4):
    """A random instance with |D| <= max_D and n <= max_n (f complex valued)."""
    size = int(rng.integers(1, max_D + 1))
    n = int(rng.integers(1, max_n + 1))
    D = list(range(size))
    if product_mode:
        hv = rng.normal(size=size) + 1j * rng.normal(size=size)
        h = lambda x, hv=hv: complex(hv[x])
        return SieveInstance(D, n, lambda x, h=h: prod(h(a) for a in x)), h
    table = rng.normal(size=(size,) * n) + 1j * rng.normal(size=(size,) * n)
    mask = rng.random(size=(size,) * n) < 0.7
    return SieveInstance(D, n, lambda x, t=table: complex(t[x]), lambda x, m=mask: bool(m[x])), None
