"""Brute-force model of H*(M_{n,n-2k}) as a quotient of a polynomial ring.

The ring is GF(2)[R, V_1, ..., V_{n-1}] modulo the ideal generated by

* V_S = ∏_{i in S} V_i for |S| = k,
* V_i^2 + V_i R,
* Σ_{S ⊆ L} V_S R^{|L|-1-|S|} for n-k <= |L| <= n-2.

Each degree slice of the ideal is spanned by generator × monomial products
and eliminated densely.  Nothing here shares code with the T-basis model
beyond the parameter check; it exists to cross-examine that model.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Dict, List, Optional, Tuple

from .errors import BudgetExceeded
from .parity import check_study_range
from .ring import CohomologyRing, RingElement, mask_support

log = logging.getLogger(__name__)

MAX_N = 9

Monomial = Tuple[int, ...]  # exponents of (R, V_1, ..., V_{n-1})
Poly = frozenset  # of Monomial, GF(2) coefficients


def _xor_into(acc: set, mono: Monomial) -> None:
    if mono in acc:
        acc.remove(mono)
    else:
        acc.add(mono)


def monomials(nvars: int, degree: int) -> List[Monomial]:
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def poly_mul_mono(p: Poly, m: Monomial) -> Poly:
    return frozenset(mono_mul(x, m) for x in p)


def ideal_generators(n: int, k: int, force: bool = False) -> Dict[str, List[Poly]]:
    check_study_range(n, k)
    _guard(n, force)
    nv = n

    def unit(i: int, e: int = 1) -> List[int]:
        v = [0] * nv
        v[i] = e
        return v

    squarefree = []
    for S in combinations(range(1, n), k):
        e = [0] * nv
        for i in S:
            e[i] = 1
        squarefree.append(frozenset({tuple(e)}))
    binomial = []
    for i in range(1, n):
        sq = unit(i, 2)
        mixed = unit(i)
        mixed[0] = 1
        binomial.append(frozenset({tuple(sq), tuple(mixed)}))
    lsums = []
    for size in range(n - k, n - 1):
        for L in combinations(range(1, n), size):
            acc: set = set()
            for s in range(size):  # T_{S,|L|-1} needs |S| <= |L|-1
                for S in combinations(L, s):
                    e = [0] * nv
                    e[0] = size - 1 - s
                    for i in S:
                        e[i] = 1
                    _xor_into(acc, tuple(e))
            lsums.append(frozenset(acc))
    return {"squarefree": squarefree, "binomial": binomial, "lsum": lsums}


def _guard(n: int, force: bool) -> None:
    if n > MAX_N:
        if not force:
            raise BudgetExceeded(f"oracle is limited to n <= {MAX_N}; pass force to override")
        log.warning("oracle forced at n = %d", n)


@dataclass
class IdealSlice:
    degree: int
    monomials: List[Monomial]
    index: Dict[Monomial, int]
    pivots: Dict[int, int] = field(default_factory=dict)

    def _vector(self, p) -> int:
        v = 0
        for m in p:
            v ^= 1 << self.index[m]
        return v

    def insert(self, p) -> None:
        v = self._vector(p)
        while v:
            lead = v.bit_length() - 1
            if lead not in self.pivots:
                self.pivots[lead] = v
                return
            v ^= self.pivots[lead]

    def residue(self, p) -> int:
        v = self._vector(p)
        for lead in sorted(self.pivots, reverse=True):
            if (v >> lead) & 1:
                v ^= self.pivots[lead]
        return v

    def contains(self, p) -> bool:
        return self.residue(p) == 0

    @property
    def quotient_dim(self) -> int:
        return len(self.monomials) - len(self.pivots)


class Oracle:
    """Degree slices 0..n-3 of the quotient ring."""

    def __init__(self, n: int, k: int, force: bool = False):
        self.n, self.k = n, k
        gens = ideal_generators(n, k, force=force)
        self.generators = [g for family in gens.values() for g in family]
        self._slices: Dict[int, IdealSlice] = {}

    def slice(self, d: int) -> IdealSlice:
        if d in self._slices:
            return self._slices[d]
        mons = monomials(self.n, d)
        sl = IdealSlice(d, mons, {m: i for i, m in enumerate(mons)})
        for g in self.generators:
            gd = sum(next(iter(g)))
            if gd > d:
                continue
            for m in monomials(self.n, d - gd):
                sl.insert(poly_mul_mono(g, m))
        self._slices[d] = sl
        return sl

    def dims(self) -> List[int]:
        return [self.slice(d).quotient_dim for d in range(self.n - 2)]

    def same_coset(self, p, q) -> bool:
        degs = {sum(m) for m in p} | {sum(m) for m in q}
        if not degs:
            return True
        (d,) = degs
        return self.slice(d).contains(set(p) ^ set(q))


def oracle_dims(n: int, k: int, force: bool = False) -> List[int]:
    return Oracle(n, k, force=force).dims()


def t_monomial(n: int, support: Tuple[int, ...], degree: int, extra: Optional[List[int]] = None) -> Monomial:
    """A monomial representing T_{S,degree}; ``extra`` spreads surplus degree onto V's."""
    e = [0] * n
    for i in support:
        e[i] = 1
    surplus = degree - len(support)
    if extra:
        for i in extra:
            e[i] += 1
        surplus -= len(extra)
    e[0] = surplus
    return tuple(e)


def element_poly(n: int, x: RingElement) -> frozenset:
    acc: set = set()
    for m in x.masks:
        _xor_into(acc, t_monomial(n, mask_support(m), x.degree))
    return frozenset(acc)


@dataclass
class CrossCheckReport:
    n: int
    k: int
    dims_fast: List[int]
    dims_oracle: List[int]
    products_checked: int
    identifications_checked: int
    problems: List[str]

    @property
    def passed(self) -> bool:
        return not self.problems

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "dims_fast": self.dims_fast,
            "dims_oracle": self.dims_oracle,
            "products_checked": self.products_checked,
            "identifications_checked": self.identifications_checked,
            "passed": self.passed,
            "problems": self.problems,
        }


def cross_check(n: int, k: int, trials: int = 100, seed: int = 7, force: bool = False) -> CrossCheckReport:
    oracle = Oracle(n, k, force=force)
    ring = CohomologyRing(n, k)
    rng = random.Random(f"oracle:{seed}:{n}:{k}")
    problems: List[str] = []
    top = n - 3

    dims_o = oracle.dims()
    dims_f = ring.graded_dims()
    if dims_o != dims_f:
        problems.append(f"graded dimensions differ: fast {dims_f} vs oracle {dims_o}")

    # (b) products of basis classes
    for _ in range(trials):
        d1 = rng.randint(0, top)
        d2 = rng.randint(0, top - d1)
        b1 = rng.choice(ring.basis(d1))
        b2 = rng.choice(ring.basis(d2))
        x, y = ring.T(b1.support, d1), ring.T(b2.support, d2)
        fast = ring.multiply(x, y)
        direct = frozenset({mono_mul(t_monomial(n, b1.support, d1), t_monomial(n, b2.support, d2))})
        if not oracle.same_coset(element_poly(n, fast), direct):
            problems.append(f"product {b1} * {b2} -> {fast} disagrees with the oracle")

    # (c) all monomials of a given support and degree agree
    for _ in range(trials):
        d = rng.randint(1, top)
        s = rng.randint(0, min(k - 1, d))
        S = tuple(sorted(rng.sample(range(1, n), s)))
        reps = []
        for _ in range(2):
            extra = [rng.choice((0,) + S) for _ in range(d - s)] if S else []
            extra_v = [i for i in extra if i != 0]
            reps.append(t_monomial(n, S, d, extra_v))
        if not oracle.same_coset({reps[0]}, {reps[1]}):
            problems.append(f"monomials {reps[0]} and {reps[1]} for T_{S},{d} are not identified")
    return CrossCheckReport(n, k, dims_f, dims_o, trials, trials, problems)
