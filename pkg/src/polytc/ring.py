"""The graded GF(2) algebra H*(M_{n,n-2k}) in the T_{S,d} basis.

A class T_{S,d} is stored as a bitmask of its support (bit i-1 for V_i)
together with its degree.  Products are computed on these representatives
and reduced modulo the relations R_{L,d} on request; degree-wise echelon
data is built lazily and cached.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import DomainError
from .gf2 import Echelon, bits
from .parity import Case, binom_mod2, decompose


def support_mask(support: Iterable[int]) -> int:
    m = 0
    for i in support:
        m |= 1 << (i - 1)
    return m


def mask_support(mask: int) -> Tuple[int, ...]:
    return tuple(b + 1 for b in bits(mask))


def mask_sort_key(mask: int) -> Tuple[int, Tuple[int, ...]]:
    return (mask.bit_count(), mask_support(mask))


@dataclass(frozen=True)
class BasisClass:
    support: Tuple[int, ...]
    degree: int

    @classmethod
    def of(cls, support: Iterable[int], degree: int) -> "BasisClass":
        return cls(tuple(sorted(set(support))), degree)

    @property
    def mask(self) -> int:
        return support_mask(self.support)

    def __str__(self) -> str:
        s = "{" + ",".join(map(str, self.support)) + "}" if self.support else "∅"
        return f"T_{s},{self.degree}"


@dataclass(frozen=True)
class RingElement:
    """A homogeneous GF(2) sum of classes T_{S,degree}, keyed by support mask."""

    n: int
    k: int
    degree: int
    masks: FrozenSet[int] = frozenset()

    @property
    def terms(self) -> List[BasisClass]:
        return [BasisClass(mask_support(m), self.degree) for m in sorted(self.masks, key=mask_sort_key)]

    def is_zero(self) -> bool:
        return not self.masks

    def __add__(self, other: "RingElement") -> "RingElement":
        if (self.n, self.k) != (other.n, other.k):
            raise ValueError("elements of different rings")
        if self.degree != other.degree:
            if not self.masks:
                return other
            if not other.masks:
                return self
            raise ValueError("cannot add elements of different degrees")
        return RingElement(self.n, self.k, self.degree, self.masks ^ other.masks)

    def to_json(self) -> dict:
        return {"degree": self.degree, "terms": [list(b.support) for b in self.terms]}

    def __str__(self) -> str:
        return " + ".join(map(str, self.terms)) if self.masks else "0"


class FunctionalKind(str, enum.Enum):
    PHI1 = "PHI1"
    PHI2 = "PHI2"
    PHI3 = "PHI3"

    def degree(self, n: int) -> int:
        return n - 3 if self is FunctionalKind.PHI1 else n - 4


def functional_coeff(kind: FunctionalKind, n: int, k: int, size: int) -> int:
    """Value of the functional on any T_{S,deg} with |S| = size."""
    if kind is FunctionalKind.PHI3:
        return 1 if size < k - 1 else 0
    return binom_mod2(n - 2 - size, k - 1 - size)


@dataclass
class DegreeData:
    degree: int
    basis: List[int]
    index: Dict[int, int]
    relations: List[int] = field(repr=False)
    echelon: Echelon = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis) - self.echelon.rank


class GradedPresentation:
    """Per-degree basis, relation rows and echelon data for one (n, k)."""

    def __init__(self, n: int, k: int):
        self.n, self.k = n, k
        self._cache: Dict[int, DegreeData] = {}
        self._lock = threading.Lock()

    def check_degree(self, d: int) -> None:
        if not 0 <= d <= self.n - 3:
            raise DomainError("DEGREE", f"degree {d} outside 0..{self.n - 3}")

    def basis_masks(self, d: int) -> List[int]:
        self.check_degree(d)
        out = []
        for s in range(min(self.k - 1, d) + 1):
            for S in combinations(range(1, self.n), s):
                out.append(support_mask(S))
        return out

    def relation_supports(self, d: int) -> Iterator[Tuple[int, ...]]:
        self.check_degree(d)
        n, k = self.n, self.k
        for size in range(n - k, min(d + 1, n - 1) + 1):
            yield from combinations(range(1, n), size)

    def relation_row(self, L: Sequence[int], d: int, index: Dict[int, int]) -> int:
        row = 0
        for s in range(min(self.k - 1, d, len(L)) + 1):
            for S in combinations(L, s):
                row |= 1 << index[support_mask(S)]
        return row

    def degree(self, d: int) -> DegreeData:
        data = self._cache.get(d)
        if data is not None:
            return data
        with self._lock:
            data = self._cache.get(d)
            if data is None:
                basis = self.basis_masks(d)
                index = {m: i for i, m in enumerate(basis)}
                rows = [self.relation_row(L, d, index) for L in self.relation_supports(d)]
                data = DegreeData(d, basis, index, rows, Echelon(rows))
                self._cache[d] = data
        return data

    def dims(self) -> List[int]:
        return [self.degree(d).dim for d in range(self.n - 2)]


class CohomologyRing:
    """H*(M_{n,n-2k}; Z/2) for 2 < 2k < n."""

    def __init__(self, n: int, k: int):
        self.params = decompose(n, k)
        self.n, self.k = n, k
        self.top = n - 3
        self.presentation = GradedPresentation(n, k)

    # construction helpers -------------------------------------------------

    def element(self, degree: int, masks: Iterable[int] = ()) -> RingElement:
        acc = set()
        for m in masks:
            acc ^= {m}
        return RingElement(self.n, self.k, degree, frozenset(acc))

    def zero(self, degree: int) -> RingElement:
        return RingElement(self.n, self.k, degree)

    def T(self, support: Iterable[int], degree: int) -> RingElement:
        m = support_mask(support)
        if m.bit_count() > degree:
            raise DomainError("DEGREE", f"|S| = {m.bit_count()} exceeds degree {degree}")
        if m >> (self.n - 1):
            raise DomainError("DEGREE", f"support {tuple(support)} not inside 1..{self.n - 1}")
        if m.bit_count() >= self.k or degree > self.top:
            return self.zero(degree)
        return self.element(degree, [m])

    def R(self) -> RingElement:
        return self.T((), 1)

    def V(self, i: int) -> RingElement:
        return self.T((i,), 1)

    # presentation queries -------------------------------------------------

    def basis(self, d: int) -> List[BasisClass]:
        return [BasisClass(mask_support(m), d) for m in self.presentation.basis_masks(d)]

    def relations(self, d: int) -> List[RingElement]:
        pres = self.presentation
        out = []
        for L in pres.relation_supports(d):
            masks = [
                support_mask(S)
                for s in range(min(self.k - 1, d, len(L)) + 1)
                for S in combinations(L, s)
            ]
            out.append(self.element(d, masks))
        return out

    def dim_cohomology(self, d: int) -> int:
        return self.presentation.degree(d).dim

    def graded_dims(self) -> List[int]:
        return self.presentation.dims()

    def to_vector(self, x: RingElement) -> int:
        index = self.presentation.degree(x.degree).index
        v = 0
        for m in x.masks:
            v ^= 1 << index[m]
        return v

    def from_vector(self, d: int, v: int) -> RingElement:
        basis = self.presentation.degree(d).basis
        return self.element(d, (basis[i] for i in bits(v)))

    def reduce(self, x: RingElement) -> RingElement:
        if x.degree > self.top or not x.masks:
            return self.zero(x.degree)
        data = self.presentation.degree(x.degree)
        return self.from_vector(x.degree, data.echelon.reduce(self.to_vector(x)))

    def in_relation_span(self, x: RingElement) -> bool:
        return self.reduce(x).is_zero()

    # multiplication -------------------------------------------------------

    def multiply(self, x: RingElement, y: RingElement, reduced: bool = True) -> RingElement:
        d = x.degree + y.degree
        if d > self.top:
            return self.zero(d)
        limit = self.k - 1
        acc = set()
        for a in x.masks:
            for b in y.masks:
                m = a | b
                if m.bit_count() <= limit:
                    acc ^= {m}
        out = RingElement(self.n, self.k, d, frozenset(acc))
        return self.reduce(out) if reduced else out

    # functionals ----------------------------------------------------------

    def check_kind(self, kind: FunctionalKind) -> None:
        if kind is FunctionalKind.PHI3 and self.params.case is not Case.B_EVEN_D_ZERO:
            raise DomainError(
                "FUNCTIONAL",
                f"PHI3 is only defined when B is even and D = 0 (here case {self.params.case.value})",
            )

    def evaluate_functional(self, kind: FunctionalKind, x: RingElement) -> int:
        self.check_kind(kind)
        if x.degree != kind.degree(self.n):
            raise DomainError(
                "DEGREE", f"{kind.value} lives in degree {kind.degree(self.n)}, got {x.degree}"
            )
        total = 0
        for m in x.masks:
            total ^= functional_coeff(kind, self.n, self.k, m.bit_count())
        return total

    def check_functional(self, kind: FunctionalKind, exhaustive: Optional[bool] = None) -> bool:
        """True iff ``kind`` vanishes on every relation of its degree.

        A functional that depends only on |S| takes the same value on all
        R_{L,d} with the same |L|, so one L per size is evaluated term by
        term.  With ``exhaustive`` (default for n <= 11) every relation row is
        evaluated as well.  For PHI1/PHI2 the per-size values are also
        compared against the closed form C(|L| - n + k, k - 1).
        """
        self.check_kind(kind)
        n, k = self.n, self.k
        d = kind.degree(n)
        ok = True
        for size in range(n - k, min(d + 1, n - 1) + 1):
            L = tuple(range(1, size + 1))
            value = 0
            for s in range(min(k - 1, d, size) + 1):
                for _ in combinations(L, s):
                    value ^= functional_coeff(kind, n, k, s)
            if value:
                ok = False
            if kind is not FunctionalKind.PHI3:
                closed = binom_mod2(size - n + k, k - 1)
                summed = 0
                for i in range(0, k):
                    summed ^= binom_mod2(size, i) & binom_mod2(n - 2 - i, k - 1 - i)
                if summed != closed or closed != value:
                    ok = False
        if exhaustive is None:
            exhaustive = n <= 11
        if exhaustive:
            data = self.presentation.degree(d)
            coeffs = [functional_coeff(kind, n, k, m.bit_count()) for m in data.basis]
            for row in data.relations:
                value = 0
                for i in bits(row):
                    value ^= coeffs[i]
                if value:
                    return False
        return ok


def element_from_json(ring: CohomologyRing, obj: dict) -> RingElement:
    return ring.element(obj["degree"], (support_mask(S) for S in obj["terms"]))
