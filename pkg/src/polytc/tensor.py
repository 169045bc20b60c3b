"""Arithmetic in H* ⊗ H* over GF(2) for products of zero-divisors.

Two engines live here:

* ``TensorElement`` and friends: an exact sparse model whose terms are pairs
  of T-basis representatives.  Terms with a side above degree n-3 or with a
  support of size >= k are dropped as soon as they appear.
* ``Profile``: a compressed model for factor lists whose V-generators are
  pairwise distinct.  Supports of different factors are then disjoint, so a
  product only needs (left degree, |S_left|, right degree, |S_right|), and
  the functionals only look at |S|.  This is what makes certificates for
  n in the high twenties cheap.

Neither engine reduces modulo the relations R_{L,d}; every functional used
here kills those relations, so evaluations are representative-independent.
``reduce_tensor`` gives the canonical form when a presentation is small
enough to build.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError
from .parity import Case, binom_mod2, decompose
from .ring import (
    BasisClass,
    CohomologyRing,
    FunctionalKind,
    functional_coeff,
    mask_sort_key,
    mask_support,
)

Bidegree = Tuple[int, int]
Pair = Tuple[int, int]  # (left support mask, right support mask)


@dataclass(frozen=True)
class H1Vector:
    """y = r·R + Σ v_i V_i; ``vmask`` has bit i-1 set for V_i."""

    r: int = 0
    vmask: int = 0

    @classmethod
    def R(cls) -> "H1Vector":
        return cls(1, 0)

    @classmethod
    def V(cls, i: int) -> "H1Vector":
        if i < 1:
            raise ValueError(f"generator index must be >= 1, got {i}")
        return cls(0, 1 << (i - 1))

    @classmethod
    def parse(cls, text: str) -> "H1Vector":
        """Parse sums like ``"R + V2 + V5"``."""
        y = cls()
        for tok in filter(None, (s.strip() for s in text.split("+"))):
            if tok == "R":
                y = y + cls.R()
            elif re.fullmatch(r"V\d+", tok):
                y = y + cls.V(int(tok[1:]))
            else:
                raise ValueError(f"cannot parse {tok!r} as R or V<i>")
        return y

    def __add__(self, other: "H1Vector") -> "H1Vector":
        return H1Vector(self.r ^ other.r, self.vmask ^ other.vmask)

    def is_zero(self) -> bool:
        return not self.r and not self.vmask

    @property
    def v_indices(self) -> Tuple[int, ...]:
        return mask_support(self.vmask)

    def term_masks(self) -> List[int]:
        out = [0] if self.r else []
        return out + [1 << (i - 1) for i in self.v_indices]

    def is_monomial(self) -> bool:
        return len(self.term_masks()) == 1

    def fits(self, n: int) -> bool:
        return self.vmask >> (n - 1) == 0

    def __str__(self) -> str:
        parts = (["R"] if self.r else []) + [f"V{i}" for i in self.v_indices]
        return " + ".join(parts) if parts else "0"


Factor = Tuple[H1Vector, int]


@dataclass(frozen=True)
class BiClass:
    left: BasisClass
    right: BasisClass

    def __str__(self) -> str:
        return f"{self.left}⊗{self.right}"


@dataclass(frozen=True)
class TensorElement:
    """GF(2) sum of T_{S,a} ⊗ T_{S',b}, grouped by bidegree (a, b).

    Treat as immutable; every operation returns a new element.
    """

    n: int
    k: int
    components: Dict[Bidegree, FrozenSet[Pair]] = field(default_factory=dict)

    def component(self, a: int, b: int) -> List[BiClass]:
        pairs = self.components.get((a, b), frozenset())
        ordered = sorted(pairs, key=lambda p: (mask_sort_key(p[0]), mask_sort_key(p[1])))
        return [BiClass(BasisClass(mask_support(l), a), BasisClass(mask_support(r), b)) for l, r in ordered]

    def is_zero(self) -> bool:
        return not any(self.components.values())

    def __len__(self) -> int:
        return sum(len(v) for v in self.components.values())

    def __add__(self, other: "TensorElement") -> "TensorElement":
        _same_ring(self, other)
        comps = dict(self.components)
        for bd, pairs in other.components.items():
            comps[bd] = comps.get(bd, frozenset()) ^ pairs
        return TensorElement(self.n, self.k, {bd: v for bd, v in comps.items() if v})

    def __mul__(self, other: "TensorElement") -> "TensorElement":
        return tensor_multiply(self, other)

    def swap(self) -> "TensorElement":
        return TensorElement(
            self.n,
            self.k,
            {(b, a): frozenset((r, l) for l, r in pairs) for (a, b), pairs in self.components.items()},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and _nonempty(self.components) == _nonempty(other.components)

    def __hash__(self) -> int:
        return hash((self.n, self.k, frozenset(_nonempty(self.components).items())))

    def to_json(self) -> dict:
        out = {}
        for a, b in sorted(bd for bd, v in self.components.items() if v):
            out[f"{a},{b}"] = [[list(c.left.support), list(c.right.support)] for c in self.component(a, b)]
        return {"components": out}

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        return " + ".join(str(c) for a, b in sorted(self.components) for c in self.component(a, b))


def _nonempty(comps: Dict[Bidegree, FrozenSet[Pair]]) -> Dict[Bidegree, FrozenSet[Pair]]:
    return {bd: v for bd, v in comps.items() if v}


def _same_ring(u: TensorElement, v: TensorElement) -> None:
    if (u.n, u.k) != (v.n, v.k):
        raise ValueError(f"tensor elements over different rings: {(u.n, u.k)} vs {(v.n, v.k)}")


def identity(n: int, k: int) -> TensorElement:
    return TensorElement(n, k, {(0, 0): frozenset({(0, 0)})})


def zero_divisor(y: H1Vector, n: int, k: int) -> TensorElement:
    """y ⊗ 1 + 1 ⊗ y."""
    if y.is_zero():
        raise ValueError("the zero class gives the zero zero-divisor")
    if not y.fits(n):
        raise DomainError("DEGREE", f"{y} uses a generator outside V1..V{n - 1}")
    terms = y.term_masks()
    return TensorElement(
        n,
        k,
        {(1, 0): frozenset((m, 0) for m in terms), (0, 1): frozenset((0, m) for m in terms)},
    )


def tensor_multiply(u: TensorElement, v: TensorElement) -> TensorElement:
    _same_ring(u, v)
    n, k = u.n, u.k
    top, limit = n - 3, k - 1
    acc: Dict[Bidegree, set] = {}
    for (a, b), us in u.components.items():
        for (c, d), vs in v.components.items():
            if a + c > top or b + d > top:
                continue
            target = acc.setdefault((a + c, b + d), set())
            for l1, r1 in us:
                for l2, r2 in vs:
                    l = l1 | l2
                    if l.bit_count() > limit:
                        continue
                    r = r1 | r2
                    if r.bit_count() > limit:
                        continue
                    key = (l, r)
                    if key in target:
                        target.remove(key)
                    else:
                        target.add(key)
    return TensorElement(n, k, {bd: frozenset(s) for bd, s in acc.items() if s})


def power(f: TensorElement, e: int) -> TensorElement:
    if e < 0:
        raise ValueError("negative exponent")
    result = identity(f.n, f.k)
    base = f
    while e:
        if e & 1:
            result = tensor_multiply(result, base)
        e >>= 1
        if e:
            base = tensor_multiply(base, base)
    return result


def expand(factors: Sequence[Factor], n: int, k: int) -> TensorElement:
    """∏ (y ⊗ 1 + 1 ⊗ y)^e over the factor list.

    Total exponent above 2n-6 always yields zero.
    """
    result = identity(n, k)
    for y, e in factors:
        if e == 0:
            continue
        result = tensor_multiply(result, power(zero_divisor(y, n, k), e))
        if result.is_zero():
            break
    return result


def check_pair_kinds(n: int, k: int, *kinds: FunctionalKind) -> None:
    case = decompose(n, k).case
    for kind in kinds:
        if kind is FunctionalKind.PHI3 and case is not Case.B_EVEN_D_ZERO:
            raise DomainError(
                "FUNCTIONAL", f"PHI3 is only defined when B is even and D = 0 (here case {case.value})"
            )


def pair_evaluate(kind_left: FunctionalKind, kind_right: FunctionalKind, x: TensorElement) -> int:
    """(φ_left ⊗ φ_right) applied to the matching bidegree component of x."""
    n, k = x.n, x.k
    check_pair_kinds(n, k, kind_left, kind_right)
    pairs = x.components.get((kind_left.degree(n), kind_right.degree(n)), frozenset())
    total = 0
    for l, r in pairs:
        total ^= functional_coeff(kind_left, n, k, l.bit_count()) & functional_coeff(
            kind_right, n, k, r.bit_count()
        )
    return total


def reduce_tensor(ring: CohomologyRing, x: TensorElement) -> TensorElement:
    """Canonical form of x: each side reduced modulo the relations."""
    if (ring.n, ring.k) != (x.n, x.k):
        raise ValueError("ring and tensor element disagree on (n, k)")
    cache: Dict[Tuple[int, int], FrozenSet[int]] = {}

    def red(mask: int, d: int) -> FrozenSet[int]:
        key = (mask, d)
        if key not in cache:
            cache[key] = ring.reduce(ring.element(d, [mask])).masks
        return cache[key]

    comps: Dict[Bidegree, FrozenSet[Pair]] = {}
    for (a, b), pairs in x.components.items():
        acc: Counter = Counter()
        for l, r in pairs:
            for l2 in red(l, a):
                for r2 in red(r, b):
                    acc[(l2, r2)] += 1
        kept = frozenset(p for p, c in acc.items() if c % 2)
        if kept:
            comps[(a, b)] = kept
    return TensorElement(x.n, x.k, comps)


# compressed engine ----------------------------------------------------------


def check_disjoint(factors: Sequence[Factor]) -> None:
    seen = 0
    for y, _ in factors:
        if not y.is_monomial():
            raise ValueError(f"profile engine needs single-generator factors, got {y}")
        if y.vmask & seen:
            raise ValueError(f"generator {y} appears in more than one factor")
        seen |= y.vmask


@dataclass
class Profile:
    """Parity of the number of terms T_{S,a} ⊗ T_{S',b} per (a, |S|, b, |S'|)."""

    n: int
    k: int
    table: np.ndarray  # uint8, shape (n-2, k, n-2, k)

    def is_zero(self) -> bool:
        return not self.table.any()

    def counts(self) -> Dict[Bidegree, int]:
        """Parity of the total term count per bidegree."""
        per = self.table.sum(axis=(1, 3)) % 2
        return {(int(a), int(b)): 1 for a, b in zip(*np.nonzero(per))}


def _group_terms(y: H1Vector, e: int) -> List[Tuple[int, int, int, int]]:
    is_v = 1 if y.vmask else 0
    out = []
    for f in range(e + 1):
        if binom_mod2(e, f):
            out.append((f, is_v if f else 0, e - f, is_v if e - f else 0))
    return out


def expand_profile(factors: Sequence[Factor], n: int, k: int) -> Profile:
    check_disjoint(factors)
    dims = n - 2
    table = np.zeros((dims, k, dims, k), dtype=np.uint8)
    table[0, 0, 0, 0] = 1
    for y, e in factors:
        if e == 0:
            continue
        if not y.fits(n):
            raise DomainError("DEGREE", f"{y} uses a generator outside V1..V{n - 1}")
        new = np.zeros_like(table)
        for a, s, b, t in _group_terms(y, e):
            if a >= dims or b >= dims:
                continue
            new[a:, s:, b:, t:] ^= table[: dims - a, : k - s, : dims - b, : k - t]
        table = new
        if not table.any():
            break
    return Profile(n, k, table)


def profile_evaluate(kind_left: FunctionalKind, kind_right: FunctionalKind, p: Profile) -> int:
    n, k = p.n, p.k
    check_pair_kinds(n, k, kind_left, kind_right)
    wl = np.array([functional_coeff(kind_left, n, k, s) for s in range(k)], dtype=np.int64)
    wr = np.array([functional_coeff(kind_right, n, k, s) for s in range(k)], dtype=np.int64)
    block = p.table[kind_left.degree(n), :, kind_right.degree(n), :].astype(np.int64)
    return int(wl @ block @ wr) % 2


def total_exponent(factors: Iterable[Factor]) -> int:
    return sum(e for _, e in factors)


def factors_from_spec(spec: Union[str, Sequence]) -> List[Factor]:
    """Parse ``"V1^3 * R^2"`` or ``[["V", 1, 3], ["R", 0, 2]]``."""
    out: List[Factor] = []
    if isinstance(spec, str):
        for chunk in filter(None, (c.strip() for c in spec.split("*"))):
            body, _, exp = chunk.partition("^")
            body = body.strip().strip("()")
            out.append((H1Vector.parse(body), int(exp) if exp else 1))
        return out
    for kind, idx, e in spec:
        out.append((H1Vector.R() if kind == "R" else H1Vector.V(int(idx)), int(e)))
    return out
