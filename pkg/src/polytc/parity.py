"""Mod-2 binomial arithmetic and the (n, k) parameter decomposition.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Optional, Union

from .errors import DomainError

#: float inputs to :func:`normalize_length` are compared with this slack
LENGTH_EPSILON = 1e-9


def binom_mod2(a: int, b: int) -> int:
    """Parity of C(a, b); zero whenever b < 0, b > a or a < 0."""
    if a < 0 or b < 0 or b > a:
        return 0
    return 1 if (a & b) == b else 0


def floor_lg(x: int) -> int:
    if x <= 0:
        raise ValueError(f"floor_lg needs a positive argument, got {x}")
    return x.bit_length() - 1


def is_power_of_two(x: int) -> bool:
    return x > 0 and (x & (x - 1)) == 0


class Case(str, enum.Enum):
    B_ODD = "B_ODD"
    B_EVEN_D_ZERO = "B_EVEN_D_ZERO"
    B_EVEN_SMALL_C = "B_EVEN_SMALL_C"
    B_EVEN_LARGE_C = "B_EVEN_LARGE_C"


@dataclass(frozen=True)
class ParamDecomp:
    n: int
    k: int
    t: int
    k0: int
    B: int
    D: int
    C: int
    case: Case
    ell: Optional[int] = None
    A: Optional[int] = None
    gamma: Optional[int] = None
    m: Optional[int] = None

    def check(self) -> None:
        """Raise AssertionError if any defining identity fails."""
        n, k, t = self.n, self.k, self.t
        assert k == 2**t + self.k0 and 1 <= self.k0 <= 2**t
        assert n == k + 1 + 2**t * self.B + self.D
        assert 0 <= self.D < 2**t and self.B >= 1
        assert self.C == self.k0 + self.D - 1
        assert n == 2**t * (self.B + 1) + self.C + 2
        assert self.case is select_case(self.B, self.C, self.D)
        if self.case is Case.B_EVEN_LARGE_C:
            assert self.C == 2 ** (self.ell + 1) * self.A + self.gamma
            assert 0 <= self.gamma < 2 ** (self.ell + 1)
            assert self.m == 2**t * (self.B + 1) + 2 ** (self.ell + 1) * self.A - 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["case"] = self.case.value
        return d


def select_case(B: int, C: int, D: int) -> Case:
    if B % 2 == 1:
        return Case.B_ODD
    if D == 0:
        return Case.B_EVEN_D_ZERO
    if C - 2 ** floor_lg(C) < 2 ** (1 + floor_lg(D)):
        return Case.B_EVEN_SMALL_C
    return Case.B_EVEN_LARGE_C


def check_study_range(n: int, k: int) -> None:
    if not (k >= 2 and n > 2 * k):
        raise DomainError(
            "OUT_OF_RANGE",
            f"(n, k) = ({n}, {k}) violates the hypothesis 2 < 2k < n",
        )


def decompose(n: int, k: int) -> ParamDecomp:
    check_study_range(n, k)
    # unique t with 2^t < k <= 2^(t+1)
    t = (k - 1).bit_length() - 1
    k0 = k - 2**t
    rest = n - k - 1
    B, D = divmod(rest, 2**t)
    C = k0 + D - 1
    case = select_case(B, C, D)
    extra = {}
    if case is Case.B_EVEN_LARGE_C:
        ell = floor_lg(D)
        A, gamma = divmod(C, 2 ** (ell + 1))
        extra = dict(ell=ell, A=A, gamma=gamma, m=2**t * (B + 1) + 2 ** (ell + 1) * A - 1)
    elif D > 0:
        extra = dict(ell=floor_lg(D))
    p = ParamDecomp(n=n, k=k, t=t, k0=k0, B=B, D=D, C=C, case=case, **extra)
    p.check()
    return p


def valid_pairs(n_max: int, n_min: int = 6):
    """All (n, k) with 2 <= k and 2k < n, n_min <= n <= n_max, ordered by (n, k)."""
    for n in range(max(n_min, 5), n_max + 1):
        for k in range(2, (n - 1) // 2 + 1):
            yield n, k


def normalize_length(n: int, r: Union[str, int, float, Fraction]) -> int:
    """Map a length r to the k with n-2k-1 < r < n-2k+1.

    Strings and Fractions are compared exactly; floats within
    LENGTH_EPSILON of an odd value of n - r count as non-generic.
    """
    if isinstance(r, float):
        if not math.isfinite(r):
            raise DomainError("OUT_OF_RANGE", f"r = {r} is not finite")
        eps = LENGTH_EPSILON
        x = Fraction(r)
    else:
        eps = 0
        x = Fraction(r)
    if n < 4:
        raise DomainError("OUT_OF_RANGE", f"n = {n} must be at least 4")
    if not (0 < x < n - 1):
        raise DomainError("OUT_OF_RANGE", f"r = {r} must satisfy 0 < r < n-1 = {n - 1}")
    gap = n - x
    nearest = round(gap)
    if nearest % 2 == 1 and abs(gap - nearest) <= eps:
        raise DomainError(
            "NON_GENERIC",
            f"n - r = {float(gap):g} is an odd integer; the space is not a manifold",
        )
    # k lies strictly between (n-r-1)/2 and (n-r+1)/2
    k = math.floor((gap + 1) / 2)
    if k == 1:
        raise DomainError(
            "K_ONE_UNSUPPORTED",
            f"r = {r} gives k = 1, the projective-space case RP^{n - 3}",
        )
    if 2 * k >= n:
        raise DomainError("K_TOO_LARGE", f"r = {r} gives k = {k} with 2k >= n = {n}")
    return k


def psi(i: int, n: int, k: int) -> int:
    return binom_mod2(n - 2 - i, k - 1 - i)


@dataclass
class SweepReport:
    name: str
    passed: bool
    cases: int
    counterexample: Optional[dict] = None

    def to_dict(self) -> dict:
        return asdict(self)


def verify_techlem(n_max: int) -> SweepReport:
    """Check the three-case evaluation of C(n-2-i, k-1-i) on every valid pair."""
    cases = 0
    for n, k in valid_pairs(n_max):
        p = decompose(n, k)
        checks = [(p.C + 1, 1)]
        checks += [(i, 0) for i in range(p.k0, p.C + 1)]
        if p.B % 2 == 1:
            checks += [(i, 0) for i in range(0, p.C + 1)]
        for i, want in checks:
            cases += 1
            got = psi(i, n, k)
            if got != want:
                return SweepReport(
                    "techlem", False, cases,
                    dict(n=n, k=k, i=i, expected=want, got=got),
                )
    return SweepReport("techlem", True, cases)


def bclem_value(t: int, B: int, C: int, j: int) -> int:
    top = 2 ** (t + 1) * (B + 1) - C - 3
    bottom = 2**t * (B + 1) - C - 1 + j
    return binom_mod2(top, bottom)


def verify_bclem(t_max: int, B_max: int) -> SweepReport:
    cases = 0
    for t in range(t_max + 1):
        for B in range(1, B_max + 1):
            for C in range(0, 2 ** (t + 1) - 1):
                want = int(is_power_of_two(B) and C == 2 ** (t + 1) - 2)
                for j in range(C + 1):
                    cases += 1
                    got = bclem_value(t, B, C, j)
                    if got != want:
                        return SweepReport(
                            "bclem", False, cases,
                            dict(t=t, B=B, C=C, j=j, expected=want, got=got),
                        )
    return SweepReport("bclem", True, cases)
