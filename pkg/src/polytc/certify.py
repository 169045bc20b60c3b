"""Witness products, lower-bound certificates and the vanishing check.

For every 2 < 2k < n a product of 2n-7 zero-divisors is built whose
(n-3, n-4) component pairs to 1 under (φ1 ⊗ φ2), or (φ1 ⊗ φ3) when B is
even and D = 0.  That gives zdcl >= 2n-7 and TC >= 2n-6; together with the
dimension bound TC <= 2n-5 the answer is pinned to an interval of width one.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import json
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .errors import BudgetExceeded, DomainError
from .parity import Case, ParamDecomp, binom_mod2, check_study_range, decompose
from .pointwise import MAX_N as POINTWISE_MAX_N
from .pointwise import pointwise_evaluate
from .ring import CohomologyRing, FunctionalKind
from .tensor import (
    Factor,
    H1Vector,
    expand,
    expand_profile,
    factors_from_spec,
    pair_evaluate,
    profile_evaluate,
    reduce_tensor,
    total_exponent,
)

log = logging.getLogger(__name__)

ENGINE_VERSION = f"polytc-{__version__}"
DEFAULT_SEED = 0xC0FFEE
EXHAUSTIVE_MAX_N = 8

PHI1, PHI2, PHI3 = FunctionalKind.PHI1, FunctionalKind.PHI2, FunctionalKind.PHI3


@dataclass(frozen=True)
class WitnessSpec:
    params: ParamDecomp
    factors: Tuple[Factor, ...]
    functional_pair: Tuple[FunctionalKind, FunctionalKind]

    @property
    def target_bidegree(self) -> Tuple[int, int]:
        n = self.params.n
        return (self.functional_pair[0].degree(n), self.functional_pair[1].degree(n))

    def factor_json(self) -> List[list]:
        out = []
        for y, e in self.factors:
            if y.vmask:
                out.append(["V", y.v_indices[0], e])
            else:
                out.append(["R", 0, e])
        return out


def build_witness(p: ParamDecomp, v_indices: Optional[Sequence[int]] = None) -> WitnessSpec:
    """The case-specific witness product.

    ``v_indices`` relabels the V-generators: entry j replaces V_{j+1}.  By
    default V1 carries the large exponent, V2..V_{C+1} the single factors and
    V_{C+2}..V_{2C+1} the squares.
    """
    n, k, t, B, C = p.n, p.k, p.t, p.B, p.C
    V, R = H1Vector.V, H1Vector.R
    if p.case is Case.B_EVEN_D_ZERO:
        plan = [(1, n - 3)] + [(i, 1) for i in range(2, k)]
        r_exp = n - k - 2
        pair = (PHI1, PHI3)
    else:
        main = 2**t * (B + 1) - 1 if p.case is not Case.B_EVEN_LARGE_C else p.m
        plan = [(1, main)] + [(i, 1) for i in range(2, C + 2)] + [(i, 2) for i in range(C + 2, 2 * C + 2)]
        if p.case is Case.B_EVEN_LARGE_C:
            r_exp = 2 * n - 7 - p.m - 3 * C
        else:
            r_exp = 2**t * (B + 1) - C - 2
        pair = (PHI1, PHI2)
    used = len(plan)
    if v_indices is None:
        v_indices = range(1, used + 1)
    v_indices = list(v_indices)
    assert len(v_indices) >= used and len(set(v_indices[:used])) == used, "need distinct V indices"
    assert all(1 <= i <= n - 1 for i in v_indices[:used]), f"generator overflow for n = {n}"
    assert r_exp >= 0, f"negative R exponent {r_exp}"
    factors = tuple((V(v_indices[i - 1]), e) for i, e in plan) + ((R(), r_exp),)
    w = WitnessSpec(p, factors, pair)
    assert total_exponent(w.factors) == 2 * n - 7, "witness degree audit failed"
    return w


def evaluate_witness(w: WitnessSpec, engine: str = "profile") -> int:
    n, k = w.params.n, w.params.k
    left, right = w.functional_pair
    if engine == "profile":
        return profile_evaluate(left, right, expand_profile(w.factors, n, k))
    if engine == "generic":
        return pair_evaluate(left, right, expand(w.factors, n, k))
    if engine == "pointwise":
        return pointwise_evaluate(left, right, w.factors, n, k)
    raise ValueError(f"unknown engine {engine!r}")


def experimental_unmodified_pairing(n: int, k: int) -> int:
    """(φ1 ⊗ φ2) on the B-even, D = 0 witness, for curiosity only.

    Nothing is asserted about the value; the certificate uses φ3 there.
    """
    p = decompose(n, k)
    if p.case is not Case.B_EVEN_D_ZERO:
        raise DomainError("FUNCTIONAL", f"only meaningful for case B_EVEN_D_ZERO, not {p.case.value}")
    w = build_witness(p)
    return profile_evaluate(PHI1, PHI2, expand_profile(w.factors, n, k))


@dataclass
class Certificate:
    n: int
    k: int
    params: ParamDecomp
    witness: WitnessSpec
    evaluation: int
    zdcl_lower: Optional[int]
    tc_lower: Optional[int]
    tc_upper: int
    engine_version: str = ENGINE_VERSION
    verified_at: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.evaluation == 1

    def to_json(self) -> dict:
        """Stable-order record; ``verified_at`` is kept out so files are reproducible."""
        return {
            "n": self.n,
            "k": self.k,
            "case": self.params.case.value,
            "factors": self.witness.factor_json(),
            "functionals": [f.value for f in self.witness.functional_pair],
            "evaluation": self.evaluation,
            "zdcl_lower": self.zdcl_lower,
            "tc_lower": self.tc_lower,
            "tc_upper": self.tc_upper,
            "engine_version": self.engine_version,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @property
    def cert_id(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def certify_lower(n: int, k: int, engine: str = "profile") -> Certificate:
    p = decompose(n, k)
    w = build_witness(p)
    value = evaluate_witness(w, engine)
    if value != 1:
        log.error("witness for (n, k) = (%d, %d) evaluated to %d", n, k, value)
    return Certificate(
        n=n,
        k=k,
        params=p,
        witness=w,
        evaluation=value,
        zdcl_lower=2 * n - 7 if value == 1 else None,
        tc_lower=2 * n - 6 if value == 1 else None,
        tc_upper=2 * n - 5,
        verified_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


@dataclass
class CertificateCheck:
    ok: bool
    problems: List[str]


def verify_certificate(obj: dict) -> CertificateCheck:
    """Replay a certificate record from its own factor list."""
    problems = []
    try:
        n, k = int(obj["n"]), int(obj["k"])
        p = decompose(n, k)
        factors = factors_from_spec(obj["factors"])
        left, right = (FunctionalKind(f) for f in obj["functionals"])
    except (KeyError, TypeError, ValueError) as exc:
        return CertificateCheck(False, [f"malformed certificate: {exc}"])
    if obj.get("case") != p.case.value:
        problems.append(f"case {obj.get('case')} does not match computed {p.case.value}")
    if total_exponent(factors) != 2 * n - 7:
        problems.append(f"factor exponents sum to {total_exponent(factors)}, not 2n-7 = {2 * n - 7}")
    try:
        value = profile_evaluate(left, right, expand_profile(factors, n, k))
    except (ValueError, DomainError) as exc:
        return CertificateCheck(False, problems + [f"cannot evaluate witness: {exc}"])
    if value != obj.get("evaluation"):
        problems.append(f"evaluation replays to {value}, certificate says {obj.get('evaluation')}")
    if value != 1:
        problems.append("witness does not evaluate to 1")
    expected = {"zdcl_lower": 2 * n - 7, "tc_lower": 2 * n - 6, "tc_upper": 2 * n - 5}
    if value == 1:
        for key, want in expected.items():
            if obj.get(key) != want:
                problems.append(f"{key} is {obj.get(key)}, expected {want}")
    return CertificateCheck(not problems, problems)


# vanishing of (2n-6)-fold products --------------------------------------------


class Strategy(str, enum.Enum):
    EXHAUSTIVE_MONOMIAL = "EXHAUSTIVE_MONOMIAL"
    RANDOM = "RANDOM"


@dataclass
class VanishingReport:
    n: int
    k: int
    strategy: Strategy
    sample_count: int
    seed: Optional[int]
    all_vanished: bool
    counterexample: Optional[List[str]] = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "strategy": self.strategy.value,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "all_vanished": self.all_vanished,
            "counterexample": self.counterexample,
        }


def sample_rng(seed: int, n: int, k: int, index: int) -> random.Random:
    """Per-sample stream; independent of how samples are split across workers."""
    return random.Random(f"{seed}:{n}:{k}:{index}")


def random_h1(rng: random.Random, n: int) -> H1Vector:
    while True:
        bits = rng.getrandbits(n)
        if bits:
            return H1Vector(bits & 1, bits >> 1)


def top_product_nonzero(factors: Sequence[Factor], n: int, k: int, engine: str) -> bool:
    """Whether the (n-3, n-3) part of the product is nonzero in H ⊗ H.

    H^{n-3} is one-dimensional and detected by φ1, so the fast engines test
    (φ1 ⊗ φ1).  The generic engine reduces the full expansion instead.
    """
    if engine == "profile":
        return profile_evaluate(PHI1, PHI1, expand_profile(factors, n, k)) == 1
    if engine == "pointwise":
        return pointwise_evaluate(PHI1, PHI1, factors, n, k) == 1
    if engine == "generic":
        ring = CohomologyRing(n, k)
        return not reduce_tensor(ring, expand(factors, n, k)).is_zero()
    raise ValueError(f"unknown engine {engine!r}")


def _describe(factors: Sequence[Factor]) -> List[str]:
    return [f"({y})^{e}" for y, e in factors]


def check_vanishing(
    n: int,
    k: int,
    strategy: Strategy = Strategy.RANDOM,
    samples: int = 500,
    seed: int = DEFAULT_SEED,
    force: bool = False,
    engine: Optional[str] = None,
) -> VanishingReport:
    check_study_range(n, k)
    strategy = Strategy(strategy)
    length = 2 * n - 6
    if strategy is Strategy.EXHAUSTIVE_MONOMIAL:
        if n > EXHAUSTIVE_MAX_N:
            if not force:
                raise BudgetExceeded(
                    f"exhaustive monomial search is limited to n <= {EXHAUSTIVE_MAX_N}; pass force to override"
                )
            log.warning("exhaustive monomial search forced at n = %d", n)
        engine = engine or "profile"
        gens = [H1Vector.R()] + [H1Vector.V(i) for i in range(1, n)]
        count = 0
        for combo in itertools.combinations_with_replacement(range(n), length):
            count += 1
            factors = [(gens[g], e) for g, e in sorted(Counter(combo).items())]
            if top_product_nonzero(factors, n, k, engine):
                return VanishingReport(n, k, strategy, count, None, False, _describe(factors))
        return VanishingReport(n, k, strategy, count, None, True)

    if engine is None:
        engine = "pointwise" if n <= POINTWISE_MAX_N else "generic"
    for i in range(samples):
        rng = sample_rng(seed, n, k, i)
        factors = [(random_h1(rng, n), 1) for _ in range(length)]
        if top_product_nonzero(factors, n, k, engine):
            return VanishingReport(n, k, strategy, i + 1, seed, False, _describe(factors))
    return VanishingReport(n, k, strategy, samples, seed, True)


def central_binomial_even(n_max: int = 64) -> bool:
    return all(binom_mod2(2 * n - 6, n - 3) == 0 for n in range(6, n_max + 1))


# summaries -----------------------------------------------------------------


@dataclass
class ZdclResult:
    n: int
    k: int
    value: int
    certificate: Certificate
    vanishing: VanishingReport
    defect: bool = field(default=False)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "zdcl": self.value,
            "defect": self.defect,
            "certificate": self.certificate.to_json(),
            "vanishing": self.vanishing.to_json(),
        }


def zdcl(
    n: int,
    k: int,
    strategy: Optional[Strategy] = None,
    samples: int = 500,
    seed: int = DEFAULT_SEED,
    force: bool = False,
) -> ZdclResult:
    cert = certify_lower(n, k)
    if strategy is None:
        strategy = Strategy.EXHAUSTIVE_MONOMIAL if n <= EXHAUSTIVE_MAX_N else Strategy.RANDOM
    van = check_vanishing(n, k, strategy, samples=samples, seed=seed, force=force)
    if cert.passed and van.all_vanished:
        return ZdclResult(n, k, 2 * n - 7, cert, van)
    # best verified lower bound: the witness if it passed, else the trivial
    # one-factor product y⊗1 + 1⊗y with y = R
    lower = 2 * n - 7 if cert.passed else 1
    return ZdclResult(n, k, lower, cert, van, defect=True)


@dataclass
class TCReport:
    n: int
    k: int
    lower: int
    upper: int
    basis: str

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "lower": self.lower, "upper": self.upper, "basis": self.basis}


def tc_bounds(n: int, k: int, certificate: Optional[Certificate] = None) -> TCReport:
    cert = certificate or certify_lower(n, k)
    if not cert.passed:
        raise RuntimeError(f"witness for (n, k) = ({n}, {k}) failed; no lower bound certified")
    return TCReport(n, k, cert.tc_lower, cert.tc_upper, cert.cert_id)
